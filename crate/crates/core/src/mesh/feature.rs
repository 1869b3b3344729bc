//! Feature-model bookkeeping: marked points, curves, and surfaces.
//!
//! A feature is a set of mesh entities sharing an identifier. Surface ids
//! partition the triangles; curve ids are 1-manifold chains of edges lying on
//! surface interfaces (or on the open boundary of the mesh); point ids mark
//! vertices to preserve. Identifiers live in three disjoint namespaces.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::SurfaceMesh;
use crate::error::MeshError;

/// Feature model expressed against a [`SurfaceMesh`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FeatureModel {
    /// point id -> vertex index
    pub points: BTreeMap<u32, u32>,
    /// curve id -> edges as vertex pairs (each pair sorted, list sorted)
    pub curves: BTreeMap<u32, Vec<(u32, u32)>>,
    /// surface id -> triangle indices (sorted)
    pub surfaces: BTreeMap<u32, Vec<u32>>,
}

/// Feature model expressed against a [`VolumeMesh`], in volume vertex ids.
/// Boundary extraction converts it into a [`FeatureModel`].
#[derive(Clone, Debug, Default)]
pub struct VolumeModel {
    pub points: BTreeMap<u32, u32>,
    pub curves: BTreeMap<u32, Vec<(u32, u32)>>,
    /// surface id -> boundary faces as (unordered) vertex triples
    pub surfaces: BTreeMap<u32, Vec<[u32; 3]>>,
}

/// Role of a vertex within the feature model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureRole {
    Point,
    OnCurve,
    SurfaceInterior,
}

/// Classification of a vertex: feature role, valence, regularity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VertexClass {
    pub role: FeatureRole,
    pub valence: usize,
    /// Surface-interior vertices are regular at valence 6; on-curve vertices
    /// at valence 4; feature points are never regular.
    pub regular: bool,
}

impl FeatureModel {
    /// Per-triangle surface id lookup; `None` where the partition is violated.
    pub fn triangle_surface_ids(&self, n_triangles: usize) -> Result<Vec<u32>, MeshError> {
        let mut ids = vec![None; n_triangles];
        for (&sid, tris) in &self.surfaces {
            for &t in tris {
                let slot = &mut ids[t as usize];
                if slot.is_some() {
                    return Err(MeshError::MultiTaggedBoundaryTriangle(t as usize));
                }
                *slot = Some(sid);
            }
        }
        ids.into_iter()
            .enumerate()
            .map(|(t, id)| id.ok_or(MeshError::UntaggedBoundaryTriangle(t)))
            .collect()
    }

    /// Lookup from (sorted) edge vertex pair to the id of the curve containing it.
    pub fn edge_curve_ids(&self) -> HashMap<(u32, u32), u32> {
        let mut map = HashMap::new();
        for (&cid, edges) in &self.curves {
            for &e in edges {
                map.insert(e, cid);
            }
        }
        map
    }

    /// Set of vertices lying on any feature curve.
    pub fn curve_vertices(&self) -> HashSet<u32> {
        let mut set = HashSet::new();
        for edges in self.curves.values() {
            for &(a, b) in edges {
                set.insert(a);
                set.insert(b);
            }
        }
        set
    }

    pub fn feature_point_vertices(&self) -> HashSet<u32> {
        self.points.values().copied().collect()
    }

    /// Curve ids incident to the given vertex.
    pub fn curves_at_vertex(&self, v: u32) -> Vec<u32> {
        let mut out = Vec::new();
        for (&cid, edges) in &self.curves {
            if edges.iter().any(|&(a, b)| a == v || b == v) {
                out.push(cid);
            }
        }
        out
    }

    /// The two neighbor vertices of `v` along the chain of `curve`; `None`
    /// for a missing side (open chain endpoint).
    pub fn curve_neighbors(&self, curve: u32, v: u32) -> [Option<u32>; 2] {
        let mut out = [None, None];
        let mut k = 0;
        if let Some(edges) = self.curves.get(&curve) {
            for &(a, b) in edges {
                let other = if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                };
                if let Some(o) = other {
                    if k < 2 {
                        out[k] = Some(o);
                    }
                    k += 1;
                }
            }
        }
        out
    }
}

/// Checks the feature-model invariants against a mesh.
///
/// Verifies the surface partition, that curve edges lie on surface interfaces
/// (or the open mesh boundary, every edge of which must be a curve edge),
/// that curves are 1-manifold chains whose open endpoints are feature points,
/// that crease junctions are feature points, and that no on-curve vertex is a
/// degenerate valence-2 strip tip.
pub fn validate_model(mesh: &SurfaceMesh, model: &FeatureModel) -> Result<(), MeshError> {
    let tri_ids = model.triangle_surface_ids(mesh.triangles().len())?;
    let points = model.feature_point_vertices();

    let mut all_edges: BTreeSet<(u32, u32)> = BTreeSet::new();
    for (&cid, edges) in &model.curves {
        let mut valence: BTreeMap<u32, usize> = BTreeMap::new();
        for &(a, b) in edges {
            if !all_edges.insert((a, b)) {
                return Err(MeshError::CurveNotManifold(cid));
            }
            let e = mesh
                .edge_between(a, b)
                .ok_or(MeshError::CurveEdgeOffInterface { id: cid, edge: (a, b) })?;
            let edge = mesh.edge(e);
            let on_interface = match edge.tris {
                [Some(t0), Some(t1)] => tri_ids[t0 as usize] != tri_ids[t1 as usize],
                [Some(_), None] => true, // open-boundary edges are always creases
                _ => false,
            };
            if !on_interface {
                return Err(MeshError::CurveEdgeOffInterface { id: cid, edge: (a, b) });
            }
            *valence.entry(a).or_insert(0) += 1;
            *valence.entry(b).or_insert(0) += 1;
        }
        for (&v, &k) in &valence {
            if k > 2 {
                return Err(MeshError::CurveNotManifold(cid));
            }
            if k == 1 && !points.contains(&v) {
                return Err(MeshError::CurveNotManifold(cid));
            }
        }
    }

    // crease junctions across curves must be feature points
    let mut global_valence: BTreeMap<u32, usize> = BTreeMap::new();
    for &(a, b) in &all_edges {
        *global_valence.entry(a).or_insert(0) += 1;
        *global_valence.entry(b).or_insert(0) += 1;
    }
    for (&v, &k) in &global_valence {
        if k > 2 && !points.contains(&v) {
            return Err(MeshError::Invalid(format!(
                "vertex {v} joins {k} crease edges but is not a feature point"
            )));
        }
    }

    // every open-boundary edge and every surface-interface edge must be
    // part of a curve
    for edge in mesh.edges() {
        let crease = match edge.tris {
            [Some(t0), Some(t1)] => tri_ids[t0 as usize] != tri_ids[t1 as usize],
            [Some(_), None] => true,
            _ => false,
        };
        if crease && !all_edges.contains(&edge.verts) {
            return Err(MeshError::CurveEdgeOffInterface {
                id: 0,
                edge: edge.verts,
            });
        }
    }

    let nv = mesh.vertices().len();
    for &v in model.points.values() {
        if v as usize >= nv {
            return Err(MeshError::VertexOutOfRange(v, nv));
        }
    }
    for v in model.curve_vertices() {
        if !points.contains(&v) && mesh.valence(v) == 2 {
            return Err(MeshError::DegenerateCreaseVertex(v));
        }
    }
    Ok(())
}

/// Traces maximal chains through the edge set, splitting at `junctions`.
/// Chains come out with sorted edge lists, ordered by their lowest edge.
fn trace_chains(
    edges: &BTreeSet<(u32, u32)>,
    junctions: &BTreeSet<u32>,
) -> Vec<Vec<(u32, u32)>> {
    let mut graph: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &(a, b) in edges {
        graph.entry(a).or_default().push(b);
        graph.entry(b).or_default().push(a);
    }
    let mut remaining = edges.clone();
    let mut chains: Vec<Vec<(u32, u32)>> = Vec::new();
    while let Some(&start_edge) = remaining.iter().next() {
        let mut chain = vec![start_edge];
        remaining.remove(&start_edge);
        for side in 0..2 {
            let mut cur = if side == 0 { start_edge.0 } else { start_edge.1 };
            loop {
                if junctions.contains(&cur) {
                    break;
                }
                let next_edge = graph[&cur]
                    .iter()
                    .map(|&n| super::sorted_pair(cur, n))
                    .find(|e| remaining.contains(e));
                match next_edge {
                    Some(e) => {
                        remaining.remove(&e);
                        chain.push(e);
                        cur = if e.0 == cur { e.1 } else { e.0 };
                    }
                    None => break,
                }
            }
        }
        chain.sort_unstable();
        chains.push(chain);
    }
    chains.sort_by_key(|c| c[0]);
    chains
}

/// Completes a partial model: surface-interface edges and open-boundary
/// edges not covered by any curve become new feature curves, and crease
/// junctions (curve-graph valence != 2) not yet marked become new feature
/// points. Ids continue after the largest existing id in each namespace.
pub fn complete_model(mesh: &SurfaceMesh, model: FeatureModel) -> Result<FeatureModel, MeshError> {
    let tri_ids = model.triangle_surface_ids(mesh.triangles().len())?;
    let mut declared: BTreeSet<(u32, u32)> = BTreeSet::new();
    for edges in model.curves.values() {
        declared.extend(edges.iter().copied());
    }
    let mut missing: BTreeSet<(u32, u32)> = BTreeSet::new();
    for edge in mesh.edges() {
        let crease = match edge.tris {
            [Some(t0), Some(t1)] => tri_ids[t0 as usize] != tri_ids[t1 as usize],
            [Some(_), None] => true,
            _ => false,
        };
        if crease && !declared.contains(&edge.verts) {
            missing.insert(edge.verts);
        }
    }

    let mut union_valence: BTreeMap<u32, usize> = BTreeMap::new();
    for &(a, b) in declared.iter().chain(missing.iter()) {
        *union_valence.entry(a).or_insert(0) += 1;
        *union_valence.entry(b).or_insert(0) += 1;
    }
    let mut junctions: BTreeSet<u32> = union_valence
        .iter()
        .filter(|(_, &k)| k != 2)
        .map(|(&v, _)| v)
        .collect();
    junctions.extend(model.points.values().copied());

    let mut out = model;
    let mut next_curve_id = out.curves.keys().max().map_or(1, |m| m + 1);
    for chain in trace_chains(&missing, &junctions) {
        out.curves.insert(next_curve_id, chain);
        next_curve_id += 1;
    }
    let marked: HashSet<u32> = out.points.values().copied().collect();
    let mut next_point_id = out.points.keys().max().map_or(1, |m| m + 1);
    for &v in &junctions {
        if !marked.contains(&v) {
            out.points.insert(next_point_id, v);
            next_point_id += 1;
        }
    }
    validate_model(mesh, &out)?;
    Ok(out)
}

/// Classifies a vertex by feature role, valence, and regularity.
pub fn classify_vertex(mesh: &SurfaceMesh, model: &FeatureModel, v: u32) -> VertexClass {
    let role = if model.feature_point_vertices().contains(&v) {
        FeatureRole::Point
    } else if model.curve_vertices().contains(&v) {
        FeatureRole::OnCurve
    } else {
        FeatureRole::SurfaceInterior
    };
    let valence = mesh.valence(v);
    let regular = match role {
        FeatureRole::SurfaceInterior => valence == 6,
        FeatureRole::OnCurve => valence == 4,
        FeatureRole::Point => false,
    };
    VertexClass {
        role,
        valence,
        regular,
    }
}

/// Infers curve and point features from per-triangle surface tags.
///
/// Curve edges are the interfaces between triangles with different surface
/// ids, plus any open-boundary edges of the mesh. Maximal chains through
/// curve-graph-valence-2 vertices become one curve each; vertices with curve
/// valence other than 2 become feature points. Chains are numbered in order
/// of their lowest edge, points in vertex order, both starting at 1.
pub fn infer_features(mesh: &SurfaceMesh, surface_ids: &[u32]) -> Result<FeatureModel, MeshError> {
    assert_eq!(surface_ids.len(), mesh.triangles().len());

    let mut surfaces: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for (t, &sid) in surface_ids.iter().enumerate() {
        surfaces.entry(sid).or_default().push(t as u32);
    }

    let mut curve_edges: BTreeSet<(u32, u32)> = BTreeSet::new();
    for edge in mesh.edges() {
        let crease = match edge.tris {
            [Some(t0), Some(t1)] => surface_ids[t0 as usize] != surface_ids[t1 as usize],
            [Some(_), None] => true,
            _ => false,
        };
        if crease {
            curve_edges.insert(edge.verts);
        }
    }

    // curve-graph valence
    let mut valence: BTreeMap<u32, usize> = BTreeMap::new();
    for &(a, b) in &curve_edges {
        *valence.entry(a).or_insert(0) += 1;
        *valence.entry(b).or_insert(0) += 1;
    }
    let junction: BTreeSet<u32> = valence
        .iter()
        .filter(|(_, &k)| k != 2)
        .map(|(&v, _)| v)
        .collect();

    let mut model = FeatureModel {
        points: BTreeMap::new(),
        curves: BTreeMap::new(),
        surfaces,
    };
    for (k, chain) in trace_chains(&curve_edges, &junction).into_iter().enumerate() {
        model.curves.insert(k as u32 + 1, chain);
    }
    for (k, &v) in junction.iter().enumerate() {
        model.points.insert(k as u32 + 1, v);
    }
    validate_model(mesh, &model)?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn sphere_single_surface_has_no_features() {
        let mesh = samples::uv_sphere(8, 6, 1.0);
        let ids = vec![1u32; mesh.triangles().len()];
        let model = infer_features(&mesh, &ids).unwrap();
        assert!(model.curves.is_empty());
        assert!(model.points.is_empty());
        assert_eq!(model.surfaces.len(), 1);
    }

    #[test]
    fn cube_six_ids_gives_twelve_curves_eight_points() {
        let (mesh, ids) = samples::cube_surface(3);
        let model = infer_features(&mesh, &ids).unwrap();
        assert_eq!(model.surfaces.len(), 6);
        assert_eq!(model.curves.len(), 12);
        assert_eq!(model.points.len(), 8);
        // brute-force: every curve edge separates two distinct face ids
        for edges in model.curves.values() {
            for &(a, b) in edges {
                let e = mesh.edge_between(a, b).unwrap();
                let [t0, t1] = mesh.edge(e).tris;
                assert_ne!(
                    ids[t0.unwrap() as usize],
                    ids[t1.unwrap() as usize]
                );
            }
        }
    }

    #[test]
    fn cylinder_three_ids_gives_two_closed_curves() {
        let (mesh, ids) = samples::cylinder_surface(12, 4, false);
        let model = infer_features(&mesh, &ids).unwrap();
        assert_eq!(model.surfaces.len(), 3);
        assert_eq!(model.curves.len(), 2);
        assert!(model.points.is_empty());
        for edges in model.curves.values() {
            assert_eq!(edges.len(), 12); // closed rim loop
        }
    }

    #[test]
    fn infer_is_deterministic_and_idempotent() {
        let (mesh, ids) = samples::cube_surface(2);
        let a = infer_features(&mesh, &ids).unwrap();
        let b = infer_features(&mesh, &ids).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn classify_roles() {
        let (mesh, ids) = samples::cube_surface(3);
        let model = infer_features(&mesh, &ids).unwrap();
        let corner = *model.points.values().next().unwrap();
        assert_eq!(
            classify_vertex(&mesh, &model, corner).role,
            FeatureRole::Point
        );
        // a structured grid interior vertex on a cube face is regular
        let interior = (0..mesh.vertices().len() as u32)
            .find(|&v| {
                classify_vertex(&mesh, &model, v).role == FeatureRole::SurfaceInterior
            })
            .unwrap();
        let class = classify_vertex(&mesh, &model, interior);
        assert_eq!(class.valence, 6);
        assert!(class.regular);
    }

    #[test]
    fn icosahedron_vertices_are_irregular() {
        let mesh = samples::icosahedron(1.0);
        let ids = vec![1u32; mesh.triangles().len()];
        let model = infer_features(&mesh, &ids).unwrap();
        let class = classify_vertex(&mesh, &model, 0);
        assert_eq!(class.valence, 5);
        assert!(!class.regular);
    }
}
