//! Feature-aware refinement and limit projection.
//!
//! Surfaces refine with Loop's scheme; feature curves with the cubic
//! Lane-Riesenfeld scheme (edge mask 1/2 1/2, vertex mask 1/8 6/8 1/8);
//! feature points stay fixed. The subdivision is hierarchical: a vertex on a
//! feature curve moves exactly as the same polyline refined on its own, so
//! curves do not depend on the surfaces they bound.
//!
//! [`compute_control_mesh`] solves the sparse limit system `L X^C = X^0` so
//! that the limit model interpolates the input vertices.

mod linsolve;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::f64::consts::PI;

use crate::error::{MeshError, SolveError};
use crate::geometry::Vec3;
use crate::mesh::{FeatureModel, SurfaceMesh};

/// Loop vertex weight per ring neighbor for valence `k`.
pub fn loop_omega(k: usize) -> f64 {
    assert!(k >= 3, "loop_omega needs valence >= 3");
    let c = 0.375 + 0.25 * (2.0 * PI / k as f64).cos();
    (0.625 - c * c) / k as f64
}

/// Limit-mask weight per ring neighbor for valence `k`.
pub fn loop_chi(k: usize) -> f64 {
    1.0 / (k as f64 + 3.0 / (8.0 * loop_omega(k)))
}

/// Limit position of a curve vertex from its polyline neighbors.
pub fn limit_position_curve(prev: Vec3, at: Vec3, next: Vec3) -> Vec3 {
    (prev + at * 4.0 + next) / 6.0
}

/// Limit position of a surface-interior vertex from its one-ring.
pub fn limit_position_surface(at: Vec3, ring: &[Vec3]) -> Result<Vec3, MeshError> {
    let k = ring.len();
    if k < 3 {
        return Err(MeshError::Invalid(format!(
            "surface limit mask needs valence >= 3, got {k}"
        )));
    }
    let chi = loop_chi(k);
    let sum = ring.iter().fold(Vec3::ZERO, |acc, &p| acc + p);
    Ok(at * (1.0 - k as f64 * chi) + sum * chi)
}

/// An ordered polyline with fixed (feature-point) vertices.
#[derive(Clone, Debug)]
pub struct Polyline {
    pub points: Vec<Vec3>,
    pub closed: bool,
    /// Vertices pinned under subdivision. Endpoints of an open polyline are
    /// always treated as pinned.
    pub fixed: Vec<bool>,
}

impl Polyline {
    pub fn open(points: Vec<Vec3>) -> Polyline {
        let fixed = vec![false; points.len()];
        Polyline {
            points,
            closed: false,
            fixed,
        }
    }

    pub fn n_edges(&self) -> usize {
        if self.closed {
            self.points.len()
        } else {
            self.points.len().saturating_sub(1)
        }
    }
}

/// One step of the cubic curve scheme: edges split at midpoints, interior
/// vertices move to (x_prev + 6 x + x_next)/8, pinned vertices stay.
pub fn subdivide_curve(polyline: &Polyline) -> Result<Polyline, MeshError> {
    let n = polyline.points.len();
    if polyline.n_edges() < 1 {
        return Err(MeshError::EmptyPolyline);
    }
    let pts = &polyline.points;
    let mut points = Vec::with_capacity(2 * n);
    let mut fixed = Vec::with_capacity(2 * n);
    let is_fixed = |i: usize| -> bool {
        polyline.fixed[i] || (!polyline.closed && (i == 0 || i == n - 1))
    };
    for i in 0..n {
        let moved = if is_fixed(i) {
            pts[i]
        } else {
            let prev = pts[(i + n - 1) % n];
            let next = pts[(i + 1) % n];
            (prev + pts[i] * 6.0 + next) / 8.0
        };
        points.push(moved);
        fixed.push(polyline.fixed[i]);
        let last_edge_end = if polyline.closed { n } else { n - 1 };
        if i < last_edge_end {
            points.push((pts[i] + pts[(i + 1) % n]) * 0.5);
            fixed.push(false);
        }
    }
    Ok(Polyline {
        points,
        closed: polyline.closed,
        fixed,
    })
}

/// Record of one surface refinement step, linking parents to children.
#[derive(Clone, Debug)]
pub struct SubdivisionTrace {
    /// Per (old) edge index: the vertex created at its midpoint.
    pub edge_midpoint: Vec<u32>,
    /// Per (old) triangle: its four children in order
    /// [corner 0, corner 1, corner 2, central].
    pub children: Vec<[u32; 4]>,
}

/// Classification used when applying the hierarchical masks.
struct CreaseInfo {
    /// sorted vertex pair -> crease (feature curve or open boundary)
    crease_edges: HashSet<(u32, u32)>,
    /// vertex -> its (up to 2) crease neighbors
    crease_neighbors: HashMap<u32, Vec<u32>>,
    feature_points: HashSet<u32>,
}

fn crease_info(mesh: &SurfaceMesh, model: &FeatureModel) -> Result<CreaseInfo, MeshError> {
    let mut crease_edges: HashSet<(u32, u32)> = HashSet::new();
    for edges in model.curves.values() {
        crease_edges.extend(edges.iter().copied());
    }
    for edge in mesh.edges() {
        if edge.is_boundary() {
            crease_edges.insert(edge.verts);
        }
    }
    let mut crease_neighbors: HashMap<u32, Vec<u32>> = HashMap::new();
    for &(a, b) in &crease_edges {
        crease_neighbors.entry(a).or_default().push(b);
        crease_neighbors.entry(b).or_default().push(a);
    }
    let mut feature_points: HashSet<u32> = model.points.values().copied().collect();
    for (&v, n) in &crease_neighbors {
        if n.len() > 2 && !feature_points.contains(&v) {
            return Err(MeshError::Invalid(format!(
                "vertex {v} joins {} crease edges but is not a feature point",
                n.len()
            )));
        }
        if n.len() > 2 {
            feature_points.insert(v);
        }
    }
    for (&v, n) in &crease_neighbors {
        if n.len() == 2 && !feature_points.contains(&v) && mesh.valence(v) == 2 {
            return Err(MeshError::DegenerateCreaseVertex(v));
        }
    }
    Ok(CreaseInfo {
        crease_edges,
        crease_neighbors,
        feature_points,
    })
}

/// One hierarchical refinement step: 1-to-4 triangle split with Loop masks on
/// surface entities, curve masks on feature curves, fixed feature points.
/// The refined model re-tags children with their parents' ids.
pub fn subdivide_surface(
    mesh: &SurfaceMesh,
    model: &FeatureModel,
) -> Result<(SurfaceMesh, FeatureModel, SubdivisionTrace), MeshError> {
    let info = crease_info(mesh, model)?;
    let nv = mesh.vertices().len();

    let mut vertices = Vec::with_capacity(nv + mesh.edges().len());
    for v in 0..nv as u32 {
        let p = mesh.vertex(v);
        let moved = if info.feature_points.contains(&v) {
            p
        } else if let Some(nbrs) = info.crease_neighbors.get(&v) {
            debug_assert_eq!(nbrs.len(), 2);
            (mesh.vertex(nbrs[0]) + p * 6.0 + mesh.vertex(nbrs[1])) / 8.0
        } else {
            let ring = mesh.ring(v);
            let k = ring.valence();
            let omega = loop_omega(k);
            let sum = ring
                .neighbors
                .iter()
                .fold(Vec3::ZERO, |acc, &w| acc + mesh.vertex(w));
            p * (1.0 - k as f64 * omega) + sum * omega
        };
        vertices.push(moved);
    }

    let mut edge_midpoint = Vec::with_capacity(mesh.edges().len());
    for (ei, edge) in mesh.edges().iter().enumerate() {
        let (a, b) = edge.verts;
        let pa = mesh.vertex(a);
        let pb = mesh.vertex(b);
        let p = if info.crease_edges.contains(&edge.verts) {
            (pa + pb) * 0.5
        } else {
            let [c, d] = mesh.wing_vertices(ei as u32);
            let (c, d) = match (c, d) {
                (Some(c), Some(d)) => (c, d),
                _ => {
                    return Err(MeshError::Invalid(format!(
                        "interior edge ({a}, {b}) lacks two incident triangles"
                    )))
                }
            };
            (pa + pb) * 0.375 + (mesh.vertex(c) + mesh.vertex(d)) * 0.125
        };
        edge_midpoint.push((nv + ei) as u32);
        vertices.push(p);
    }

    let mut triangles = Vec::with_capacity(4 * mesh.triangles().len());
    let mut children = Vec::with_capacity(mesh.triangles().len());
    for t in mesh.triangles() {
        let [v0, v1, v2] = *t;
        let m01 = edge_midpoint[mesh.edge_between(v0, v1).unwrap() as usize];
        let m12 = edge_midpoint[mesh.edge_between(v1, v2).unwrap() as usize];
        let m20 = edge_midpoint[mesh.edge_between(v2, v0).unwrap() as usize];
        let base = triangles.len() as u32;
        triangles.push([v0, m01, m20]);
        triangles.push([v1, m12, m01]);
        triangles.push([v2, m20, m12]);
        triangles.push([m01, m12, m20]);
        children.push([base, base + 1, base + 2, base + 3]);
    }

    let refined = SurfaceMesh::new(vertices, triangles)?;

    let mut curves: BTreeMap<u32, Vec<(u32, u32)>> = BTreeMap::new();
    for (&cid, edges) in &model.curves {
        let mut out = Vec::with_capacity(edges.len() * 2);
        for &(a, b) in edges {
            let m = edge_midpoint[mesh.edge_between(a, b).unwrap() as usize];
            out.push(crate::mesh::sorted_pair(a, m));
            out.push(crate::mesh::sorted_pair(m, b));
        }
        out.sort_unstable();
        curves.insert(cid, out);
    }
    let mut surfaces: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for (&sid, tris) in &model.surfaces {
        let mut out = Vec::with_capacity(tris.len() * 4);
        for &t in tris {
            out.extend_from_slice(&children[t as usize]);
        }
        out.sort_unstable();
        surfaces.insert(sid, out);
    }
    let refined_model = FeatureModel {
        points: model.points.clone(),
        curves,
        surfaces,
    };

    Ok((
        refined,
        refined_model,
        SubdivisionTrace {
            edge_midpoint,
            children,
        },
    ))
}

/// Limit positions of every vertex under the hierarchical scheme: feature
/// points stay, on-curve vertices use the curve limit mask along their
/// crease, surface vertices use the Loop limit mask.
pub fn limit_mesh_positions(
    mesh: &SurfaceMesh,
    model: &FeatureModel,
) -> Result<Vec<Vec3>, MeshError> {
    let info = crease_info(mesh, model)?;
    let mut out = Vec::with_capacity(mesh.vertices().len());
    for v in 0..mesh.vertices().len() as u32 {
        let p = mesh.vertex(v);
        let lp = if info.feature_points.contains(&v) {
            p
        } else if let Some(nbrs) = info.crease_neighbors.get(&v) {
            limit_position_curve(mesh.vertex(nbrs[0]), p, mesh.vertex(nbrs[1]))
        } else {
            let ring: Vec<Vec3> = mesh
                .ring(v)
                .neighbors
                .iter()
                .map(|&w| mesh.vertex(w))
                .collect();
            limit_position_surface(p, &ring)?
        };
        out.push(lp);
    }
    Ok(out)
}

/// Control mesh whose limit interpolates the input vertex positions.
#[derive(Clone, Debug)]
pub struct ControlMesh {
    pub mesh: SurfaceMesh,
    /// Infinity-norm residual of the limit system, absolute.
    pub residual: f64,
}

/// Solves `L X^C = X^0` where the rows of `L` are the limit masks: identity
/// for feature points, the curve limit mask for on-curve vertices, the Loop
/// limit mask otherwise. The residual bound is 1e-10 times the bounding-box
/// diagonal.
pub fn compute_control_mesh(
    mesh: &SurfaceMesh,
    model: &FeatureModel,
) -> Result<ControlMesh, SolveError> {
    let info =
        crease_info(mesh, model).map_err(|e| SolveError::Singular(format!("invalid model: {e}")))?;
    let n = mesh.vertices().len();
    let mut rows: Vec<Vec<(u32, f64)>> = Vec::with_capacity(n);
    for v in 0..n as u32 {
        if info.feature_points.contains(&v) {
            rows.push(vec![(v, 1.0)]);
        } else if let Some(nbrs) = info.crease_neighbors.get(&v) {
            rows.push(vec![
                (v, 4.0 / 6.0),
                (nbrs[0], 1.0 / 6.0),
                (nbrs[1], 1.0 / 6.0),
            ]);
        } else {
            let ring = mesh.ring(v);
            let k = ring.valence();
            let chi = loop_chi(k);
            let mut row = vec![(v, 1.0 - k as f64 * chi)];
            row.extend(ring.neighbors.iter().map(|&w| (w, chi)));
            rows.push(row);
        }
    }
    let a = linsolve::Csr::from_rows(&rows);
    let rhs: Vec<Vec<f64>> = (0..3)
        .map(|c| mesh.vertices().iter().map(|p| p[c]).collect())
        .collect();
    let tol = 1e-10 * mesh.bounding_box().diagonal().max(f64::MIN_POSITIVE);
    let sols = linsolve::solve(&a, &rhs, tol)?;

    let mut buf = vec![0.0; n];
    let mut residual = 0.0_f64;
    for (x, b) in sols.iter().zip(&rhs) {
        a.mul_vec(x, &mut buf);
        for i in 0..n {
            residual = residual.max((buf[i] - b[i]).abs());
        }
    }
    let control_positions: Vec<Vec3> = (0..n)
        .map(|i| crate::geometry::vec3(sols[0][i], sols[1][i], sols[2][i]))
        .collect();
    Ok(ControlMesh {
        mesh: mesh.with_vertices(control_positions),
        residual,
    })
}
