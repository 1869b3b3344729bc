//! Volume curving: feature smoothing, degree elevation, boundary
//! replacement, transfinite accommodation, and staged quality reporting.
//!
//! The pipeline extracts the boundary, curves it as a surface mesh
//! interpolating the limit model, elevates the volume straight-sided,
//! replaces the boundary nodes by the curved surface nodes (bitwise, shared
//! correspondence), and accommodates the curvature into every tetrahedron
//! touching a relocated node, hierarchically: edges, then faces, then
//! interiors. Quality is reported before and after the accommodation; a
//! final optimization hook only reports the残 invalid elements, wiring an
//! external optimizer is an integration point.

pub mod quality;
mod tfi;
mod topology;

pub use quality::{QualityReport, TetQualityKernel, TriQualityKernel};
pub use tfi::{tfi_edge, tfi_face, tfi_tet, EdgeRestriction, FaceRestriction, TetTfiMaps};
pub use topology::{build_volume_topology, VolumeTopology};

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis1d::Lagrange1d;
use crate::error::{PipelineError, SmoothingError};
use crate::geometry::Vec3;
use crate::homesh::{generate_ho_surface_mesh, ElementKind, HighOrderMesh, HoModel};
use crate::lagrange::{TetLagrange, TriLagrange};
use crate::lattice::{self, TetEntity};
use crate::mesh::{
    extract_boundary, sorted_pair, BoundaryCorrespondence, FeatureModel, SurfaceMesh, VolumeMesh,
    VolumeModel,
};
use crate::nodes::{make_distribution, tet_equispaced, NodalDistribution, NodeKind};

/// Feature ids to smooth: curves first, then points.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SmoothingPlan {
    #[serde(default)]
    pub curves: Vec<u32>,
    #[serde(default)]
    pub points: Vec<u32>,
}

impl SmoothingPlan {
    pub fn is_empty(&self) -> bool {
        self.curves.is_empty() && self.points.is_empty()
    }
}

/// Removes the planned features and merges their incident features, keeping
/// the smallest id among merged entities. Mesh geometry and connectivity are
/// untouched; only the bookkeeping changes. Curves are processed before
/// points, each in ascending id order.
pub fn smooth_features(
    mesh: &SurfaceMesh,
    model: &FeatureModel,
    plan: &SmoothingPlan,
) -> Result<FeatureModel, SmoothingError> {
    let mut out = model.clone();
    let tri_ids = model
        .triangle_surface_ids(mesh.triangles().len())
        .map_err(|_| SmoothingError::UnknownId {
            kind: "surface",
            id: 0,
        })?;

    let mut curves_plan: Vec<u32> = plan.curves.clone();
    curves_plan.sort_unstable();
    curves_plan.dedup();
    for cid in curves_plan {
        let edges = out
            .curves
            .remove(&cid)
            .ok_or(SmoothingError::UnknownId { kind: "curve", id: cid })?;
        // surfaces incident to the curve
        let mut incident: BTreeSet<u32> = BTreeSet::new();
        for &(a, b) in &edges {
            if let Some(e) = mesh.edge_between(a, b) {
                for t in mesh.edge(e).tris.iter().flatten() {
                    // the triangle may have been re-tagged by an earlier merge
                    let original = tri_ids[*t as usize];
                    let current = out
                        .surfaces
                        .iter()
                        .find(|(_, tris)| tris.binary_search(t).is_ok())
                        .map(|(&sid, _)| sid)
                        .unwrap_or(original);
                    incident.insert(current);
                }
            }
        }
        if incident.len() > 1 {
            let target = *incident.iter().next().unwrap();
            let mut merged: Vec<u32> = Vec::new();
            for sid in &incident {
                if let Some(mut tris) = out.surfaces.remove(sid) {
                    merged.append(&mut tris);
                }
            }
            merged.sort_unstable();
            out.surfaces.insert(target, merged);
        }
    }

    let mut points_plan: Vec<u32> = plan.points.clone();
    points_plan.sort_unstable();
    points_plan.dedup();
    for pid in points_plan {
        let v = *out
            .points
            .get(&pid)
            .ok_or(SmoothingError::UnknownId { kind: "point", id: pid })?;
        let incident: Vec<u32> = out
            .curves
            .iter()
            .filter(|(_, edges)| edges.iter().any(|&(a, b)| a == v || b == v))
            .map(|(&cid, _)| cid)
            .collect();
        match incident.len() {
            0 => {
                out.points.remove(&pid);
            }
            2 => {
                out.points.remove(&pid);
                let target = incident[0].min(incident[1]);
                let other = incident[0].max(incident[1]);
                let mut edges = out.curves.remove(&other).unwrap();
                out.curves.get_mut(&target).unwrap().append(&mut edges);
                out.curves.get_mut(&target).unwrap().sort_unstable();
            }
            n => {
                return Err(SmoothingError::PointIncidence { id: pid, count: n });
            }
        }
    }
    Ok(out)
}

/// Result of the volume curving pipeline.
pub struct CurvedVolume {
    /// The curved degree-q tetrahedral mesh. Its model carries the feature
    /// points and curves in volume node ids; the degree-q surfaces live on
    /// [`CurvedVolume::surface`].
    pub volume: HighOrderMesh,
    /// The curved boundary surface mesh with the full degree-q model.
    pub surface: HighOrderMesh,
    /// The (possibly smoothed) linear boundary model.
    pub boundary_model: FeatureModel,
    /// The linear boundary mesh.
    pub boundary_mesh: SurfaceMesh,
    pub correspondence: BoundaryCorrespondence,
    /// Per surface node: the volume node carrying the same coordinates.
    pub surface_to_volume_node: Vec<u32>,
    /// Staged quality reports: boundary, volume pre-TFI, volume post-TFI.
    pub reports: Vec<QualityReport>,
    /// Elements still inverted after the accommodation (input for an
    /// external optimizer).
    pub invalid_elements: Vec<u32>,
    /// The straight-boundary-replaced mesh before accommodation, for stage
    /// dumps.
    pub pre_tfi_nodes: Vec<Vec3>,
}

/// Algorithm wrapper: smooth the planned features, then generate the curved
/// volume mesh.
pub fn curve_volume_mesh(
    mesh: &VolumeMesh,
    model: &VolumeModel,
    q: usize,
    plan: &SmoothingPlan,
    kind: NodeKind,
) -> Result<CurvedVolume, PipelineError> {
    let (bmesh, bmodel, corr) = extract_boundary(mesh, model)?;
    let bmodel = crate::mesh::complete_model(&bmesh, bmodel)?;
    let smoothed = smooth_features(&bmesh, &bmodel, plan)?;
    generate_with_boundary(mesh, bmesh, smoothed, corr, q, kind)
}

/// Generates the curved volume mesh without feature smoothing.
pub fn generate_ho_volume_mesh(
    mesh: &VolumeMesh,
    model: &VolumeModel,
    q: usize,
    kind: NodeKind,
) -> Result<CurvedVolume, PipelineError> {
    let (bmesh, bmodel, corr) = extract_boundary(mesh, model)?;
    let bmodel = crate::mesh::complete_model(&bmesh, bmodel)?;
    generate_with_boundary(mesh, bmesh, bmodel, corr, q, kind)
}

fn generate_with_boundary(
    mesh: &VolumeMesh,
    bmesh: SurfaceMesh,
    bmodel: FeatureModel,
    corr: BoundaryCorrespondence,
    q: usize,
    kind: NodeKind,
) -> Result<CurvedVolume, PipelineError> {
    let surface_dist = make_distribution(q, kind)?;
    let (surface, _evaluator) = generate_ho_surface_mesh(&bmesh, &bmodel, q, &surface_dist, 0)?;
    curve_volume_with_surface(mesh, bmesh, bmodel, corr, surface, q, kind)
}

/// Runs the volume stage of the pipeline against an already-curved boundary
/// surface mesh (same topology as `bmesh`): degree elevation, boundary
/// replacement, accommodation, staged quality.
pub fn curve_volume_with_surface(
    mesh: &VolumeMesh,
    bmesh: SurfaceMesh,
    bmodel: FeatureModel,
    corr: BoundaryCorrespondence,
    surface: HighOrderMesh,
    q: usize,
    kind: NodeKind,
) -> Result<CurvedVolume, PipelineError> {
    let surface_dist = make_distribution(q, kind)?;

    // boundary quality report
    let tri_kernel = {
        let basis = TriLagrange::new(q, &surface_dist.points);
        TriQualityKernel::new(&basis, q)
    };
    let boundary_quality: Vec<f64> = (0..surface.elements.len())
        .into_par_iter()
        .map(|t| {
            let tri = bmesh.triangle(t as u32);
            let corners = [
                bmesh.vertex(tri[0]),
                bmesh.vertex(tri[1]),
                bmesh.vertex(tri[2]),
            ];
            let nodes: Vec<Vec3> = surface.elements[t]
                .iter()
                .map(|&n| surface.nodes[n as usize])
                .collect();
            tri_kernel.quality(&nodes, corners)
        })
        .collect();
    let mut reports = vec![QualityReport::from_elements("boundary", boundary_quality)];

    // straight-sided elevation
    let topo = build_volume_topology(mesh, q);
    let tet_dist = tet_equispaced(q);
    let mut nodes = vec![Vec3::ZERO; topo.n_nodes];
    let mut claimed = vec![false; topo.n_nodes];
    for (ti, tet) in mesh.tets().iter().enumerate() {
        let corners = [
            mesh.vertex(tet[0]),
            mesh.vertex(tet[1]),
            mesh.vertex(tet[2]),
            mesh.vertex(tet[3]),
        ];
        for (slot, &id) in topo.elements[ti].iter().enumerate() {
            if !claimed[id as usize] {
                claimed[id as usize] = true;
                let l = tet_dist.points[slot];
                nodes[id as usize] =
                    corners[0] * l[0] + corners[1] * l[1] + corners[2] * l[2] + corners[3] * l[3];
            }
        }
    }

    // boundary replacement: bitwise surface coordinates, shared ids
    let tet_slot = topology::tet_slot_ordinals(q);
    let mut surf_to_vol_node = vec![u32::MAX; surface.nodes.len()];
    let mut replaced: HashSet<u32> = HashSet::new();
    let mut tet_ref_override: HashMap<u32, Vec<(u32, [f64; 4])>> = HashMap::new();
    let surface_multis = lattice::tri_multi_indices(q);
    for (bt, &(tet_idx, face)) in corr.tri_to_tet_face.iter().enumerate() {
        let tri = bmesh.triangle(bt as u32);
        let tet = mesh.tets()[tet_idx as usize];
        // local corner of the tet for each surface triangle corner
        let mut corner_slot = [0usize; 3];
        for (k, &sv) in tri.iter().enumerate() {
            let vv = corr.surface_to_volume_vertex[sv as usize];
            corner_slot[k] = tet
                .iter()
                .position(|&x| x == vv)
                .ok_or_else(|| PipelineError::Correspondence(format!(
                    "surface vertex {sv} not a corner of tet {tet_idx}"
                )))?;
        }
        for (sslot, &m) in surface_multis.iter().enumerate() {
            let mut tm = [0usize; 4];
            for k in 0..3 {
                tm[corner_slot[k]] = m[k];
            }
            let vslot = tet_slot[&tm];
            let vnode = topo.elements[tet_idx as usize][vslot];
            let snode = surface.elements[bt][sslot];
            nodes[vnode as usize] = surface.nodes[snode as usize];
            surf_to_vol_node[snode as usize] = vnode;
            replaced.insert(vnode);
            // reference override: the surface node's barycentric lifted to
            // the tet frame (only differs from the lattice for non-lattice
            // surface distributions)
            if kind != NodeKind::Equispaced {
                let p = surface_dist.points[sslot];
                let mut lr = [0.0f64; 4];
                for k in 0..3 {
                    lr[corner_slot[k]] = p[k];
                }
                tet_ref_override
                    .entry(tet_idx)
                    .or_default()
                    .push((vslot as u32, lr));
            }
        }
    }
    let pre_tfi_nodes = nodes.clone();

    // quality before accommodation
    let reference_sets = ReferenceSets::new(q, &tet_dist, &tet_ref_override);
    let pre = volume_quality(mesh, &topo, &nodes, &reference_sets, "volume-no-tfi");
    reports.push(pre);

    // hierarchical accommodation
    let affected: BTreeSet<u32> = (0..mesh.tets().len() as u32)
        .filter(|&t| topo.elements[t as usize].iter().any(|n| replaced.contains(n)))
        .collect();
    accommodate_curvature(
        mesh,
        &topo,
        &mut nodes,
        &affected,
        &replaced,
        &bmesh,
        &corr,
        q,
        &surface_dist,
    );

    let post = volume_quality(mesh, &topo, &nodes, &reference_sets, "volume-tfi");
    let invalid_elements: Vec<u32> = post
        .per_element
        .iter()
        .enumerate()
        .filter(|(_, &qual)| qual <= 0.0)
        .map(|(t, _)| t as u32)
        .collect();
    reports.push(post);

    // the optimization hook is a no-op: it reports and returns
    let ho_model = volume_ho_model(&surface, &surf_to_vol_node);
    let volume = HighOrderMesh {
        degree: q,
        kind: NodeKind::Equispaced,
        element_kind: ElementKind::Tetrahedron,
        nodes,
        elements: topo.elements.clone(),
        n_vertices: mesh.vertices().len() as u32,
        model: ho_model,
    };
    Ok(CurvedVolume {
        volume,
        surface,
        boundary_model: bmodel,
        boundary_mesh: bmesh,
        correspondence: corr,
        surface_to_volume_node: surf_to_vol_node,
        reports,
        invalid_elements,
        pre_tfi_nodes,
    })
}

fn volume_ho_model(surface: &HighOrderMesh, surf_to_vol: &[u32]) -> HoModel {
    let mut out = HoModel::default();
    for (&pid, &n) in &surface.model.points {
        out.points.insert(pid, surf_to_vol[n as usize]);
    }
    for (&cid, edges) in &surface.model.curves {
        out.curves.insert(
            cid,
            edges
                .iter()
                .map(|chain| chain.iter().map(|&n| surf_to_vol[n as usize]).collect())
                .collect(),
        );
    }
    // degree-q surfaces are carried by the boundary surface mesh
    out
}

/// Reference node sets per element: one shared equispaced set, plus
/// overridden sets for boundary elements when the surface distribution is
/// not the lattice.
struct ReferenceSets {
    q: usize,
    shared: TetLagrange,
    shared_kernel: TetQualityKernel,
    overridden: HashMap<u32, TetQualityKernel>,
}

impl ReferenceSets {
    fn new(
        q: usize,
        tet_dist: &crate::nodes::TetDistribution,
        overrides: &HashMap<u32, Vec<(u32, [f64; 4])>>,
    ) -> ReferenceSets {
        let shared = TetLagrange::new(q, &tet_dist.points);
        let shared_kernel = TetQualityKernel::new(&shared, q);
        let overridden = overrides
            .par_iter()
            .map(|(&tet, slots)| {
                let mut pts = tet_dist.points.clone();
                for &(slot, l) in slots {
                    pts[slot as usize] = l;
                }
                let basis = TetLagrange::new(q, &pts);
                (tet, TetQualityKernel::new(&basis, q))
            })
            .collect();
        ReferenceSets {
            q,
            shared,
            shared_kernel,
            overridden,
        }
    }

    fn kernel(&self, tet: u32) -> &TetQualityKernel {
        self.overridden.get(&tet).unwrap_or(&self.shared_kernel)
    }
}

fn volume_quality(
    mesh: &VolumeMesh,
    topo: &VolumeTopology,
    nodes: &[Vec3],
    refs: &ReferenceSets,
    stage: &str,
) -> QualityReport {
    let per_element: Vec<f64> = (0..mesh.tets().len())
        .into_par_iter()
        .map(|t| {
            let tet = mesh.tets()[t];
            let corners = [
                mesh.vertex(tet[0]),
                mesh.vertex(tet[1]),
                mesh.vertex(tet[2]),
                mesh.vertex(tet[3]),
            ];
            let el: Vec<Vec3> = topo.elements[t]
                .iter()
                .map(|&n| nodes[n as usize])
                .collect();
            refs.kernel(t as u32).quality(&el, corners)
        })
        .collect();
    let _ = refs.q;
    QualityReport::from_elements(stage, per_element)
}

/// Walks the global nodes of one tet edge from vertex `a` to vertex `b`.
fn edge_node_walk(topo: &VolumeTopology, q: usize, a: u32, b: u32) -> Vec<u32> {
    let key = sorted_pair(a, b);
    let e = topo.edge_index[&key] as usize;
    let per_edge = q - 1;
    let mut ids = Vec::with_capacity(q + 1);
    ids.push(key.0);
    for t in 0..per_edge {
        ids.push((topo.edge_node_base + e * per_edge + t) as u32);
    }
    ids.push(key.1);
    if a != key.0 {
        ids.reverse();
    }
    ids
}

#[allow(clippy::too_many_arguments)]
fn accommodate_curvature(
    mesh: &VolumeMesh,
    topo: &VolumeTopology,
    nodes: &mut [Vec3],
    affected: &BTreeSet<u32>,
    _replaced: &HashSet<u32>,
    bmesh: &SurfaceMesh,
    corr: &BoundaryCorrespondence,
    q: usize,
    surface_dist: &NodalDistribution,
) {
    // boundary entity keys in volume vertex ids
    let mut boundary_edges: HashSet<(u32, u32)> = HashSet::new();
    let mut boundary_faces: HashSet<[u32; 3]> = HashSet::new();
    for bt in 0..bmesh.triangles().len() as u32 {
        let tri = bmesh.triangle(bt);
        let vv = [
            corr.surface_to_volume_vertex[tri[0] as usize],
            corr.surface_to_volume_vertex[tri[1] as usize],
            corr.surface_to_volume_vertex[tri[2] as usize],
        ];
        let mut key = vv;
        key.sort_unstable();
        boundary_faces.insert(key);
        for k in 0..3 {
            boundary_edges.insert(sorted_pair(vv[k], vv[(k + 1) % 3]));
        }
    }

    // parameter lists and restriction bases
    let equi_params: Vec<f64> = (0..=q).map(|t| t as f64 / q as f64).collect();
    let trace_params = surface_edge_trace(surface_dist);
    let lag_equi = Lagrange1d::new(equi_params.iter().map(|&f| 2.0 * f - 1.0).collect());
    let lag_trace = Lagrange1d::new(trace_params.iter().map(|&f| 2.0 * f - 1.0).collect());

    // level 1: straighten interior edges of affected tets between their
    // (possibly relocated) endpoints
    let mut interior_edges: BTreeSet<(u32, u32)> = BTreeSet::new();
    for &t in affected {
        let tet = mesh.tets()[t as usize];
        for e in lattice::TET_EDGES {
            let key = sorted_pair(tet[e[0]], tet[e[1]]);
            if !boundary_edges.contains(&key) {
                interior_edges.insert(key);
            }
        }
    }
    for &(a, b) in &interior_edges {
        let walk = edge_node_walk(topo, q, a, b);
        let relocated = tfi_edge(
            (nodes[walk[0] as usize], nodes[walk[q] as usize]),
            &equi_params[1..q],
        );
        for (k, p) in relocated.into_iter().enumerate() {
            nodes[walk[k + 1] as usize] = p;
        }
    }

    // level 2: interior faces of affected tets
    let face_interior = lattice::tri_interior_multi_indices(q);
    let face_lambda: Vec<[f64; 3]> = face_interior
        .iter()
        .map(|m| {
            [
                m[0] as f64 / q as f64,
                m[1] as f64 / q as f64,
                m[2] as f64 / q as f64,
            ]
        })
        .collect();
    let per_face = face_interior.len();
    let mut interior_faces: BTreeSet<[u32; 3]> = BTreeSet::new();
    for &t in affected {
        let tet = mesh.tets()[t as usize];
        for f in lattice::TET_FACES {
            let mut key = [tet[f[0]], tet[f[1]], tet[f[2]]];
            key.sort_unstable();
            if !boundary_faces.contains(&key) {
                interior_faces.insert(key);
            }
        }
    }
    if per_face > 0 {
        for key in &interior_faces {
            let [s0, s1, s2] = *key;
            let corners = [
                nodes[s0 as usize],
                nodes[s1 as usize],
                nodes[s2 as usize],
            ];
            let walks = [
                edge_node_walk(topo, q, s1, s2),
                edge_node_walk(topo, q, s0, s2),
                edge_node_walk(topo, q, s0, s1),
            ];
            let coords: Vec<Vec<Vec3>> = walks
                .iter()
                .map(|w| w.iter().map(|&n| nodes[n as usize]).collect())
                .collect();
            let lag_for = |a: u32, b: u32| {
                if boundary_edges.contains(&sorted_pair(a, b)) {
                    &lag_trace
                } else {
                    &lag_equi
                }
            };
            let e0 = EdgeRestriction { lagrange: lag_for(s1, s2), nodes: &coords[0] };
            let e1 = EdgeRestriction { lagrange: lag_for(s0, s2), nodes: &coords[1] };
            let e2 = EdgeRestriction { lagrange: lag_for(s0, s1), nodes: &coords[2] };
            let out = tfi_face(corners, [&e0, &e1, &e2], &face_lambda);
            let f = topo.face_index[key] as usize;
            for (ord, p) in out.into_iter().enumerate() {
                nodes[topo.face_node_base + f * per_face + ord] = p;
            }
        }
    }

    // level 3: interiors of affected tets
    let tet_interior: Vec<[f64; 4]> = lattice::tet_multi_indices(q)
        .iter()
        .filter(|m| lattice::tet_entity(q, **m) == TetEntity::Interior)
        .map(|m| {
            [
                m[0] as f64 / q as f64,
                m[1] as f64 / q as f64,
                m[2] as f64 / q as f64,
                m[3] as f64 / q as f64,
            ]
        })
        .collect();
    if tet_interior.is_empty() {
        return;
    }
    // face restriction bases, cached by their reference pattern
    let mut face_basis_cache: HashMap<FaceRefKey, TriLagrange> = HashMap::new();

    for &t in affected {
        let tet = mesh.tets()[t as usize];
        let corners = [
            nodes[tet[0] as usize],
            nodes[tet[1] as usize],
            nodes[tet[2] as usize],
            nodes[tet[3] as usize],
        ];
        // edge maps between local vertex pairs
        let mut edge_nodes: HashMap<(usize, usize), Vec<Vec3>> = HashMap::new();
        let mut edge_lag: HashMap<(usize, usize), &Lagrange1d> = HashMap::new();
        for i in 0..4 {
            for k in (i + 1)..4 {
                let walk = edge_node_walk(topo, q, tet[i], tet[k]);
                edge_nodes.insert(
                    (i, k),
                    walk.iter().map(|&n| nodes[n as usize]).collect(),
                );
                edge_lag.insert(
                    (i, k),
                    if boundary_edges.contains(&sorted_pair(tet[i], tet[k])) {
                        &lag_trace
                    } else {
                        &lag_equi
                    },
                );
            }
        }
        // face maps opposite each local vertex
        let mut face_nodes: Vec<Vec<Vec3>> = Vec::with_capacity(4);
        let mut face_keys: Vec<FaceRefKey> = Vec::with_capacity(4);
        for i in 0..4 {
            let mut others: Vec<usize> = (0..4).filter(|&v| v != i).collect();
            others.sort_by_key(|&v| tet[v]);
            let (ga, gb, gc) = (tet[others[0]], tet[others[1]], tet[others[2]]);
            let (ids, key) = face_walk_and_key(
                topo,
                q,
                [ga, gb, gc],
                &boundary_edges,
                &boundary_faces,
            );
            face_nodes.push(ids.iter().map(|&n| nodes[n as usize]).collect());
            face_keys.push(key);
        }
        for key in &face_keys {
            face_basis_cache.entry(key.clone()).or_insert_with(|| {
                TriLagrange::new(q, &face_ref_points(q, key, &equi_params, &trace_params, surface_dist))
            });
        }
        let face_restrictions: Vec<FaceRestriction> = (0..4)
            .map(|i| FaceRestriction {
                lagrange: &face_basis_cache[&face_keys[i]],
                nodes: &face_nodes[i],
            })
            .collect();
        let maps = TetTfiMaps {
            face_opposite: [
                &face_restrictions[0],
                &face_restrictions[1],
                &face_restrictions[2],
                &face_restrictions[3],
            ],
            edge: edge_nodes
                .iter()
                .map(|(&k, n)| {
                    (
                        k,
                        EdgeRestriction {
                            lagrange: edge_lag[&k],
                            nodes: n,
                        },
                    )
                })
                .collect(),
        };
        // tfi_tet expects barycentrics in local corner order, but nodes were
        // gathered with faces in ascending-global order of the remaining
        // vertices; rebuild the per-face barycentric lookup accordingly
        let out = tfi_tet_local(corners, &maps, &tet_interior, tet);
        let per_tet = tet_interior.len();
        for (k, p) in out.into_iter().enumerate() {
            nodes[topo.interior_node_base + t as usize * per_tet + k] = p;
        }
    }
}

/// Wrapper aligning the ascending-global face frames with the local
/// barycentrics expected by [`tfi_tet`].
fn tfi_tet_local(
    corners: [Vec3; 4],
    maps: &TetTfiMaps,
    interior: &[[f64; 4]],
    tet: [u32; 4],
) -> Vec<Vec3> {
    // tfi_tet's convention: face_opposite[i] takes barycentrics over the
    // remaining LOCAL vertices in ascending local order. The maps built by
    // the caller use ascending GLOBAL vertex order, so permute each lambda
    // before evaluation through a shim.
    struct Shim<'a> {
        inner: &'a FaceRestriction<'a>,
        perm: [usize; 3],
    }
    // local others in ascending local order vs ascending global order
    let mut shims: Vec<(Option<[usize; 3]>, ())> = Vec::new();
    let _ = &mut shims;
    // Build permutations: for face opposite local i, local others (ascending
    // local) map to positions in ascending-global order.
    let mut permuted_maps: Vec<Shim> = Vec::with_capacity(4);
    for i in 0..4 {
        let locals: Vec<usize> = (0..4).filter(|&v| v != i).collect();
        let mut by_global = locals.clone();
        by_global.sort_by_key(|&v| tet[v]);
        let mut perm = [0usize; 3];
        for (a, &lv) in locals.iter().enumerate() {
            perm[a] = by_global.iter().position(|&x| x == lv).unwrap();
        }
        permuted_maps.push(Shim {
            inner: maps.face_opposite[i],
            perm,
        });
    }
    let eval_face = |i: usize, fb_local: [f64; 3]| -> Vec3 {
        let s = &permuted_maps[i];
        let mut fb = [0.0; 3];
        for (a, &p) in s.perm.iter().enumerate() {
            fb[p] = fb_local[a];
        }
        s.inner.eval(fb)
    };
    let others = |i: usize| -> [usize; 3] {
        let mut o = [0usize; 3];
        let mut k = 0;
        for v in 0..4 {
            if v != i {
                o[k] = v;
                k += 1;
            }
        }
        o
    };
    interior
        .iter()
        .map(|&l| {
            let mut out = Vec3::ZERO;
            for i in 0..4 {
                let mut term = corners[i];
                for j in 0..4 {
                    if j == i {
                        continue;
                    }
                    let mut lp = l;
                    lp[j] = 0.0;
                    lp[i] = 1.0 - (0..4).filter(|&m| m != i).map(|m| lp[m]).sum::<f64>();
                    let fc = others(j);
                    let fb = [lp[fc[0]], lp[fc[1]], lp[fc[2]]];
                    term += eval_face(j, fb);
                }
                let o = others(i);
                for a in 0..3 {
                    for b in (a + 1)..3 {
                        let m = o[3 - a - b];
                        let frac_m = l[m];
                        let key = if i < m { (i, m) } else { (m, i) };
                        let edge = maps.edge.get(&key).expect("edge map present");
                        let frac = if i < m { frac_m } else { 1.0 - frac_m };
                        term = term - edge.eval(frac);
                    }
                }
                out += term * l[i];
            }
            out
        })
        .collect()
}

/// Reference-pattern key of a face: whether the face itself and each of its
/// three edges (in the canonical (0,1),(1,2),(0,2) order over ascending
/// corners) carry the surface trace instead of the lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct FaceRefKey {
    boundary_face: bool,
    boundary_edges: [bool; 3],
}

fn face_walk_and_key(
    topo: &VolumeTopology,
    q: usize,
    corners: [u32; 3],
    boundary_edges: &HashSet<(u32, u32)>,
    boundary_faces: &HashSet<[u32; 3]>,
) -> (Vec<u32>, FaceRefKey) {
    let [a, b, c] = corners;
    let mut key = [a, b, c];
    key.sort_unstable();
    debug_assert_eq!(key, corners, "corners must be ascending");
    let mut ids = vec![a, b, c];
    for (x, y) in [(a, b), (b, c), (a, c)] {
        let walk = edge_node_walk(topo, q, x, y);
        ids.extend_from_slice(&walk[1..q]);
    }
    let per_face = lattice::tri_interior_multi_indices(q).len();
    let f = topo.face_index[&key] as usize;
    for ord in 0..per_face {
        ids.push((topo.face_node_base + f * per_face + ord) as u32);
    }
    (
        ids,
        FaceRefKey {
            boundary_face: boundary_faces.contains(&key),
            boundary_edges: [
                boundary_edges.contains(&sorted_pair(a, b)),
                boundary_edges.contains(&sorted_pair(b, c)),
                boundary_edges.contains(&sorted_pair(a, c)),
            ],
        },
    )
}

/// Reference points matching [`face_walk_and_key`]'s node order.
fn face_ref_points(
    q: usize,
    key: &FaceRefKey,
    equi: &[f64],
    trace: &[f64],
    surface_dist: &NodalDistribution,
) -> Vec<[f64; 3]> {
    let mut pts = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let pairs = [(0usize, 1usize), (1, 2), (0, 2)];
    for (k, &(ca, cb)) in pairs.iter().enumerate() {
        let params = if key.boundary_edges[k] { trace } else { equi };
        for t in 1..q {
            let mut p = [0.0; 3];
            p[ca] = 1.0 - params[t];
            p[cb] = params[t];
            pts.push(p);
        }
    }
    if key.boundary_face {
        // interior points of the surface distribution, in the canonical
        // interior-lattice order over the same corner frame
        let multis = lattice::tri_multi_indices(q);
        let ord = topology::face_interior_ordinals(q);
        let mut interior = vec![[0.0; 3]; ord.len()];
        for (slot, &m) in multis.iter().enumerate() {
            if lattice::tri_entity(q, m) == lattice::TriEntity::Interior {
                interior[ord[&m]] = surface_dist.points[slot];
            }
        }
        pts.extend(interior);
    } else {
        for m in lattice::tri_interior_multi_indices(q) {
            pts.push([
                m[0] as f64 / q as f64,
                m[1] as f64 / q as f64,
                m[2] as f64 / q as f64,
            ]);
        }
    }
    pts
}

/// Edge-node fractions of the surface distribution (including endpoints).
fn surface_edge_trace(dist: &NodalDistribution) -> Vec<f64> {
    let q = dist.degree;
    let multis = lattice::tri_multi_indices(q);
    let mut params = vec![0.0; q + 1];
    params[q] = 1.0;
    for (slot, &m) in multis.iter().enumerate() {
        if let lattice::TriEntity::Edge { edge: 0, t } = lattice::tri_entity(q, m) {
            params[t] = dist.points[slot][1];
        }
    }
    params
}

/// Convenience map from curve/point names in a detection report to a plan.
pub fn plan_from_suggestions(
    suggestions: &[crate::metrics::SmoothingSuggestion],
) -> SmoothingPlan {
    let mut plan = SmoothingPlan::default();
    for s in suggestions {
        match s.kind {
            crate::metrics::SuggestionKind::Curve => plan.curves.push(s.id),
            crate::metrics::SuggestionKind::Point => plan.points.push(s.id),
        }
    }
    plan.curves.sort_unstable();
    plan.curves.dedup();
    plan.points.sort_unstable();
    plan.points.dedup();
    plan
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::vec3;
    use crate::mesh::infer_features;
    use crate::samples;
    use approx::assert_relative_eq;

    #[test]
    fn smooth_cube_edge_bookkeeping() {
        let (mesh, tags) = samples::cube_surface(2);
        let model = infer_features(&mesh, &tags).unwrap();
        assert_eq!(model.surfaces.len(), 6);
        assert_eq!(model.curves.len(), 12);
        assert_eq!(model.points.len(), 8);
        let cid = *model.curves.keys().next().unwrap();
        let plan = SmoothingPlan {
            curves: vec![cid],
            points: vec![],
        };
        let out = smooth_features(&mesh, &model, &plan).unwrap();
        assert_eq!(out.surfaces.len(), 5);
        assert_eq!(out.curves.len(), 11);
        assert_eq!(out.points.len(), 8);
        // brute-force incidence recount: the two endpoints of the smoothed
        // curve now have exactly two incident curves each
        let edges = &model.curves[&cid];
        let mut valence: BTreeMap<u32, usize> = BTreeMap::new();
        for &(a, b) in edges {
            *valence.entry(a).or_insert(0) += 1;
            *valence.entry(b).or_insert(0) += 1;
        }
        for (&v, &k) in valence.iter().filter(|(_, &k)| k == 1) {
            let _ = k;
            let incident = out
                .curves
                .values()
                .filter(|es| es.iter().any(|&(a, b)| a == v || b == v))
                .count();
            assert_eq!(incident, 2, "endpoint {v}");
        }
        // geometry untouched is trivial: smoothing never sees coordinates
        let empty = smooth_features(&mesh, &model, &SmoothingPlan::default()).unwrap();
        assert_eq!(empty, model);
    }

    #[test]
    fn smooth_point_merges_two_curves() {
        let (mesh, tags) = samples::cube_surface(2);
        let model = infer_features(&mesh, &tags).unwrap();
        // smooth one curve; its endpoints then have two incident curves and
        // become smoothable points
        let cid = *model.curves.keys().next().unwrap();
        let endpoint = {
            let mut valence: BTreeMap<u32, usize> = BTreeMap::new();
            for &(a, b) in &model.curves[&cid] {
                *valence.entry(a).or_insert(0) += 1;
                *valence.entry(b).or_insert(0) += 1;
            }
            *valence.iter().find(|(_, &k)| k == 1).unwrap().0
        };
        let pid = *model
            .points
            .iter()
            .find(|(_, &v)| v == endpoint)
            .unwrap()
            .0;
        let plan = SmoothingPlan {
            curves: vec![cid],
            points: vec![pid],
        };
        let out = smooth_features(&mesh, &model, &plan).unwrap();
        assert_eq!(out.points.len(), 7);
        assert_eq!(out.curves.len(), 10); // 12 - 1 removed - 1 merged
    }

    #[test]
    fn smooth_point_with_three_curves_rejected() {
        let (mesh, tags) = samples::cube_surface(2);
        let model = infer_features(&mesh, &tags).unwrap();
        let pid = *model.points.keys().next().unwrap();
        let plan = SmoothingPlan {
            curves: vec![],
            points: vec![pid],
        };
        match smooth_features(&mesh, &model, &plan) {
            Err(SmoothingError::PointIncidence { count: 3, .. }) => {}
            other => panic!("expected incidence rejection, got {other:?}"),
        }
    }

    #[test]
    fn flat_box_elevation_is_identity_and_quality_one() {
        let (mesh, model) = samples::box_volume(2, 2, 2, vec3(1.0, 1.0, 1.0));
        let out = generate_ho_volume_mesh(&mesh, &model, 3, NodeKind::Equispaced).unwrap();
        // TFI identity: all nodes on the affine lattice
        let topo = build_volume_topology(&mesh, 3);
        let dist = tet_equispaced(3);
        for (ti, el) in topo.elements.iter().enumerate() {
            let tet = mesh.tets()[ti];
            for (slot, &n) in el.iter().enumerate() {
                let l = dist.points[slot];
                let affine = mesh.vertex(tet[0]) * l[0]
                    + mesh.vertex(tet[1]) * l[1]
                    + mesh.vertex(tet[2]) * l[2]
                    + mesh.vertex(tet[3]) * l[3];
                assert!(
                    (out.volume.nodes[n as usize] - affine).norm() < 1e-10,
                    "tet {ti} slot {slot}"
                );
            }
        }
        for r in &out.reports {
            assert_eq!(r.inverted, 0, "{}", r.stage);
            assert!(r.min_quality > 1.0 - 1e-9, "{}: {}", r.stage, r.min_quality);
        }
    }

    #[test]
    fn watertight_boundary_replacement() {
        let mesh = samples::uv_sphere(8, 5, 1.0);
        // build a ball volume: cone tets from the origin to each triangle
        let mut verts = mesh.vertices().to_vec();
        let center = verts.len() as u32;
        verts.push(Vec3::ZERO);
        let tets: Vec<[u32; 4]> = mesh
            .triangles()
            .iter()
            .map(|t| [center, t[0], t[1], t[2]])
            .collect();
        let vol = VolumeMesh::new(verts, tets).unwrap();
        let mut vmodel = VolumeModel::default();
        vmodel.surfaces.insert(
            1,
            mesh.triangles().iter().map(|t| [t[0], t[1], t[2]]).collect(),
        );
        let out = generate_ho_volume_mesh(&vol, &vmodel, 3, NodeKind::WarpBlend).unwrap();
        // every surface node coordinate appears bitwise in the volume
        for (sn, &vn) in out.surface_to_volume_node.iter().enumerate() {
            assert_ne!(vn, u32::MAX, "surface node {sn} not mapped");
            assert_eq!(out.surface.nodes[sn], out.volume.nodes[vn as usize]);
        }
        // curved ball: all tets valid after accommodation
        let last = out.reports.last().unwrap();
        assert_eq!(last.inverted, 0);
        assert!(last.min_quality > 0.2);
    }

    #[test]
    fn q1_volume_pipeline_is_identity() {
        let (mesh, model) = samples::cube_volume_five_tets();
        let out = generate_ho_volume_mesh(&mesh, &model, 1, NodeKind::Equispaced).unwrap();
        assert_eq!(out.volume.nodes.len(), mesh.vertices().len());
        for (n, v) in out.volume.nodes.iter().zip(mesh.vertices()) {
            assert!((*n - *v).norm() < 1e-9);
        }
        assert_relative_eq!(out.reports.last().unwrap().min_quality, 1.0, epsilon = 1e-9);
    }
}
