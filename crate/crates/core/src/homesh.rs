//! High-order nodal meshes interpolating the limit model.
//!
//! Global node ownership fixes every node's evaluation exactly once: vertex
//! nodes reuse linear vertex ids, edge nodes belong to the undirected edge
//! (walked from its lower to its higher vertex), interior nodes to their
//! element. Conformity across shared edges holds by construction, not by
//! floating-point coincidence.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::PipelineError;
use crate::geometry::Vec3;
use crate::lattice::{self, TriEntity};
use crate::limit::LimitEvaluator;
use crate::mesh::{FeatureModel, SurfaceMesh, VolumeMesh};
use crate::nodes::{NodalDistribution, NodeKind};
use crate::subdivision::{limit_mesh_positions, subdivide_surface};

/// Simplex family of a high-order mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementKind {
    Triangle,
    Tetrahedron,
}

/// Feature model of a high-order mesh: degree-q entities mirroring the
/// linear model.
#[derive(Clone, Debug, Default)]
pub struct HoModel {
    /// point id -> node id
    pub points: BTreeMap<u32, u32>,
    /// curve id -> degree-q edges, each the ordered chain of q+1 node ids
    pub curves: BTreeMap<u32, Vec<Vec<u32>>>,
    /// surface id -> element indices
    pub surfaces: BTreeMap<u32, Vec<u32>>,
}

/// A nodal mesh of degree q.
#[derive(Clone, Debug)]
pub struct HighOrderMesh {
    pub degree: usize,
    pub kind: NodeKind,
    pub element_kind: ElementKind,
    pub nodes: Vec<Vec3>,
    /// Node ids per element in the canonical lattice order.
    pub elements: Vec<Vec<u32>>,
    /// Number of linear vertices; they occupy node ids 0..n_vertices.
    pub n_vertices: u32,
    pub model: HoModel,
}

/// Where each global node is evaluated (one owner per node).
#[derive(Clone, Debug)]
pub struct HoTopology {
    pub n_nodes: usize,
    pub elements: Vec<Vec<u32>>,
    /// Per node: owning element and local slot.
    pub owner: Vec<(u32, u32)>,
}

/// Builds the degree-q node numbering of a surface mesh.
pub fn build_ho_topology(mesh: &SurfaceMesh, q: usize) -> HoTopology {
    let nv = mesh.vertices().len();
    let ne = mesh.edges().len();
    let per_edge = q - 1;
    let per_tri = lattice::tri_interior_multi_indices(q).len();
    let n_nodes = nv + ne * per_edge + mesh.triangles().len() * per_tri;
    let multis = lattice::tri_multi_indices(q);

    let mut owner: Vec<Option<(u32, u32)>> = vec![None; n_nodes];
    let mut elements = Vec::with_capacity(mesh.triangles().len());
    let mut interior_base = nv + ne * per_edge;
    for (ti, tri) in mesh.triangles().iter().enumerate() {
        let mut ids = Vec::with_capacity(multis.len());
        let mut interior_seen = 0usize;
        for (slot, &m) in multis.iter().enumerate() {
            let id = match lattice::tri_entity(q, m) {
                TriEntity::Vertex(k) => tri[k],
                TriEntity::Edge { edge, t } => {
                    let (a, b) = (tri[lattice::TRI_EDGES[edge][0]], tri[lattice::TRI_EDGES[edge][1]]);
                    let e = mesh.edge_between(a, b).expect("triangle edge exists");
                    let (lo, _hi) = mesh.edge(e).verts;
                    // position along the edge counted from the lower vertex
                    let step = if a == lo { t } else { q - t };
                    nv as u32 + e * per_edge as u32 + (step as u32 - 1)
                }
                TriEntity::Interior => {
                    let id = (interior_base + interior_seen) as u32;
                    interior_seen += 1;
                    id
                }
            };
            if owner[id as usize].is_none() {
                owner[id as usize] = Some((ti as u32, slot as u32));
            }
            ids.push(id);
        }
        interior_base += per_tri;
        elements.push(ids);
    }
    HoTopology {
        n_nodes,
        elements,
        owner: owner.into_iter().map(|o| o.expect("all nodes owned")).collect(),
    }
}

/// Generates the degree-q surface mesh interpolating the limit model
/// (optionally after `pre_refine` global refinements of the control mesh),
/// along with the induced degree-q feature model.
pub fn generate_ho_surface_mesh(
    mesh: &SurfaceMesh,
    model: &FeatureModel,
    q: usize,
    distribution: &NodalDistribution,
    pre_refine: usize,
) -> Result<(HighOrderMesh, LimitEvaluator), PipelineError> {
    assert_eq!(distribution.degree, q);
    let model = crate::mesh::complete_model(mesh, model.clone())?;
    let mut evaluator = LimitEvaluator::new(mesh, &model)?;
    for _ in 0..pre_refine {
        // refine the control mesh; its limit (and the interpolation of the
        // original vertices) is unchanged
        let control = evaluator.control_mesh();
        let (fine, fine_model, _) = subdivide_surface(control, evaluator.model())?;
        let original = limit_mesh_positions(&fine, &fine_model)?;
        let residual = evaluator.control_residual;
        evaluator = LimitEvaluator::from_control(
            original,
            crate::subdivision::ControlMesh {
                mesh: fine,
                residual,
            },
            fine_model,
        )?;
    }
    let ho = interpolate_on_topology(&evaluator, q, distribution)?;
    Ok((ho, evaluator))
}

/// Evaluates the limit model once per global node over the evaluator's
/// control-mesh topology.
pub fn interpolate_on_topology(
    evaluator: &LimitEvaluator,
    q: usize,
    distribution: &NodalDistribution,
) -> Result<HighOrderMesh, PipelineError> {
    let mesh = evaluator.control_mesh();
    let model = evaluator.model();
    let topo = build_ho_topology(mesh, q);
    let nodes: Result<Vec<Vec3>, crate::error::EvalError> = (0..topo.n_nodes)
        .into_par_iter()
        .map(|n| {
            let (tri, slot) = topo.owner[n];
            evaluator.map_onto_limit(tri, distribution.points[slot as usize])
        })
        .collect();
    let nodes = nodes.map_err(PipelineError::from)?;

    let ho_model = induce_ho_model(mesh, model, q);
    Ok(HighOrderMesh {
        degree: q,
        kind: distribution.kind,
        element_kind: ElementKind::Triangle,
        nodes,
        elements: topo.elements,
        n_vertices: mesh.vertices().len() as u32,
        model: ho_model,
    })
}

fn induce_ho_model(mesh: &SurfaceMesh, model: &FeatureModel, q: usize) -> HoModel {
    let nv = mesh.vertices().len() as u32;
    let per_edge = (q - 1) as u32;
    let mut out = HoModel {
        points: model.points.clone(),
        curves: BTreeMap::new(),
        surfaces: model
            .surfaces
            .iter()
            .map(|(&sid, tris)| (sid, tris.clone()))
            .collect(),
    };
    for (&cid, edges) in &model.curves {
        let mut ho_edges = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            let e = mesh.edge_between(a, b).expect("curve edge exists");
            let (lo, hi) = mesh.edge(e).verts;
            let mut chain = Vec::with_capacity(q + 1);
            chain.push(lo);
            for t in 0..per_edge {
                chain.push(nv + e * per_edge + t);
            }
            chain.push(hi);
            ho_edges.push(chain);
        }
        out.curves.insert(cid, ho_edges);
    }
    out
}

impl HighOrderMesh {
    /// Decomposes each element into the structured set of linear elements on
    /// its lattice (q^2 triangles or q^3 tetrahedra), reusing node
    /// coordinates.
    pub fn refine_to_linear(&self) -> Result<LinearizedMesh, PipelineError> {
        match self.element_kind {
            ElementKind::Triangle => Ok(LinearizedMesh::Surface(self.linearize_triangles())),
            ElementKind::Tetrahedron => {
                let (vertices, tets) = self.linearize_tets();
                Ok(LinearizedMesh::Volume(
                    VolumeMesh::new(vertices, tets).map_err(PipelineError::from)?,
                ))
            }
        }
    }

    fn linearize_triangles(&self) -> (Vec<Vec3>, Vec<[u32; 3]>) {
        let q = self.degree;
        let index_of = slot_lookup_tri(q);
        let mut triangles = Vec::with_capacity(self.elements.len() * q * q);
        for el in &self.elements {
            let at = |a: usize, b: usize| el[index_of[&(a, b)]];
            for a in 0..q {
                for b in 0..(q - a) {
                    triangles.push([at(a, b), at(a + 1, b), at(a, b + 1)]);
                    if a + b + 2 <= q {
                        triangles.push([at(a + 1, b), at(a + 1, b + 1), at(a, b + 1)]);
                    }
                }
            }
        }
        (self.nodes.clone(), triangles)
    }

    fn linearize_tets(&self) -> (Vec<Vec3>, Vec<[u32; 4]>) {
        let q = self.degree;
        let index_of = slot_lookup_tet(q);
        let mut tets = Vec::with_capacity(self.elements.len() * q * q * q);
        for el in &self.elements {
            let at = |a: usize, b: usize, c: usize| el[index_of[&(a, b, c)]];
            for a in 0..q {
                for b in 0..q - a {
                    for c in 0..q - a - b {
                        // corner tet
                        tets.push([at(a, b, c), at(a + 1, b, c), at(a, b + 1, c), at(a, b, c + 1)]);
                        // octahedron split into four around the diagonal
                        // (a+1,b,c) -- (a,b+1,c+1)
                        if a + b + c + 2 <= q {
                            let d0 = at(a + 1, b, c);
                            let d1 = at(a, b + 1, c + 1);
                            let ring = [
                                at(a, b + 1, c),
                                at(a + 1, b + 1, c),
                                at(a + 1, b, c + 1),
                                at(a, b, c + 1),
                            ];
                            for k in 0..4 {
                                tets.push([d0, d1, ring[(k + 1) % 4], ring[k]]);
                            }
                        }
                        // inverted tet
                        if a + b + c + 3 <= q {
                            tets.push([
                                at(a + 1, b + 1, c),
                                at(a, b + 1, c + 1),
                                at(a + 1, b, c + 1),
                                at(a + 1, b + 1, c + 1),
                            ]);
                        }
                    }
                }
            }
        }
        (self.nodes.clone(), tets)
    }
}

/// Result of re-interpreting a high-order mesh as a linear one.
pub enum LinearizedMesh {
    Surface((Vec<Vec3>, Vec<[u32; 3]>)),
    Volume(VolumeMesh),
}

fn slot_lookup_tri(q: usize) -> std::collections::HashMap<(usize, usize), usize> {
    lattice::tri_multi_indices(q)
        .iter()
        .enumerate()
        .map(|(slot, m)| ((m[1], m[2]), slot))
        .collect()
}

fn slot_lookup_tet(q: usize) -> std::collections::HashMap<(usize, usize, usize), usize> {
    lattice::tet_multi_indices(q)
        .iter()
        .enumerate()
        .map(|(slot, m)| ((m[1], m[2], m[3]), slot))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{tet_signed_volume, triangle_area_vector, vec3};
    use crate::mesh::infer_features;
    use crate::nodes::make_distribution;
    use crate::samples;
    use approx::assert_relative_eq;

    #[test]
    fn topology_counts() {
        // 1 triangle q=3: 3 vertex + 6 edge + 1 interior
        let mesh = SurfaceMesh::new(
            vec![
                vec3(0.0, 0.0, 0.0),
                vec3(1.0, 0.0, 0.0),
                vec3(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let topo = build_ho_topology(&mesh, 3);
        assert_eq!(topo.n_nodes, 10);

        // 2 triangles sharing an edge, q=4: 2*15 - 5 = 25
        let quad = SurfaceMesh::new(
            vec![
                vec3(0.0, 0.0, 0.0),
                vec3(1.0, 0.0, 0.0),
                vec3(0.0, 1.0, 0.0),
                vec3(1.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [1, 3, 2]],
        )
        .unwrap();
        let topo = build_ho_topology(&quad, 4);
        assert_eq!(topo.n_nodes, 25);

        // q=1 equals the linear mesh
        let topo = build_ho_topology(&quad, 1);
        assert_eq!(topo.n_nodes, 4);
        assert_eq!(topo.elements[0], vec![0, 1, 2]);
    }

    #[test]
    fn conforming_shared_edge_ids() {
        let (mesh, _) = samples::cube_surface(2);
        let q = 4;
        let topo = build_ho_topology(&mesh, q);
        // for every interior edge, the node ids referenced by both triangles
        // along that edge must be identical sets in reversed order
        let multis = lattice::tri_multi_indices(q);
        for (e, edge) in mesh.edges().iter().enumerate() {
            let [Some(t0), Some(t1)] = edge.tris else {
                continue;
            };
            let mut sides: Vec<Vec<u32>> = Vec::new();
            for &t in &[t0, t1] {
                let tri = mesh.triangle(t);
                let (a, b) = mesh.edge(e as u32).verts;
                let (ia, ib) = (
                    tri.iter().position(|&v| v == a).unwrap(),
                    tri.iter().position(|&v| v == b).unwrap(),
                );
                // walk the edge from a to b by lattice multi-index
                let mut ids = Vec::new();
                for step in 0..=q {
                    let mut m = [0usize; 3];
                    m[ia] = q - step;
                    m[ib] = step;
                    let slot = multis.iter().position(|&x| x == m).unwrap();
                    ids.push(topo.elements[t as usize][slot]);
                }
                sides.push(ids);
            }
            assert_eq!(sides[0], sides[1]);
        }
    }

    #[test]
    fn q1_reproduces_input_vertices() {
        let mesh = samples::reference_sphere();
        let tags = vec![1u32; mesh.triangles().len()];
        let model = infer_features(&mesh, &tags).unwrap();
        let dist = make_distribution(1, NodeKind::Equispaced).unwrap();
        let (ho, _) = generate_ho_surface_mesh(&mesh, &model, 1, &dist, 0).unwrap();
        assert_eq!(ho.nodes.len(), mesh.vertices().len());
        for (n, v) in ho.nodes.iter().zip(mesh.vertices()) {
            assert!((*n - *v).norm() < 1e-9);
        }
    }

    #[test]
    fn interpolation_property_on_sphere() {
        let mesh = samples::uv_sphere(10, 7, 1.0);
        let tags = vec![1u32; mesh.triangles().len()];
        let model = infer_features(&mesh, &tags).unwrap();
        for q in [2usize, 3, 4] {
            let dist = make_distribution(q, NodeKind::WarpBlend).unwrap();
            let (ho, _) = generate_ho_surface_mesh(&mesh, &model, q, &dist, 0).unwrap();
            for v in 0..mesh.vertices().len() {
                assert!(
                    (ho.nodes[v] - mesh.vertex(v as u32)).norm() < 1e-9,
                    "vertex {v} moved"
                );
            }
        }
    }

    #[test]
    fn flat_cube_nodes_at_affine_lattice() {
        let (mesh, tags) = samples::cube_surface(2);
        let model = infer_features(&mesh, &tags).unwrap();
        let q = 3;
        let dist = make_distribution(q, NodeKind::Equispaced).unwrap();
        let (ho, _) = generate_ho_surface_mesh(&mesh, &model, q, &dist, 0).unwrap();
        for (ti, el) in ho.elements.iter().enumerate() {
            for (slot, &node) in el.iter().enumerate() {
                let lin = mesh.point_in_triangle(ti as u32, dist.points[slot]);
                assert!(
                    (ho.nodes[node as usize] - lin).norm() < 1e-9,
                    "element {ti} slot {slot}"
                );
            }
        }
    }

    #[test]
    fn refine_to_linear_triangle_counts_and_area() {
        let (mesh, tags) = samples::cube_surface(1);
        let model = infer_features(&mesh, &tags).unwrap();
        for q in [2usize, 3, 4] {
            let dist = make_distribution(q, NodeKind::Equispaced).unwrap();
            let (ho, _) = generate_ho_surface_mesh(&mesh, &model, q, &dist, 0).unwrap();
            let LinearizedMesh::Surface((nodes, tris)) = ho.refine_to_linear().unwrap() else {
                panic!("expected surface");
            };
            assert_eq!(tris.len(), mesh.triangles().len() * q * q);
            // flat faces tile the parent exactly: areas add up to 6
            let area: f64 = tris
                .iter()
                .map(|t| {
                    triangle_area_vector(
                        nodes[t[0] as usize],
                        nodes[t[1] as usize],
                        nodes[t[2] as usize],
                    )
                    .norm()
                        / 2.0
                })
                .sum();
            assert_relative_eq!(area, 6.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn tet_lattice_split_counts_and_volume() {
        // one reference tet elevated to degree q, then re-linearized
        for q in [1usize, 2, 3, 4] {
            let dist = crate::nodes::tet_equispaced(q);
            let corners = [
                vec3(0.0, 0.0, 0.0),
                vec3(1.0, 0.0, 0.0),
                vec3(0.0, 1.0, 0.0),
                vec3(0.0, 0.0, 1.0),
            ];
            let nodes: Vec<Vec3> = dist
                .points
                .iter()
                .map(|l| {
                    corners[0] * l[0] + corners[1] * l[1] + corners[2] * l[2] + corners[3] * l[3]
                })
                .collect();
            let ho = HighOrderMesh {
                degree: q,
                kind: NodeKind::Equispaced,
                element_kind: ElementKind::Tetrahedron,
                elements: vec![(0..nodes.len() as u32).collect()],
                n_vertices: 4,
                nodes,
                model: HoModel::default(),
            };
            let LinearizedMesh::Volume(vol) = ho.refine_to_linear().unwrap() else {
                panic!("expected volume");
            };
            assert_eq!(vol.tets().len(), q * q * q);
            let total: f64 = vol
                .tets()
                .iter()
                .map(|t| {
                    tet_signed_volume(
                        vol.vertex(t[0]),
                        vol.vertex(t[1]),
                        vol.vertex(t[2]),
                        vol.vertex(t[3]),
                    )
                })
                .sum();
            assert_relative_eq!(total, 1.0 / 6.0, epsilon = 1e-12);
        }
    }
}
