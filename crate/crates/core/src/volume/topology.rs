//! Degree-q node numbering for tetrahedral meshes.
//!
//! Vertex nodes reuse linear vertex ids; edge nodes belong to the undirected
//! edge walked from its lower to its higher vertex; face nodes to the sorted
//! face key in its canonical corner order; interior nodes to their element.

use std::collections::HashMap;

use crate::lattice::{self, TetEntity, TET_EDGES, TET_FACES};
use crate::mesh::{sorted_pair, VolumeMesh};

#[derive(Clone, Debug)]
pub struct VolumeTopology {
    pub degree: usize,
    pub n_nodes: usize,
    pub elements: Vec<Vec<u32>>,
    pub edges: Vec<(u32, u32)>,
    pub edge_index: HashMap<(u32, u32), u32>,
    /// Sorted vertex triples of all faces.
    pub faces: Vec<[u32; 3]>,
    pub face_index: HashMap<[u32; 3], u32>,
    pub n_vertices: usize,
    pub edge_node_base: usize,
    pub face_node_base: usize,
    pub interior_node_base: usize,
}

fn sorted3(mut f: [u32; 3]) -> [u32; 3] {
    f.sort_unstable();
    f
}

/// Ordinal of each interior multi-index of the degree-q triangle lattice.
pub fn face_interior_ordinals(q: usize) -> HashMap<[usize; 3], usize> {
    lattice::tri_interior_multi_indices(q)
        .into_iter()
        .enumerate()
        .map(|(k, m)| (m, k))
        .collect()
}

/// Ordinal of each multi-index of the degree-q tet lattice.
pub fn tet_slot_ordinals(q: usize) -> HashMap<[usize; 4], usize> {
    lattice::tet_multi_indices(q)
        .into_iter()
        .enumerate()
        .map(|(k, m)| (m, k))
        .collect()
}

pub fn build_volume_topology(mesh: &VolumeMesh, q: usize) -> VolumeTopology {
    let nv = mesh.vertices().len();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut edge_index: HashMap<(u32, u32), u32> = HashMap::new();
    let mut faces: Vec<[u32; 3]> = Vec::new();
    let mut face_index: HashMap<[u32; 3], u32> = HashMap::new();
    {
        let mut edge_keys: Vec<(u32, u32)> = Vec::new();
        let mut face_keys: Vec<[u32; 3]> = Vec::new();
        for tet in mesh.tets() {
            for e in TET_EDGES {
                edge_keys.push(sorted_pair(tet[e[0]], tet[e[1]]));
            }
            for f in TET_FACES {
                face_keys.push(sorted3([tet[f[0]], tet[f[1]], tet[f[2]]]));
            }
        }
        edge_keys.sort_unstable();
        edge_keys.dedup();
        face_keys.sort_unstable();
        face_keys.dedup();
        for k in edge_keys {
            edge_index.insert(k, edges.len() as u32);
            edges.push(k);
        }
        for k in face_keys {
            face_index.insert(k, faces.len() as u32);
            faces.push(k);
        }
    }

    let per_edge = q.saturating_sub(1);
    let per_face = lattice::tri_interior_multi_indices(q).len();
    let per_tet = if q >= 4 {
        lattice::tet_node_count(q - 4)
    } else {
        0
    };
    let edge_node_base = nv;
    let face_node_base = edge_node_base + edges.len() * per_edge;
    let interior_node_base = face_node_base + faces.len() * per_face;
    let n_nodes = interior_node_base + mesh.tets().len() * per_tet;

    let multis = lattice::tet_multi_indices(q);
    let face_ord = face_interior_ordinals(q);
    let mut elements = Vec::with_capacity(mesh.tets().len());
    for (ti, tet) in mesh.tets().iter().enumerate() {
        let mut ids = Vec::with_capacity(multis.len());
        for &m in &multis {
            let id = match lattice::tet_entity(q, m) {
                TetEntity::Vertex(k) => tet[k],
                TetEntity::Edge { edge, t } => {
                    let (a, b) = (tet[TET_EDGES[edge][0]], tet[TET_EDGES[edge][1]]);
                    let key = sorted_pair(a, b);
                    let e = edge_index[&key];
                    let step = if a == key.0 { t } else { q - t };
                    (edge_node_base + e as usize * per_edge + step - 1) as u32
                }
                TetEntity::Face { face, bary } => {
                    let corners = [
                        tet[TET_FACES[face][0]],
                        tet[TET_FACES[face][1]],
                        tet[TET_FACES[face][2]],
                    ];
                    let key = sorted3(corners);
                    let f = face_index[&key];
                    // express the face barycentric over the sorted corners
                    let mut canon = [0usize; 3];
                    for (k, &c) in corners.iter().enumerate() {
                        let pos = key.iter().position(|&x| x == c).unwrap();
                        canon[pos] = bary[k];
                    }
                    let ord = face_ord[&canon];
                    (face_node_base + f as usize * per_face + ord) as u32
                }
                TetEntity::Interior => {
                    // counted below via the running interior ordinal
                    u32::MAX
                }
            };
            ids.push(id);
        }
        // interior nodes in canonical order
        let mut interior_seen = 0usize;
        for (slot, &m) in multis.iter().enumerate() {
            if lattice::tet_entity(q, m) == TetEntity::Interior {
                ids[slot] = (interior_node_base + ti * per_tet + interior_seen) as u32;
                interior_seen += 1;
            }
        }
        elements.push(ids);
    }

    VolumeTopology {
        degree: q,
        n_nodes,
        elements,
        edges,
        edge_index,
        faces,
        face_index,
        n_vertices: nv,
        edge_node_base,
        face_node_base,
        interior_node_base,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn counts_on_five_tet_cube() {
        let (mesh, _) = samples::cube_volume_five_tets();
        // 8 vertices, 18 edges (12 cube + 6 face diagonals), hmm: count from build
        let topo = build_volume_topology(&mesh, 3);
        let ne = topo.edges.len();
        let nf = topo.faces.len();
        // Euler-ish sanity: every tet has 6 edges, 4 faces
        assert!(ne >= 12 && nf >= 12);
        assert_eq!(
            topo.n_nodes,
            8 + 2 * ne + nf + 0 // q=3: 2 per edge, 1 per face, 0 interior
        );
        // conformity: shared faces reference identical node ids from both tets
        let q = 3;
        let multis = lattice::tet_multi_indices(q);
        let mut face_nodes: HashMap<[u32; 3], Vec<u32>> = HashMap::new();
        for (ti, tet) in mesh.tets().iter().enumerate() {
            for (slot, &m) in multis.iter().enumerate() {
                if let TetEntity::Face { face, .. } = lattice::tet_entity(q, m) {
                    let f = TET_FACES[face];
                    let key = sorted3([tet[f[0]], tet[f[1]], tet[f[2]]]);
                    face_nodes
                        .entry(key)
                        .or_default()
                        .push(topo.elements[ti][slot]);
                }
            }
        }
        for (_, mut v) in face_nodes {
            v.sort_unstable();
            v.dedup();
            assert_eq!(v.len(), 1); // q=3 has one node per face
        }
    }

    #[test]
    fn shared_edge_nodes_conform() {
        let (mesh, _) = samples::box_volume(2, 1, 1, crate::geometry::vec3(2.0, 1.0, 1.0));
        let q = 4;
        let topo = build_volume_topology(&mesh, q);
        let multis = lattice::tet_multi_indices(q);
        // for every tet edge, walking the lattice from vertex a to b gives
        // the same global ids regardless of which tet provides them
        let mut walks: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
        for (ti, tet) in mesh.tets().iter().enumerate() {
            for e in TET_EDGES {
                let (a, b) = (tet[e[0]], tet[e[1]]);
                let key = sorted_pair(a, b);
                let mut ids = Vec::new();
                for step in 0..=q {
                    let mut m = [0usize; 4];
                    let (ia, ib) = (e[0], e[1]);
                    m[ia] = q - step;
                    m[ib] = step;
                    let slot = multis.iter().position(|&x| x == m).unwrap();
                    ids.push(topo.elements[ti][slot]);
                }
                if a != key.0 {
                    ids.reverse();
                }
                match walks.get(&key) {
                    None => {
                        walks.insert(key, ids);
                    }
                    Some(prev) => assert_eq!(prev, &ids),
                }
            }
        }
    }
}
