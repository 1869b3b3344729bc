//! Canonical node orderings on simplices.
//!
//! The crate stores high-order element nodes in the recursive ordering used
//! by Gmsh: principal vertices first, then the internal nodes of each edge
//! (walked from the edge's first to second vertex), then face-interior nodes
//! (for tetrahedra), and finally interior nodes, each inner block ordered by
//! the same rule applied to the inner sub-simplex.
//!
//! Multi-indices are barycentric integer tuples summing to the degree `q`;
//! the barycentric coordinates of a node are its multi-index divided by `q`.

/// Edges of the reference triangle, in canonical order.
pub const TRI_EDGES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

/// Edges of the reference tetrahedron, in canonical order.
pub const TET_EDGES: [[usize; 2]; 6] = [[0, 1], [1, 2], [2, 0], [3, 0], [3, 2], [3, 1]];

/// Faces of the reference tetrahedron, in canonical order (outward oriented).
pub const TET_FACES: [[usize; 3]; 4] = [[0, 2, 1], [0, 1, 3], [0, 3, 2], [3, 1, 2]];

/// Face index opposite each tetrahedron vertex, under [`TET_FACES`].
pub const TET_FACE_OPPOSITE: [usize; 4] = [3, 2, 1, 0];

/// Number of degree-`q` nodes on a triangle.
pub fn tri_node_count(q: usize) -> usize {
    (q + 1) * (q + 2) / 2
}

/// Number of degree-`q` nodes on a tetrahedron.
pub fn tet_node_count(q: usize) -> usize {
    (q + 1) * (q + 2) * (q + 3) / 6
}

/// Barycentric multi-indices of the degree-`q` triangle lattice in canonical order.
pub fn tri_multi_indices(q: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(tri_node_count(q));
    push_tri(q, &mut out);
    out
}

fn push_tri(q: usize, out: &mut Vec<[usize; 3]>) {
    let corners = [[q, 0, 0], [0, q, 0], [0, 0, q]];
    if q == 0 {
        out.push([0, 0, 0]);
        return;
    }
    out.extend_from_slice(&corners);
    for [a, b] in TRI_EDGES {
        for t in 1..q {
            let mut m = [0usize; 3];
            m[a] = q - t;
            m[b] = t;
            out.push(m);
        }
    }
    if q >= 3 {
        let inner = tri_multi_indices(q - 3);
        out.extend(inner.iter().map(|m| [m[0] + 1, m[1] + 1, m[2] + 1]));
    }
}

/// Barycentric multi-indices of the degree-`q` tetrahedron lattice in canonical order.
pub fn tet_multi_indices(q: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(tet_node_count(q));
    if q == 0 {
        out.push([0, 0, 0, 0]);
        return out;
    }
    for i in 0..4 {
        let mut m = [0usize; 4];
        m[i] = q;
        out.push(m);
    }
    for [a, b] in TET_EDGES {
        for t in 1..q {
            let mut m = [0usize; 4];
            m[a] = q - t;
            m[b] = t;
            out.push(m);
        }
    }
    if q >= 3 {
        let face_inner = tri_interior_multi_indices(q);
        for [a, b, c] in TET_FACES {
            for f in &face_inner {
                let mut m = [0usize; 4];
                m[a] = f[0];
                m[b] = f[1];
                m[c] = f[2];
                out.push(m);
            }
        }
    }
    if q >= 4 {
        let inner = tet_multi_indices(q - 4);
        out.extend(inner.iter().map(|m| [m[0] + 1, m[1] + 1, m[2] + 1, m[3] + 1]));
    }
    out
}

/// Interior multi-indices of the degree-`q` triangle lattice (all components >= 1),
/// in the canonical recursive order.
pub fn tri_interior_multi_indices(q: usize) -> Vec<[usize; 3]> {
    if q < 3 {
        return Vec::new();
    }
    tri_multi_indices(q - 3)
        .into_iter()
        .map(|m| [m[0] + 1, m[1] + 1, m[2] + 1])
        .collect()
}

/// Which sub-entity of the triangle a multi-index lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriEntity {
    /// Corner vertex `k`.
    Vertex(usize),
    /// Edge `k` of [`TRI_EDGES`], at step `t` (1..q) from its first vertex.
    Edge { edge: usize, t: usize },
    Interior,
}

pub fn tri_entity(q: usize, m: [usize; 3]) -> TriEntity {
    let zeros: Vec<usize> = (0..3).filter(|&i| m[i] == 0).collect();
    match zeros.len() {
        2 => TriEntity::Vertex((0..3).find(|&i| m[i] == q).unwrap()),
        1 => {
            let z = zeros[0];
            let edge = TRI_EDGES.iter().position(|e| !e.contains(&z)).unwrap();
            TriEntity::Edge {
                edge,
                t: m[TRI_EDGES[edge][1]],
            }
        }
        _ => TriEntity::Interior,
    }
}

/// Which sub-entity of the tetrahedron a multi-index lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TetEntity {
    Vertex(usize),
    /// Edge `k` of [`TET_EDGES`], at step `t` (1..q) from its first vertex.
    Edge { edge: usize, t: usize },
    /// Face `k` of [`TET_FACES`], with barycentric multi-index over its corners.
    Face { face: usize, bary: [usize; 3] },
    Interior,
}

pub fn tet_entity(q: usize, m: [usize; 4]) -> TetEntity {
    let zeros: Vec<usize> = (0..4).filter(|&i| m[i] == 0).collect();
    match zeros.len() {
        3 => TetEntity::Vertex((0..4).find(|&i| m[i] == q).unwrap()),
        2 => {
            let edge = TET_EDGES
                .iter()
                .position(|e| m[e[0]] > 0 && m[e[1]] > 0)
                .unwrap();
            TetEntity::Edge {
                edge,
                t: m[TET_EDGES[edge][1]],
            }
        }
        1 => {
            let face = TET_FACE_OPPOSITE[zeros[0]];
            let [a, b, c] = TET_FACES[face];
            TetEntity::Face {
                face,
                bary: [m[a], m[b], m[c]],
            }
        }
        _ => TetEntity::Interior,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tri_counts_and_degree_one() {
        assert_eq!(tri_multi_indices(1), vec![[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        for q in 1..=10 {
            let m = tri_multi_indices(q);
            assert_eq!(m.len(), tri_node_count(q));
            // all distinct, all sum to q
            for mi in &m {
                assert_eq!(mi.iter().sum::<usize>(), q);
            }
            let mut sorted = m.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), m.len());
        }
    }

    #[test]
    fn tri_q3_order() {
        // vertices, edge (0,1), edge (1,2), edge (2,0), one interior node
        let m = tri_multi_indices(3);
        assert_eq!(
            m,
            vec![
                [3, 0, 0],
                [0, 3, 0],
                [0, 0, 3],
                [2, 1, 0],
                [1, 2, 0],
                [0, 2, 1],
                [0, 1, 2],
                [1, 0, 2],
                [2, 0, 1],
                [1, 1, 1],
            ]
        );
    }

    #[test]
    fn tet_counts() {
        for q in 1..=10 {
            let m = tet_multi_indices(q);
            assert_eq!(m.len(), tet_node_count(q));
            for mi in &m {
                assert_eq!(mi.iter().sum::<usize>(), q);
            }
            let mut sorted = m.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), m.len());
        }
    }

    #[test]
    fn entity_classification() {
        assert_eq!(tri_entity(3, [3, 0, 0]), TriEntity::Vertex(0));
        assert_eq!(tri_entity(3, [2, 1, 0]), TriEntity::Edge { edge: 0, t: 1 });
        assert_eq!(tri_entity(3, [0, 1, 2]), TriEntity::Edge { edge: 1, t: 2 });
        assert_eq!(tri_entity(3, [1, 1, 1]), TriEntity::Interior);
        assert_eq!(tet_entity(4, [0, 0, 4, 0]), TetEntity::Vertex(2));
        assert_eq!(tet_entity(4, [2, 0, 0, 2]), TetEntity::Edge { edge: 3, t: 2 });
        assert_eq!(
            tet_entity(4, [2, 1, 1, 0]),
            TetEntity::Face {
                face: 0,
                bary: [2, 1, 1]
            }
        );
        assert_eq!(tet_entity(4, [1, 1, 1, 1]), TetEntity::Interior);
    }

    #[test]
    fn tet_faces_oriented_outward() {
        use crate::geometry::{tet_signed_volume, vec3};
        let v = [
            vec3(0.0, 0.0, 0.0),
            vec3(1.0, 0.0, 0.0),
            vec3(0.0, 1.0, 0.0),
            vec3(0.0, 0.0, 1.0),
        ];
        assert!(tet_signed_volume(v[0], v[1], v[2], v[3]) > 0.0);
        for (fi, [a, b, c]) in TET_FACES.iter().enumerate() {
            let opp = TET_FACE_OPPOSITE.iter().position(|&f| f == fi).unwrap();
            // outward face: the opposite vertex lies on the negative side
            let n = crate::geometry::triangle_area_vector(v[*a], v[*b], v[*c]);
            assert!(n.dot(v[opp] - v[*a]) < 0.0);
        }
    }
}
