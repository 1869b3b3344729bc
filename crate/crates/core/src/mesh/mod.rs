//! Linear mesh representations with adjacency.
//!
//! [`SurfaceMesh`] is an oriented manifold (with boundary) triangle mesh with
//! an edge table and ordered one-rings; [`VolumeMesh`] is a tetrahedral mesh
//! with positive-volume elements. Both are immutable after construction, so
//! read-only sharing across threads is safe.

mod boundary;
mod feature;

pub use boundary::{extract_boundary, BoundaryCorrespondence};
pub use feature::{
    classify_vertex, complete_model, infer_features, validate_model, FeatureModel, FeatureRole,
    VertexClass, VolumeModel,
};

use std::collections::HashMap;

use crate::error::MeshError;
use crate::geometry::{tet_signed_volume, Aabb, Vec3};

/// Undirected edge of a surface mesh with its incident triangles.
#[derive(Clone, Copy, Debug)]
pub struct Edge {
    /// Endpoint vertex indices, `verts.0 < verts.1`.
    pub verts: (u32, u32),
    /// Incident triangles; boundary edges have `tris[1] == None`.
    pub tris: [Option<u32>; 2],
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.tris[1].is_none()
    }
}

/// Ordered cycle of neighbors around a vertex, counterclockwise with respect
/// to the outward orientation.
#[derive(Clone, Debug)]
pub struct OneRing {
    /// Neighbor vertices. For an open (boundary) ring the first and last
    /// neighbors are the boundary neighbors.
    pub neighbors: Vec<u32>,
    /// Triangle between `neighbors[k]` and `neighbors[k+1]` (wrapping only
    /// when closed); `triangles.len()` equals `neighbors.len()` when closed
    /// and `neighbors.len() - 1` when open.
    pub triangles: Vec<u32>,
    pub closed: bool,
}

impl OneRing {
    pub fn valence(&self) -> usize {
        self.neighbors.len()
    }
}

/// An oriented manifold triangle mesh with precomputed adjacency.
#[derive(Clone, Debug)]
pub struct SurfaceMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
    edges: Vec<Edge>,
    edge_index: HashMap<(u32, u32), u32>,
    rings: Vec<OneRing>,
}

/// Undirected edge key: the vertex pair in increasing order.
pub fn sorted_pair(a: u32, b: u32) -> (u32, u32) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn edge_key(a: u32, b: u32) -> (u32, u32) {
    sorted_pair(a, b)
}

impl SurfaceMesh {
    /// Builds the mesh and its adjacency, checking the manifold, orientation,
    /// and one-ring invariants.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<Self, MeshError> {
        let nv = vertices.len();
        for t in &triangles {
            for &v in t {
                if v as usize >= nv {
                    return Err(MeshError::VertexOutOfRange(v, nv));
                }
            }
        }

        // Edge table. Each undirected edge may appear once per direction.
        let mut dir_count: HashMap<(u32, u32), Vec<(u32, bool)>> = HashMap::new();
        for (ti, t) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                dir_count
                    .entry(edge_key(a, b))
                    .or_default()
                    .push((ti as u32, a < b));
            }
        }
        let mut keys: Vec<(u32, u32)> = dir_count.keys().copied().collect();
        keys.sort_unstable();
        let mut edges = Vec::with_capacity(keys.len());
        let mut edge_index = HashMap::with_capacity(keys.len());
        for key in keys {
            let inc = &dir_count[&key];
            if inc.len() > 2 {
                return Err(MeshError::NonManifoldEdge(key.0, key.1, inc.len()));
            }
            if inc.len() == 2 && inc[0].1 == inc[1].1 {
                return Err(MeshError::InconsistentOrientation(key.0, key.1));
            }
            let mut tris = [Some(inc[0].0), None];
            if inc.len() == 2 {
                tris[1] = Some(inc[1].0);
            }
            edge_index.insert(key, edges.len() as u32);
            edges.push(Edge { verts: key, tris });
        }

        let rings = build_rings(nv, &triangles)?;

        Ok(SurfaceMesh {
            vertices,
            triangles,
            edges,
            edge_index,
            rings,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn vertex(&self, v: u32) -> Vec3 {
        self.vertices[v as usize]
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: u32) -> [u32; 3] {
        self.triangles[t as usize]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: u32) -> &Edge {
        &self.edges[e as usize]
    }

    pub fn edge_between(&self, a: u32, b: u32) -> Option<u32> {
        self.edge_index.get(&edge_key(a, b)).copied()
    }

    pub fn ring(&self, v: u32) -> &OneRing {
        &self.rings[v as usize]
    }

    pub fn valence(&self, v: u32) -> usize {
        self.rings[v as usize].valence()
    }

    pub fn is_boundary_vertex(&self, v: u32) -> bool {
        !self.rings[v as usize].closed
    }

    /// The two vertices opposite an edge, one per incident triangle.
    pub fn wing_vertices(&self, e: u32) -> [Option<u32>; 2] {
        let edge = &self.edges[e as usize];
        let mut wings = [None, None];
        for (k, t) in edge.tris.iter().enumerate() {
            if let Some(t) = t {
                let tri = self.triangles[*t as usize];
                wings[k] = tri
                    .iter()
                    .copied()
                    .find(|&v| v != edge.verts.0 && v != edge.verts.1);
            }
        }
        wings
    }

    pub fn bounding_box(&self) -> Aabb {
        Aabb::of_points(&self.vertices)
    }

    /// Six times the signed volume enclosed by a closed mesh (divergence
    /// theorem); positive for outward orientation.
    pub fn enclosed_volume_6x(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = [
                    self.vertices[t[0] as usize],
                    self.vertices[t[1] as usize],
                    self.vertices[t[2] as usize],
                ];
                a.cross(b).dot(c)
            })
            .sum()
    }

    /// Same connectivity (and adjacency caches) with replaced positions.
    pub fn with_vertices(&self, vertices: Vec<Vec3>) -> SurfaceMesh {
        assert_eq!(vertices.len(), self.vertices.len());
        SurfaceMesh {
            vertices,
            triangles: self.triangles.clone(),
            edges: self.edges.clone(),
            edge_index: self.edge_index.clone(),
            rings: self.rings.clone(),
        }
    }

    /// Physical point of barycentric coordinates `bary` in triangle `t`.
    pub fn point_in_triangle(&self, t: u32, bary: [f64; 3]) -> Vec3 {
        let tri = self.triangles[t as usize];
        self.vertices[tri[0] as usize] * bary[0]
            + self.vertices[tri[1] as usize] * bary[1]
            + self.vertices[tri[2] as usize] * bary[2]
    }
}

fn build_rings(nv: usize, triangles: &[[u32; 3]]) -> Result<Vec<OneRing>, MeshError> {
    // successor[v]: a -> (b, tri) for each incident triangle (v, a, b)
    let mut successor: Vec<HashMap<u32, (u32, u32)>> = vec![HashMap::new(); nv];
    let mut incident: Vec<u32> = vec![0; nv];
    for (ti, t) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (v, a, b) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
            if successor[v as usize].insert(a, (b, ti as u32)).is_some() {
                return Err(MeshError::OpenOneRing(v));
            }
            incident[v as usize] += 1;
        }
    }
    let mut rings = Vec::with_capacity(nv);
    for v in 0..nv {
        let succ = &successor[v];
        if succ.is_empty() {
            rings.push(OneRing {
                neighbors: Vec::new(),
                triangles: Vec::new(),
                closed: false,
            });
            continue;
        }
        // A start neighbor with no predecessor marks an open fan.
        let mut has_pred: HashMap<u32, bool> = succ.keys().map(|&k| (k, false)).collect();
        for &(b, _) in succ.values() {
            has_pred.insert(b, true);
        }
        let mut starts: Vec<u32> = has_pred
            .iter()
            .filter(|(_, &p)| !p)
            .map(|(&k, _)| k)
            .collect();
        starts.sort_unstable();
        let closed = starts.is_empty();
        if starts.len() > 1 {
            return Err(MeshError::OpenOneRing(v as u32));
        }
        let start = if closed {
            *succ.keys().min().unwrap()
        } else {
            starts[0]
        };
        let mut neighbors = vec![start];
        let mut tris = Vec::new();
        let mut cur = start;
        loop {
            match succ.get(&cur) {
                Some(&(next, tri)) => {
                    tris.push(tri);
                    if next == start {
                        break;
                    }
                    neighbors.push(next);
                    cur = next;
                }
                None => break,
            }
            if tris.len() > succ.len() {
                return Err(MeshError::OpenOneRing(v as u32));
            }
        }
        if tris.len() != incident[v] as usize {
            return Err(MeshError::OpenOneRing(v as u32));
        }
        rings.push(OneRing {
            neighbors,
            triangles: tris,
            closed,
        });
    }
    Ok(rings)
}

/// A tetrahedral mesh with positively oriented elements.
#[derive(Clone, Debug)]
pub struct VolumeMesh {
    vertices: Vec<Vec3>,
    tets: Vec<[u32; 4]>,
}

impl VolumeMesh {
    pub fn new(vertices: Vec<Vec3>, tets: Vec<[u32; 4]>) -> Result<Self, MeshError> {
        let nv = vertices.len();
        for (i, t) in tets.iter().enumerate() {
            for &v in t {
                if v as usize >= nv {
                    return Err(MeshError::VertexOutOfRange(v, nv));
                }
            }
            let vol = tet_signed_volume(
                vertices[t[0] as usize],
                vertices[t[1] as usize],
                vertices[t[2] as usize],
                vertices[t[3] as usize],
            );
            if vol <= 0.0 {
                return Err(MeshError::InvertedTet(i, vol));
            }
        }
        Ok(VolumeMesh { vertices, tets })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn vertex(&self, v: u32) -> Vec3 {
        self.vertices[v as usize]
    }

    pub fn tets(&self) -> &[[u32; 4]] {
        &self.tets
    }

    pub fn bounding_box(&self) -> Aabb {
        Aabb::of_points(&self.vertices)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::vec3;

    fn quad() -> SurfaceMesh {
        // two triangles sharing edge (1, 2)
        SurfaceMesh::new(
            vec![
                vec3(0.0, 0.0, 0.0),
                vec3(1.0, 0.0, 0.0),
                vec3(0.0, 1.0, 0.0),
                vec3(1.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [1, 3, 2]],
        )
        .unwrap()
    }

    #[test]
    fn quad_adjacency() {
        let m = quad();
        assert_eq!(m.edges().len(), 5);
        let shared = m.edge_between(1, 2).unwrap();
        assert_eq!(m.edge(shared).tris[1], Some(1));
        assert_eq!(m.wing_vertices(shared), [Some(0), Some(3)]);
        assert!(m.is_boundary_vertex(0));
        assert_eq!(m.valence(1), 3);
    }

    #[test]
    fn inconsistent_orientation_rejected() {
        let r = SurfaceMesh::new(
            vec![
                vec3(0.0, 0.0, 0.0),
                vec3(1.0, 0.0, 0.0),
                vec3(0.0, 1.0, 0.0),
                vec3(1.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [1, 2, 3]],
        );
        assert!(matches!(r, Err(MeshError::InconsistentOrientation(1, 2))));
    }

    #[test]
    fn nonmanifold_edge_rejected() {
        let r = SurfaceMesh::new(
            vec![
                vec3(0.0, 0.0, 0.0),
                vec3(1.0, 0.0, 0.0),
                vec3(0.0, 1.0, 0.0),
                vec3(0.0, 0.0, 1.0),
                vec3(0.0, -1.0, 0.0),
            ],
            vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]],
        );
        match r {
            Err(MeshError::NonManifoldEdge(0, 1, 3)) => {}
            other => panic!("expected non-manifold error, got {other:?}"),
        }
    }

    #[test]
    fn tet_ring_is_closed_cycle() {
        // regular tetrahedron surface: all vertices valence 3, rings closed
        let m = SurfaceMesh::new(
            vec![
                vec3(1.0, 1.0, 1.0),
                vec3(1.0, -1.0, -1.0),
                vec3(-1.0, -1.0, 1.0),
                vec3(-1.0, 1.0, -1.0),
            ],
            vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [3, 1, 2]],
        )
        .unwrap();
        for v in 0..4 {
            let r = m.ring(v);
            assert!(r.closed);
            assert_eq!(r.valence(), 3);
            assert_eq!(r.triangles.len(), 3);
        }
        assert!(m.enclosed_volume_6x() > 0.0);
    }

    #[test]
    fn inverted_tet_rejected() {
        let r = VolumeMesh::new(
            vec![
                vec3(0.0, 0.0, 0.0),
                vec3(1.0, 0.0, 0.0),
                vec3(0.0, 1.0, 0.0),
                vec3(0.0, 0.0, -1.0),
            ],
            vec![[0, 1, 2, 3]],
        );
        assert!(matches!(r, Err(MeshError::InvertedTet(0, _))));
    }
}
