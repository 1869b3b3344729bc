//! Boundary extraction from tetrahedral meshes.

use std::collections::{BTreeMap, HashMap};

use super::{FeatureModel, SurfaceMesh, VolumeMesh, VolumeModel};
use crate::error::MeshError;
use crate::lattice::TET_FACES;

/// Links a boundary surface mesh back to its volume mesh.
#[derive(Clone, Debug)]
pub struct BoundaryCorrespondence {
    /// Per boundary triangle: (tet index, local face index per [`TET_FACES`]).
    pub tri_to_tet_face: Vec<(u32, u8)>,
    /// Per surface vertex: the volume vertex it came from.
    pub surface_to_volume_vertex: Vec<u32>,
    /// Per volume vertex: the surface vertex, if on the boundary.
    pub volume_to_surface_vertex: Vec<Option<u32>>,
}

fn sorted3(mut t: [u32; 3]) -> [u32; 3] {
    t.sort_unstable();
    t
}

/// Extracts the boundary of a tetrahedral mesh as an outward-oriented
/// surface mesh, restricting the volume feature model to it.
pub fn extract_boundary(
    mesh: &VolumeMesh,
    model: &VolumeModel,
) -> Result<(SurfaceMesh, FeatureModel, BoundaryCorrespondence), MeshError> {
    // count face incidence
    let mut faces: HashMap<[u32; 3], Vec<(u32, u8)>> = HashMap::new();
    for (ti, tet) in mesh.tets().iter().enumerate() {
        for (fi, f) in TET_FACES.iter().enumerate() {
            let tri = [tet[f[0]], tet[f[1]], tet[f[2]]];
            faces
                .entry(sorted3(tri))
                .or_default()
                .push((ti as u32, fi as u8));
        }
    }

    let mut boundary: Vec<([u32; 3], (u32, u8))> = Vec::new();
    for (key, inc) in &faces {
        match inc.len() {
            1 => {
                let (tet, face) = inc[0];
                let f = TET_FACES[face as usize];
                let t = mesh.tets()[tet as usize];
                boundary.push(([t[f[0]], t[f[1]], t[f[2]]], (tet, face)));
            }
            2 => {}
            n => {
                return Err(MeshError::NonManifoldEdge(key[0], key[1], n));
            }
        }
    }
    boundary.sort_by_key(|(tri, _)| sorted3(*tri));

    // compact vertex numbering in order of first appearance over sorted faces
    let mut vol_to_surf: Vec<Option<u32>> = vec![None; mesh.vertices().len()];
    let mut surf_to_vol: Vec<u32> = Vec::new();
    let mut vertices = Vec::new();
    let mut triangles = Vec::with_capacity(boundary.len());
    let mut tri_to_tet_face = Vec::with_capacity(boundary.len());
    for (tri, origin) in &boundary {
        let mut out = [0u32; 3];
        for (k, &v) in tri.iter().enumerate() {
            let sv = match vol_to_surf[v as usize] {
                Some(sv) => sv,
                None => {
                    let sv = surf_to_vol.len() as u32;
                    vol_to_surf[v as usize] = Some(sv);
                    surf_to_vol.push(v);
                    vertices.push(mesh.vertex(v));
                    sv
                }
            };
            out[k] = sv;
        }
        triangles.push(out);
        tri_to_tet_face.push(*origin);
    }

    let surface = SurfaceMesh::new(vertices, triangles)?;

    // restrict the model
    let mut face_tag: HashMap<[u32; 3], u32> = HashMap::new();
    for (&sid, tris) in &model.surfaces {
        for &t in tris {
            face_tag.insert(sorted3(t), sid);
        }
    }
    let mut surfaces: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for (t, (tri, _)) in boundary.iter().enumerate() {
        let key = sorted3(*tri);
        let sid = face_tag
            .get(&key)
            .copied()
            .ok_or(MeshError::UntaggedBoundaryTriangle(t))?;
        surfaces.entry(sid).or_default().push(t as u32);
    }

    let to_surf = |v: u32| -> Result<u32, MeshError> {
        vol_to_surf
            .get(v as usize)
            .copied()
            .flatten()
            .ok_or(MeshError::VertexOutOfRange(v, surf_to_vol.len()))
    };
    let mut curves: BTreeMap<u32, Vec<(u32, u32)>> = BTreeMap::new();
    for (&cid, edges) in &model.curves {
        let mut out = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            let (sa, sb) = (to_surf(a)?, to_surf(b)?);
            out.push(super::edge_key(sa, sb));
        }
        out.sort_unstable();
        curves.insert(cid, out);
    }
    let mut points = BTreeMap::new();
    for (&pid, &v) in &model.points {
        points.insert(pid, to_surf(v)?);
    }

    let feature_model = FeatureModel {
        points,
        curves,
        surfaces,
    };

    Ok((
        surface,
        feature_model,
        BoundaryCorrespondence {
            tri_to_tet_face,
            surface_to_volume_vertex: surf_to_vol,
            volume_to_surface_vertex: vol_to_surf,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::vec3;
    use crate::samples;

    #[test]
    fn single_tet_boundary_is_closed_outward_surface() {
        let mesh = VolumeMesh::new(
            vec![
                vec3(0.0, 0.0, 0.0),
                vec3(1.0, 0.0, 0.0),
                vec3(0.0, 1.0, 0.0),
                vec3(0.0, 0.0, 1.0),
            ],
            vec![[0, 1, 2, 3]],
        )
        .unwrap();
        let mut model = VolumeModel::default();
        for (k, f) in TET_FACES.iter().enumerate() {
            model
                .surfaces
                .insert(k as u32 + 1, vec![[f[0] as u32, f[1] as u32, f[2] as u32]]);
        }
        let (surf, fm, corr) = extract_boundary(&mesh, &model).unwrap();
        assert_eq!(surf.triangles().len(), 4);
        assert_eq!(fm.surfaces.len(), 4);
        assert!(surf.enclosed_volume_6x() > 0.0);
        assert_eq!(corr.tri_to_tet_face.len(), 4);
    }

    #[test]
    fn two_tets_share_one_face() {
        let mesh = VolumeMesh::new(
            vec![
                vec3(0.0, 0.0, 0.0),
                vec3(1.0, 0.0, 0.0),
                vec3(0.0, 1.0, 0.0),
                vec3(0.0, 0.0, 1.0),
                vec3(1.0, 1.0, 1.0),
            ],
            vec![[0, 1, 2, 3], [1, 2, 3, 4]],
        )
        .unwrap();
        let mut model = VolumeModel::default();
        // tag every candidate face with one id; only boundary faces are used
        let mut all = Vec::new();
        for tet in mesh.tets() {
            for f in TET_FACES {
                all.push([tet[f[0]], tet[f[1]], tet[f[2]]]);
            }
        }
        model.surfaces.insert(7, all);
        let (surf, fm, _) = extract_boundary(&mesh, &model).unwrap();
        assert_eq!(surf.triangles().len(), 6);
        assert_eq!(fm.surfaces[&7].len(), 6);
        // the shared face (1,2,3) is absent
        for t in surf.triangles() {
            let mut vol_ids: Vec<u32> = t.iter().map(|&v| v).collect();
            vol_ids.sort_unstable();
            assert_ne!(vol_ids, vec![1, 2, 3]);
        }
    }

    #[test]
    fn five_tet_cube_has_twelve_boundary_triangles() {
        let (mesh, model) = samples::cube_volume_five_tets();
        let (surf, fm, _) = extract_boundary(&mesh, &model).unwrap();
        assert_eq!(surf.triangles().len(), 12);
        assert!(surf.enclosed_volume_6x() > 0.0);
        assert_eq!((surf.enclosed_volume_6x() / 6.0 - 1.0).abs() < 1e-12, true);
        assert_eq!(fm.surfaces.values().map(|v| v.len()).sum::<usize>(), 12);
    }
}
