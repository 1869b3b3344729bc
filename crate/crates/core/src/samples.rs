//! Synthetic sample meshes.
//!
//! Small generators used by tests, benchmarks, and the command-line examples:
//! closed quadric-ish surfaces (sphere, cylinder, torus), tagged cubes, and
//! structured tetrahedral boxes.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::geometry::{vec3, Vec3};
use crate::mesh::{SurfaceMesh, VolumeMesh, VolumeModel};

/// Longitude/latitude sphere: `n_lon` segments, `n_lat` latitude bands.
///
/// Has `2 + n_lon * (n_lat - 1)` vertices; the poles have valence `n_lon`,
/// the rings next to them valence 5, all other vertices valence 6.
pub fn uv_sphere(n_lon: usize, n_lat: usize, radius: f64) -> SurfaceMesh {
    assert!(n_lon >= 3 && n_lat >= 2);
    let mut vertices = vec![vec3(0.0, 0.0, radius)];
    for k in 1..n_lat {
        let theta = PI * k as f64 / n_lat as f64;
        for j in 0..n_lon {
            let phi = 2.0 * PI * j as f64 / n_lon as f64;
            vertices.push(vec3(
                radius * theta.sin() * phi.cos(),
                radius * theta.sin() * phi.sin(),
                radius * theta.cos(),
            ));
        }
    }
    let south = vertices.len() as u32;
    vertices.push(vec3(0.0, 0.0, -radius));

    let ring = |k: usize, j: usize| -> u32 { (1 + (k - 1) * n_lon + j % n_lon) as u32 };
    let mut triangles = Vec::new();
    for j in 0..n_lon {
        triangles.push([0, ring(1, j), ring(1, j + 1)]);
    }
    for k in 1..n_lat - 1 {
        for j in 0..n_lon {
            let (a, a1) = (ring(k, j), ring(k, j + 1));
            let (b, b1) = (ring(k + 1, j), ring(k + 1, j + 1));
            triangles.push([a, b, b1]);
            triangles.push([a, b1, a1]);
        }
    }
    for j in 0..n_lon {
        triangles.push([south, ring(n_lat - 1, j + 1), ring(n_lat - 1, j)]);
    }
    SurfaceMesh::new(vertices, triangles).expect("uv sphere is manifold")
}

/// The sphere discretization used by the convergence suite: 450 nodes,
/// 896 triangles (16 longitude segments, 29 latitude bands, radius 1).
pub fn reference_sphere() -> SurfaceMesh {
    uv_sphere(16, 29, 1.0)
}

/// Regular icosahedron (12 vertices of valence 5).
pub fn icosahedron(radius: f64) -> SurfaceMesh {
    let t = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let s = radius / (1.0 + t * t).sqrt();
    let raw = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ];
    let vertices = raw.iter().map(|&(x, y, z)| vec3(x, y, z) * s).collect();
    let faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    SurfaceMesh::new(vertices, faces).expect("icosahedron is manifold")
}

/// Unit cube surface with an `n`x`n` grid per face.
///
/// Returns the mesh and per-triangle surface tags 1..=6
/// (1 top z=1, 2 bottom z=0, 3 x=0, 4 x=1, 5 y=0, 6 y=1).
pub fn cube_surface(n: usize) -> (SurfaceMesh, Vec<u32>) {
    assert!(n >= 1);
    let mut key_to_index: HashMap<[usize; 3], u32> = HashMap::new();
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut triangles = Vec::new();
    let mut tags = Vec::new();

    let mut vertex = |key: [usize; 3], vertices: &mut Vec<Vec3>| -> u32 {
        *key_to_index.entry(key).or_insert_with(|| {
            let idx = vertices.len() as u32;
            vertices.push(vec3(
                key[0] as f64 / n as f64,
                key[1] as f64 / n as f64,
                key[2] as f64 / n as f64,
            ));
            idx
        })
    };

    // face id, lattice key as function of (u, v)
    let faces: [(u32, Box<dyn Fn(usize, usize) -> [usize; 3]>); 6] = [
        (1, Box::new(move |u, v| [u, v, n])),
        (2, Box::new(move |u, v| [v, u, 0])),
        (3, Box::new(move |u, v| [0, v, u])),
        (4, Box::new(move |u, v| [n, u, v])),
        (5, Box::new(move |u, v| [u, 0, v])),
        (6, Box::new(move |u, v| [v, n, u])),
    ];
    for (id, key_of) in &faces {
        for i in 0..n {
            for j in 0..n {
                let p00 = vertex(key_of(i, j), &mut vertices);
                let p10 = vertex(key_of(i + 1, j), &mut vertices);
                let p01 = vertex(key_of(i, j + 1), &mut vertices);
                let p11 = vertex(key_of(i + 1, j + 1), &mut vertices);
                triangles.push([p00, p10, p11]);
                triangles.push([p00, p11, p01]);
                tags.push(*id);
                tags.push(*id);
            }
        }
    }
    let mesh = SurfaceMesh::new(vertices, triangles).expect("cube surface is manifold");
    (mesh, tags)
}

/// Closed cylinder (radius 1, height 1): `n_seg` angular segments, `n_h`
/// height steps. Tags: side 1 (split into 1 and 2 at the x-z plane when
/// `split_side`), top cap 3, bottom cap 4.
pub fn cylinder_surface(n_seg: usize, n_h: usize, split_side: bool) -> (SurfaceMesh, Vec<u32>) {
    assert!(n_seg >= 3 && n_h >= 1);
    if split_side {
        assert!(n_seg % 2 == 0, "split cylinder needs an even segment count");
    }
    let mut vertices = Vec::new();
    for k in 0..=n_h {
        let z = k as f64 / n_h as f64;
        for j in 0..n_seg {
            let phi = 2.0 * PI * j as f64 / n_seg as f64;
            vertices.push(vec3(phi.cos(), phi.sin(), z));
        }
    }
    let bottom_center = vertices.len() as u32;
    vertices.push(vec3(0.0, 0.0, 0.0));
    let top_center = vertices.len() as u32;
    vertices.push(vec3(0.0, 0.0, 1.0));

    let at = |k: usize, j: usize| -> u32 { (k * n_seg + j % n_seg) as u32 };
    let mut triangles = Vec::new();
    let mut tags = Vec::new();
    for k in 0..n_h {
        for j in 0..n_seg {
            let side_id = if split_side && j >= n_seg / 2 { 2 } else { 1 };
            triangles.push([at(k, j), at(k, j + 1), at(k + 1, j + 1)]);
            triangles.push([at(k, j), at(k + 1, j + 1), at(k + 1, j)]);
            tags.push(side_id);
            tags.push(side_id);
        }
    }
    for j in 0..n_seg {
        triangles.push([top_center, at(n_h, j), at(n_h, j + 1)]);
        tags.push(3);
        triangles.push([bottom_center, at(0, j + 1), at(0, j)]);
        tags.push(4);
    }
    let mesh = SurfaceMesh::new(vertices, triangles).expect("cylinder is manifold");
    (mesh, tags)
}

/// Structured torus (major radius `major`, tube radius `minor`) with an
/// `n`x`m` grid. Closed, every vertex regular, no features.
pub fn torus(n: usize, m: usize, major: f64, minor: f64) -> SurfaceMesh {
    assert!(n >= 3 && m >= 3);
    let mut vertices = Vec::with_capacity(n * m);
    for i in 0..n {
        let theta = 2.0 * PI * i as f64 / n as f64;
        for j in 0..m {
            let phi = 2.0 * PI * j as f64 / m as f64;
            let rad = major + minor * phi.cos();
            vertices.push(vec3(
                rad * theta.cos(),
                rad * theta.sin(),
                minor * phi.sin(),
            ));
        }
    }
    let at = |i: usize, j: usize| -> u32 { ((i % n) * m + j % m) as u32 };
    let mut triangles = Vec::with_capacity(2 * n * m);
    for i in 0..n {
        for j in 0..m {
            triangles.push([at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
            triangles.push([at(i, j), at(i + 1, j + 1), at(i, j + 1)]);
        }
    }
    SurfaceMesh::new(vertices, triangles).expect("torus is manifold")
}

/// Planar structured hexagonal patch of side `n` on the equilateral lattice
/// (z=0 plane). Interior vertices are regular; the six corners have valence 3,
/// so no degenerate valence-2 boundary vertices occur.
pub fn planar_patch(n: usize) -> SurfaceMesh {
    assert!(n >= 1);
    let side = 2 * n + 1;
    let in_domain =
        |i: isize, j: isize| -> bool { (0..side as isize).contains(&i) && (0..side as isize).contains(&j) && (n as isize..=3 * n as isize).contains(&(i + j)) };
    let mut index: HashMap<(isize, isize), u32> = HashMap::new();
    let mut vertices = Vec::new();
    for j in 0..side as isize {
        for i in 0..side as isize {
            if in_domain(i, j) {
                index.insert((i, j), vertices.len() as u32);
                vertices.push(vec3(
                    i as f64 + 0.5 * j as f64,
                    j as f64 * 3.0_f64.sqrt() / 2.0,
                    0.0,
                ));
            }
        }
    }
    let mut triangles = Vec::new();
    for j in 0..side as isize {
        for i in 0..side as isize {
            if in_domain(i, j) && in_domain(i + 1, j) && in_domain(i, j + 1) {
                triangles.push([index[&(i, j)], index[&(i + 1, j)], index[&(i, j + 1)]]);
            }
            if in_domain(i + 1, j) && in_domain(i + 1, j + 1) && in_domain(i, j + 1) {
                triangles.push([
                    index[&(i + 1, j)],
                    index[&(i + 1, j + 1)],
                    index[&(i, j + 1)],
                ]);
            }
        }
    }
    SurfaceMesh::new(vertices, triangles).expect("patch is manifold")
}

/// Two rectangular half-planes meeting along the y-axis segment with an
/// interior dihedral angle `dihedral_deg`; tags 1 and 2. The crease is the
/// inferred interface. Each side is an `n`x`n` grid of width 1, height 1.
pub fn wedge(dihedral_deg: f64, n: usize) -> (SurfaceMesh, Vec<u32>) {
    let theta = dihedral_deg.to_radians();
    let d_a = vec3(-1.0, 0.0, 0.0);
    let d_b = vec3(-theta.cos(), 0.0, theta.sin());
    let mut vertices = Vec::new();
    // crease vertices first: x = 0 column shared by both sides
    for j in 0..=n {
        vertices.push(vec3(0.0, j as f64 / n as f64, 0.0));
    }
    let side = |dir: Vec3, vertices: &mut Vec<Vec3>| -> Vec<u32> {
        let mut idx = Vec::new();
        for i in 1..=n {
            for j in 0..=n {
                idx.push(vertices.len() as u32);
                vertices.push(dir * (i as f64 / n as f64) + vec3(0.0, j as f64 / n as f64, 0.0));
            }
        }
        idx
    };
    let a_idx = side(d_a, &mut vertices);
    let b_idx = side(d_b, &mut vertices);
    let col = |side_idx: &[u32], i: usize, j: usize| -> u32 {
        if i == 0 {
            j as u32
        } else {
            side_idx[(i - 1) * (n + 1) + j]
        }
    };
    // checkerboard diagonals keep every outer grid corner at valence >= 3
    // (no degenerate valence-2 crease vertices); requires even n
    assert!(n % 2 == 0, "wedge needs an even grid count");
    let mut triangles = Vec::new();
    let mut tags = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let (p00, p10, p01, p11) = (
                col(&a_idx, i, j),
                col(&a_idx, i + 1, j),
                col(&a_idx, i, j + 1),
                col(&a_idx, i + 1, j + 1),
            );
            // side A is oriented ccw viewed from +z over the flat sheet
            if (i + j) % 2 == 0 {
                triangles.push([p00, p01, p11]);
                triangles.push([p00, p11, p10]);
            } else {
                triangles.push([p00, p01, p10]);
                triangles.push([p10, p01, p11]);
            }
            tags.push(1);
            tags.push(1);
            let (q00, q10, q01, q11) = (
                col(&b_idx, i, j),
                col(&b_idx, i + 1, j),
                col(&b_idx, i, j + 1),
                col(&b_idx, i + 1, j + 1),
            );
            if (i + j) % 2 == 0 {
                triangles.push([q00, q11, q01]);
                triangles.push([q00, q10, q11]);
            } else {
                triangles.push([q00, q10, q01]);
                triangles.push([q10, q11, q01]);
            }
            tags.push(2);
            tags.push(2);
        }
    }
    let mesh = SurfaceMesh::new(vertices, triangles).expect("wedge is manifold");
    (mesh, tags)
}

/// Closed extruded airfoil-like tube: a lens cross-section with a smooth
/// (near-tangent) leading edge at x=0 and a sharp trailing edge at x=1,
/// extruded along z with flat end caps.
///
/// Tags: top 1, bottom 2, front cap 3, back cap 4.
pub fn airfoil_tube(n_chord: usize, n_span: usize, thickness: f64) -> (SurfaceMesh, Vec<u32>) {
    assert!(n_chord >= 4 && n_span >= 1);
    // chord stations clustered at the leading edge so the smooth join is
    // resolved; profile y = t * sqrt(x) * (1 - x)
    let xs: Vec<f64> = (0..=n_chord)
        .map(|k| {
            let s = k as f64 / n_chord as f64;
            s * s
        })
        .collect();
    let half = |x: f64| thickness * x.sqrt() * (1.0 - x);

    // cross-section polygon: top from trailing to leading, then bottom back
    let mut section: Vec<(f64, f64)> = Vec::new();
    for &x in xs.iter().rev() {
        section.push((x, half(x)));
    }
    for &x in xs.iter().skip(1).take(n_chord - 1) {
        section.push((x, -half(x)));
    }
    let m = section.len();
    let top_range = 0..=n_chord; // indices of the top polyline within `section`

    let mut vertices = Vec::new();
    for k in 0..=n_span {
        let z = k as f64 / n_span as f64;
        for &(x, y) in &section {
            vertices.push(vec3(x, y, z));
        }
    }
    let _ = top_range;
    let at = |k: usize, j: usize| -> u32 { (k * m + j % m) as u32 };
    let mut triangles = Vec::new();
    let mut tags = Vec::new();
    for k in 0..n_span {
        for j in 0..m {
            // section edges 0..n_chord walk the top polyline
            let id = if j < n_chord { 1 } else { 2 };
            triangles.push([at(k, j), at(k + 1, j + 1), at(k + 1, j)]);
            triangles.push([at(k, j), at(k, j + 1), at(k + 1, j + 1)]);
            tags.push(id);
            tags.push(id);
        }
    }
    // caps: fans around the section centroid
    let centroid: (f64, f64) = (
        section.iter().map(|p| p.0).sum::<f64>() / m as f64,
        section.iter().map(|p| p.1).sum::<f64>() / m as f64,
    );
    let front_center = vertices.len() as u32;
    vertices.push(vec3(centroid.0, centroid.1, 0.0));
    let back_center = vertices.len() as u32;
    vertices.push(vec3(centroid.0, centroid.1, 1.0));
    // the section runs counterclockwise viewed from +z, so the front cap
    // (outward -z) reverses it and the back cap keeps it
    for j in 0..m {
        triangles.push([front_center, at(0, j + 1), at(0, j)]);
        tags.push(3);
        triangles.push([back_center, at(n_span, j), at(n_span, j + 1)]);
        tags.push(4);
    }
    let mesh = SurfaceMesh::new(vertices, triangles).expect("airfoil tube is manifold");
    (mesh, tags)
}

/// Unit cube decomposed into 5 tetrahedra, boundary faces tagged by cube
/// side (same ids as [`cube_surface`]).
pub fn cube_volume_five_tets() -> (VolumeMesh, VolumeModel) {
    let corners: Vec<Vec3> = (0..8)
        .map(|i| {
            vec3(
                (i & 1) as f64,
                ((i >> 1) & 1) as f64,
                ((i >> 2) & 1) as f64,
            )
        })
        .collect();
    let tets = vec![
        [0, 1, 2, 4],
        [3, 2, 1, 7],
        [5, 1, 4, 7],
        [6, 4, 2, 7],
        [1, 2, 4, 7],
    ];
    let mesh = VolumeMesh::new(corners, tets).expect("five-tet cube is valid");
    let model = tag_box_boundary(&mesh, vec3(0.0, 0.0, 0.0), vec3(1.0, 1.0, 1.0));
    (mesh, model)
}

/// Structured tetrahedral box `[0,dims.x] x [0,dims.y] x [0,dims.z]` with
/// `nx*ny*nz` cells, six tetrahedra per cell (Kuhn split). Boundary faces
/// tagged by box side (same ids as [`cube_surface`]).
pub fn box_volume(nx: usize, ny: usize, nz: usize, dims: Vec3) -> (VolumeMesh, VolumeModel) {
    box_volume_with_top(nx, ny, nz, dims, |_, _| 0.0)
}

/// Same as [`box_volume`] but with the top-plane vertices displaced in z by
/// `bump(x, y)`; interior planes are blended linearly so elements stay valid
/// for moderate bumps.
pub fn box_volume_with_top(
    nx: usize,
    ny: usize,
    nz: usize,
    dims: Vec3,
    bump: impl Fn(f64, f64) -> f64,
) -> (VolumeMesh, VolumeModel) {
    assert!(nx >= 1 && ny >= 1 && nz >= 1);
    let mut vertices = Vec::new();
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                let x = dims.x * i as f64 / nx as f64;
                let y = dims.y * j as f64 / ny as f64;
                let frac = k as f64 / nz as f64;
                let z = dims.z * frac + frac * bump(x, y);
                vertices.push(vec3(x, y, z));
            }
        }
    }
    let at = |i: usize, j: usize, k: usize| -> u32 {
        (k * (ny + 1) * (nx + 1) + j * (nx + 1) + i) as u32
    };
    // Kuhn split around the main diagonal c0 -> c7
    const KUHN: [[usize; 4]; 6] = [
        [0, 1, 3, 7],
        [0, 3, 2, 7],
        [0, 2, 6, 7],
        [0, 6, 4, 7],
        [0, 4, 5, 7],
        [0, 5, 1, 7],
    ];
    let mut tets = Vec::new();
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let c = [
                    at(i, j, k),
                    at(i + 1, j, k),
                    at(i, j + 1, k),
                    at(i + 1, j + 1, k),
                    at(i, j, k + 1),
                    at(i + 1, j, k + 1),
                    at(i, j + 1, k + 1),
                    at(i + 1, j + 1, k + 1),
                ];
                for t in KUHN {
                    tets.push([c[t[0]], c[t[1]], c[t[2]], c[t[3]]]);
                }
            }
        }
    }
    let mesh = VolumeMesh::new(vertices, tets).expect("box volume is valid");
    let model = tag_box_boundary(&mesh, vec3(0.0, 0.0, 0.0), dims);
    (mesh, model)
}

/// Tags boundary faces of an axis-aligned box mesh by side; faces not on a
/// side plane (e.g. a displaced top) are tagged with the top id.
fn tag_box_boundary(mesh: &VolumeMesh, lo: Vec3, hi: Vec3) -> VolumeModel {
    use crate::lattice::TET_FACES;
    let mut counts: HashMap<[u32; 3], usize> = HashMap::new();
    let mut faces: Vec<[u32; 3]> = Vec::new();
    for tet in mesh.tets() {
        for f in TET_FACES {
            let mut tri = [tet[f[0]], tet[f[1]], tet[f[2]]];
            tri.sort_unstable();
            *counts.entry(tri).or_insert(0) += 1;
            faces.push(tri);
        }
    }
    let eps = 1e-12 * (hi - lo).norm().max(1.0);
    let mut model = VolumeModel::default();
    let mut seen: HashMap<[u32; 3], ()> = HashMap::new();
    for tri in faces {
        if counts[&tri] != 1 || seen.insert(tri, ()).is_some() {
            continue;
        }
        let pts = [
            mesh.vertex(tri[0]),
            mesh.vertex(tri[1]),
            mesh.vertex(tri[2]),
        ];
        let all = |f: &dyn Fn(Vec3) -> f64, v: f64| pts.iter().all(|&p| (f(p) - v).abs() < eps);
        let id = if all(&|p| p.z, lo.z) {
            2
        } else if all(&|p| p.x, lo.x) {
            3
        } else if all(&|p| p.x, hi.x) {
            4
        } else if all(&|p| p.y, lo.y) {
            5
        } else if all(&|p| p.y, hi.y) {
            6
        } else {
            1 // top, possibly displaced
        };
        model.surfaces.entry(id).or_default().push(tri);
    }
    model
}
