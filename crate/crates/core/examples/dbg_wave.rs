use limitmesh::geometry::vec3;
use limitmesh::homesh::generate_ho_surface_mesh;
use limitmesh::mesh::{complete_model, extract_boundary};
use limitmesh::nodes::{make_distribution, NodeKind};
use limitmesh::samples;
use limitmesh::volume::curve_volume_with_surface;

fn main() {
    let q = 4usize;
    for (n, lam) in [(6usize, 2.0f64), (6, 1.0), (8, 2.0), (6, 3.0)] {
        let h = 1.0;
        let dims = vec3(n as f64 * h, n as f64 * h, 3.0 * h);
        let amp = 0.3 * h;
        let (mesh, vmodel) = samples::box_volume(n, n, 3, dims);
        let (bmesh, bmodel, corr) = extract_boundary(&mesh, &vmodel).unwrap();
        let bmodel = complete_model(&bmesh, bmodel).unwrap();
        let dist = make_distribution(q, NodeKind::Equispaced).unwrap();
        let (mut surface, _) = generate_ho_surface_mesh(&bmesh, &bmodel, q, &dist, 0).unwrap();
        // sinusoidal displacement of the top-face nodes
        let top = dims.z;
        for p in surface.nodes.iter_mut() {
            if (p.z - top).abs() < 1e-9 {
                p.z += amp
                    * (2.0 * std::f64::consts::PI * p.x / (lam * h)).sin()
                    * (2.0 * std::f64::consts::PI * p.y / (lam * h)).sin();
            }
        }
        let out = curve_volume_with_surface(&mesh, bmesh, bmodel, corr, surface, q, NodeKind::Equispaced).unwrap();
        print!("n={n} lam={lam}: ");
        for r in &out.reports {
            print!("{}: min {:.2} inv {} | ", r.stage, r.min_quality, r.inverted);
        }
        println!();
    }
}
