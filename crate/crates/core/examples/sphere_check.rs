use limitmesh::homesh::generate_ho_surface_mesh;
use limitmesh::mesh::infer_features;
use limitmesh::metrics::model_distance;
use limitmesh::nodes::{make_distribution, NodeKind};
use limitmesh::samples;

fn main() {
    let t0 = std::time::Instant::now();
    let mesh = samples::reference_sphere();
    let tags = vec![1u32; mesh.triangles().len()];
    let model = infer_features(&mesh, &tags).unwrap();
    for kind in [NodeKind::Equispaced, NodeKind::WarpBlend] {
        print!("{kind:<12}");
        for q in 1..=8 {
            let dist = make_distribution(q, kind).unwrap();
            let (ho, ev) = generate_ho_surface_mesh(&mesh, &model, q, &dist, 0).unwrap();
            let rep = model_distance(&ev, &ho, 1.0);
            print!(" {:.3e}", rep.model_distance);
        }
        println!(" [{:?}]", t0.elapsed());
    }
}
