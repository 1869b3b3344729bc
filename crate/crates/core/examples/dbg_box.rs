use limitmesh::geometry::vec3;
use limitmesh::nodes::{tet_equispaced, NodeKind};
use limitmesh::samples;
use limitmesh::volume::{build_volume_topology, generate_ho_volume_mesh};

fn main() {
    let (mesh, model) = samples::box_volume(2, 2, 2, vec3(1.0, 1.0, 1.0));
    let out = generate_ho_volume_mesh(&mesh, &model, 3, NodeKind::Equispaced).unwrap();
    let topo = build_volume_topology(&mesh, 3);
    let dist = tet_equispaced(3);
    let mut worst = (0.0, 0usize, 0usize);
    for (ti, el) in topo.elements.iter().enumerate() {
        let tet = mesh.tets()[ti];
        for (slot, &n) in el.iter().enumerate() {
            let l = dist.points[slot];
            let affine = mesh.vertex(tet[0]) * l[0]
                + mesh.vertex(tet[1]) * l[1]
                + mesh.vertex(tet[2]) * l[2]
                + mesh.vertex(tet[3]) * l[3];
            let d = (out.volume.nodes[n as usize] - affine).norm();
            if d > worst.0 { worst = (d, ti, slot); }
        }
    }
    println!("worst {:?}", worst);
    let (_, ti, slot) = worst;
    let tet = mesh.tets()[ti];
    let n = topo.elements[ti][slot];
    let l = dist.points[slot];
    println!("tet {ti} slot {slot} node {n} l {:?}", l);
    println!("node pos {:?}", out.volume.nodes[n as usize]);
    let affine = mesh.vertex(tet[0]) * l[0] + mesh.vertex(tet[1]) * l[1] + mesh.vertex(tet[2]) * l[2] + mesh.vertex(tet[3]) * l[3];
    println!("affine   {:?}", affine);
    println!("pre-tfi  {:?}", out.pre_tfi_nodes[n as usize]);
    for r in &out.reports { println!("{}: min {} inv {}", r.stage, r.min_quality, r.inverted); }
}
