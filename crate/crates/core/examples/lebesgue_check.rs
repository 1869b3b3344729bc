use limitmesh::metrics::{lebesgue_constant, LEBESGUE_GRID_DEGREE};
use limitmesh::nodes::{make_distribution, NodeKind};

fn main() {
    let t0 = std::time::Instant::now();
    for kind in [NodeKind::Equispaced, NodeKind::WarpBlend] {
        print!("{kind:<12}");
        for q in 1..=10 {
            let d = make_distribution(q, kind).unwrap();
            let r = lebesgue_constant(&d, LEBESGUE_GRID_DEGREE).unwrap();
            print!(" {:.2}", r.lambda);
        }
        println!();
    }
    println!("elapsed: {:?}", t0.elapsed());
}
