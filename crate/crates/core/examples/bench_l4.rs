use planar_loops::exactlin::CoeffRing;
use planar_loops::loops::{build_loops_complex, BarVariant};

fn main() {
    let t0 = std::time::Instant::now();
    let ring = CoeffRing::integers(0);
    let c = build_loops_complex(&ring, 2, 0, 5, BarVariant::Unreduced).unwrap();
    println!("build: {:?}", t0.elapsed());
    for q in 0..=5u32 {
        let dims: Vec<(String, usize)> = c
            .block_keys()
            .filter(|(d, _)| *d == q)
            .map(|(d, w)| (format!("{w}"), c.dim(d, w)))
            .collect();
        let total: usize = dims.iter().map(|(_, n)| n).sum();
        println!("q={q}: total {total} blocks {dims:?}");
    }
    let t1 = std::time::Instant::now();
    let table = c.homology_table(4).unwrap();
    println!("homology through q=4: {:?}", t1.elapsed());
    for q in 0..=4 {
        println!("H_{q} = {}", table.degree_summary(q));
    }
    println!("total: {:?}", t0.elapsed());
}
