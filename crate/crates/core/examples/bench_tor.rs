use planar_loops::exactlin::CoeffRing;
use planar_loops::loops::BarVariant;
use planar_loops::torext::{tor_f2_dimension, tor_table};

fn main() {
    let t0 = std::time::Instant::now();
    let table = tor_table(&CoeffRing::integers(0), 2, 4, BarVariant::Normalized).unwrap();
    println!("integral Tor through q=4: {:?}", t0.elapsed());
    for q in 0..=4 {
        println!("Tor_{q} = {}", table.degree_summary(q));
    }
    let t1 = std::time::Instant::now();
    let dim5 = tor_f2_dimension(2, 5);
    println!("dim_F2 Tor_5 = {dim5}  ({:?})", t1.elapsed());
    println!("total: {:?}", t0.elapsed());
}
