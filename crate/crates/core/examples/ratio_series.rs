//! Exact probabilities divided by b^n settle to a constant as n grows; at
//! alpha = d the extra sqrt(d n) factor is divided out as well.
//!
//! cargo run --release --example ratio_series

use minload::exact::ratio_series;

fn main() {
    for (alpha, d, ns) in [
        (2.0, 1, vec![10, 20, 40, 80, 160]),
        (3.0, 2, vec![10, 20, 40, 80]),
        (1.5, 1, vec![10, 20, 40, 80]),
        (1.0, 1, vec![10, 20, 50, 100, 200]),
        (2.0, 2, vec![10, 20, 50, 100]),
    ] {
        let s = ratio_series(alpha, d, &ns).unwrap();
        println!("alpha = {alpha}, d = {d}, b = {:.6} ({:?})", s.b, s.branch);
        for e in &s.entries {
            println!("  n = {:>4}  Pr[E] = {:.4e}  ratio = {:.6}", e.n, e.exact.to_f64(), e.ratio);
        }
    }
    println!("\nsqrt(2 pi) = {:.6}", (2.0 * std::f64::consts::PI).sqrt());
}
