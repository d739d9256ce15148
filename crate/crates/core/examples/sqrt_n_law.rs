//! Pr[N_Z = alpha n] * sqrt(n) levels off as n grows, where N_Z is a sum of n
//! tuned truncated Poisson variables.
//!
//! cargo run --release --example sqrt_n_law

use minload::simulate::{nz_distribution, sqrt_n_law};
use minload::{Params, TruncatedPoisson};

fn main() {
    let (alpha, d) = (2.0, 1);
    let ns = [1, 4, 16, 64, 256, 1024];
    for (n, v) in sqrt_n_law(alpha, d, &ns).unwrap() {
        println!("n = {n:>5}: Pr[N_Z = {}] * sqrt(n) = {v:.6}", (alpha * n as f64) as u64);
    }
    let (_, var) = TruncatedPoisson::new(Params::new(alpha, d).unwrap())
        .unwrap()
        .moments();
    println!(
        "local CLT limit 1/sqrt(2 pi Var Z) = {:.6}",
        1.0 / (2.0 * std::f64::consts::PI * var).sqrt()
    );

    let pmf = nz_distribution(alpha, d, 256).unwrap();
    println!(
        "\nN_Z for n = 256: support [{}, {}], mean {:.6}, truncated mass {:.1e}",
        pmf.offset(),
        pmf.max_index(),
        pmf.mean(),
        pmf.lost_mass()
    );
}
