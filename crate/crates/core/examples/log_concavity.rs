//! Self-convolutions of the truncated Poisson pmf stay log-concave, and the
//! probability at the mean stays within a factor e of the peak.
//!
//! cargo run --example log_concavity

use minload::logconcave::{convolve, is_log_concave, verify_lemma4, verify_lemma5, Pmf};
use minload::{Params, TruncatedPoisson};

fn main() {
    let base = TruncatedPoisson::new(Params::new(2.0, 1).unwrap())
        .unwrap()
        .to_pmf();
    let mut acc = base.clone();
    let mut kept = Vec::new();
    for n in 1..=64u32 {
        if n > 1 {
            acc = convolve(&acc, &base).unwrap();
        }
        let (ratio, holds) = verify_lemma5(&acc).unwrap();
        if n.is_power_of_two() {
            println!(
                "n = {n:>2}: log-concave {}, p_mu/p_hat = {ratio:.6} (bound holds: {holds})",
                is_log_concave(&acc)
            );
            kept.push(acc.clone());
        }
    }

    println!("\np_hat * (1 + sigma) over the same sums:");
    for (sigma, product) in verify_lemma4(&kept).unwrap() {
        println!("  sigma = {sigma:>7.4}  product = {product:.4}");
    }

    println!("\ngeometric pmfs approach the 1/e limit from above:");
    for q in [0.5, 0.1, 0.01, 0.001] {
        let (ratio, _) = verify_lemma5(&Pmf::geometric(q).unwrap()).unwrap();
        println!("  q = {q:<6} ratio = {ratio:.6}");
    }
    println!("  1/e        = {:.6}", (-1.0f64).exp());

    let gap = Pmf::new(0, vec![0.5, 0.0, 0.5]).unwrap();
    println!("\ntwo-point mass with a gap is log-concave: {}", is_log_concave(&gap));
}
