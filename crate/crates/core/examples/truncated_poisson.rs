//! Tunes the truncated Poisson distribution to a target mean and samples it.
//!
//! cargo run --example truncated_poisson -- 3.5 2

use minload::{Params, TruncatedPoisson};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut args = std::env::args().skip(1);
    let alpha: f64 = args.next().map_or(2.0, |a| a.parse().expect("alpha"));
    let d: u32 = args.next().map_or(1, |a| a.parse().expect("d"));

    let tp = TruncatedPoisson::new(Params::new(alpha, d).expect("alpha >= d >= 1"))
        .expect("alpha > d for tuning");
    let (mean, var) = tp.moments();
    println!("alpha = {alpha}, d = {d}");
    println!("lambda = {:.12}", tp.lambda());
    println!("zeta   = {:.12}", tp.zeta());
    println!("mean   = {mean:.12}, variance = {var:.12}");
    println!(
        "support tabulated up to {} (tail mass {:.1e})",
        tp.support_limit(),
        tp.tail_mass()
    );

    for i in d as u64..(d as u64 + 6) {
        println!("  Pr[Z = {i}] = {:.8}", tp.pmf(i));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let draws = 200_000;
    let total: u64 = (0..draws).map(|_| tp.sample(&mut rng)).sum();
    println!("sample mean of {draws} draws: {:.5}", total as f64 / draws as f64);
}
