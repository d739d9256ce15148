//! Monte Carlo estimate of the minimum-load event against the exact value.
//! The result depends only on the seed, not on the number of threads.
//!
//! cargo run --release --example monte_carlo

use minload::exact::{exact_probability, Instance};
use minload::simulate::simulate_event;

fn main() {
    let inst = Instance::new(20, 40, 1).unwrap();
    let exact = exact_probability(&inst).unwrap().to_f64();
    println!("exact Pr[E] for n=20, m=40, d=1: {exact:.6e}");

    for seed in 0..5 {
        let s = simulate_event(&inst, 1_000_000, seed).unwrap();
        println!(
            "seed {seed}: {:.6e} +- {:.1e}  covers exact: {}",
            s.estimate,
            s.ci_halfwidth,
            s.contains(exact)
        );
    }

    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let single = one.install(|| simulate_event(&inst, 200_000, 7).unwrap());
    let multi = simulate_event(&inst, 200_000, 7).unwrap();
    println!("seed 7, 1 thread vs default pool: {} == {}", single.successes, multi.successes);
}
