//! Exact probability that every bin gets at least d balls, checked against
//! full enumeration and, for d = 1, inclusion-exclusion.
//!
//! cargo run --example exact_probability

use minload::exact::{
    brute_force_probability, exact_probability, inclusion_exclusion_d1, Instance,
};

fn main() {
    for (n, m, d) in [(2, 4, 1), (2, 4, 2), (3, 6, 2), (4, 9, 2)] {
        let inst = Instance::new(n, m, d).unwrap();
        let fast = exact_probability(&inst).unwrap();
        let slow = brute_force_probability(&inst).unwrap();
        println!(
            "n={n} m={m} d={d}: {} (enumeration agrees: {})",
            fast.ratio_string(),
            fast == slow
        );
    }

    let inst = Instance::new(30, 60, 1).unwrap();
    let p = exact_probability(&inst).unwrap();
    let ie = inclusion_exclusion_d1(30, 60).unwrap();
    println!(
        "\nn=30 m=60 d=1: {:.6e}, inclusion-exclusion agrees: {}",
        p.to_f64(),
        p.probability == ie.probability
    );

    let inst = Instance::new(100, 300, 2).unwrap();
    let p = exact_probability(&inst).unwrap();
    println!(
        "n=100 m=300 d=2: {:.6e} ({} digit denominator)",
        p.to_f64(),
        p.probability.denom().to_string().len()
    );
}
