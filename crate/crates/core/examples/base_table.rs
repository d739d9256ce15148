//! Prints b(alpha, d) for alpha, d in 1..=5 next to the naive per-bin bound
//! 1 - e^(-alpha), which always overestimates it.
//!
//! cargo run --example base_table

use minload::asymptotics::{base, naive_base, round_half_even, table};
use minload::Params;

fn main() {
    let alphas: Vec<f64> = (1..=5).map(f64::from).collect();
    let ds: Vec<u32> = (1..=5).collect();
    let grid = table(&alphas, &ds);

    print!("alpha\\d");
    for d in &ds {
        print!("{d:>9}");
    }
    println!("{:>12}", "1-e^-alpha");
    for (alpha, row) in alphas.iter().zip(&grid.cells) {
        print!("{alpha:>7}");
        for cell in row {
            match cell {
                Some(b) => print!("{b:>9.4}"),
                None => print!("{:>9}", "-"),
            }
        }
        println!("{:>12.4}", naive_base(*alpha));
    }

    // non-integer alpha works the same way
    let r = base(&Params::new(2.5, 2).unwrap()).unwrap();
    println!(
        "\nb(2.5, 2) = {:.6} (lambda = {:.6}, zeta = {:.6})",
        round_half_even(r.b, 6),
        r.lambda.unwrap(),
        r.zeta.unwrap()
    );
}
