//! Exact bad probability on prime cycles, checked against brute-force
//! enumeration of every ±1 pattern with the numerical pipeline.
//!
//! ```bash
//! cargo run --release --example prime_cycle_probability
//! ```

use anderson_lab::probability::{enumerate_bernoulli, exact_bad_prob_prime_cycle, Classifier};
use anderson_lab::TorusGrid;

fn main() -> anderson_lab::Result<()> {
    println!(
        "{:>3} {:>5} {:>12} {:>12} {:>12}",
        "L", "p", "formula", "reflection", "pipeline"
    );
    for l in [3usize, 5, 7, 11] {
        let grid = TorusGrid::cycle(l)?;
        for p in [0.2, 0.5] {
            let formula = exact_bad_prob_prime_cycle(l, p)?;
            let reflection = enumerate_bernoulli(&grid, p, &Classifier::PrimeReflection)?.estimate;
            let pipeline = enumerate_bernoulli(&grid, p, &Classifier::pipeline())?.estimate;
            println!("{l:>3} {p:>5} {formula:>12.8} {reflection:>12.8} {pipeline:>12.8}");
        }
    }

    // The formula alone scales to much longer cycles.
    println!();
    for l in [13usize, 17, 19, 23, 29, 31, 37] {
        println!("L={l:<3} P(bad | p=0.5) = {:.3e}", exact_bad_prob_prime_cycle(l, 0.5)?);
    }
    Ok(())
}
