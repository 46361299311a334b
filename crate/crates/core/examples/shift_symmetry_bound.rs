//! Inclusion-exclusion lower bound on the bad probability, compared with the
//! mass of shift-invariant patterns and with the exact enumerated bad mass.
//!
//! ```bash
//! cargo run --release --example shift_symmetry_bound
//! ```

use anderson_lab::probability::{enumerate_bernoulli, lower_bound_bad, shift_symmetric_mass, Classifier};
use anderson_lab::TorusGrid;

fn main() -> anderson_lab::Result<()> {
    println!(
        "{:<10} {:>5} {:>12} {:>12} {:>12}",
        "dims", "p", "bound", "shift mass", "bad mass"
    );
    for dims in [vec![4usize], vec![6], vec![9], vec![3, 3], vec![3, 4]] {
        let grid = TorusGrid::new(&dims)?;
        for p in [0.1, 0.5] {
            let bound = lower_bound_bad(&dims, p)?;
            let mass = shift_symmetric_mass(&grid, p)?;
            let bad = enumerate_bernoulli(&grid, p, &Classifier::pipeline())?;
            println!(
                "{:<10} {p:>5} {bound:>12.6e} {mass:>12.6e} {:>12.6e}",
                format!("{dims:?}"),
                bad.estimate
            );
        }
    }

    // Larger grids: only the bound is cheap.
    println!();
    for dims in [vec![10usize, 10], vec![5, 5, 5], vec![101]] {
        println!("{dims:?}: bound at p=0.5 is {:.3e}", lower_bound_bad(&dims, 0.5)?);
    }
    Ok(())
}
