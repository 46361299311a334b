//! Seeded Monte Carlo estimates of the bad fraction. Each trial has its own
//! generator, so results do not depend on the rayon thread count.
//!
//! ```bash
//! ANDERSON_LAB_THREADS=1 cargo run --release --example monte_carlo
//! ```

use anderson_lab::probability::{
    exact_bad_prob_prime_cycle, lower_bound_bad, monte_carlo, Classifier, PotentialDistribution,
};
use anderson_lab::TorusGrid;

fn main() -> anderson_lab::Result<()> {
    let c7 = TorusGrid::cycle(7)?;
    let bern = PotentialDistribution::Bernoulli { p: 0.5 };
    let exact = exact_bad_prob_prime_cycle(7, 0.5)?;
    println!("L=7, exact {exact}");
    for trials in [100u64, 1_000, 10_000, 100_000] {
        let est = monte_carlo(&c7, &bern, trials, 42, &Classifier::PrimeReflection)?;
        println!(
            "  {trials:>6} trials: {:.5} ± {:.5}  (|err|/se = {:.2})",
            est.estimate,
            est.stderr,
            (est.estimate - exact).abs() / est.stderr
        );
    }

    let grid = TorusGrid::new(&[4, 4])?;
    for p in [0.1, 0.3, 0.5] {
        let est = monte_carlo(
            &grid,
            &PotentialDistribution::Bernoulli { p },
            400,
            1,
            &Classifier::pipeline(),
        )?;
        println!(
            "4x4 p={p}: bad {:.4} ± {:.4}, bound {:.4e}, verdicts {:?}",
            est.estimate,
            est.stderr,
            lower_bound_bad(&[4, 4], p)?,
            est.counts_by_verdict
        );
    }

    let est = monte_carlo(
        &grid,
        &PotentialDistribution::Uniform { a: -1.0, b: 1.0 },
        200,
        1,
        &Classifier::pipeline(),
    )?;
    println!("4x4 uniform: verdicts {:?}", est.counts_by_verdict);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("thread pool");
    let serial = pool.install(|| monte_carlo(&grid, &bern, 200, 9, &Classifier::pipeline()))?;
    let parallel = monte_carlo(&grid, &bern, 200, 9, &Classifier::pipeline())?;
    println!("serial and parallel runs agree: {}", serial == parallel);
    Ok(())
}
