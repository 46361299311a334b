//! Classify a handful of potentials and show which route decided each verdict.
//!
//! ```bash
//! cargo run --example classify_potentials
//! ```

use anderson_lab::classify::{classify, ClassifyParams};
use anderson_lab::probability::PotentialDistribution;
use anderson_lab::{Potential, TorusGrid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn describe(label: &str, grid: &TorusGrid, v: &Potential) -> anderson_lab::Result<()> {
    let c = classify(grid, v, &ClassifyParams::default())?;
    println!("{label:<28} dims={:?} verdict={}", grid.dims(), c.verdict.name());
    if let Some(cert) = &c.certificate {
        println!("    certificate: order {} reason {:?}", cert.order, cert.reason);
    }
    if let Some(absence) = &c.reflection_absence {
        println!("    no reflection center, witnesses {:?}", absence.witnesses);
    }
    for r in &c.reports {
        println!(
            "    t={:.4} min_gap={:.3e} min_entry={:.3e} pass={}",
            r.t,
            r.min_gap,
            r.min_entry,
            r.passes()
        );
    }
    Ok(())
}

fn main() -> anderson_lab::Result<()> {
    let c5 = TorusGrid::cycle(5)?;
    let c7 = TorusGrid::cycle(7)?;
    let sq = TorusGrid::new(&[3, 4])?;

    describe("constant", &c5, &Potential::constant(1.0, 5))?;
    describe(
        "mirror symmetric about 0",
        &c5,
        &Potential::explicit(vec![1.0, 1.0, -1.0, -1.0, 1.0]),
    )?;
    describe(
        "no mirror",
        &c7,
        &Potential::explicit(vec![1.0, 1.0, 1.0, -1.0, 1.0, -1.0, -1.0]),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let v = PotentialDistribution::Uniform { a: -1.0, b: 1.0 }.sample(sq.n(), &mut rng)?;
    describe("uniform sample", &sq, &v)?;

    // A stripe pattern on 3x4 is invariant under shifting the first axis.
    let stripes = Potential::explicit((0..12).map(|x| if x % 4 < 2 { 1.0 } else { -1.0 }).collect());
    describe("stripes", &sq, &stripes)?;
    Ok(())
}
