//! IPR sweep over a log-spaced coupling grid. Weak coupling gives extended
//! eigenvectors, strong coupling localizes them.
//!
//! Pass a path to also write the full `t,k,lambda,log_ipr` table:
//!
//! ```bash
//! cargo run --release --example localization_heatmap -- /tmp/heatmap.csv
//! ```

use std::io::Write;

use anderson_lab::probability::PotentialDistribution;
use anderson_lab::spectral::{ipr_heatmap, DEFAULT_EIGH_TOL};
use anderson_lab::TorusGrid;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = TorusGrid::cycle(50)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let v = PotentialDistribution::Uniform { a: -1.0, b: 1.0 }.sample(grid.n(), &mut rng)?;

    let ts: Vec<f64> = (0..13).map(|i| 10f64.powf(-2.0 + 0.5 * i as f64)).collect();
    let rows = ipr_heatmap(&grid, &v, &ts, DEFAULT_EIGH_TOL)?;

    println!("{:>10} {:>10} {:>10}", "t", "mean IPR", "max IPR");
    for &t in &ts {
        let iprs: Vec<f64> = rows.iter().filter(|r| r.t == t).map(|r| r.log_ipr.exp()).collect();
        let mean = iprs.iter().sum::<f64>() / iprs.len() as f64;
        let max = iprs.iter().cloned().fold(0.0, f64::max);
        let bar = "#".repeat((mean * 40.0).round() as usize);
        println!("{t:>10.3e} {mean:>10.4} {max:>10.4} {bar}");
    }

    if let Some(path) = std::env::args().nth(1) {
        let mut out = std::io::BufWriter::new(std::fs::File::create(&path)?);
        writeln!(out, "t,k,lambda,log_ipr")?;
        for r in &rows {
            writeln!(out, "{:.16e},{},{:.16e},{:.16e}", r.t, r.k, r.lambda, r.log_ipr)?;
        }
        println!("wrote {} rows to {path}", rows.len());
    }
    Ok(())
}
