//! The Jacobi eigensolver on random dense matrices and on cycle Laplacians,
//! where the spectrum is known in closed form.

use std::f64::consts::PI;
use std::time::Instant;

use anderson_lab::selftest::random_symmetric;
use anderson_lab::spectral::{eigh, ipr, DEFAULT_EIGH_TOL};
use anderson_lab::TorusGrid;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> anderson_lab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    println!(
        "{:>4} {:>7} {:>11} {:>11} {:>9}",
        "n", "sweeps", "residual", "orth", "ms"
    );
    for n in [10usize, 50, 100, 200] {
        let m = random_symmetric(n, &mut rng);
        let start = Instant::now();
        let e = eigh(&m, DEFAULT_EIGH_TOL)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        println!(
            "{n:>4} {:>7} {:>11.3e} {:>11.3e} {ms:>9.1}",
            e.sweeps, e.residual, e.orthogonality_defect
        );
    }

    let l = 11;
    let e = eigh(&TorusGrid::cycle(l)?.laplacian(), DEFAULT_EIGH_TOL)?;
    let mut exact: Vec<f64> = (0..l)
        .map(|k| 2.0 - 2.0 * (2.0 * PI * k as f64 / l as f64).cos())
        .collect();
    exact.sort_by(f64::total_cmp);
    let err = e
        .eigenvalues
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!(
        "\ncycle {l}: max eigenvalue error {err:.2e}, min gap {:.2e}",
        e.min_gap()
    );
    let iprs: Vec<f64> = e.eigenvectors.iter().map(|q| ipr(q)).collect::<Result<_, _>>()?;
    println!("ground state IPR {:.4} (1/L = {:.4})", iprs[0], 1.0 / l as f64);

    // A tolerance below roundoff is reported, not ignored.
    match eigh(&random_symmetric(20, &mut rng), 1e-30) {
        Ok(_) => println!("unexpected success"),
        Err(err) => println!("tol 1e-30: {err}"),
    }
    Ok(())
}
