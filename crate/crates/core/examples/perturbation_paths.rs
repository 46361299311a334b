//! Leading-order eigenvector coefficients of `D + tA` as sums over minimal
//! paths, checked against powers of the propagator and a finite difference.

use anderson_lab::perturbation::{
    coefficient_entry, fourier_pair, minimal_paths, path_sum, propagator, support_distances,
};
use anderson_lab::spectral::{eigh, DEFAULT_EIGH_TOL};
use anderson_lab::TorusGrid;

fn main() -> anderson_lab::Result<()> {
    let grid = TorusGrid::cycle(4)?;
    let a = grid.laplacian();
    let diag = [0.0, 1.0, 2.0, 3.0];
    let (i, k) = (2, 0);

    let paths = minimal_paths(&a, i, k)?;
    println!("minimal paths {i} -> {k}: {paths:?}");
    println!("path sum            {:.12}", path_sum(&diag, &a, i, k)?);
    println!("C^d entry           {:.12}", coefficient_entry(&diag, &a, k, i)?);

    // Eigenvector of D + tA nearest diag[k], normalized so its k-th entry is 1.
    let d = support_distances(&a, k)[i];
    for t in [1e-2, 1e-3, 1e-4] {
        let h = a.scaled(t).add_diagonal(&diag, 1.0)?;
        let e = eigh(&h, DEFAULT_EIGH_TOL)?;
        let idx = (0..4)
            .min_by(|&x, &y| {
                (e.eigenvalues[x] - diag[k])
                    .abs()
                    .total_cmp(&(e.eigenvalues[y] - diag[k]).abs())
            })
            .unwrap();
        let q = &e.eigenvectors[idx];
        println!("t={t:.0e}  phi(i)/phi(k)/t^{d} = {:.9}", q[i] / q[k] / t.powi(d as i32));
    }

    // Random distinct diagonal on a 3x4 grid: every pair agrees.
    let g = TorusGrid::new(&[3, 4])?;
    let a = g.laplacian();
    let diag: Vec<f64> = (0..g.n())
        .map(|x| ((x * 7) % g.n()) as f64 + 0.1 * x as f64 / g.n() as f64)
        .collect();
    let c = propagator(&diag, &a, 5)?;
    let dist = support_distances(&a, 5);
    let worst = (0..g.n())
        .filter(|&i| i != 5)
        .map(|i| (path_sum(&diag, &a, i, 5).unwrap() - c.power_column(dist[i])[i]).abs())
        .fold(0.0, f64::max);
    println!("3x4 grid, anchor 5: max |path sum - C^d| = {worst:.2e}");

    // First-order splitting of a degenerate Laplacian pair on a prime cycle.
    let v = [1.0, 1.0, -1.0, 1.0, -1.0];
    for mode in 1..3 {
        let fp = fourier_pair(&v, mode)?;
        println!("L=5 mode {mode}: splittings {:?}", fp.splittings);
    }
    Ok(())
}
