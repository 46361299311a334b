//! Reduced-scale versions of the acceptance checks, runnable from the binary.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{classify, prime_cycle_is_bad, ClassifyParams};
use crate::grid::{SymmetricMatrix, TorusGrid};
use crate::perturbation::{path_sum, propagator, support_distances};
use crate::probability::{
    enumerate_bernoulli, exact_bad_prob_prime_cycle, lower_bound_bad, monte_carlo, shift_symmetric_mass, Classifier,
    PotentialDistribution,
};
use crate::spectral::{eigh, ipr, ipr_heatmap, Potential, Tolerances, DEFAULT_EIGH_TOL};
use crate::symmetry::{find_certificate, observe_certificate, DEFAULT_POOL_CAP};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelftestOptions {
    /// Eigensolver tolerance used by every spectral check.
    pub eigh_tol: f64,
    pub seed: u64,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self {
            eigh_tol: DEFAULT_EIGH_TOL,
            seed: 20_251,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, outcome: crate::Result<(bool, String)>) -> CheckResult {
    match outcome {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Symmetric matrix with entries uniform in `[-1, 1)`.
pub fn random_symmetric<R: Rng>(n: usize, rng: &mut R) -> SymmetricMatrix {
    let mut m = SymmetricMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            m.set(i, j, rng.random_range(-1.0..1.0));
        }
    }
    m
}

pub fn run_selftest(opts: &SelftestOptions) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let params = ClassifyParams {
        tolerances: Tolerances {
            eigh: opts.eigh_tol,
            ..Tolerances::default()
        },
        ..ClassifyParams::default()
    };
    let numerical = ClassifyParams {
        use_certificates: false,
        use_prime_criterion: false,
        ..params.clone()
    };

    let mut out = Vec::new();

    out.push(check(
        "exact-formula-enumeration",
        (|| {
            let mut worst: f64 = 0.0;
            for l in [3, 5, 7] {
                for p in [0.3, 0.5] {
                    let grid = TorusGrid::cycle(l)?;
                    let e = enumerate_bernoulli(&grid, p, &Classifier::PrimeReflection)?;
                    worst = worst.max((e.estimate - exact_bad_prob_prime_cycle(l, p)?).abs());
                }
            }
            Ok((worst <= 1e-12, format!("max deviation {worst:e}")))
        })(),
    ));

    out.push(check(
        "shift-bound-equals-mass",
        (|| {
            let mut worst: f64 = 0.0;
            for dims in [vec![5], vec![3, 3]] {
                for p in [0.1, 0.5] {
                    let grid = TorusGrid::new(&dims)?;
                    worst = worst.max((lower_bound_bad(&dims, p)? - shift_symmetric_mass(&grid, p)?).abs());
                }
            }
            Ok((worst <= 1e-12, format!("max deviation {worst:e}")))
        })(),
    ));

    out.push(check(
        "reflection-vs-numerical",
        (|| {
            let grid = TorusGrid::cycle(5)?;
            let mut disagreements = 0;
            for bits in 0..32u64 {
                let v = Potential::from_sign_bits(bits, 5);
                let numeric = classify(&grid, &v, &numerical)?.verdict;
                if numeric.is_bad() != prime_cycle_is_bad(v.values()) {
                    disagreements += 1;
                }
            }
            Ok((
                disagreements == 0,
                format!("{disagreements} disagreements over 32 patterns"),
            ))
        })(),
    ));

    out.push(check(
        "continuous-potentials-good",
        (|| {
            let grid = TorusGrid::cycle(5)?;
            let dist = PotentialDistribution::Uniform { a: -1.0, b: 1.0 };
            let est = monte_carlo(
                &grid,
                &dist,
                20,
                opts.seed,
                &Classifier::Pipeline { params: params.clone() },
            )?;
            Ok((
                est.count(crate::classify::Verdict::GoodNumerical) == est.trials,
                format!("{:?}", est.counts_by_verdict),
            ))
        })(),
    ));

    out.push(check(
        "path-sum-propagator",
        (|| {
            let grid = TorusGrid::new(&[3, 4])?;
            let a = grid.laplacian();
            let diag: Vec<f64> = (0..grid.n()).map(|x| x as f64 + rng.random_range(0.0..0.5)).collect();
            let mut worst: f64 = 0.0;
            for k in 0..grid.n() {
                let c = propagator(&diag, &a, k)?;
                let dist = support_distances(&a, k);
                for i in (0..grid.n()).filter(|&i| i != k) {
                    let via_power = c.power_column(dist[i])[i];
                    worst = worst.max((path_sum(&diag, &a, i, k)? - via_power).abs());
                }
            }
            Ok((worst <= 1e-12, format!("max deviation {worst:e}")))
        })(),
    ));

    out.push(check(
        "eigensolver-residual",
        (|| {
            let mut worst: f64 = 0.0;
            for n in [2, 7, 16, 30] {
                let m = random_symmetric(n, &mut rng);
                let e = eigh(&m, opts.eigh_tol)?;
                worst = worst.max(e.residual).max(e.orthogonality_defect);
            }
            Ok((worst <= 1e-10, format!("max residual/defect {worst:e}")))
        })(),
    ));

    out.push(check(
        "localization-heatmap",
        (|| {
            let grid = TorusGrid::cycle(20)?;
            let v = Potential::explicit((0..20).map(|_| rng.random_range(-1.0..1.0)).collect());
            let rows = ipr_heatmap(&grid, &v, &[0.1, 5.0], opts.eigh_tol)?;
            let mean = |t: f64| {
                let sel: Vec<f64> = rows.iter().filter(|r| r.t == t).map(|r| r.log_ipr.exp()).collect();
                sel.iter().sum::<f64>() / sel.len() as f64
            };
            let (lo, hi) = (mean(0.1), mean(5.0));
            let e = eigh(&crate::spectral::hamiltonian(&grid, &v, 1e6)?, opts.eigh_tol)?;
            let min_ipr = e
                .eigenvectors
                .iter()
                .map(|q| ipr(q))
                .collect::<crate::Result<Vec<_>>>()?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            Ok((
                rows.len() == 40 && hi > lo && min_ipr >= 0.9,
                format!("mean ipr {lo:.4} -> {hi:.4}, min ipr at t=1e6 {min_ipr:.4}"),
            ))
        })(),
    ));

    out.push(check(
        "certificate-soundness",
        (|| {
            let mut checked = 0;
            let mut invisible = 0;
            for dims in [vec![5], vec![3, 3]] {
                let grid = TorusGrid::new(&dims)?;
                for _ in 0..10 {
                    let v = PotentialDistribution::Bernoulli { p: 0.5 }.sample(grid.n(), &mut rng)?;
                    if let Some(cert) = find_certificate(&grid, &v, DEFAULT_POOL_CAP)?.certificate() {
                        for t in [0.61, 1.13, 1.87] {
                            checked += 1;
                            if !observe_certificate(&grid, &v, cert, t, 1e-6)?.visible {
                                invisible += 1;
                            }
                        }
                    }
                }
            }
            Ok((invisible == 0, format!("{checked} observations, {invisible} invisible")))
        })(),
    ));

    out
}
