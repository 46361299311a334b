//! Acceptance criteria. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line; exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use anderson_lab::classify::{classify, generic_t_samples, prime_cycle_is_bad, ClassifyParams, Verdict};
use anderson_lab::cli::{cmd_heatmap, PotentialSource, RunConfig, TGrid};
use anderson_lab::grid::TorusGrid;
use anderson_lab::perturbation::{path_sum, propagator, support_distances};
use anderson_lab::probability::{
    enumerate_bernoulli, exact_bad_prob_prime_cycle, lower_bound_bad, monte_carlo, shift_symmetric_mass, trial_rng,
    Classifier, PotentialDistribution,
};
use anderson_lab::selftest::random_symmetric;
use anderson_lab::spectral::{eigh, hamiltonian, ipr, Potential, DEFAULT_EIGH_TOL};
use anderson_lab::symmetry::{find_certificate, observe_certificate, BadnessReason, DEFAULT_POOL_CAP};
use anderson_lab::Result;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Outcome {
    if cond {
        Ok(String::new())
    } else {
        Err(msg.into())
    }
}

fn lib<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn within_budget(start: Instant, budget: Duration) -> Outcome {
    ensure(
        start.elapsed() < budget,
        format!("runtime {:?} over budget {budget:?}", start.elapsed()),
    )
}

/// Exact prime-cycle formula against exhaustive enumeration with the reflection classifier.
fn exact_formula_vs_enumeration() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for l in [3, 5, 7, 11, 13] {
        for p in [0.3, 0.5] {
            let grid = lib(TorusGrid::cycle(l))?;
            let e = lib(enumerate_bernoulli(&grid, p, &Classifier::PrimeReflection))?;
            let formula = lib(exact_bad_prob_prime_cycle(l, p))?;
            let dev = (e.estimate - formula).abs();
            worst = worst.max(dev);
            ensure(
                dev <= 1e-12,
                format!("L={l} p={p}: enumeration {} vs formula {formula}", e.estimate),
            )?;
        }
    }
    for (l, want) in [(3, 1.0), (5, 1.0), (7, 25.0 / 32.0)] {
        let got = lib(exact_bad_prob_prime_cycle(l, 0.5))?;
        ensure((got - want).abs() <= 1e-12, format!("spot L={l}: {got} != {want}"))?;
    }
    within_budget(start, Duration::from_secs(60))?;
    Ok(format!("max deviation {worst:.2e}"))
}

/// Inclusion-exclusion bound equals the enumerated shift-symmetric mass, and
/// lower-bounds the enumerated bad mass.
fn shift_bound_vs_mass() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for dims in [vec![5], vec![7], vec![3, 3], vec![3, 5]] {
        let grid = lib(TorusGrid::new(&dims))?;
        for p in [0.1, 0.5] {
            let bound = lib(lower_bound_bad(&dims, p))?;
            let mass = lib(shift_symmetric_mass(&grid, p))?;
            worst = worst.max((bound - mass).abs());
            ensure(
                (bound - mass).abs() <= 1e-12,
                format!("{dims:?} p={p}: bound {bound} vs mass {mass}"),
            )?;
        }
    }
    let mut detail = String::new();
    for dims in [vec![5], vec![7], vec![3, 3]] {
        let grid = lib(TorusGrid::new(&dims))?;
        let classifier = if grid.is_cycle() {
            Classifier::PrimeReflection
        } else {
            Classifier::pipeline()
        };
        for p in [0.1, 0.5] {
            let bound = lib(lower_bound_bad(&dims, p))?;
            let e = lib(enumerate_bernoulli(&grid, p, &classifier))?;
            ensure(
                e.count(Verdict::Inconclusive) == 0,
                format!("{dims:?}: inconclusive verdicts"),
            )?;
            ensure(
                e.estimate >= bound - 1e-12,
                format!("{dims:?} p={p}: bad {} < bound {bound}", e.estimate),
            )?;
            if dims == [3, 3] && p == 0.5 {
                ensure((bound - 7.0 / 256.0).abs() <= 1e-15, format!("[3,3] bound {bound}"))?;
                ensure(
                    e.estimate > bound,
                    format!("[3,3] bad mass {} not above bound", e.estimate),
                )?;
                detail = format!("[3,3] p=1/2: bad mass {} > bound {bound}", e.estimate);
            }
        }
    }
    within_budget(start, Duration::from_secs(120))?;
    Ok(format!("max |bound-mass| {worst:.2e}; {detail}"))
}

/// Reflection criterion and numerical sweep give the same partition on prime cycles.
fn reflection_cross_oracle() -> Outcome {
    let params = ClassifyParams::numerical_only();
    let mut summary = Vec::new();
    for l in [5usize, 7] {
        let grid = lib(TorusGrid::cycle(l))?;
        let mut disagreements = Vec::new();
        let mut bad = 0;
        for bits in 0..1u64 << l {
            let v = Potential::from_sign_bits(bits, l);
            let exact_bad = prime_cycle_is_bad(v.values());
            let numeric = lib(classify(&grid, &v, &params))?.verdict;
            bad += usize::from(exact_bad);
            let agrees = if exact_bad { numeric.is_bad() } else { numeric.is_good() };
            if !agrees {
                disagreements.push((bits, numeric));
            }
        }
        ensure(
            disagreements.is_empty(),
            format!("L={l}: disagreements {disagreements:?}"),
        )?;
        summary.push(format!("L={l}: {bad}/{} bad", 1u64 << l));
    }
    Ok(format!("0 disagreements ({})", summary.join(", ")))
}

/// Continuous potentials are good.
fn continuous_potentials_good() -> Outcome {
    let dist = PotentialDistribution::Uniform { a: -1.0, b: 1.0 };
    for dims in [vec![5], vec![3, 3]] {
        let grid = lib(TorusGrid::new(&dims))?;
        let est = lib(monte_carlo(&grid, &dist, 200, 1_000_003, &Classifier::pipeline()))?;
        ensure(
            est.count(Verdict::GoodNumerical) == 200 && est.estimate == 0.0,
            format!("{dims:?}: {:?}", est.counts_by_verdict),
        )?;
    }
    Ok("400/400 GoodNumerical, bad fraction 0".into())
}

fn random_dims<R: Rng>(rng: &mut R) -> Vec<usize> {
    let choices: [&[usize]; 12] = [
        &[5],
        &[8],
        &[11],
        &[16],
        &[25],
        &[3, 3],
        &[3, 4],
        &[4, 4],
        &[3, 5],
        &[4, 5],
        &[5, 5],
        &[3, 7],
    ];
    choices[rng.random_range(0..choices.len())].to_vec()
}

/// Distinct diagonal: a shuffled `0..n` with jitter in `[0, 0.5)`, so gaps are at least 0.5.
fn random_diag<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut base: Vec<usize> = (0..n).collect();
    base.shuffle(rng);
    base.into_iter()
        .map(|x| x as f64 + rng.random_range(0.0..0.5))
        .collect()
}

/// Least-squares slope of `log|y|` against `log t`.
fn loglog_slope(ts: &[f64], ys: &[f64]) -> f64 {
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ls: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ls.iter().sum::<f64>() / ls.len() as f64;
    let cov: f64 = xs.iter().zip(&ls).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

/// Path sums against propagator powers, support zeros, and finite-difference slopes.
fn perturbation_coefficients() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut worst: f64 = 0.0;
    let mut pairs = 0usize;
    for _ in 0..50 {
        let grid = lib(TorusGrid::new(&random_dims(&mut rng)))?;
        let n = grid.n();
        let a = grid.laplacian();
        let diag = random_diag(n, &mut rng);
        for k in 0..n {
            let c = lib(propagator(&diag, &a, k))?;
            let dist = support_distances(&a, k);
            let mut column = vec![0.0f64; n];
            column[k] = 1.0;
            for j in 0..=grid.diameter() {
                for i in 0..n {
                    if dist[i] > j && column[i].abs() > 1e-12 {
                        return Err(format!("support zero violated: (C^{j})({i},{k}) = {}", column[i]));
                    }
                    if dist[i] == j && i != k {
                        let s = lib(path_sum(&diag, &a, i, k))?;
                        let err = (s - column[i]).abs() / column[i].abs().max(1.0);
                        worst = worst.max(err);
                        pairs += 1;
                        ensure(
                            err <= 1e-12,
                            format!("path sum {s} vs (C^{j})({i},{k}) = {}", column[i]),
                        )?;
                    }
                }
                column = c.mul_vec(&column);
            }
        }
    }

    let ts = [1e-3, 1e-4, 1e-5];
    let mut slopes = Vec::new();
    let grid = lib(TorusGrid::new(&[4, 5]))?;
    let a = grid.laplacian();
    while slopes.len() < 10 {
        let diag = random_diag(grid.n(), &mut rng);
        let k = rng.random_range(0..grid.n());
        let i = rng.random_range(0..grid.n());
        let d = lib(grid.distance(i, k))?;
        if !(1..=2).contains(&d) {
            continue;
        }
        let coef = lib(anderson_lab::perturbation::coefficient_entry(&diag, &a, k, i))?;
        let mut ys = Vec::new();
        for &t in &ts {
            // D + tA
            let h = lib(a.scaled(t).add_diagonal(&diag, 1.0))?;
            let e = lib(eigh(&h, DEFAULT_EIGH_TOL))?;
            let q = e
                .eigenvectors
                .iter()
                .max_by(|x, y| x[k].abs().total_cmp(&y[k].abs()))
                .expect("nonempty");
            let phi = q[i] / q[k];
            ensure(
                ((phi.abs() / (coef.abs() * t.powi(d as i32))) - 1.0).abs() < 0.05,
                format!(
                    "t={t} pair ({i},{k}) d={d}: |phi|={} vs coef*t^d={}",
                    phi.abs(),
                    coef.abs() * t.powi(d as i32)
                ),
            )?;
            ys.push(phi);
        }
        let slope = loglog_slope(&ts, &ys);
        ensure(
            (slope - d as f64).abs() <= 0.05,
            format!("pair ({i},{k}) d={d}: slope {slope}"),
        )?;
        slopes.push((d, slope));
    }
    let max_slope_err = slopes.iter().map(|(d, s)| (s - *d as f64).abs()).fold(0.0, f64::max);
    Ok(format!(
        "{pairs} pairs, max rel err {worst:.2e}; 10 slopes, max |slope-d| {max_slope_err:.2e}"
    ))
}

/// Jacobi eigensolver accuracy on random matrices and cycle Laplacians.
fn eigensolver_quality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut worst: f64 = 0.0;
    for idx in 0..100 {
        let n = if idx == 0 {
            200
        } else {
            1 + rng.random_range(1..=200usize) / (1 + idx % 3)
        };
        let m = random_symmetric(n, &mut rng);
        let e = lib(eigh(&m, DEFAULT_EIGH_TOL))?;
        let scale = m.max_abs().max(1.0);
        let rec = e.reconstruct();
        let rec_err = rec
            .iter()
            .zip(m.as_slice())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
            / scale;
        let trace_err = (e.eigenvalues.iter().sum::<f64>() - m.trace()).abs();
        worst = worst.max(rec_err).max(e.orthogonality_defect).max(e.residual / scale);
        ensure(rec_err <= 1e-10, format!("n={n}: reconstruction {rec_err:e}"))?;
        ensure(
            e.orthogonality_defect <= 1e-10,
            format!("n={n}: orthogonality {:e}", e.orthogonality_defect),
        )?;
        ensure(
            trace_err <= 1e-9 * n as f64 * scale,
            format!("n={n}: trace {trace_err:e}"),
        )?;
    }
    for l in [4usize, 5, 50] {
        let e = lib(eigh(&lib(TorusGrid::cycle(l))?.laplacian(), DEFAULT_EIGH_TOL))?;
        let mut want: Vec<f64> = (0..l)
            .map(|k| 2.0 - 2.0 * (2.0 * std::f64::consts::PI * k as f64 / l as f64).cos())
            .collect();
        want.sort_by(f64::total_cmp);
        let err = e
            .eigenvalues
            .iter()
            .zip(&want)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        ensure(err <= 1e-10, format!("cycle {l}: spectrum error {err:e}"))?;
    }
    Ok(format!(
        "max normalized defect {worst:.2e} over 100 matrices; cycle spectra ok"
    ))
}

/// Localization increases with coupling; heatmap shape and reproducibility.
fn localization_heatmap() -> Outcome {
    let grid = lib(TorusGrid::cycle(50))?;
    let dist = PotentialDistribution::Uniform { a: -1.0, b: 1.0 };
    let v = lib(dist.sample(50, &mut trial_rng(7, 0)))?;
    let mean_ipr = |t: f64| -> std::result::Result<f64, String> {
        let e = lib(eigh(&lib(hamiltonian(&grid, &v, t))?, DEFAULT_EIGH_TOL))?;
        let iprs = lib(e.eigenvectors.iter().map(|q| ipr(q)).collect::<Result<Vec<_>>>())?;
        Ok(iprs.iter().sum::<f64>() / iprs.len() as f64)
    };
    let (lo, hi) = (mean_ipr(0.1)?, mean_ipr(5.0)?);
    ensure(hi > lo, format!("mean IPR at t=5 ({hi}) not above t=0.1 ({lo})"))?;

    let mut sorted = v.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    ensure(sorted.windows(2).all(|w| w[0] < w[1]), "potential entries not distinct")?;
    let e = lib(eigh(&lib(hamiltonian(&grid, &v, 1e6))?, DEFAULT_EIGH_TOL))?;
    let min_ipr = lib(e.eigenvectors.iter().map(|q| ipr(q)).collect::<Result<Vec<_>>>())?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    ensure(min_ipr >= 0.9, format!("min IPR at t=1e6 is {min_ipr}"))?;

    let t_grid: TGrid = "0.1:5:50".parse().map_err(|e: anderson_lab::Error| e.to_string())?;
    let cfg = RunConfig {
        dims: vec![50],
        potential: Some(PotentialSource::Sampled(dist)),
        t_grid: Some(t_grid),
        seed: 7,
        format: anderson_lab::cli::Format::Csv,
        ..RunConfig::default()
    };
    let first = lib(cmd_heatmap(&cfg))?.body;
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?;
    let second = single.install(|| lib(cmd_heatmap(&cfg)))?.body;
    let rows = first.lines().count() - 1;
    ensure(rows == 50 * 50, format!("{rows} rows"))?;
    ensure(first == second, "heatmap output differs between runs")?;
    Ok(format!(
        "mean IPR {lo:.4} -> {hi:.4}; min IPR at 1e6 {min_ipr:.4}; {rows} rows, identical reruns"
    ))
}

/// Every certificate's predicted failure is visible in the computed spectrum.
fn certificate_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let ts = generic_t_samples(0xce27, 3);
    let dist = PotentialDistribution::Bernoulli { p: 0.5 };
    let (mut certs, mut degenerate, mut vanishing) = (0, 0, 0);
    for dims in [vec![5], vec![7], vec![3, 3]] {
        let grid = lib(TorusGrid::new(&dims))?;
        for _ in 0..500 {
            let v = lib(dist.sample(grid.n(), &mut rng))?;
            let search = lib(find_certificate(&grid, &v, DEFAULT_POOL_CAP))?;
            let Some(cert) = search.certificate() else { continue };
            ensure(cert.is_valid_for(&grid, &v), format!("invalid certificate {cert:?}"))?;
            certs += 1;
            match cert.reason {
                BadnessReason::DegenerateSpectrum => degenerate += 1,
                BadnessReason::VanishingAtFixedPoint { .. } => vanishing += 1,
                BadnessReason::OddNPermutation => {}
            }
            for &t in &ts {
                let obs = lib(observe_certificate(&grid, &v, cert, t, 1e-6))?;
                ensure(obs.visible, format!("{dims:?} {:?}: {obs:?}", v.values()))?;
            }
        }
    }
    Ok(format!(
        "{certs} certificates ({degenerate} degenerate, {vanishing} vanishing) all visible at 3 t"
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("exact prime-cycle formula vs enumeration", exact_formula_vs_enumeration),
        ("shift bound vs exact shift-symmetric mass", shift_bound_vs_mass),
        ("reflection criterion vs numerical sweep", reflection_cross_oracle),
        ("continuous potentials are good", continuous_potentials_good),
        ("perturbation coefficients", perturbation_coefficients),
        ("eigensolver quality", eigensolver_quality),
        ("localization heatmap", localization_heatmap),
        ("symmetry certificate soundness", certificate_soundness),
    ];
    let mut failures = 0;
    for (idx, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("[PASS] criterion {} {name}: {detail} ({elapsed:.2?})", idx + 1),
            Err(why) => {
                failures += 1;
                println!("[FAIL] criterion {} {name}: {why} ({elapsed:.2?})", idx + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
