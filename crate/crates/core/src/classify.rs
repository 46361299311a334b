//! Good/bad verdicts for a potential.
//!
//! The pipeline tries, in order:
//!
//! 1. a symmetry certificate from the automorphism pool (proof of badness);
//! 2. on a prime cycle with a ±1 potential, the reflection criterion, which
//!    decides both ways exactly;
//! 3. a numerical sweep over generic coupling strengths. A single `t` where
//!    the spectrum is simple and every eigenvector is nowhere zero shows the
//!    conditions fail at only finitely many `t`, so one clean sample is enough
//!    for `GoodNumerical`. Failure at every sample is evidence, not proof.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::TorusGrid;
use crate::spectral::{condition_report, ConditionReport, Potential, Tolerances};
use crate::symmetry::{
    find_certificate, reflection_center, reflection_perm, CertificateSearch, SymmetryCertificate, DEFAULT_POOL_CAP,
};

pub const DEFAULT_T_SAMPLES: usize = 3;
pub const DEFAULT_T_SEED: u64 = 0x5e_ed0f_7a11;
pub const T_RANGE: (f64, f64) = (0.5, 2.0);
/// Failing values within this factor below their tolerance count as ambiguous.
pub const DEFAULT_AMBIGUITY_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    GoodExact,
    GoodNumerical,
    BadCertified,
    BadNumerical,
    Inconclusive,
}

impl Verdict {
    pub const ALL: [Verdict; 5] = [
        Verdict::GoodExact,
        Verdict::GoodNumerical,
        Verdict::BadCertified,
        Verdict::BadNumerical,
        Verdict::Inconclusive,
    ];

    pub fn is_good(self) -> bool {
        matches!(self, Verdict::GoodExact | Verdict::GoodNumerical)
    }

    pub fn is_bad(self) -> bool {
        matches!(self, Verdict::BadCertified | Verdict::BadNumerical)
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::GoodExact => "GoodExact",
            Verdict::GoodNumerical => "GoodNumerical",
            Verdict::BadCertified => "BadCertified",
            Verdict::BadNumerical => "BadNumerical",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyParams {
    pub t_samples: usize,
    pub t_seed: u64,
    pub tolerances: Tolerances,
    pub use_certificates: bool,
    pub use_prime_criterion: bool,
    pub pool_cap: usize,
    pub ambiguity_factor: f64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        Self {
            t_samples: DEFAULT_T_SAMPLES,
            t_seed: DEFAULT_T_SEED,
            tolerances: Tolerances::default(),
            use_certificates: true,
            use_prime_criterion: true,
            pool_cap: DEFAULT_POOL_CAP,
            ambiguity_factor: DEFAULT_AMBIGUITY_FACTOR,
        }
    }
}

impl ClassifyParams {
    /// Numerical sweep only; both exact routes disabled.
    pub fn numerical_only() -> Self {
        Self {
            use_certificates: false,
            use_prime_criterion: false,
            ..Self::default()
        }
    }
}

/// For each center `j`, an offset `i` with `v(j+i) ≠ v(j−i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectionAbsence {
    pub witnesses: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<SymmetryCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reflection_absence: Option<ReflectionAbsence>,
    pub reports: Vec<ConditionReport>,
    pub t_values: Vec<f64>,
    pub params: ClassifyParams,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl Classification {
    fn new(verdict: Verdict, params: &ClassifyParams) -> Self {
        Self {
            verdict,
            certificate: None,
            reflection_absence: None,
            reports: Vec::new(),
            t_values: Vec::new(),
            params: params.clone(),
            diagnostics: Vec::new(),
        }
    }
}

/// `count` distinct seeded draws from [`T_RANGE`].
pub fn generic_t_samples(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<f64> = Vec::with_capacity(count);
    while out.len() < count {
        let t = rng.random_range(T_RANGE.0..T_RANGE.1);
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn is_sign_pattern(v: &Potential) -> bool {
    v.values().iter().all(|&x| x == 1.0 || x == -1.0)
}

fn reflection_absence(values: &[f64]) -> Option<ReflectionAbsence> {
    let l = values.len();
    (0..l)
        .map(|j| {
            (1..=l / 2)
                .find(|&i| values[(j + i) % l] != values[(j + l - i) % l])
                .map(|i| (j, i))
        })
        .collect::<Option<Vec<_>>>()
        .map(|witnesses| ReflectionAbsence { witnesses })
}

/// Runs the three-stage pipeline described in the module docs.
pub fn classify(grid: &TorusGrid, v: &Potential, params: &ClassifyParams) -> Result<Classification> {
    v.check_len(grid.n())?;
    params.tolerances.validate()?;
    let mut diagnostics = Vec::new();

    if params.use_certificates {
        match find_certificate(grid, v, params.pool_cap)? {
            CertificateSearch::Found(cert) => {
                let mut out = Classification::new(Verdict::BadCertified, params);
                out.certificate = Some(cert);
                return Ok(out);
            }
            CertificateSearch::Exhausted => {}
            CertificateSearch::Inconclusive { group_order, cap } => diagnostics.push(format!(
                "certificate search skipped: group order {group_order} exceeds cap {cap}"
            )),
        }
    }

    if params.use_prime_criterion && grid.is_cycle() && is_prime(grid.n()) && is_sign_pattern(v) {
        return Ok(match reflection_center(v.values()) {
            Some(center) => {
                let perm = reflection_perm(grid, &[center])?;
                let mut out = Classification::new(Verdict::BadCertified, params);
                out.certificate = SymmetryCertificate::from_perm(&perm);
                out
            }
            None => {
                let mut out = Classification::new(Verdict::GoodExact, params);
                out.reflection_absence = reflection_absence(v.values());
                out
            }
        });
    }

    let t_values = generic_t_samples(params.t_seed, params.t_samples.max(1));
    let mut reports = Vec::with_capacity(t_values.len());
    for &t in &t_values {
        match condition_report(grid, v, t, &params.tolerances) {
            Ok(r) => reports.push(r),
            Err(e) => {
                diagnostics.push(format!("t = {t}: {e}"));
                let mut out = Classification::new(Verdict::Inconclusive, params);
                out.reports = reports;
                out.t_values = t_values;
                out.diagnostics = diagnostics;
                return Ok(out);
            }
        }
    }

    let verdict = if reports.iter().any(ConditionReport::passes) {
        Verdict::GoodNumerical
    } else if reports.iter().any(|r| is_ambiguous(r, params.ambiguity_factor)) {
        diagnostics.push("every sample failed, some only marginally".into());
        Verdict::Inconclusive
    } else {
        Verdict::BadNumerical
    };
    let mut out = Classification::new(verdict, params);
    out.reports = reports;
    out.t_values = t_values;
    out.diagnostics = diagnostics;
    Ok(out)
}

/// A failing sample whose failing quantity sits within `factor` of its tolerance.
/// Non-vanishing is only judged when the spectrum is simple.
fn is_ambiguous(r: &ConditionReport, factor: f64) -> bool {
    if !r.simple {
        r.min_gap * factor >= r.gap_tol
    } else {
        !r.nonvanishing && r.min_entry * factor >= r.entry_tol
    }
}

/// Exact classifier for ±1 potentials on a prime cycle: bad iff reflection-symmetric.
pub fn prime_cycle_is_bad(values: &[f64]) -> bool {
    reflection_center(values).is_some()
}
