//! Probabilities of bad potentials: closed forms, exhaustive weighted
//! enumeration of ±1 patterns, and seeded Monte Carlo.
//!
//! Enumeration counts patterns per (verdict, number of `+1` sites) as integers
//! and only then weights them by `p^m (1−p)^(n−m)`, so the combinatorial part
//! is exact.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{classify, is_prime, prime_cycle_is_bad, ClassifyParams, Verdict};
use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::spectral::Potential;
use crate::symmetry::{shift_perm, VertexPermutation};

/// Largest grid enumerated with a combinatorial classifier.
pub const ENUMERATION_CAP: usize = 24;
/// Largest grid enumerated with the eigensolver-backed pipeline.
pub const NUMERICAL_ENUMERATION_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialDistribution {
    /// `+1` with probability `p`, `−1` otherwise.
    Bernoulli {
        p: f64,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    Explicit {
        values: Vec<f64>,
    },
}

impl PotentialDistribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialDistribution::Bernoulli { p } => check_p(*p),
            PotentialDistribution::Uniform { a, b } if !(a < b) || !a.is_finite() || !b.is_finite() => Err(
                Error::InvalidParameter(format!("uniform bounds need a < b, got ({a}, {b})")),
            ),
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Result<Potential> {
        self.validate()?;
        Ok(match self {
            PotentialDistribution::Bernoulli { p } => {
                let values = (0..n)
                    .map(|_| if rng.random::<f64>() < *p { 1.0 } else { -1.0 })
                    .collect();
                Potential::bernoulli(values, *p)?
            }
            PotentialDistribution::Uniform { a, b } => {
                Potential::uniform((0..n).map(|_| rng.random_range(*a..*b)).collect(), *a, *b)
            }
            PotentialDistribution::Explicit { values } => {
                let v = Potential::explicit(values.clone());
                v.check_len(n)?;
                v
            }
        })
    }
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")))
    }
}

/// `P(bad) = L(p² + (1−p)²)^((L−1)/2) − (L−1)(p^L + (1−p)^L)` on a prime cycle.
pub fn exact_bad_prob_prime_cycle(l: usize, p: f64) -> Result<f64> {
    if l.is_multiple_of(2) || !is_prime(l) {
        return Err(Error::NotOddPrime(l));
    }
    check_p(p)?;
    let q = 1.0 - p;
    let lf = l as f64;
    Ok(lf * (p * p + q * q).powi(((l - 1) / 2) as i32) - (lf - 1.0) * (p.powi(l as i32) + q.powi(l as i32)))
}

/// Inclusion–exclusion over nonempty axis subsets `J` of
/// `(p^{L_J} + (1−p)^{L_J})^{n / L_J}` with `L_J = Π_{j∈J} L_j`.
pub fn lower_bound_bad(dims: &[usize], p: f64) -> Result<f64> {
    let grid = TorusGrid::new(dims)?;
    check_p(p)?;
    let q = 1.0 - p;
    let n = grid.n() as f64;
    let d = dims.len();
    Ok((1u32..1 << d)
        .map(|subset| {
            let size = subset.count_ones();
            let block: f64 = (0..d)
                .filter(|&j| subset >> j & 1 == 1)
                .map(|j| dims[j] as f64)
                .product();
            let sign = if size % 2 == 1 { 1.0 } else { -1.0 };
            sign * (p.powf(block) + q.powf(block)).powf(n / block)
        })
        .sum())
}

fn check_enumerable(grid: &TorusGrid, cap: usize) -> Result<()> {
    if grid.n() > cap {
        Err(Error::EnumerationCap { n: grid.n(), cap })
    } else {
        Ok(())
    }
}

/// Exact mass from integer counts indexed by the number of `+1` sites, summed
/// in descending magnitude.
fn weighted_mass(counts_by_plus: &[u64], p: f64) -> f64 {
    let n = counts_by_plus.len() - 1;
    let q = 1.0 - p;
    let mut terms: Vec<f64> = counts_by_plus
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(m, &c)| c as f64 * p.powi(m as i32) * q.powi((n - m) as i32))
        .collect();
    terms.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    terms.iter().sum()
}

fn bits_fixed_by(bits: u64, perm: &VertexPermutation) -> bool {
    (0..perm.len()).all(|x| (bits >> x & 1) == (bits >> perm.apply(x) & 1))
}

/// Probability that a Bernoulli potential is invariant under the unit shift
/// along at least one axis, by enumeration of all `2^n` patterns.
pub fn shift_symmetric_mass(grid: &TorusGrid, p: f64) -> Result<f64> {
    check_enumerable(grid, ENUMERATION_CAP)?;
    check_p(p)?;
    let n = grid.n();
    let shifts: Vec<VertexPermutation> = (0..grid.dim())
        .map(|axis| shift_perm(grid, axis, 1))
        .collect::<Result<_>>()?;
    let counts = (0u64..1 << n)
        .into_par_iter()
        .fold(
            || vec![0u64; n + 1],
            |mut acc, bits| {
                if shifts.iter().any(|s| bits_fixed_by(bits, s)) {
                    acc[bits.count_ones() as usize] += 1;
                }
                acc
            },
        )
        .reduce(|| vec![0u64; n + 1], add_counts);
    Ok(weighted_mass(&counts, p))
}

fn add_counts(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    a
}

/// Verdict source for enumeration and Monte Carlo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classifier {
    /// Reflection criterion; only valid for ±1 potentials on prime cycles.
    PrimeReflection,
    /// The full [`classify`] pipeline.
    Pipeline { params: ClassifyParams },
}

impl Classifier {
    pub fn pipeline() -> Self {
        Classifier::Pipeline {
            params: ClassifyParams::default(),
        }
    }

    pub fn verdict(&self, grid: &TorusGrid, v: &Potential) -> Result<Verdict> {
        match self {
            Classifier::PrimeReflection => Ok(if prime_cycle_is_bad(v.values()) {
                Verdict::BadCertified
            } else {
                Verdict::GoodExact
            }),
            Classifier::Pipeline { params } => Ok(classify(grid, v, params)?.verdict),
        }
    }

    fn check_grid(&self, grid: &TorusGrid) -> Result<()> {
        match self {
            Classifier::PrimeReflection => {
                if !grid.is_cycle() || grid.n().is_multiple_of(2) || !is_prime(grid.n()) {
                    return Err(Error::NotOddPrime(grid.n()));
                }
                check_enumerable(grid, ENUMERATION_CAP)
            }
            Classifier::Pipeline { .. } => check_enumerable(grid, NUMERICAL_ENUMERATION_CAP),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEstimate {
    /// Probability (or fraction) of a bad verdict.
    pub estimate: f64,
    /// Binomial standard error; zero for exact enumeration.
    pub stderr: f64,
    pub trials: u64,
    pub counts_by_verdict: BTreeMap<Verdict, u64>,
    /// Probability mass per verdict, for exact enumeration.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass_by_verdict: Option<BTreeMap<Verdict, f64>>,
}

impl ProbabilityEstimate {
    pub fn count(&self, verdict: Verdict) -> u64 {
        self.counts_by_verdict.get(&verdict).copied().unwrap_or(0)
    }

    pub fn bad_count(&self) -> u64 {
        self.count(Verdict::BadCertified) + self.count(Verdict::BadNumerical)
    }
}

/// Classifies every ±1 pattern and returns the exact bad mass under `bernoulli(p)`.
///
/// Pattern `bits` puts `+1` at vertex `x` iff bit `x` is set.
pub fn enumerate_bernoulli(grid: &TorusGrid, p: f64, classifier: &Classifier) -> Result<ProbabilityEstimate> {
    classifier.check_grid(grid)?;
    check_p(p)?;
    let n = grid.n();
    let by_verdict = (0u64..1 << n)
        .into_par_iter()
        .map(|bits| {
            let v = Potential::bernoulli(Potential::from_sign_bits(bits, n).values().to_vec(), p)?;
            Ok((classifier.verdict(grid, &v)?, bits.count_ones() as usize))
        })
        .try_fold(BTreeMap::<Verdict, Vec<u64>>::new, |mut acc, item: Result<_>| {
            let (verdict, plus) = item?;
            acc.entry(verdict).or_insert_with(|| vec![0; n + 1])[plus] += 1;
            Ok::<_, Error>(acc)
        })
        .try_reduce(BTreeMap::new, |mut a, b| {
            for (verdict, counts) in b {
                let slot = a.entry(verdict).or_insert_with(|| vec![0; n + 1]);
                *slot = add_counts(std::mem::take(slot), counts);
            }
            Ok(a)
        })?;

    let counts_by_verdict = by_verdict.iter().map(|(&v, c)| (v, c.iter().sum())).collect();
    let mass_by_verdict: BTreeMap<Verdict, f64> = by_verdict.iter().map(|(&v, c)| (v, weighted_mass(c, p))).collect();
    let mut bad_counts = vec![0u64; n + 1];
    for (verdict, counts) in &by_verdict {
        if verdict.is_bad() {
            bad_counts = add_counts(bad_counts, counts.clone());
        }
    }
    Ok(ProbabilityEstimate {
        estimate: weighted_mass(&bad_counts, p),
        stderr: 0.0,
        trials: 1 << n,
        counts_by_verdict,
        mass_by_verdict: Some(mass_by_verdict),
    })
}

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for trial `index`: `splitmix64(seed ^ splitmix64(index))`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(seed, index))
}

/// Seeded Monte Carlo estimate of the bad fraction. Each trial draws from its
/// own generator seeded by [`trial_seed`], so the result does not depend on
/// the thread count or scheduling.
pub fn monte_carlo(
    grid: &TorusGrid,
    dist: &PotentialDistribution,
    trials: u64,
    seed: u64,
    classifier: &Classifier,
) -> Result<ProbabilityEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    dist.validate()?;
    let verdicts: Vec<Verdict> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let v = dist.sample(grid.n(), &mut trial_rng(seed, i))?;
            classifier.verdict(grid, &v)
        })
        .collect::<Result<_>>()?;
    let mut counts_by_verdict = BTreeMap::new();
    for v in verdicts {
        *counts_by_verdict.entry(v).or_insert(0) += 1;
    }
    let bad: u64 = counts_by_verdict
        .iter()
        .filter(|(v, _)| v.is_bad())
        .map(|(_, &c)| c)
        .sum();
    let estimate = bad as f64 / trials as f64;
    Ok(ProbabilityEstimate {
        estimate,
        stderr: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
        trials,
        counts_by_verdict,
        mass_by_verdict: None,
    })
}
