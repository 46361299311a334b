//! Hamiltonian assembly `H_t = Δ + t·V`, a cyclic Jacobi eigensolver, and the
//! spectral diagnostics built on it: simplicity/non-vanishing reports and
//! inverse participation ratios.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{SymmetricMatrix, TorusGrid};

/// Sweep cap for the Jacobi iteration.
pub const MAX_SWEEPS: usize = 30;
/// Default residual / orthogonality tolerance passed to [`eigh`].
pub const DEFAULT_EIGH_TOL: f64 = 1e-10;
/// Relative gap tolerance, multiplied by the spectral diameter.
pub const DEFAULT_GAP_TOL_REL: f64 = 1e-8;
pub const DEFAULT_ENTRY_TOL: f64 = 1e-8;

/// Entries below this magnitude are skipped when fixing eigenvector signs.
const SIGN_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Bernoulli { p: f64 },
    Uniform { a: f64, b: f64 },
    Explicit,
}

/// Diagonal of `V`, one value per vertex in grid index order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    values: Vec<f64>,
    provenance: Provenance,
}

impl Potential {
    pub fn explicit(values: Vec<f64>) -> Self {
        Self {
            values,
            provenance: Provenance::Explicit,
        }
    }

    /// A ±1 potential tagged as drawn from `bernoulli(p)`.
    pub fn bernoulli(values: Vec<f64>, p: f64) -> Result<Self> {
        if let Some(x) = values.iter().find(|&&x| x != 1.0 && x != -1.0) {
            return Err(Error::InvalidParameter(format!("bernoulli potential contains {x}")));
        }
        Ok(Self {
            values,
            provenance: Provenance::Bernoulli { p },
        })
    }

    pub fn uniform(values: Vec<f64>, a: f64, b: f64) -> Self {
        Self {
            values,
            provenance: Provenance::Uniform { a, b },
        }
    }

    /// Sign pattern from the low `n` bits of `bits`: bit `x` set means `+1` at vertex `x`.
    pub fn from_sign_bits(bits: u64, n: usize) -> Self {
        let values = (0..n).map(|x| if bits >> x & 1 == 1 { 1.0 } else { -1.0 }).collect();
        Self {
            values,
            provenance: Provenance::Explicit,
        }
    }

    pub fn constant(value: f64, n: usize) -> Self {
        Self::explicit(vec![value; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::explicit(self.values.iter().map(|x| c * x).collect())
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        if self.values.len() == n {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: n,
                got: self.values.len(),
            })
        }
    }
}

/// `H_t = Δ + t·diag(v)`.
pub fn hamiltonian(grid: &TorusGrid, v: &Potential, t: f64) -> Result<SymmetricMatrix> {
    v.check_len(grid.n())?;
    grid.laplacian().add_diagonal(v.values(), t)
}

/// Ascending eigenvalues with aligned orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    /// `max_k ‖A q_k − λ_k q_k‖₂`.
    pub residual: f64,
    /// `max_{i,j} |⟨q_i, q_j⟩ − δ_ij|`.
    pub orthogonality_defect: f64,
    pub tol: f64,
    pub sweeps: usize,
}

impl EigenDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Smallest spacing between consecutive eigenvalues (`+∞` for `n < 2`).
    pub fn min_gap(&self) -> f64 {
        self.eigenvalues
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_abs_entry(&self) -> f64 {
        self.eigenvectors
            .iter()
            .flatten()
            .fold(f64::INFINITY, |acc, x| acc.min(x.abs()))
    }

    pub fn spectral_diameter(&self) -> f64 {
        match (self.eigenvalues.first(), self.eigenvalues.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    /// `Q Λ Qᵀ`, for reconstruction checks.
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n * n];
        for (lambda, q) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for i in 0..n {
                let li = lambda * q[i];
                for j in 0..n {
                    out[i * n + j] += li * q[j];
                }
            }
        }
        out
    }
}

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations
/// with a threshold strategy.
///
/// Fails with [`Error::NonConvergence`] after [`MAX_SWEEPS`] sweeps, and with
/// [`Error::ToleranceExceeded`] when the residual exceeds `tol·max(1, max|A|)`
/// or the orthogonality defect exceeds `tol`.
pub fn eigh(a: &SymmetricMatrix, tol: f64) -> Result<EigenDecomposition> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let n = a.n();
    let (values, vectors, sweeps) = jacobi(a)?;

    // Stable sort keeps Jacobi output order among ties.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| values[k]).collect();
    let eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| {
            let mut q: Vec<f64> = (0..n).map(|i| vectors[i * n + k]).collect();
            if let Some(first) = q.iter().find(|x| x.abs() > SIGN_FLOOR) {
                if *first < 0.0 {
                    q.iter_mut().for_each(|x| *x = -*x);
                }
            }
            q
        })
        .collect();

    let residual = eigenvalues
        .iter()
        .zip(&eigenvectors)
        .map(|(&lambda, q)| {
            a.mul_vec(q)
                .iter()
                .zip(q)
                .map(|(aq, qi)| (aq - lambda * qi).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    let mut orthogonality_defect: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let dot: f64 = eigenvectors[i].iter().zip(&eigenvectors[j]).map(|(x, y)| x * y).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            orthogonality_defect = orthogonality_defect.max((dot - target).abs());
        }
    }

    let residual_bound = tol * a.max_abs().max(1.0);
    if residual > residual_bound {
        return Err(Error::ToleranceExceeded {
            check: "residual",
            value: residual,
            bound: residual_bound,
        });
    }
    if orthogonality_defect > tol {
        return Err(Error::ToleranceExceeded {
            check: "orthogonality",
            value: orthogonality_defect,
            bound: tol,
        });
    }

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
        residual,
        orthogonality_defect,
        tol,
        sweeps,
    })
}

/// Returns unsorted eigenvalues, the row-major eigenvector matrix (eigenvectors
/// in columns) and the number of sweeps used. Works on the upper triangle.
fn jacobi(m: &SymmetricMatrix) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let n = m.n();
    let mut a = m.as_slice().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let mut d = m.diag();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    let rotate = |a: &mut [f64], i: usize, j: usize, k: usize, l: usize, s: f64, tau: f64| {
        let g = a[i * n + j];
        let h = a[k * n + l];
        a[i * n + j] = g - s * (h + g * tau);
        a[k * n + l] = h + s * (g - h * tau);
    };

    let mut off_norm = 0.0;
    for sweep in 1..=MAX_SWEEPS {
        off_norm = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off_norm += a[p * n + q].abs();
            }
        }
        if off_norm == 0.0 {
            return Ok((d, v, sweep - 1));
        }
        let threshold = if sweep < 4 {
            0.2 * off_norm / (n * n) as f64
        } else {
            0.0
        };

        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                if sweep > 4 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[p * n + q] = 0.0;
                } else if apq.abs() > threshold {
                    let h = d[q] - d[p];
                    let t = if h.abs() + g == h.abs() {
                        apq / h
                    } else {
                        let theta = 0.5 * h / apq;
                        let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                        if theta < 0.0 {
                            -t
                        } else {
                            t
                        }
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let tau = s / (1.0 + c);
                    let h = t * apq;
                    z[p] -= h;
                    z[q] += h;
                    d[p] -= h;
                    d[q] += h;
                    a[p * n + q] = 0.0;
                    for j in 0..p {
                        rotate(&mut a, j, p, j, q, s, tau);
                    }
                    for j in p + 1..q {
                        rotate(&mut a, p, j, j, q, s, tau);
                    }
                    for j in q + 1..n {
                        rotate(&mut a, p, j, q, j, s, tau);
                    }
                    for j in 0..n {
                        rotate(&mut v, j, p, j, q, s, tau);
                    }
                }
            }
        }
        for p in 0..n {
            b[p] += z[p];
            d[p] = b[p];
            z[p] = 0.0;
        }
    }
    Err(Error::NonConvergence {
        sweeps: MAX_SWEEPS,
        off_norm,
    })
}

/// Tolerances for the simplicity and non-vanishing tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute gap tolerance; `None` means `DEFAULT_GAP_TOL_REL × spectral diameter`.
    pub gap: Option<f64>,
    pub entry: f64,
    pub eigh: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            gap: None,
            entry: DEFAULT_ENTRY_TOL,
            eigh: DEFAULT_EIGH_TOL,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if self.gap.is_some_and(|g| !positive(g)) || !positive(self.entry) || !positive(self.eigh) {
            return Err(Error::InvalidParameter(format!(
                "tolerances must be positive and finite: {self:?}"
            )));
        }
        Ok(())
    }

    pub fn gap_for(&self, decomp: &EigenDecomposition) -> f64 {
        self.gap
            .unwrap_or(DEFAULT_GAP_TOL_REL * decomp.spectral_diameter())
            .max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub t: f64,
    pub min_gap: f64,
    pub min_entry: f64,
    pub simple: bool,
    pub nonvanishing: bool,
    pub gap_tol: f64,
    pub entry_tol: f64,
}

impl ConditionReport {
    pub fn from_decomposition(t: f64, decomp: &EigenDecomposition, tol: &Tolerances) -> Self {
        let gap_tol = tol.gap_for(decomp);
        let min_gap = decomp.min_gap();
        let min_entry = decomp.min_abs_entry();
        Self {
            t,
            min_gap,
            min_entry,
            simple: min_gap > gap_tol,
            nonvanishing: min_entry > tol.entry,
            gap_tol,
            entry_tol: tol.entry,
        }
    }

    /// Both conditions of a good potential hold at this `t`.
    pub fn passes(&self) -> bool {
        self.simple && self.nonvanishing
    }
}

/// Minimum eigenvalue gap and minimum eigenvector entry of `H_t`.
pub fn condition_report(grid: &TorusGrid, v: &Potential, t: f64, tol: &Tolerances) -> Result<ConditionReport> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t = {t} is not finite")));
    }
    tol.validate()?;
    let decomp = eigh(&hamiltonian(grid, v, t)?, tol.eigh)?;
    Ok(ConditionReport::from_decomposition(t, &decomp, tol))
}

/// Inverse participation ratio `Σ x_i⁴` of a unit vector.
pub fn ipr(vec: &[f64]) -> Result<f64> {
    let norm = vec.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(norm));
    }
    Ok(vec.iter().map(|x| x.powi(4)).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatmapRow {
    pub t: f64,
    pub k: usize,
    pub lambda: f64,
    pub log_ipr: f64,
}

/// One row per `(t, k)`: eigenvalue and natural log of the IPR of the `k`-th
/// eigenvector of `H_t`, `k` in ascending eigenvalue order.
pub fn ipr_heatmap(grid: &TorusGrid, v: &Potential, t_values: &[f64], eigh_tol: f64) -> Result<Vec<HeatmapRow>> {
    if t_values.is_empty() {
        return Err(Error::InvalidParameter("t_values is empty".into()));
    }
    v.check_len(grid.n())?;
    let blocks: Vec<Vec<HeatmapRow>> = t_values
        .par_iter()
        .map(|&t| {
            let decomp = eigh(&hamiltonian(grid, v, t)?, eigh_tol)?;
            decomp
                .eigenvalues
                .iter()
                .zip(&decomp.eigenvectors)
                .enumerate()
                .map(|(k, (&lambda, q))| {
                    Ok(HeatmapRow {
                        t,
                        k,
                        lambda,
                        log_ipr: ipr(q)?.ln(),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(blocks.into_iter().flatten().collect())
}
