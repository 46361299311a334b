//! Leading Taylor coefficients of eigenvectors of `D + tA` for a diagonal `D`
//! with distinct entries, computed two ways: as entries of powers of the
//! propagator `C = −(D − x_k I)⁺ A`, and as sums over minimal paths in the
//! support graph of `A`. Also the first-order degenerate problem on a cycle in
//! the Fourier basis.

use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SymmetricMatrix;

/// Propagator `C = −(D − x_k I)⁺ A` anchored at index `k`.
///
/// `(D − x_k I)⁺` is diagonal with `0` at `k` and `(x_m − x_k)⁻¹` elsewhere,
/// so row `k` of `C` is zero and `C(i, r) ≠ 0` only where `A(i, r) ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorC {
    n: usize,
    anchor: usize,
    entries: Vec<f64>,
}

impl PropagatorC {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn get(&self, i: usize, r: usize) -> f64 {
        self.entries[i * self.n + r]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                self.entries[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(x)
                    .map(|(c, y)| c * y)
                    .sum()
            })
            .collect()
    }

    /// Column `k` of `C^j`, i.e. `C^j e_k`.
    pub fn power_column(&self, j: usize) -> Vec<f64> {
        let mut col = vec![0.0; self.n];
        col[self.anchor] = 1.0;
        for _ in 0..j {
            col = self.mul_vec(&col);
        }
        col
    }

    /// The full matrix `C^j` in row-major order, by repeated multiplication.
    pub fn power(&self, j: usize) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            out[i * n + i] = 1.0;
        }
        for _ in 0..j {
            let mut next = vec![0.0; n * n];
            for i in 0..n {
                for m in 0..n {
                    let c = self.entries[i * n + m];
                    if c != 0.0 {
                        for r in 0..n {
                            next[i * n + r] += c * out[m * n + r];
                        }
                    }
                }
            }
            out = next;
        }
        out
    }
}

fn check_distinct(diag: &[f64]) -> Result<()> {
    for i in 0..diag.len() {
        for j in 0..i {
            if diag[i] == diag[j] {
                return Err(Error::RepeatedDiagonal(j, i));
            }
        }
    }
    Ok(())
}

pub fn propagator(diag: &[f64], a: &SymmetricMatrix, k: usize) -> Result<PropagatorC> {
    let n = a.n();
    if diag.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: diag.len(),
        });
    }
    if k >= n {
        return Err(Error::VertexOutOfRange { vertex: k, n });
    }
    check_distinct(diag)?;
    let mut entries = vec![0.0; n * n];
    for i in (0..n).filter(|&i| i != k) {
        let pinv = 1.0 / (diag[i] - diag[k]);
        for r in 0..n {
            entries[i * n + r] = -pinv * a.get(i, r);
        }
    }
    Ok(PropagatorC { n, anchor: k, entries })
}

/// BFS distances from `source` in the support graph of `a`; `usize::MAX` when unreachable.
pub fn support_distances(a: &SymmetricMatrix, source: usize) -> Vec<usize> {
    let adjacency = a.support();
    let mut dist = vec![usize::MAX; a.n()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

fn path_length(a: &SymmetricMatrix, i: usize, k: usize) -> Result<usize> {
    let n = a.n();
    for v in [i, k] {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
    }
    if i == k {
        return Err(Error::SameVertex(i));
    }
    match support_distances(a, k)[i] {
        usize::MAX => Err(Error::Unreachable { i, k }),
        j => Ok(j),
    }
}

/// `(C^j)(i, k)` with `j` the support distance from `i` to `k`: the leading
/// Taylor coefficient at entry `i` of the eigenvector of `D + tA` that starts at `e_k`.
pub fn coefficient_entry(diag: &[f64], a: &SymmetricMatrix, k: usize, i: usize) -> Result<f64> {
    let c = propagator(diag, a, k)?;
    let j = path_length(a, i, k)?;
    Ok(c.power_column(j)[i])
}

/// All shortest paths from `i` to `k` in the support graph of `a`, each listed
/// from `i` to `k`. Neighbors are tried in ascending index order.
pub fn minimal_paths(a: &SymmetricMatrix, i: usize, k: usize) -> Result<Vec<Vec<usize>>> {
    let n = a.n();
    for v in [i, k] {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
    }
    let dist = support_distances(a, k);
    if dist[i] == usize::MAX {
        return Err(Error::Unreachable { i, k });
    }
    let adjacency = a.support();
    let mut paths = Vec::new();
    let mut stack = vec![vec![i]];
    while let Some(path) = stack.pop() {
        let last = *path.last().unwrap();
        if last == k {
            paths.push(path);
            continue;
        }
        // Reverse so the smallest neighbor is expanded first.
        for &w in adjacency[last].iter().rev() {
            if dist[w] + 1 == dist[last] {
                let mut next = path.clone();
                next.push(w);
                stack.push(next);
            }
        }
    }
    Ok(paths)
}

/// `Σ_γ A_γ Π_{r ∈ γ, r ≠ k} (x_k − x_r)⁻¹` over minimal paths `γ` from `i`
/// to `k`, where `A_γ` is the product of `A` along the edges of `γ`.
pub fn path_sum(diag: &[f64], a: &SymmetricMatrix, i: usize, k: usize) -> Result<f64> {
    if diag.len() != a.n() {
        return Err(Error::LengthMismatch {
            expected: a.n(),
            got: diag.len(),
        });
    }
    check_distinct(diag)?;
    path_length(a, i, k)?;
    let xk = diag[k];
    Ok(minimal_paths(a, i, k)?
        .iter()
        .map(|path| {
            let edges: f64 = path.windows(2).map(|e| a.get(e[0], e[1])).product();
            let weights: f64 = path[..path.len() - 1].iter().map(|&r| 1.0 / (xk - diag[r])).product();
            edges * weights
        })
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Self = Self { re: 0.0, im: 0.0 };

    pub fn from_polar(r: f64, theta: f64) -> Self {
        Self {
            re: r * theta.cos(),
            im: r * theta.sin(),
        }
    }

    pub fn conj(self) -> Self {
        Self {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl std::ops::Add for Complex {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

/// First-order data for the doubly degenerate Laplacian eigenvalue of mode `k`
/// on a cycle of length `L`.
///
/// With `P(z) = (1/L) Σ_j v(j) z^j` and `ω = e^{2πi/L}`, the first-order
/// eigenvalue shifts of the pair `(k, −k)` are the eigenvalues of the
/// Hermitian matrix `[[P(1), P(ω^{2k})], [P(ω^{−2k}), P(1)]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierPair {
    pub length: usize,
    pub mode: usize,
    pub p_one: f64,
    pub p_plus: Complex,
    pub p_minus: Complex,
    pub matrix: [[Complex; 2]; 2],
    /// `P(1) − |P(ω^{2k})|`, `P(1) + |P(ω^{2k})|`.
    pub splittings: [f64; 2],
}

impl FourierPair {
    pub fn splitting_width(&self) -> f64 {
        self.splittings[1] - self.splittings[0]
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let m = &self.matrix;
        let close = |a: Complex, b: Complex| (a.re - b.re).abs() <= tol && (a.im - b.im).abs() <= tol;
        close(m[0][1], m[1][0].conj()) && m[0][0].im.abs() <= tol && m[1][1].im.abs() <= tol
    }
}

/// `P(ω^e) = (1/L) Σ_j v(j) ω^{ej}`, exponents reduced mod `L`.
fn dft_poly(values: &[f64], exponent: i64) -> Complex {
    let l = values.len() as i64;
    let scale = 1.0 / l as f64;
    values
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let e = (exponent * j as i64).rem_euclid(l);
            Complex::from_polar(scale * v, 2.0 * PI * e as f64 / l as f64)
        })
        .fold(Complex::ZERO, |acc, z| acc + z)
}

pub fn fourier_pair(values: &[f64], mode: usize) -> Result<FourierPair> {
    let l = values.len();
    if l < 3 {
        return Err(Error::SideTooShort(l, 0));
    }
    if mode == 0 || mode >= l {
        return Err(Error::InvalidParameter(format!("mode must lie in 1..{l}, got {mode}")));
    }
    let p_one = dft_poly(values, 0).re;
    let p_plus = dft_poly(values, 2 * mode as i64);
    let p_minus = dft_poly(values, -2 * mode as i64);
    let diag = Complex { re: p_one, im: 0.0 };
    let radius = p_plus.abs();
    Ok(FourierPair {
        length: l,
        mode,
        p_one,
        p_plus,
        p_minus,
        matrix: [[diag, p_plus], [p_minus, diag]],
        splittings: [p_one - radius, p_one + radius],
    })
}
