//! Torus automorphisms and symmetry certificates for bad potentials.
//!
//! Every automorphism considered here is an affine coordinate map
//! `r'_m = ±r_{σ(m)} + c_m (mod L_m)` where `σ` only exchanges axes of equal
//! length. Shifts, point reflections and axis swaps are the named special
//! cases; everything else in the generated group is `Composite`.
//!
//! A permutation `P ≠ I` that commutes with both `Δ` and `V` forces badness:
//! if `P² ≠ I` the spectrum of `H_t` is degenerate for every `t`; if `P² = I`
//! and `P` fixes a vertex `j`, some eigenvector vanishes at `j` for every `t`.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::spectral::{eigh, hamiltonian, Potential, DEFAULT_EIGH_TOL};

pub const DEFAULT_POOL_CAP: usize = 1_000_000;

/// `out[m] = sign[m] * in[source[m]] + offset[m] (mod L_m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineMap {
    pub source: Vec<usize>,
    pub sign: Vec<i8>,
    pub offset: Vec<usize>,
}

impl AffineMap {
    pub fn identity(d: usize) -> Self {
        Self {
            source: (0..d).collect(),
            sign: vec![1; d],
            offset: vec![0; d],
        }
    }

    fn apply_coords(&self, dims: &[usize], coords: &[usize]) -> Vec<usize> {
        (0..dims.len())
            .map(|m| {
                let len = dims[m];
                let x = coords[self.source[m]] % len;
                let x = if self.sign[m] < 0 { (len - x) % len } else { x };
                (x + self.offset[m]) % len
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Descriptor {
    Shift { axis: usize, amount: usize },
    Reflection { centers: Vec<usize> },
    AxisSwap { source: Vec<usize> },
    Composite { map: AffineMap },
}

impl Descriptor {
    pub fn affine(&self, grid: &TorusGrid) -> AffineMap {
        let d = grid.dim();
        let mut map = AffineMap::identity(d);
        match self {
            Descriptor::Shift { axis, amount } => map.offset[*axis] = amount % grid.dims()[*axis],
            Descriptor::Reflection { centers } => {
                for (m, (&c, &len)) in centers.iter().zip(grid.dims()).enumerate() {
                    map.sign[m] = -1;
                    map.offset[m] = (2 * c) % len;
                }
            }
            Descriptor::AxisSwap { source } => map.source = source.clone(),
            Descriptor::Composite { map: m } => map = m.clone(),
        }
        map
    }
}

/// A vertex bijection together with the coordinate rule that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexPermutation {
    image: Vec<usize>,
    descriptor: Descriptor,
}

impl VertexPermutation {
    pub fn from_descriptor(grid: &TorusGrid, descriptor: Descriptor) -> Self {
        let map = descriptor.affine(grid);
        let image = (0..grid.n())
            .map(|x| grid.index(&map.apply_coords(grid.dims(), &grid.coords(x))))
            .collect();
        Self { image, descriptor }
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.image.len()];
        self.image
            .iter()
            .all(|&x| x < seen.len() && !std::mem::replace(&mut seen[x], true))
    }

    /// `self ∘ other` as an image vector.
    pub fn compose_image(&self, other: &Self) -> Vec<usize> {
        other.image.iter().map(|&x| self.image[x]).collect()
    }

    /// Smallest `m ≥ 1` with `P^m = I`: lcm of the cycle lengths.
    pub fn order(&self) -> usize {
        let mut seen = vec![false; self.image.len()];
        let mut order = 1;
        for start in 0..self.image.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.image[x];
                len += 1;
            }
            order = lcm(order, len);
        }
        order
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.image.len()).filter(|&x| self.image[x] == x).collect()
    }

    /// Exact check that `P` is a graph automorphism, i.e. `PΔ = ΔP`.
    pub fn commutes_with_laplacian(&self, grid: &TorusGrid) -> bool {
        (0..grid.n()).all(|x| {
            let mapped: BTreeSet<usize> = grid.neighbors(x).iter().map(|&y| self.image[y]).collect();
            let target: BTreeSet<usize> = grid.neighbors(self.image[x]).into_iter().collect();
            mapped == target
        })
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

pub fn shift_perm(grid: &TorusGrid, axis: usize, amount: i64) -> Result<VertexPermutation> {
    let d = grid.dim();
    if axis >= d {
        return Err(Error::AxisOutOfRange { axis, d });
    }
    let len = grid.dims()[axis] as i64;
    let amount = amount.rem_euclid(len) as usize;
    Ok(VertexPermutation::from_descriptor(
        grid,
        Descriptor::Shift { axis, amount },
    ))
}

/// Point reflection `r_m ↦ 2c_m − r_m` on every axis.
pub fn reflection_perm(grid: &TorusGrid, centers: &[usize]) -> Result<VertexPermutation> {
    if centers.len() != grid.dim() {
        return Err(Error::LengthMismatch {
            expected: grid.dim(),
            got: centers.len(),
        });
    }
    for (axis, (&c, &len)) in centers.iter().zip(grid.dims()).enumerate() {
        if c >= len {
            return Err(Error::InvalidParameter(format!(
                "center {c} out of range on axis {axis}"
            )));
        }
    }
    Ok(VertexPermutation::from_descriptor(
        grid,
        Descriptor::Reflection {
            centers: centers.to_vec(),
        },
    ))
}

/// `v(P x) = v(x)` for all `x`, compared exactly.
pub fn commutes_with_potential(perm: &VertexPermutation, v: &Potential) -> bool {
    perm.len() == v.len()
        && v.values()
            .iter()
            .enumerate()
            .all(|(x, &value)| v.values()[perm.apply(x)] == value)
}

/// Axis permutations `σ` with `L_σ(m) = L_m`, lexicographic.
fn axis_permutations(dims: &[usize]) -> Vec<Vec<usize>> {
    fn extend(dims: &[usize], prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let m = prefix.len();
        if m == dims.len() {
            out.push(prefix.clone());
            return;
        }
        for src in 0..dims.len() {
            if !used[src] && dims[src] == dims[m] {
                used[src] = true;
                prefix.push(src);
                extend(dims, prefix, used, out);
                prefix.pop();
                used[src] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(dims, &mut Vec::new(), &mut vec![false; dims.len()], &mut out);
    out
}

/// Order of the group generated by shifts, per-axis reflections and
/// equal-length axis swaps.
pub fn group_order(grid: &TorusGrid) -> usize {
    axis_permutations(grid.dims()).len() * (1usize << grid.dim()) * grid.n()
}

/// Deterministic candidate sequence: shifts (by axis, then amount), point
/// reflections (by center index), axis swaps, then the remaining group elements
/// in `(axis permutation, sign pattern, offset)` order. Duplicates by image and
/// the identity are skipped.
struct PoolIter<'a> {
    grid: &'a TorusGrid,
    seen: HashSet<Vec<usize>>,
    candidates: Box<dyn Iterator<Item = Descriptor> + 'a>,
}

impl<'a> PoolIter<'a> {
    fn new(grid: &'a TorusGrid) -> Self {
        let dims = grid.dims().to_vec();
        let d = dims.len();
        let shifts = {
            let dims = dims.clone();
            (0..d).flat_map(move |axis| (1..dims[axis]).map(move |amount| Descriptor::Shift { axis, amount }))
        };
        let reflections = (0..grid.n()).map(move |c| Descriptor::Reflection {
            centers: grid.coords(c),
        });
        let perms = axis_permutations(&dims);
        let swaps = perms.clone().into_iter().map(|source| Descriptor::AxisSwap { source });
        let rest = perms.into_iter().flat_map(move |source| {
            (0..1usize << d).flat_map(move |signs| {
                let source = source.clone();
                (0..grid.n()).map(move |off| Descriptor::Composite {
                    map: AffineMap {
                        source: source.clone(),
                        sign: (0..d).map(|m| if signs >> m & 1 == 1 { -1 } else { 1 }).collect(),
                        offset: grid.coords(off),
                    },
                })
            })
        });
        Self {
            grid,
            seen: HashSet::from([(0..grid.n()).collect()]),
            candidates: Box::new(shifts.chain(reflections).chain(swaps).chain(rest)),
        }
    }
}

impl Iterator for PoolIter<'_> {
    type Item = VertexPermutation;

    fn next(&mut self) -> Option<Self::Item> {
        for descriptor in self.candidates.by_ref() {
            let perm = VertexPermutation::from_descriptor(self.grid, descriptor);
            if self.seen.insert(perm.image.clone()) {
                return Some(perm);
            }
        }
        None
    }
}

fn check_pool_cap(grid: &TorusGrid, cap: usize) -> Result<()> {
    if group_order(grid) - 1 > cap {
        Err(Error::PoolCapExceeded(cap))
    } else {
        Ok(())
    }
}

/// All non-identity elements of the certificate search group, in search order.
pub fn automorphism_pool(grid: &TorusGrid, cap: usize) -> Result<Vec<VertexPermutation>> {
    check_pool_cap(grid, cap)?;
    let pool: Vec<_> = PoolIter::new(grid).collect();
    debug_assert!(pool.iter().all(|p| p.commutes_with_laplacian(grid)));
    Ok(pool)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BadnessReason {
    /// `P² ≠ I`: `H_t` has a repeated eigenvalue for every `t`.
    DegenerateSpectrum,
    /// `P² = I` fixing `vertex`: some eigenvector vanishes there for every `t`.
    VanishingAtFixedPoint { vertex: usize },
    /// Odd `n`; any involution then has a fixed point.
    OddNPermutation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryCertificate {
    #[serde(rename = "perm_descriptor")]
    pub descriptor: Descriptor,
    #[serde(skip)]
    pub image: Vec<usize>,
    pub order: usize,
    pub fixed_points: Vec<usize>,
    pub reason: BadnessReason,
}

impl SymmetryCertificate {
    /// Builds a certificate if `perm` alone certifies badness of a potential it fixes.
    pub fn from_perm(perm: &VertexPermutation) -> Option<Self> {
        if perm.is_identity() {
            return None;
        }
        let order = perm.order();
        let fixed_points = perm.fixed_points();
        let reason = if order > 2 {
            BadnessReason::DegenerateSpectrum
        } else if let Some(&vertex) = fixed_points.first() {
            BadnessReason::VanishingAtFixedPoint { vertex }
        } else {
            // A fixed-point-free involution moves an even number of vertices.
            assert!(perm.len().is_multiple_of(2), "fixed-point-free involution on odd n");
            return None;
        };
        Some(Self {
            descriptor: perm.descriptor.clone(),
            image: perm.image.clone(),
            order,
            fixed_points,
            reason,
        })
    }

    pub fn permutation(&self) -> VertexPermutation {
        VertexPermutation {
            image: self.image.clone(),
            descriptor: self.descriptor.clone(),
        }
    }

    /// Checks the certificate invariants against `grid` and `v`.
    pub fn is_valid_for(&self, grid: &TorusGrid, v: &Potential) -> bool {
        let perm = self.permutation();
        let reason_ok = match self.reason {
            BadnessReason::DegenerateSpectrum => self.order > 2,
            BadnessReason::VanishingAtFixedPoint { vertex } => self.order == 2 && self.fixed_points.contains(&vertex),
            BadnessReason::OddNPermutation => grid.n() % 2 == 1,
        };
        perm.is_bijection()
            && !perm.is_identity()
            && perm.order() == self.order
            && perm.fixed_points() == self.fixed_points
            && perm.commutes_with_laplacian(grid)
            && commutes_with_potential(&perm, v)
            && reason_ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CertificateSearch {
    Found(SymmetryCertificate),
    /// The whole pool was scanned; no certificate exists in it.
    Exhausted,
    /// The pool is larger than the cap, nothing can be concluded.
    Inconclusive {
        group_order: usize,
        cap: usize,
    },
}

impl CertificateSearch {
    pub fn certificate(&self) -> Option<&SymmetryCertificate> {
        match self {
            CertificateSearch::Found(c) => Some(c),
            _ => None,
        }
    }
}

/// First pool element fixing `v` that certifies badness.
pub fn find_certificate(grid: &TorusGrid, v: &Potential, cap: usize) -> Result<CertificateSearch> {
    v.check_len(grid.n())?;
    if check_pool_cap(grid, cap).is_err() {
        return Ok(CertificateSearch::Inconclusive {
            group_order: group_order(grid),
            cap,
        });
    }
    Ok(PoolIter::new(grid)
        .filter(|p| commutes_with_potential(p, v))
        .find_map(|p| SymmetryCertificate::from_perm(&p))
        .map_or(CertificateSearch::Exhausted, CertificateSearch::Found))
}

/// Smallest `j` with `v(j+i) = v(j−i)` for all `i` (indices mod `L`).
pub fn reflection_center(values: &[f64]) -> Option<usize> {
    let l = values.len();
    (0..l).find(|&j| (1..=l / 2).all(|i| values[(j + i) % l] == values[(j + l - i % l) % l]))
}

/// What a certificate predicts at one `t`, measured on the computed spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateObservation {
    pub t: f64,
    pub min_gap: f64,
    /// For vanishing certificates: smallest `|φ(j)|` over eigenvectors
    /// at the fixed point `j`, after rotating within near-degenerate clusters.
    pub fixed_point_entry: Option<f64>,
    pub visible: bool,
}

/// Numerically checks the consequence of `cert` for `H_t`: a gap below
/// `threshold` for degenerate certificates, an eigenvector entry below
/// `threshold` at the fixed point for vanishing ones.
///
/// Eigenvalues closer than `threshold` form a cluster; a cluster of dimension
/// two or more always contains a vector vanishing at `j`, which is built
/// explicitly from its first two members.
pub fn observe_certificate(
    grid: &TorusGrid,
    v: &Potential,
    cert: &SymmetryCertificate,
    t: f64,
    threshold: f64,
) -> Result<CertificateObservation> {
    let decomp = eigh(&hamiltonian(grid, v, t)?, DEFAULT_EIGH_TOL)?;
    let min_gap = decomp.min_gap();
    let (fixed_point_entry, visible) = match cert.reason {
        BadnessReason::DegenerateSpectrum => (None, min_gap < threshold),
        BadnessReason::VanishingAtFixedPoint { vertex: j } => {
            let mut best = f64::INFINITY;
            let mut start = 0;
            let n = decomp.n();
            while start < n {
                let mut end = start + 1;
                while end < n && decomp.eigenvalues[end] - decomp.eigenvalues[end - 1] < threshold {
                    end += 1;
                }
                let qa = &decomp.eigenvectors[start];
                let entry = if end - start == 1 {
                    qa[j].abs()
                } else {
                    let qb = &decomp.eigenvectors[start + 1];
                    let (a, b) = (qa[j], qb[j]);
                    let norm = a.hypot(b);
                    if norm == 0.0 {
                        0.0
                    } else {
                        let phi: Vec<f64> = qa.iter().zip(qb).map(|(x, y)| (b * x - a * y) / norm).collect();
                        phi[j].abs()
                    }
                };
                best = best.min(entry);
                start = end;
            }
            (Some(best), best < threshold)
        }
        BadnessReason::OddNPermutation => (None, false),
    };
    Ok(CertificateObservation {
        t,
        min_gap,
        fixed_point_entry,
        visible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(l: usize) -> TorusGrid {
        TorusGrid::cycle(l).unwrap()
    }

    #[test]
    fn shifts() {
        let g = cycle(3);
        let s = shift_perm(&g, 0, 1).unwrap();
        assert_eq!(s.image(), &[1, 2, 0]);
        assert_eq!(s.order(), 3);
        assert!(shift_perm(&cycle(5), 0, 5).unwrap().is_identity());
        let g = TorusGrid::new(&[3, 5]).unwrap();
        assert_eq!(shift_perm(&g, 1, 2).unwrap().order(), 5);
        assert!(matches!(
            shift_perm(&g, 2, 1),
            Err(Error::AxisOutOfRange { axis: 2, d: 2 })
        ));
    }

    #[test]
    fn reflections() {
        let r = reflection_perm(&cycle(5), &[0]).unwrap();
        assert_eq!(r.image(), &[0, 4, 3, 2, 1]);
        assert_eq!(r.fixed_points(), vec![0]);
        assert!(VertexPermutation {
            image: r.compose_image(&r),
            descriptor: r.descriptor.clone()
        }
        .is_identity());
        assert_eq!(reflection_perm(&cycle(4), &[0]).unwrap().fixed_points(), vec![0, 2]);
        assert!(reflection_perm(&cycle(4), &[0, 1]).is_err());
        assert!(reflection_perm(&cycle(4), &[4]).is_err());
    }

    #[test]
    fn potential_commutation() {
        let g = cycle(5);
        let s = shift_perm(&g, 0, 2).unwrap();
        assert!(commutes_with_potential(&s, &Potential::constant(0.3, 5)));
        let s3 = shift_perm(&cycle(3), 0, 1).unwrap();
        assert!(!commutes_with_potential(
            &s3,
            &Potential::explicit(vec![1.0, 1.0, -1.0])
        ));
        let pal = Potential::explicit(vec![0.1, 0.2, 0.3, 0.3, 0.2]);
        assert!(commutes_with_potential(&reflection_perm(&g, &[0]).unwrap(), &pal));
    }

    #[test]
    fn pool_sizes() {
        assert_eq!(automorphism_pool(&cycle(5), DEFAULT_POOL_CAP).unwrap().len(), 9);
        assert_eq!(automorphism_pool(&cycle(3), DEFAULT_POOL_CAP).unwrap().len(), 5);
        let sq = TorusGrid::new(&[3, 3]).unwrap();
        let pool = automorphism_pool(&sq, DEFAULT_POOL_CAP).unwrap();
        assert_eq!(pool.len(), 71);
        let swap: Vec<usize> = (0..9).map(|x| sq.index(&[x % 3, x / 3])).collect();
        assert!(pool.iter().any(|p| p.image() == swap.as_slice()));
        assert!(matches!(automorphism_pool(&sq, 10), Err(Error::PoolCapExceeded(10))));
    }

    #[test]
    fn descriptors_reproduce_images() {
        let g = TorusGrid::new(&[3, 3]).unwrap();
        for p in automorphism_pool(&g, DEFAULT_POOL_CAP).unwrap() {
            let again = VertexPermutation::from_descriptor(&g, p.descriptor().clone());
            assert_eq!(again.image(), p.image());
            assert!(p.is_bijection());
        }
    }

    #[test]
    fn certificate_examples() {
        let g = cycle(5);
        let v = Potential::explicit(vec![1.0, 1.0, -1.0, -1.0, 1.0]);
        let cert = find_certificate(&g, &v, DEFAULT_POOL_CAP).unwrap();
        let cert = cert.certificate().unwrap();
        assert_eq!(cert.descriptor, Descriptor::Reflection { centers: vec![0] });
        assert_eq!(cert.order, 2);
        assert_eq!(cert.fixed_points, vec![0]);
        assert_eq!(cert.reason, BadnessReason::VanishingAtFixedPoint { vertex: 0 });

        let sq = TorusGrid::new(&[3, 3]).unwrap();
        let c = Potential::constant(-1.0, 9);
        let cert = find_certificate(&sq, &c, DEFAULT_POOL_CAP).unwrap();
        let cert = cert.certificate().unwrap();
        assert!(matches!(cert.descriptor, Descriptor::Shift { axis: 0, amount: 1 }));
        assert_eq!(cert.reason, BadnessReason::DegenerateSpectrum);
        assert!(cert.is_valid_for(&sq, &c));

        let v7 = Potential::explicit(vec![1.0, 1.0, -1.0, 1.0, -1.0, -1.0, -1.0]);
        assert_eq!(
            find_certificate(&cycle(7), &v7, DEFAULT_POOL_CAP).unwrap(),
            CertificateSearch::Exhausted
        );
        assert!(matches!(
            find_certificate(&sq, &c, 5).unwrap(),
            CertificateSearch::Inconclusive {
                group_order: 72,
                cap: 5
            }
        ));
    }

    #[test]
    fn even_cycle_skips_fixed_point_free_involutions() {
        // Alternating signs on C_4 are fixed by the edge reflection r -> 1 - r
        // (no fixed points) and by the shift by 2 (order 2, no fixed points),
        // but also by the vertex reflection about 0.
        let g = cycle(4);
        let v = Potential::explicit(vec![1.0, -1.0, 1.0, -1.0]);
        let cert = find_certificate(&g, &v, DEFAULT_POOL_CAP).unwrap();
        let cert = cert.certificate().unwrap();
        assert_eq!(cert.reason, BadnessReason::VanishingAtFixedPoint { vertex: 0 });
    }

    #[test]
    fn reflection_centers() {
        assert_eq!(reflection_center(&[1.0, 1.0, -1.0, -1.0, 1.0]), Some(0));
        assert_eq!(reflection_center(&[-1.0; 5]), Some(0));
        assert_eq!(reflection_center(&[1.0, 1.0, -1.0, 1.0, -1.0, -1.0, -1.0]), None);
        assert_eq!(reflection_center(&[1.0, 1.0, -1.0, 1.0, -1.0]), Some(3));
    }

    #[test]
    fn certificate_consequence_visible() {
        let g = cycle(5);
        let v = Potential::explicit(vec![1.0, 1.0, -1.0, -1.0, 1.0]);
        let cert = find_certificate(&g, &v, DEFAULT_POOL_CAP).unwrap();
        let obs = observe_certificate(&g, &v, cert.certificate().unwrap(), 0.83, 1e-6).unwrap();
        assert!(obs.visible, "{obs:?}");
    }
}
