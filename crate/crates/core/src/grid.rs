//! Periodic box grids `Z/L_1 x ... x Z/L_d`, their graph Laplacian and metric.
//!
//! Vertices are indexed row-major over coordinate tuples: the last axis varies
//! fastest, so on a `[3, 5]` grid the tuple `(a, b)` has index `5a + b`.
//! Potentials serialize in this order.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    dims: Vec<usize>,
    n: usize,
}

impl TorusGrid {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::EmptyDims);
        }
        for (axis, &len) in dims.iter().enumerate() {
            if len <= 2 {
                return Err(Error::SideTooShort(len, axis));
            }
        }
        Ok(Self {
            dims: dims.to_vec(),
            n: dims.iter().product(),
        })
    }

    /// A single cycle of length `len`.
    pub fn cycle(len: usize) -> Result<Self> {
        Self::new(&[len])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_cycle(&self) -> bool {
        self.dims.len() == 1
    }

    pub fn coords(&self, index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        let mut rest = index;
        for (slot, &len) in out.iter_mut().zip(&self.dims).rev() {
            *slot = rest % len;
            rest /= len;
        }
        out
    }

    /// Inverse of [`coords`](Self::coords). Coordinates are reduced mod the side length.
    pub fn index(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.dims.len());
        coords
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&c, &len)| acc * len + c % len)
    }

    pub fn check_vertex(&self, vertex: usize) -> Result<()> {
        if vertex < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex, n: self.n })
        }
    }

    /// The `2d` neighbors of `vertex`, ordered by axis then `-1`, `+1`.
    pub fn neighbors(&self, vertex: usize) -> Vec<usize> {
        let base = self.coords(vertex);
        let mut out = Vec::with_capacity(2 * self.dims.len());
        for (axis, &len) in self.dims.iter().enumerate() {
            for step in [len - 1, 1] {
                let mut c = base.clone();
                c[axis] = (c[axis] + step) % len;
                out.push(self.index(&c));
            }
        }
        out
    }

    /// Closed-form torus metric: sum over axes of the wrap-around coordinate distance.
    pub fn distance(&self, i: usize, j: usize) -> Result<usize> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        let (a, b) = (self.coords(i), self.coords(j));
        Ok(a.iter()
            .zip(&b)
            .zip(&self.dims)
            .map(|((&x, &y), &len)| {
                let diff = x.abs_diff(y);
                diff.min(len - diff)
            })
            .sum())
    }

    /// Breadth-first distances from `source` to every vertex.
    pub fn bfs_distances(&self, source: usize) -> Result<Vec<usize>> {
        self.check_vertex(source)?;
        let mut dist = vec![usize::MAX; self.n];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }

    pub fn diameter(&self) -> usize {
        self.dims.iter().map(|&len| len / 2).sum()
    }

    pub fn ball(&self, center: usize, radius: usize) -> Result<BTreeSet<usize>> {
        self.check_vertex(center)?;
        let mut out = BTreeSet::new();
        for j in 0..self.n {
            if self.distance(center, j)? <= radius {
                out.insert(j);
            }
        }
        Ok(out)
    }

    /// Graph Laplacian `Δ = 2d·I − adjacency`.
    pub fn laplacian(&self) -> SymmetricMatrix {
        let mut m = SymmetricMatrix::zeros(self.n);
        let degree = 2.0 * self.dims.len() as f64;
        for v in 0..self.n {
            m.set(v, v, degree);
            for w in self.neighbors(v) {
                m.set(v, w, -1.0);
            }
        }
        m
    }
}

/// Dense real symmetric matrix. Writes through [`set`](Self::set) update both triangles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    /// Builds from rows, rejecting ragged or non-symmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        for i in 0..n {
            for j in 0..i {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::InvalidParameter(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    /// `self + scale * diag(entries)`.
    pub fn add_diagonal(&self, entries: &[f64], scale: f64) -> Result<Self> {
        if entries.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: entries.len(),
            });
        }
        let mut out = self.clone();
        for (i, &x) in entries.iter().enumerate() {
            out.data[i * self.n + i] += scale * x;
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Adjacency lists of the support graph: `i ~ j` iff `i != j` and `A(i, j) != 0`.
    pub fn support(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|i| (0..self.n).filter(|&j| j != i && self.get(i, j) != 0.0).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_rejects_short_or_empty() {
        assert_eq!(TorusGrid::new(&[2, 3]), Err(Error::SideTooShort(2, 0)));
        assert_eq!(TorusGrid::new(&[]), Err(Error::EmptyDims));
        assert!(TorusGrid::new(&[3, 1]).is_err());
    }

    #[test]
    fn cycle_and_square_neighbors() {
        let c = TorusGrid::new(&[5]).unwrap();
        assert_eq!(c.n(), 5);
        assert_eq!(c.neighbors(0), vec![4, 1]);
        let g = TorusGrid::new(&[3, 3]).unwrap();
        assert_eq!(g.n(), 9);
        for v in 0..9 {
            let nb: BTreeSet<_> = g.neighbors(v).into_iter().collect();
            assert_eq!(nb.len(), 4);
            assert!(!nb.contains(&v));
        }
    }

    #[test]
    fn index_round_trip() {
        let g = TorusGrid::new(&[3, 4, 5]).unwrap();
        for v in 0..g.n() {
            assert_eq!(g.index(&g.coords(v)), v);
        }
        assert_eq!(TorusGrid::new(&[3, 5]).unwrap().coords(7), vec![1, 2]);
    }

    #[test]
    fn laplacian_small_cases() {
        let l3 = TorusGrid::cycle(3).unwrap().laplacian();
        let expected = [[2.0, -1.0, -1.0], [-1.0, 2.0, -1.0], [-1.0, -1.0, 2.0]];
        for (i, row) in expected.iter().enumerate() {
            assert_eq!(l3.row(i), row);
        }
        let l5 = TorusGrid::cycle(5).unwrap().laplacian();
        for i in 0..5 {
            assert_eq!(l5.get(i, i), 2.0);
            assert_eq!(l5.row(i).iter().sum::<f64>(), 0.0);
        }
        let sq = TorusGrid::new(&[3, 3]).unwrap().laplacian();
        for i in 0..9 {
            assert_eq!(sq.get(i, i), 4.0);
            assert_eq!(sq.row(i).iter().filter(|&&x| x == -1.0).count(), 4);
        }
        assert!(sq.is_symmetric());
    }

    #[test]
    fn distances() {
        let c = TorusGrid::cycle(5).unwrap();
        assert_eq!(c.distance(0, 3).unwrap(), 2);
        assert_eq!(c.distance(4, 4).unwrap(), 0);
        let g = TorusGrid::new(&[3, 5]).unwrap();
        assert_eq!(g.distance(g.index(&[0, 0]), g.index(&[1, 2])).unwrap(), 3);
        assert!(matches!(
            g.distance(0, 15),
            Err(Error::VertexOutOfRange { vertex: 15, n: 15 })
        ));
    }

    #[test]
    fn balls() {
        let c = TorusGrid::cycle(5).unwrap();
        assert_eq!(c.ball(0, 1).unwrap(), BTreeSet::from([4, 0, 1]));
        assert_eq!(c.ball(3, 0).unwrap(), BTreeSet::from([3]));
        assert_eq!(c.ball(0, 2).unwrap().len(), 5);
    }

    #[test]
    fn from_rows_rejects_asymmetric() {
        assert!(SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 1.0]]).is_err());
        assert!(SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0]]).is_err());
    }
}
