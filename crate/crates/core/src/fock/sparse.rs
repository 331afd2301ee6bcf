use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::Operator;

/// Entrywise hermiticity tolerance.
pub const HERMITIAN_TOL: f64 = 1e-13;

/// Complex CSR matrix.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
    pub hermitian: bool,
}

impl SparseOperator {
    /// Sums duplicate entries and drops exact zeros.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            if let (Some(&lr), Some(&lc)) = (rows.last(), cols.last()) {
                if lr == r && lc == c {
                    *vals.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            cols.push(c);
            vals.push(v);
        }
        let keep: Vec<bool> = vals.iter().map(|v| *v != C64::new(0.0, 0.0)).collect();
        let mut k = 0;
        let (mut c2, mut v2) = (Vec::new(), Vec::new());
        for i in 0..rows.len() {
            if keep[i] {
                row_ptr[rows[i] + 1] += 1;
                c2.push(cols[i]);
                v2.push(vals[i]);
                k += 1;
            }
        }
        debug_assert_eq!(k, c2.len());
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            dim,
            row_ptr,
            cols: c2,
            vals: v2,
            hermitian: false,
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let t = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (i, i, C64::new(v, 0.0)))
            .collect();
        Self::from_triplets(values.len(), t)
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.row(r)
            .find(|&(cc, _)| cc == c)
            .map(|(_, v)| v)
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn adjoint(&self) -> Self {
        let t = (0..self.dim)
            .flat_map(|r| self.row(r).map(move |(c, v)| (c, r, v.conj())).collect::<Vec<_>>())
            .collect();
        let mut a = Self::from_triplets(self.dim, t);
        a.hermitian = self.hermitian;
        a
    }

    /// Largest `|A_ij − conj(A_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let adj = self.adjoint();
        self.add_scaled(&adj, -1.0).max_abs()
    }

    /// Verify and set the hermitian flag.
    pub fn mark_hermitian(mut self) -> Result<Self> {
        let d = self.hermitian_defect();
        if d > HERMITIAN_TOL * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian { asymmetry: d });
        }
        self.hermitian = true;
        Ok(self)
    }

    /// `self + c·other`
    pub fn add_scaled(&self, other: &SparseOperator, c: f64) -> SparseOperator {
        let mut t: Vec<(usize, usize, C64)> = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..self.dim {
            t.extend(self.row(r).map(|(col, v)| (r, col, v)));
            t.extend(other.row(r).map(|(col, v)| (r, col, v * c)));
        }
        Self::from_triplets(self.dim, t)
    }

    /// `c·self`
    pub fn scale(&self, c: f64) -> SparseOperator {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= c);
        out.hermitian = self.hermitian;
        out
    }

    /// `self · other`
    pub fn matmul(&self, other: &SparseOperator) -> SparseOperator {
        let mut t = Vec::new();
        for r in 0..self.dim {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    t.push((r, c, a * b));
                }
            }
        }
        Self::from_triplets(self.dim, t)
    }

    pub fn commutator(&self, other: &SparseOperator) -> SparseOperator {
        self.matmul(other).add_scaled(&other.matmul(self), -1.0)
    }

    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        (0..self.dim)
            .flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v)).collect::<Vec<_>>())
            .collect()
    }

    /// `⟨x, A x⟩`
    pub fn expectation(&self, x: &[C64]) -> C64 {
        crate::linalg::dot(x, &self.apply_vec(x))
    }
}

impl Operator for SparseOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let row = |r: usize| -> C64 {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            acc
        };
        if self.dim > 4096 {
            y.par_iter_mut().enumerate().for_each(|(r, out)| *out = row(r));
        } else {
            y.iter_mut().enumerate().for_each(|(r, out)| *out = row(r));
        }
    }
}
