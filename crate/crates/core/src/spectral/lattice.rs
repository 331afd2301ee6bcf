use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Uniform periodic box `[0, L)^d` sampled with `n` points per axis, together
/// with its dual momentum lattice `(2π/L)·Z^d`.
///
/// Momentum nodes are stored in FFT order along each axis, i.e. integer
/// labels `0, 1, …, ⌈n/2⌉-1, -⌊n/2⌋, …, -1`. Flat indices are row-major with
/// the first axis slowest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxLattice {
    pub box_length: f64,
    pub points_per_dim: usize,
    pub dim: usize,
}

impl BoxLattice {
    pub fn new(box_length: f64, points_per_dim: usize, dim: usize) -> Result<Self> {
        let lattice = Self {
            box_length,
            points_per_dim,
            dim,
        };
        lattice.validate()?;
        Ok(lattice)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.box_length.is_finite() && self.box_length > 0.0) {
            return Err(invalid("box_length", format!("must be > 0, got {}", self.box_length)));
        }
        if self.points_per_dim == 0 {
            return Err(invalid("points_per_dim", "must be >= 1"));
        }
        if self.dim != 1 && self.dim != 3 {
            return Err(invalid("dim", format!("must be 1 or 3, got {}", self.dim)));
        }
        Ok(())
    }

    /// Number of lattice nodes, `n^d`. Equal for positions and momenta.
    pub fn len(&self) -> usize {
        self.points_per_dim.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.points_per_dim as f64
    }

    /// Position quadrature weight `(L/n)^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Momentum quadrature weight `w = (2π/L)^d`.
    pub fn mode_weight(&self) -> f64 {
        self.momentum_spacing().powi(self.dim as i32)
    }

    pub fn momentum_spacing(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Multi-index (per-axis integer coordinates) of a flat index.
    pub fn unflatten(&self, mut idx: usize) -> [usize; 3] {
        let n = self.points_per_dim;
        let mut out = [0usize; 3];
        for axis in (0..self.dim).rev() {
            out[axis] = idx % n;
            idx /= n;
        }
        out
    }

    pub fn flatten(&self, coords: [usize; 3]) -> usize {
        let n = self.points_per_dim;
        (0..self.dim).fold(0, |acc, axis| acc * n + coords[axis] % n)
    }

    /// Signed integer label of FFT slot `i` along one axis.
    pub fn fft_label(&self, i: usize) -> i64 {
        let n = self.points_per_dim as i64;
        let i = i as i64;
        if i < (n + 1) / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        let c = self.unflatten(idx);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = c[axis] as f64 * h;
        }
        x
    }

    pub fn momentum_labels(&self, idx: usize) -> [i64; 3] {
        let c = self.unflatten(idx);
        let mut m = [0i64; 3];
        for axis in 0..self.dim {
            m[axis] = self.fft_label(c[axis]);
        }
        m
    }

    pub fn momentum(&self, idx: usize) -> [f64; 3] {
        let dk = self.momentum_spacing();
        let m = self.momentum_labels(idx);
        [m[0] as f64 * dk, m[1] as f64 * dk, m[2] as f64 * dk]
    }

    pub fn momentum_norm(&self, idx: usize) -> f64 {
        norm3(self.momentum(idx))
    }

    /// Flat index of the momentum node with the given integer labels.
    pub fn momentum_index(&self, labels: [i64; 3]) -> usize {
        let n = self.points_per_dim as i64;
        let mut c = [0usize; 3];
        for axis in 0..self.dim {
            c[axis] = labels[axis].rem_euclid(n) as usize;
        }
        self.flatten(c)
    }

    /// The zero mode is excluded from every `|k|^{-1}` kernel.
    pub fn is_zero_mode(&self, idx: usize) -> bool {
        self.momentum_labels(idx) == [0, 0, 0]
    }

    pub fn zero_mode_index(&self) -> usize {
        0
    }

    /// Largest `|k|` on the lattice.
    pub fn max_momentum(&self) -> f64 {
        (0..self.len())
            .map(|i| self.momentum_norm(i))
            .fold(0.0, f64::max)
    }

    pub fn describe(&self) -> String {
        format!(
            "BoxLattice(L={}, n={}, d={})",
            self.box_length, self.points_per_dim, self.dim
        )
    }
}

pub fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_weights() {
        let l = BoxLattice::new(2.0 * PI, 8, 3).unwrap();
        assert_eq!(l.len(), 512);
        assert!((l.mode_weight() - 1.0).abs() < 1e-15);
        assert!((l.cell_volume() - (PI / 4.0).powi(3)).abs() < 1e-15);
        assert!(l.is_zero_mode(0));
        assert_eq!(l.fft_label(4), -4);
        assert_eq!(l.fft_label(3), 3);
    }

    #[test]
    fn momentum_index_round_trip() {
        let l = BoxLattice::new(3.0, 6, 3).unwrap();
        for i in 0..l.len() {
            assert_eq!(l.momentum_index(l.momentum_labels(i)), i);
        }
    }

    #[test]
    fn odd_lattice_labels_are_symmetric() {
        let l = BoxLattice::new(1.0, 3, 1).unwrap();
        let labels: Vec<i64> = (0..3).map(|i| l.fft_label(i)).collect();
        assert_eq!(labels, vec![0, 1, -1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(BoxLattice::new(0.0, 8, 3).is_err());
        assert!(BoxLattice::new(1.0, 8, 2).is_err());
        assert!(BoxLattice::new(1.0, 0, 1).is_err());
    }
}
