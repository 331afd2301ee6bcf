use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use super::lattice::BoxLattice;
use crate::error::{Error, Result};

/// Complex samples of a wave function on the position nodes of a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub values: Vec<C64>,
    pub lattice: BoxLattice,
}

/// Complex amplitudes on the momentum nodes of a lattice (FFT ordering).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeVector {
    pub values: Vec<C64>,
    pub lattice: BoxLattice,
}

impl ComplexField {
    pub fn new(values: Vec<C64>, lattice: BoxLattice) -> Result<Self> {
        check_len(values.len(), &lattice)?;
        Ok(Self { values, lattice })
    }

    pub fn zeros(lattice: BoxLattice) -> Self {
        Self {
            values: vec![C64::new(0.0, 0.0); lattice.len()],
            lattice,
        }
    }

    pub fn from_fn(lattice: BoxLattice, f: impl Fn([f64; 3]) -> C64) -> Self {
        let values = (0..lattice.len()).map(|i| f(lattice.position(i))).collect();
        Self { values, lattice }
    }

    /// `L²` norm with position measure `(L/n)^d`.
    pub fn norm(&self) -> f64 {
        (self.lattice.cell_volume() * sum_sq(&self.values)).sqrt()
    }

    /// `⟨self, other⟩` with position measure.
    pub fn inner(&self, other: &ComplexField) -> C64 {
        let s: C64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        s * self.lattice.cell_volume()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        for v in &mut self.values {
            *v /= n;
        }
        self
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl ModeVector {
    pub fn new(values: Vec<C64>, lattice: BoxLattice) -> Result<Self> {
        check_len(values.len(), &lattice)?;
        Ok(Self { values, lattice })
    }

    pub fn zeros(lattice: BoxLattice) -> Self {
        Self {
            values: vec![C64::new(0.0, 0.0); lattice.len()],
            lattice,
        }
    }

    /// `L²` norm with momentum measure `w = (2π/L)^d`.
    pub fn norm(&self) -> f64 {
        (self.lattice.mode_weight() * sum_sq(&self.values)).sqrt()
    }

    pub fn inner(&self, other: &ModeVector) -> C64 {
        let s: C64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        s * self.lattice.mode_weight()
    }

    /// Weighted norm `‖(1+|k|²)^{m/2} φ‖₂`.
    pub fn weighted_norm(&self, m: f64) -> f64 {
        let lat = &self.lattice;
        let s: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let k = lat.momentum_norm(i);
                (1.0 + k * k).powf(m) * v.norm_sqr()
            })
            .sum();
        (lat.mode_weight() * s).sqrt()
    }

    pub fn zero_mode(&self) -> C64 {
        self.values[self.lattice.zero_mode_index()]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

fn check_len(len: usize, lattice: &BoxLattice) -> Result<()> {
    if len != lattice.len() {
        return Err(Error::LatticeMismatch {
            expected: format!("{} values for {}", lattice.len(), lattice.describe()),
            found: format!("{len} values"),
        });
    }
    Ok(())
}

fn sum_sq(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// Cached FFT plans for one lattice.
///
/// Forward: `f̂(k) = (2π)^{-d/2} (L/n)^d Σ_x e^{-ik·x} f(x)`.
/// Inverse: `f(x) = (2π)^{-d/2} w Σ_k e^{ik·x} f̂(k)`.
/// With these factors the pair is unitary between the position measure
/// `(L/n)^d` and the momentum measure `w`.
pub struct FourierPlan {
    lattice: BoxLattice,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FourierPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierPlan").field("lattice", &self.lattice).finish()
    }
}

impl FourierPlan {
    pub fn new(lattice: BoxLattice) -> Self {
        let mut planner = FftPlanner::new();
        let n = lattice.points_per_dim;
        Self {
            lattice,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn lattice(&self) -> &BoxLattice {
        &self.lattice
    }

    pub fn forward_ft(&self, f: &ComplexField) -> Result<ModeVector> {
        self.check(&f.lattice)?;
        let mut data = f.values.clone();
        self.forward_in_place(&mut data);
        Ok(ModeVector {
            values: data,
            lattice: self.lattice,
        })
    }

    pub fn inverse_ft(&self, g: &ModeVector) -> Result<ComplexField> {
        self.check(&g.lattice)?;
        let mut data = g.values.clone();
        self.inverse_in_place(&mut data);
        Ok(ComplexField {
            values: data,
            lattice: self.lattice,
        })
    }

    /// In-place forward transform with the unitary normalization.
    pub fn forward_in_place(&self, data: &mut [C64]) {
        self.raw(data, &self.forward);
        let d = self.lattice.dim as i32;
        let scale = (2.0 * PI).powf(-0.5 * d as f64) * self.lattice.cell_volume();
        data.iter_mut().for_each(|v| *v *= scale);
    }

    pub fn inverse_in_place(&self, data: &mut [C64]) {
        self.raw(data, &self.inverse);
        let d = self.lattice.dim as i32;
        let scale = (2.0 * PI).powf(-0.5 * d as f64) * self.lattice.mode_weight();
        data.iter_mut().for_each(|v| *v *= scale);
    }

    fn check(&self, other: &BoxLattice) -> Result<()> {
        if *other != self.lattice {
            return Err(Error::LatticeMismatch {
                expected: self.lattice.describe(),
                found: other.describe(),
            });
        }
        Ok(())
    }

    /// Unnormalized multi-dimensional DFT, one axis at a time.
    fn raw(&self, data: &mut [C64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.lattice.points_per_dim;
        let dim = self.lattice.dim;
        debug_assert_eq!(data.len(), self.lattice.len());
        let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        // last axis is contiguous
        plan.process_with_scratch(data, &mut scratch);
        if dim == 1 {
            return;
        }
        let mut line = vec![C64::new(0.0, 0.0); n];
        for axis in 0..dim - 1 {
            let stride = n.pow((dim - 1 - axis) as u32);
            let block = stride * n;
            for start in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (j, l) in line.iter_mut().enumerate() {
                        *l = data[base + j * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (j, l) in line.iter().enumerate() {
                        data[base + j * stride] = *l;
                    }
                }
            }
        }
    }
}

/// Standalone forward transform; plans are built on the fly.
pub fn forward_ft(f: &ComplexField) -> Result<ModeVector> {
    FourierPlan::new(f.lattice).forward_ft(f)
}

pub fn inverse_ft(g: &ModeVector) -> Result<ComplexField> {
    FourierPlan::new(g.lattice).inverse_ft(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(lattice: BoxLattice, rng: &mut ChaCha8Rng) -> ComplexField {
        let values = (0..lattice.len())
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        ComplexField::new(values, lattice).unwrap()
    }

    /// Direct O(n²) evaluation of the forward transform.
    fn naive_forward(f: &ComplexField) -> Vec<C64> {
        let lat = f.lattice;
        let pref = (2.0 * PI).powf(-0.5 * lat.dim as f64) * lat.cell_volume();
        (0..lat.len())
            .map(|ki| {
                let k = lat.momentum(ki);
                let s: C64 = (0..lat.len())
                    .map(|xi| {
                        let x = lat.position(xi);
                        let ph = -(k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
                        f.values[xi] * C64::from_polar(1.0, ph)
                    })
                    .sum();
                s * pref
            })
            .collect()
    }

    #[test]
    fn constant_field_is_delta_at_zero() {
        let lat = BoxLattice::new(2.0 * PI, 8, 1).unwrap();
        let f = ComplexField::from_fn(lat, |_| C64::new(1.0, 0.0));
        let g = forward_ft(&f).unwrap();
        for (i, v) in g.values.iter().enumerate() {
            if i == 0 {
                assert!((v.re - (2.0 * PI).sqrt()).abs() < 1e-12);
                assert!(v.im.abs() < 1e-12);
            } else {
                assert!(v.norm() < 1e-12);
            }
        }
        assert!((f.norm() - g.norm()).abs() < 1e-12);
    }

    #[test]
    fn plane_wave_matches_naive_sum() {
        let lat = BoxLattice::new(3.0, 8, 1).unwrap();
        let k1 = 2.0 * PI / lat.box_length;
        let f = ComplexField::from_fn(lat, |x| C64::from_polar(1.0, k1 * x[0]));
        let g = forward_ft(&f).unwrap();
        let oracle = naive_forward(&f);
        for (i, (a, b)) in g.values.iter().zip(&oracle).enumerate() {
            assert!((a - b).norm() < 1e-12, "mode {i}");
            if lat.momentum_labels(i)[0] != 1 {
                assert!(a.norm() < 1e-12);
            }
        }
        assert!(g.values[1].norm() > 1.0);
    }

    #[test]
    fn three_dimensional_transform_matches_naive_sum() {
        let lat = BoxLattice::new(2.5, 4, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_field(lat, &mut rng);
        let g = forward_ft(&f).unwrap();
        let oracle = naive_forward(&f);
        let err = g
            .values
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn parseval_and_round_trip_on_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for lat in [
            BoxLattice::new(7.0, 16, 1).unwrap(),
            BoxLattice::new(4.0, 6, 3).unwrap(),
        ] {
            let plan = FourierPlan::new(lat);
            for _ in 0..100 {
                let f = random_field(lat, &mut rng);
                let g = plan.forward_ft(&f).unwrap();
                let n2 = f.norm().powi(2);
                assert!((n2 - g.norm().powi(2)).abs() <= 1e-12 * n2);
                let back = plan.inverse_ft(&g).unwrap();
                let err: f64 = back
                    .values
                    .iter()
                    .zip(&f.values)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(err <= 1e-12 * f.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt());
            }
        }
    }

    #[test]
    fn lattice_mismatch_is_rejected() {
        let a = BoxLattice::new(1.0, 4, 1).unwrap();
        let b = BoxLattice::new(2.0, 4, 1).unwrap();
        let plan = FourierPlan::new(a);
        assert!(plan.forward_ft(&ComplexField::zeros(b)).is_err());
        assert!(plan.inverse_ft(&ModeVector::zeros(b)).is_err());
    }
}
