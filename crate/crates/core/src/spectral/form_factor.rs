use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::fft::ModeVector;
use super::lattice::{dot3, norm3, BoxLattice};
use crate::error::{invalid, Result};

/// Coupling kernels anchored at a particle position `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormFactorKind {
    /// `|k|^{-1} e^{-ik·x}`
    G,
    /// `G` restricted to `|k| ≤ K`
    GLow,
    /// `G` restricted to `|k| ≥ K`
    GHigh,
    /// `-e^{-ik·x} / (|k|(1+k²))` restricted to `|k| ≥ K`
    B,
}

impl FormFactorKind {
    pub fn needs_cutoff(self) -> bool {
        !matches!(self, FormFactorKind::G)
    }
}

#[derive(Debug, Clone)]
pub struct FormFactor {
    pub kind: FormFactorKind,
    pub cutoff: Option<f64>,
    pub anchor: [f64; 3],
    pub values: ModeVector,
}

/// Radial profile of a kernel at `|k|`, without the phase. The zero mode
/// (`|k| = 0`) always maps to 0.
pub fn radial_profile(kind: FormFactorKind, cutoff: Option<f64>, k: f64) -> f64 {
    if k == 0.0 {
        return 0.0;
    }
    let kc = cutoff.unwrap_or(f64::INFINITY);
    match kind {
        FormFactorKind::G => 1.0 / k,
        FormFactorKind::GLow => {
            if k <= kc {
                1.0 / k
            } else {
                0.0
            }
        }
        FormFactorKind::GHigh => {
            if k >= kc {
                1.0 / k
            } else {
                0.0
            }
        }
        FormFactorKind::B => {
            if k >= kc {
                -1.0 / (k * (1.0 + k * k))
            } else {
                0.0
            }
        }
    }
}

/// Kernel value at momentum `k` for anchor `x`.
pub fn kernel(kind: FormFactorKind, cutoff: Option<f64>, k: [f64; 3], x: [f64; 3]) -> C64 {
    let r = radial_profile(kind, cutoff, norm3(k));
    if r == 0.0 {
        return C64::new(0.0, 0.0);
    }
    C64::from_polar(r, -dot3(k, x))
}

pub fn make_form_factor(
    kind: FormFactorKind,
    cutoff: Option<f64>,
    anchor: [f64; 3],
    lattice: &BoxLattice,
) -> Result<FormFactor> {
    if kind.needs_cutoff() {
        match cutoff {
            None => return Err(invalid("cutoff", format!("{kind:?} requires a cutoff K"))),
            Some(k) if !(k > 0.0) => {
                return Err(invalid("cutoff", format!("K must be > 0, got {k}")))
            }
            _ => {}
        }
    }
    let values = (0..lattice.len())
        .map(|i| kernel(kind, cutoff, lattice.momentum(i), anchor))
        .collect();
    Ok(FormFactor {
        kind,
        cutoff,
        anchor,
        values: ModeVector {
            values,
            lattice: *lattice,
        },
    })
}

impl FormFactor {
    /// Lattice norm squared `w Σ_k |f(k)|²`.
    pub fn norm_sq(&self) -> f64 {
        self.values.norm().powi(2)
    }

    /// Lattice value of `‖|·| f‖²`.
    pub fn momentum_weighted_norm_sq(&self) -> f64 {
        let lat = &self.values.lattice;
        lat.mode_weight()
            * self
                .values
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| lat.momentum_norm(i).powi(2) * v.norm_sqr())
                .sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn b_above_lattice_is_empty() {
        let lat = BoxLattice::new(2.0 * PI, 6, 3).unwrap();
        let k = lat.max_momentum() * 1.01;
        let f = make_form_factor(FormFactorKind::B, Some(k), [0.0; 3], &lat).unwrap();
        assert!(f.values.values.iter().all(|v| *v == C64::new(0.0, 0.0)));
    }

    #[test]
    fn low_pass_reads_off_kernel() {
        let lat = BoxLattice::new(2.0 * PI * 1.5, 6, 3).unwrap();
        let k1 = lat.momentum_spacing();
        assert!(k1 <= 1.0);
        let f = make_form_factor(FormFactorKind::GLow, Some(1.0), [0.0; 3], &lat).unwrap();
        let idx = lat.momentum_index([1, 0, 0]);
        assert!((f.values.values[idx].re - 1.0 / k1).abs() < 1e-14);
        for (i, v) in f.values.values.iter().enumerate() {
            if lat.momentum_norm(i) > 1.0 || lat.is_zero_mode(i) {
                assert_eq!(*v, C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn anchor_shift_is_a_phase() {
        let lat = BoxLattice::new(3.0, 4, 3).unwrap();
        let a = [0.3, -0.7, 1.1];
        let f0 = make_form_factor(FormFactorKind::G, None, [0.0; 3], &lat).unwrap();
        let fa = make_form_factor(FormFactorKind::G, None, a, &lat).unwrap();
        for i in 0..lat.len() {
            let k = lat.momentum(i);
            let expected = f0.values.values[i] * C64::from_polar(1.0, -dot3(k, a));
            assert!((fa.values.values[i] - expected).norm() < 1e-13);
        }
        assert_eq!(f0.values.zero_mode(), C64::new(0.0, 0.0));
    }

    #[test]
    fn cutoff_is_validated() {
        let lat = BoxLattice::new(1.0, 4, 1).unwrap();
        assert!(make_form_factor(FormFactorKind::B, None, [0.0; 3], &lat).is_err());
        assert!(make_form_factor(FormFactorKind::GLow, Some(0.0), [0.0; 3], &lat).is_err());
        assert!(make_form_factor(FormFactorKind::G, None, [0.0; 3], &lat).is_ok());
    }
}
