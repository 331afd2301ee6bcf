use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::spectral::{BoxLattice, ComplexField, ModeVector};

/// Tolerance on `‖ψ‖₂ = 1`.
pub const NORM_TOL: f64 = 1e-10;

/// Classical state `(ψ, φ)` of the Landau–Pekar flow.
#[derive(Debug, Clone, PartialEq)]
pub struct PekarPair {
    pub psi: ComplexField,
    pub phi: ModeVector,
    pub alpha: f64,
}

impl PekarPair {
    pub fn new(psi: ComplexField, phi: ModeVector, alpha: f64) -> Result<Self> {
        let pair = Self { psi, phi, alpha };
        pair.validate()?;
        Ok(pair)
    }

    pub fn lattice(&self) -> &BoxLattice {
        &self.psi.lattice
    }

    pub fn validate(&self) -> Result<()> {
        if self.psi.lattice != self.phi.lattice {
            return Err(Error::LatticeMismatch {
                expected: self.psi.lattice.describe(),
                found: self.phi.lattice.describe(),
            });
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(invalid("alpha", format!("must be >= 0, got {}", self.alpha)));
        }
        if !self.psi.is_finite() || !self.phi.is_finite() {
            return Err(invalid("state", "non-finite entries"));
        }
        let norm = self.psi.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(invalid("psi", format!("‖ψ‖₂ = {norm}, expected 1")));
        }
        if self.phi.zero_mode() != C64::new(0.0, 0.0) {
            return Err(invalid("phi", "zero mode must vanish"));
        }
        Ok(())
    }
}

/// Initial phonon field choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiInit {
    Zero,
    /// `φ(k) = -√α |k|^{-1} ρ̂(k)`, which makes `i∂_t φ = 0` at `t = 0`.
    FixedPoint,
}

/// Normalized periodic Gaussian of width `L/8` centered in the box.
pub fn gaussian_psi(lattice: BoxLattice) -> ComplexField {
    gaussian_psi_with(lattice, lattice.box_length / 8.0, [lattice.box_length / 2.0; 3])
}

/// Normalized periodic Gaussian `exp(-|x-c|²/(2σ²))`, summed over the
/// nearest periodic images.
pub fn gaussian_psi_with(lattice: BoxLattice, width: f64, center: [f64; 3]) -> ComplexField {
    let l = lattice.box_length;
    let dim = lattice.dim;
    let f = ComplexField::from_fn(lattice, |x| {
        let mut value = 1.0;
        for axis in 0..dim {
            let s: f64 = (-2..=2)
                .map(|m| {
                    let d = x[axis] - center[axis] + m as f64 * l;
                    (-d * d / (2.0 * width * width)).exp()
                })
                .sum();
            value *= s;
        }
        C64::new(value, 0.0)
    });
    f.normalized()
}

/// Fourier transform of the density, `ρ̂(k) = ∫dx e^{-ik·x}|ψ(x)|²`.
pub fn density_transform(psi: &ComplexField, plan: &crate::spectral::FourierPlan) -> Vec<C64> {
    let mut rho: Vec<C64> = psi.values.iter().map(|v| C64::new(v.norm_sqr(), 0.0)).collect();
    plan.forward_in_place(&mut rho);
    let scale = (2.0 * PI).powf(0.5 * psi.lattice.dim as f64);
    rho.iter_mut().for_each(|v| *v *= scale);
    rho
}

/// Standard initial data: Gaussian `ψ₀` with the chosen `φ₀`.
pub fn standard_initial(lattice: BoxLattice, alpha: f64, phi_init: PhiInit) -> Result<PekarPair> {
    let psi = gaussian_psi(lattice);
    let phi = match phi_init {
        PhiInit::Zero => ModeVector::zeros(lattice),
        PhiInit::FixedPoint => fixed_point_phi(&psi, alpha),
    };
    PekarPair::new(psi, phi, alpha)
}

/// `φ(k) = -√α|k|^{-1}ρ̂(k)` for the given `ψ`.
pub fn fixed_point_phi(psi: &ComplexField, alpha: f64) -> ModeVector {
    let lattice = psi.lattice;
    let plan = crate::spectral::FourierPlan::new(lattice);
    let rho = density_transform(psi, &plan);
    let values = rho
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let k = lattice.momentum_norm(i);
            if k == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                -alpha.sqrt() / k * r
            }
        })
        .collect();
    ModeVector { values, lattice }
}
