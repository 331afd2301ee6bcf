use std::f64::consts::PI;

use serde::Serialize;

use super::quadrature::{integrate, integrate_to_infinity};
use crate::error::{invalid, Result};

/// Absolute tolerance for every radial integral.
pub const RADIAL_TOL: f64 = 1e-10;

/// Continuum (3D) norms of the cutoff form factors; independent of the anchor.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ContinuumNorms {
    pub cutoff: f64,
    /// `‖G_{K,x}‖²`
    pub gk_norm_sq: f64,
    /// `‖B_{K,x}‖²`
    pub bk_norm_sq: f64,
    /// `‖|·| B_{K,x}‖²`
    pub kbk_norm_sq: f64,
    /// summed quadrature error estimates
    pub error: f64,
}

/// Radial quadrature of the three squared norms, `∫d³k = 4π∫k²dk`.
pub fn continuum_norms(cutoff: f64) -> Result<ContinuumNorms> {
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(invalid("cutoff", format!("K must be finite and > 0, got {cutoff}")));
    }
    let four_pi = 4.0 * PI;
    // k² · |k|^{-2}
    let g = integrate(|_| 1.0, 0.0, cutoff, RADIAL_TOL / four_pi)?;
    // k² · (k(1+k²))^{-2}
    let b = integrate_to_infinity(|k| 1.0 / (1.0 + k * k).powi(2), cutoff, RADIAL_TOL / four_pi)?;
    let kb = integrate_to_infinity(
        |k| k * k / (1.0 + k * k).powi(2),
        cutoff,
        RADIAL_TOL / four_pi,
    )?;
    Ok(ContinuumNorms {
        cutoff,
        gk_norm_sq: four_pi * g.value,
        bk_norm_sq: four_pi * b.value,
        kbk_norm_sq: four_pi * kb.value,
        error: four_pi * (g.error + b.error + kb.error),
    })
}
