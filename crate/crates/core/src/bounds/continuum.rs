use std::f64::consts::PI;

use serde::Serialize;

use super::InequalityReport;
use crate::error::{invalid, Result};
use crate::spectral::norms::RADIAL_TOL;
use crate::spectral::quadrature::{integrate, integrate_to_infinity};
use crate::spectral::continuum_norms;

/// Relative agreement demanded of identities and closed forms.
const IDENTITY_TOL: f64 = 1e-8;

/// `‖B_K‖² = 4π·½(π/2 − arctan K − K/(1+K²))`
pub fn b_norm_closed_form(k: f64) -> f64 {
    2.0 * PI * (0.5 * PI - k.atan() - k / (1.0 + k * k))
}

/// `‖|·|B_K‖² = 4π·½(π/2 − arctan K + K/(1+K²))`
pub fn kb_norm_closed_form(k: f64) -> f64 {
    2.0 * PI * (0.5 * PI - k.atan() + k / (1.0 + k * k))
}

fn relative_check(name: &str, value: f64, exact: f64, k: f64) -> InequalityReport {
    let rel = (value - exact).abs() / exact.abs();
    InequalityReport::scalar(name, rel, IDENTITY_TOL, 0.0)
        .with("K", k)
        .with("value", value)
        .with("exact", exact)
}

/// `‖G_K‖² = 4πK`, the closed forms of `‖B_K‖²` and `‖|·|B_K‖²`, and the
/// bounds `‖B_K‖² ≤ 4πK^{-3}`, `‖|·|B_K‖² ≤ 4πK^{-1}`.
pub fn verify_form_factor_norms(cutoffs: &[f64]) -> Result<Vec<InequalityReport>> {
    let mut out = Vec::new();
    for &k in cutoffs {
        let n = continuum_norms(k)?;
        let four_pi = 4.0 * PI;
        out.push(relative_check("form_factor.g_norm_identity", n.gk_norm_sq, four_pi * k, k));
        out.push(relative_check(
            "form_factor.b_norm_closed_form",
            n.bk_norm_sq,
            b_norm_closed_form(k),
            k,
        ));
        out.push(relative_check(
            "form_factor.kb_norm_closed_form",
            n.kbk_norm_sq,
            kb_norm_closed_form(k),
            k,
        ));
        out.push(
            InequalityReport::scalar("form_factor.b_norm_bound", n.bk_norm_sq, four_pi / k.powi(3), n.error)
                .with("K", k),
        );
        out.push(
            InequalityReport::scalar("form_factor.kb_norm_bound", n.kbk_norm_sq, four_pi / k, n.error)
                .with("K", k),
        );
    }
    Ok(out)
}

/// `∫d³k / (k²(1 + (p+k)²))` for `|p| = p`, after the angular integration:
/// `∫₀^∞ dk (π/(pk)) ln((1+(p+k)²)/(1+(p−k)²))`.
pub fn cg_profile(p: f64) -> Result<(f64, f64)> {
    if !(p >= 0.0 && p.is_finite()) {
        return Err(invalid("p", format!("must be finite and >= 0, got {p}")));
    }
    if p == 0.0 {
        let r = integrate_to_infinity(|k| 1.0 / (1.0 + k * k), 0.0, RADIAL_TOL / (4.0 * PI))?;
        return Ok((4.0 * PI * r.value, 4.0 * PI * r.error));
    }
    let f = |k: f64| {
        if k == 0.0 {
            return 4.0 * PI / (1.0 + p * p);
        }
        let d = 1.0 + (p - k) * (p - k);
        PI / (p * k) * (4.0 * p * k / d).ln_1p()
    };
    let near = integrate(f, 0.0, 2.0 * p, RADIAL_TOL / 2.0)?;
    let far = integrate_to_infinity(f, 2.0 * p, RADIAL_TOL / 2.0)?;
    Ok((near.value + far.value, near.error + far.error))
}

/// The commutator-method constant.
#[derive(Debug, Clone, Serialize)]
pub struct CgConstant {
    /// integrand at `p = 0`
    pub value_at_p0: f64,
    /// largest profile value on the search grid
    pub sup_over_p: f64,
    pub argmax_p: f64,
    /// `∫d³k/(k²(1+k)²)`, the right side of the displayed identity
    pub paper_rhs: f64,
    /// `(p, value)` on the search grid
    pub profile: Vec<(f64, f64)>,
    /// largest quadrature error estimate
    pub error: f64,
}

impl CgConstant {
    /// Largest increase between consecutive grid points; `≤ 0` when the
    /// profile decays.
    pub fn max_increase(&self) -> f64 {
        self.profile
            .windows(2)
            .map(|w| w[1].1 - w[0].1)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Profile on `points` equally spaced values of `|p|` in `[0, p_max]`.
pub fn compute_cg_constant(p_max: f64, points: usize) -> Result<CgConstant> {
    if !(p_max > 0.0) || points < 2 {
        return Err(invalid("grid", "need p_max > 0 and at least 2 points"));
    }
    let mut profile = Vec::with_capacity(points);
    let mut error: f64 = 0.0;
    for i in 0..points {
        let p = p_max * i as f64 / (points - 1) as f64;
        let (v, e) = cg_profile(p)?;
        error = error.max(e);
        profile.push((p, v));
    }
    let (argmax_p, sup_over_p) = profile
        .iter()
        .copied()
        .fold((0.0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let rhs = integrate_to_infinity(|k| 1.0 / ((1.0 + k) * (1.0 + k)), 0.0, RADIAL_TOL / (4.0 * PI))?;
    error = error.max(4.0 * PI * rhs.error);
    Ok(CgConstant {
        value_at_p0: profile[0].1,
        sup_over_p,
        argmax_p,
        paper_rhs: 4.0 * PI * rhs.value,
        profile,
        error,
    })
}

/// Reports for the commutator constant: the supremum sits at `p = 0` and
/// the profile decays along the grid.
pub fn cg_reports(c: &CgConstant) -> Vec<InequalityReport> {
    let slack = 2.0 * c.error;
    vec![
        InequalityReport::scalar("cg.sup_at_origin", c.sup_over_p, c.value_at_p0, slack)
            .with("argmax_p", c.argmax_p)
            .with("paper_rhs", c.paper_rhs),
        InequalityReport::scalar("cg.profile_decay", c.max_increase(), 0.0, slack)
            .with("p_max", c.profile.last().map_or(0.0, |x| x.0)),
    ]
}
