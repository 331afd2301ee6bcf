//! Numerical checks of the identities, closed-form constants and operator
//! inequalities behind the mean-field estimates.
//!
//! Scalar checks compare numbers; operator inequalities `A ≤ B` are checked
//! as `λ_min(B − A) ≥ −slack` with `slack = 1e-9 · ‖B − A‖_max`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::fock::SparseOperator;
use crate::linalg::min_eigenvalue;

mod continuum;
mod gronwall;
mod operators;
mod scaling;
mod trend;
mod suite;

pub use continuum::{
    b_norm_closed_form, cg_profile, cg_reports, compute_cg_constant, kb_norm_closed_form,
    verify_form_factor_norms, CgConstant,
};
pub use gronwall::{fit_gronwall_envelope, BetaSeries, EnvelopeViolation, GronwallFit};
pub use operators::{
    verify_correction_bound, verify_hamiltonian_sandwich, verify_interaction_bound,
    verify_lieb_yamazaki, SandwichFit,
};
pub use scaling::{
    fit_power_law, verify_gross_closeness, verify_gross_representation,
    verify_initial_state_scalings, verify_trace_norm_chain, ClosenessRow, ClosenessStudy,
    PowerLawFit, RepresentationSample, ScalingRow, ScalingStudy,
};
pub use suite::{run_suite, SuiteConfig, SuiteOutcome};
pub use trend::{mean_field_trend, TrendRun, TrendStudy};

/// Relative slack of operator inequalities.
pub const SPECTRAL_SLACK: f64 = 1e-9;

/// Ritz residual target for extremal eigenvalues, relative to the scale.
pub const EIGEN_TOL: f64 = 1e-11;

/// Outcome of one inequality or identity check.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub name: String,
    /// left side for scalar checks
    pub lhs: Option<f64>,
    /// right side for scalar checks
    pub rhs: Option<f64>,
    /// `rhs − lhs`, or `λ_min(B − A)` for operator inequalities
    pub margin: f64,
    pub slack: f64,
    pub pass: bool,
    /// numeric parameters (K, N, ε, ...)
    pub context: BTreeMap<String, f64>,
    /// free-form description of the state or variant
    pub note: String,
}

impl InequalityReport {
    pub fn scalar(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            name: name.into(),
            lhs: Some(lhs),
            rhs: Some(rhs),
            margin,
            slack,
            pass: margin >= -slack,
            context: BTreeMap::new(),
            note: String::new(),
        }
    }

    pub fn spectral(name: impl Into<String>, margin: f64, scale: f64) -> Self {
        let slack = SPECTRAL_SLACK * scale;
        Self {
            name: name.into(),
            lhs: None,
            rhs: None,
            margin,
            slack,
            pass: margin >= -slack,
            context: BTreeMap::new(),
            note: String::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.context.insert(key.to_string(), value);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

/// `λ_min(D)` and `‖D‖_max` for an assembled hermitian difference `D = B − A`.
pub fn spectral_margin(diff: &SparseOperator, seed: u64) -> Result<(f64, f64)> {
    let scale = diff.max_abs();
    if scale == 0.0 {
        return Ok((0.0, 0.0));
    }
    let e = min_eigenvalue(diff, EIGEN_TOL * scale, seed)?;
    Ok((e.value, scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spectral_slack_scales_with_the_operator() {
        let r = InequalityReport::spectral("x", -0.5e-9, 1.0);
        assert!(r.pass);
        let r = InequalityReport::spectral("x", -2e-9, 1.0);
        assert!(!r.pass);
        assert!(InequalityReport::spectral("x", -2e-9, 10.0).pass);
    }

    #[test]
    fn margin_of_a_diagonal_difference_is_its_smallest_entry() {
        let d = SparseOperator::diagonal(&[3.0, -0.25, 1.0, 2.0]);
        let (m, scale) = spectral_margin(&d, 1).unwrap();
        assert!((m + 0.25).abs() < 1e-12);
        assert_eq!(scale, 3.0);
        let zero = SparseOperator::diagonal(&[0.0; 3]);
        assert_eq!(spectral_margin(&zero, 1).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn margins_do_not_depend_on_basis_order() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;

        use crate::linalg::Operator;

        let mut spec = crate::fock::ModelSpec::chain(3, 1, 2, 1.0, 1.0);
        spec.n_particles = 2;
        let model = crate::fock::FockModel::new(spec).unwrap();
        let h = crate::fock::build_frohlich_hamiltonian(&model).unwrap();
        let h0 = crate::fock::build_free_hamiltonian(&model).unwrap();
        let diff = h.add_scaled(&h0, -0.5);
        let mut perm: Vec<usize> = (0..diff.dim()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(3));
        let permuted = SparseOperator::from_triplets(
            diff.dim(),
            diff.triplets().into_iter().map(|(r, c, v)| (perm[r], perm[c], v)).collect(),
        );
        let (a, sa) = spectral_margin(&diff, 1).unwrap();
        let (b, sb) = spectral_margin(&permuted, 2).unwrap();
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        assert_eq!(sa, sb);
    }

    proptest! {
        #[test]
        fn scalar_pass_iff_within_slack(lhs in -1e3..1e3f64, rhs in -1e3..1e3f64, slack in 0.0..1.0f64) {
            let r = InequalityReport::scalar("p", lhs, rhs, slack).with("k", 1.0);
            prop_assert_eq!(r.pass, lhs <= rhs + slack);
            prop_assert_eq!(r.margin, rhs - lhs);
            prop_assert_eq!(r.context["k"], 1.0);
        }
    }
}
