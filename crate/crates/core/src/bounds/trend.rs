use num_complex::Complex64 as C64;
use serde::Serialize;

use super::gronwall::{fit_gronwall_envelope, BetaSeries, GronwallFit};
use super::InequalityReport;
use crate::error::{invalid, Result};
use crate::fock::{
    build_frohlich_hamiltonian, compare_with_mean_field, gross_dressed_pekar_state, uniform_times,
    ComparisonConfig, ComparisonRun, FockModel, LatticePekarFlow, LatticePekarState, ModelSpec,
};

#[derive(Debug, Clone, Serialize)]
pub struct TrendRun {
    pub n: usize,
    pub dim: usize,
    pub reports: Vec<crate::fock::FunctionalReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrendStudy {
    pub runs: Vec<TrendRun>,
    /// envelope fitted on every sample
    pub gronwall: GronwallFit,
    /// envelope fitted on every other sample
    pub gronwall_coarse: GronwallFit,
    pub reports: Vec<InequalityReport>,
}

fn series(run: &TrendRun, cutoff: f64, stride: usize) -> BetaSeries {
    let pick: Vec<_> = run.reports.iter().step_by(stride).collect();
    BetaSeries {
        label: format!("N={}", run.n),
        n: run.n,
        cutoff,
        times: pick.iter().map(|r| r.t).collect(),
        beta: pick.iter().map(|r| r.beta()).collect(),
    }
}

/// Many-body runs from the Gross-dressed Pekar state `U_K†(ψ^{⊗N} ⊗ W(√Nφ)Ω)`
/// with `φ` the stationary field of `ψ`, for each `N` in `particles`, each
/// compared with the lattice mean-field flow on `2·intervals + 1` uniform
/// samples of `[0, t_end]`.
///
/// Checks that the terminal trace distance and `β_K` do not grow with `N`,
/// that the Grönwall envelope fitted on all samples has no violations, and
/// that halving the sampling rate moves the fitted constant by under 10%.
pub fn mean_field_trend(
    spec: &ModelSpec,
    particles: &[usize],
    psi: &[C64],
    t_end: f64,
    intervals: usize,
    leakage_tol: f64,
    config: &ComparisonConfig,
) -> Result<TrendStudy> {
    if particles.is_empty() || intervals < 2 {
        return Err(invalid("trend", "need particle numbers and at least 2 intervals"));
    }
    let times = uniform_times(t_end, 2 * intervals);
    let mut runs = Vec::new();
    for &n in particles {
        let mut s = spec.clone();
        s.n_particles = n;
        let model = FockModel::new(s)?;
        let z = LatticePekarFlow::new(&model).stationary_field(psi);
        let initial = gross_dressed_pekar_state(&model, psi, &z, leakage_tol)?;
        let h = build_frohlich_hamiltonian(&model)?;
        let reference = LatticePekarState {
            psi: psi.to_vec(),
            z,
        };
        let ComparisonRun { reports, .. } =
            compare_with_mean_field(&model, &h, &initial, &reference, &times, config)?;
        runs.push(TrendRun {
            n,
            dim: model.dim(),
            reports,
        });
    }
    let k = spec.cutoff;
    let fine: Vec<BetaSeries> = runs.iter().map(|r| series(r, k, 1)).collect();
    let coarse: Vec<BetaSeries> = runs.iter().map(|r| series(r, k, 2)).collect();
    let gronwall = fit_gronwall_envelope(&fine)?;
    let gronwall_coarse = fit_gronwall_envelope(&coarse)?;

    let mut reports = Vec::new();
    let last = |r: &TrendRun| *r.reports.last().expect("at least one sample");
    for w in runs.windows(2) {
        let (a, b) = (last(&w[0]), last(&w[1]));
        for (name, prev, next) in [
            ("trend.trace_dist_monotone", a.trace_dist, b.trace_dist),
            ("trend.beta_monotone", a.beta(), b.beta()),
        ] {
            reports.push(
                InequalityReport::scalar(name, next, prev, 0.0)
                    .with("N", w[1].n as f64)
                    .with("N_prev", w[0].n as f64)
                    .with("t", a.t),
            );
        }
    }
    reports.push(
        InequalityReport::scalar("trend.gronwall_violations", gronwall.violations.len() as f64, 0.0, 0.0)
            .with("C_fit", gronwall.c_fit)
            .with("coarse_flags", gronwall.coarse.len() as f64),
    );
    let change = if gronwall.c_fit > 0.0 {
        (gronwall.c_fit - gronwall_coarse.c_fit).abs() / gronwall.c_fit
    } else {
        gronwall_coarse.c_fit
    };
    reports.push(
        InequalityReport::scalar("trend.gronwall_refinement", change, 0.1, 0.0)
            .with("C_fit", gronwall.c_fit)
            .with("C_fit_half_rate", gronwall_coarse.c_fit),
    );
    Ok(TrendStudy {
        runs,
        gronwall,
        gronwall_coarse,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncoupled_trend_has_no_growth() {
        let spec = ModelSpec::chain(4, 1, 2, 0.0, 1.5);
        let m = FockModel::new(spec.clone()).unwrap();
        let psi = crate::fock::modulated_profile(&m, 0.3);
        let study = mean_field_trend(&spec, &[1, 2], &psi, 0.5, 3, 1e-8, &ComparisonConfig::default()).unwrap();
        assert_eq!(study.runs.len(), 2);
        assert!(study.runs.iter().all(|r| r.reports.len() == 7));
        for r in study.runs.iter().flat_map(|r| &r.reports) {
            assert!(r.trace_dist < 1e-8 && r.beta_a < 1e-8 && r.beta_b < 1e-12, "{r:?}");
        }
        assert!(study.gronwall.c_fit < 1e-6, "{:?}", study.gronwall);
        assert!(study.reports.iter().all(|r| r.pass), "{:?}", study.reports);
    }

    #[test]
    fn trend_needs_particles_and_samples() {
        let spec = ModelSpec::chain(4, 1, 2, 0.0, 1.5);
        let psi = vec![C64::new(0.5, 0.0); 4];
        let cfg = ComparisonConfig::default();
        assert!(mean_field_trend(&spec, &[], &psi, 1.0, 3, 0.1, &cfg).is_err());
        assert!(mean_field_trend(&spec, &[1], &psi, 1.0, 1, 0.1, &cfg).is_err());
    }
}
