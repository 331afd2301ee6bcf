use serde::{Deserialize, Serialize};

use super::continuum::{cg_reports, compute_cg_constant, verify_form_factor_norms, CgConstant};
use super::operators::{
    verify_correction_bound, verify_hamiltonian_sandwich, verify_interaction_bound,
    verify_lieb_yamazaki, SandwichFit,
};
use super::scaling::{
    verify_gross_closeness, verify_gross_representation, verify_initial_state_scalings,
    verify_trace_norm_chain, ClosenessStudy, RepresentationSample, ScalingStudy,
};
use super::InequalityReport;
use crate::error::Result;
use crate::fock::{
    build_frohlich_hamiltonian, gross_dressed_pekar_state, modulated_profile, random_low_energy_states,
    random_states, FockModel, LatticePekarFlow, ModelSpec,
};

/// Parameters of the full check suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub form_factor_cutoffs: Vec<f64>,
    /// `|p|` search range and grid size for the commutator constant
    pub cg_p_max: f64,
    pub cg_points: usize,
    /// model for the sandwich and the operator bounds
    pub operator_model: ModelSpec,
    pub eps: Vec<f64>,
    pub chain_model: ModelSpec,
    pub chain_states: usize,
    pub representation_model: ModelSpec,
    pub representation_states: usize,
    pub representation_tau: f64,
    /// model for the cutoff studies; needs momentum shells across the cutoffs
    pub scaling_model: ModelSpec,
    pub scaling_particles: Vec<usize>,
    pub scaling_cutoffs: Vec<f64>,
    pub closeness_states: usize,
    pub closeness_tau: f64,
    /// modulation of the condensate profile used for Pekar states
    pub profile_amplitude: f64,
    pub leakage_tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 20240917,
            form_factor_cutoffs: vec![0.5, 1.0, 4.0, 16.0],
            cg_p_max: 10.0,
            cg_points: 41,
            operator_model: ModelSpec::desk(2, 1.0, 1.0),
            eps: vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
            chain_model: ModelSpec::desk(2, 0.25, 1.0),
            chain_states: 100,
            representation_model: ModelSpec::desk(2, 0.25, 1.0),
            representation_states: 20,
            representation_tau: 4.0,
            scaling_model: ModelSpec::chain(4, 20, 2, 0.25, 1.0),
            scaling_particles: vec![1, 2],
            scaling_cutoffs: vec![1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0],
            closeness_states: 10,
            closeness_tau: 2.0,
            profile_amplitude: 0.3,
            leakage_tol: 0.1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    /// every report, sorted by name
    pub reports: Vec<InequalityReport>,
    pub sandwich: Vec<SandwichFit>,
    pub cg: CgConstant,
    pub scaling: ScalingStudy,
    pub closeness: ClosenessStudy,
    pub representation: Vec<RepresentationSample>,
}

impl SuiteOutcome {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

fn operator_checks(cfg: &SuiteConfig, c_g: f64) -> Result<(Vec<SandwichFit>, Vec<InequalityReport>)> {
    let model = FockModel::new(cfg.operator_model.clone())?;
    let (fits, mut reports) = verify_hamiltonian_sandwich(&model, cfg.seed)?;
    reports.extend(verify_interaction_bound(&model, &cfg.eps, cfg.seed + 10)?);
    reports.extend(verify_correction_bound(&model, cfg.seed + 40)?);
    reports.push(verify_lieb_yamazaki(&model, c_g, cfg.seed + 50)?);
    Ok((fits, reports))
}

fn chain_checks(cfg: &SuiteConfig) -> Result<Vec<InequalityReport>> {
    let model = FockModel::new(cfg.chain_model.clone())?;
    let states = random_states(&model, cfg.chain_states, cfg.seed + 60);
    let psi = modulated_profile(&model, cfg.profile_amplitude);
    Ok(verify_trace_norm_chain(&model, &states, &psi))
}

fn closeness_checks(cfg: &SuiteConfig) -> Result<ClosenessStudy> {
    let mut spec = cfg.scaling_model.clone();
    spec.n_particles = cfg.scaling_particles.first().copied().unwrap_or(1);
    let model = FockModel::new(spec.clone())?;
    let h = build_frohlich_hamiltonian(&model)?;
    let mut states = random_low_energy_states(&h, cfg.closeness_states, cfg.closeness_tau, cfg.seed + 70)?;
    let psi = modulated_profile(&model, cfg.profile_amplitude);
    let z = LatticePekarFlow::new(&model).stationary_field(&psi);
    states.push(gross_dressed_pekar_state(&model, &psi, &z, cfg.leakage_tol)?);
    verify_gross_closeness(&spec, &cfg.scaling_cutoffs, &states, cfg.seed + 80)
}

fn scaling_checks(cfg: &SuiteConfig) -> Result<ScalingStudy> {
    let model = FockModel::new(cfg.scaling_model.clone())?;
    let psi = modulated_profile(&model, cfg.profile_amplitude);
    let z = LatticePekarFlow::new(&model).stationary_field(&psi);
    verify_initial_state_scalings(
        &cfg.scaling_model,
        &cfg.scaling_particles,
        &cfg.scaling_cutoffs,
        &psi,
        &z,
        cfg.leakage_tol,
    )
}

/// Runs every check as an independent job and merges the reports sorted by
/// name (stable, so per-check order is kept).
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut ff = None;
    let mut cg = None;
    let mut chain = None;
    let mut rep = None;
    let mut scaling = None;
    let mut closeness = None;
    rayon::scope(|s| {
        s.spawn(|_| ff = Some(verify_form_factor_norms(&cfg.form_factor_cutoffs)));
        s.spawn(|_| cg = Some(compute_cg_constant(cfg.cg_p_max, cfg.cg_points)));
        s.spawn(|_| chain = Some(chain_checks(cfg)));
        s.spawn(|_| {
            rep = Some(verify_gross_representation(
                &cfg.representation_model,
                cfg.representation_states,
                cfg.representation_tau,
                cfg.seed + 90,
            ))
        });
        s.spawn(|_| scaling = Some(scaling_checks(cfg)));
        s.spawn(|_| closeness = Some(closeness_checks(cfg)));
    });
    let cg = cg.expect("job ran")?;
    // the operator checks need the commutator constant
    let (sandwich, operator_reports) = operator_checks(cfg, cg.sup_over_p)?;
    let (representation, rep_reports) = rep.expect("job ran")?;
    let scaling = scaling.expect("job ran")?;
    let closeness = closeness.expect("job ran")?;
    let mut reports = ff.expect("job ran")?;
    reports.extend(cg_reports(&cg));
    reports.extend(operator_reports);
    reports.extend(chain.expect("job ran")?);
    reports.extend(rep_reports);
    reports.extend(scaling.reports.iter().cloned());
    reports.extend(closeness.reports.iter().cloned());
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(SuiteOutcome {
        reports,
        sandwich,
        cg,
        scaling,
        closeness,
        representation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SuiteConfig {
        let mut two = ModelSpec::chain(3, 1, 2, 0.5, 1.0);
        two.n_particles = 2;
        SuiteConfig {
            form_factor_cutoffs: vec![1.0],
            cg_points: 5,
            operator_model: two.clone(),
            eps: vec![1.0],
            chain_model: two.clone(),
            chain_states: 5,
            representation_model: two,
            representation_states: 3,
            scaling_model: ModelSpec::chain(3, 4, 2, 0.25, 1.0),
            scaling_cutoffs: vec![1.0, 1.5, 2.0, 2.5],
            closeness_states: 3,
            leakage_tol: 0.5,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn suite_is_deterministic() {
        let cfg = tiny();
        let a = serde_json::to_string(&run_suite(&cfg).unwrap().reports).unwrap();
        let b = serde_json::to_string(&run_suite(&cfg).unwrap().reports).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_round_trips_and_rejects_unknown_keys() {
        let cfg = SuiteConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: SuiteConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        assert!(serde_json::from_str::<SuiteConfig>(r#"{"sed": 1}"#).is_err());
        let partial: SuiteConfig = serde_json::from_str(r#"{"seed": 7}"#).unwrap();
        assert_eq!(partial.seed, 7);
        assert_eq!(partial.cg_points, 41);
    }
}
