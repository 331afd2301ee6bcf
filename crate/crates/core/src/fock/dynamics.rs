use num_complex::Complex64 as C64;

use super::density::{FunctionalContext, FunctionalReport};
use super::krylov::evolve_sparse;
use super::mean_field::{LatticePekarFlow, LatticePekarState};
use super::model::FockModel;
use super::sparse::SparseOperator;
use crate::error::{invalid, Result};

/// Many-body evolution under `H^F` sampled at `times`, each sample compared
/// with the lattice mean-field reference started from `reference`.
#[derive(Debug, Clone)]
pub struct ComparisonRun {
    pub reports: Vec<FunctionalReport>,
    pub reference: Vec<LatticePekarState>,
}

pub struct ComparisonConfig {
    /// Krylov accuracy per sampling interval
    pub krylov_tol: f64,
    /// largest mean-field step
    pub mean_field_dt: f64,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        Self {
            krylov_tol: 1e-10,
            mean_field_dt: 1e-3,
        }
    }
}

pub fn compare_with_mean_field(
    model: &FockModel,
    hamiltonian: &SparseOperator,
    initial: &[C64],
    reference: &LatticePekarState,
    times: &[f64],
    config: &ComparisonConfig,
) -> Result<ComparisonRun> {
    if initial.len() != model.dim() {
        return Err(invalid("initial", "length differs from the basis dimension"));
    }
    let mut flow = LatticePekarFlow::new(model);
    let refs = flow.trajectory(reference, times, config.mean_field_dt)?;
    let ctx = FunctionalContext::new(model, hamiltonian);
    let mut psi = initial.to_vec();
    let mut now = 0.0;
    let mut reports = Vec::with_capacity(times.len());
    for (&t, r) in times.iter().zip(&refs) {
        if t > now {
            psi = evolve_sparse(hamiltonian, &psi, t - now, config.krylov_tol)?;
            now = t;
        }
        reports.push(ctx.report(t, &psi, &r.psi, &r.z)?);
    }
    Ok(ComparisonRun {
        reports,
        reference: refs,
    })
}

/// `n + 1` equally spaced times on `[0, t_end]`.
pub fn uniform_times(t_end: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t_end * i as f64 / n.max(1) as f64).collect()
}
