//! Split-step integrator for the Landau–Pekar system
//!
//! ```text
//! i∂_t ψ = (−Δ + √α Φ(·,t)) ψ,    i∂_t φ(k) = φ(k) + √α |k|^{-1} ρ̂(k),
//! ```
//!
//! with `ρ̂(k) = ∫ e^{-ik·x}|ψ(x)|² dx`, on a periodic box.

mod evolve;
mod io;
mod pair;
mod solver;

use num_complex::Complex64 as C64;

pub use evolve::{
    evolve, fit_linear_envelope, least_squares_slope, Aborted, EnvelopeFit, LpStepperConfig, Scheme,
    Trajectory,
};
pub use io::{read_snapshot_json, write_snapshot_json, write_trajectory_csv, Snapshot, TRAJECTORY_COLUMNS};
pub use pair::{
    density_transform, fixed_point_phi, gaussian_psi, gaussian_psi_with, standard_initial, PekarPair, PhiInit,
    NORM_TOL,
};
pub use solver::{lp_step, potential_from_phi, LpDiagnostics, LpSolver, PotentialRange};

use crate::error::{invalid, Result};
use crate::spectral::{BoxLattice, FourierPlan};

/// Crude approximation of the Pekar minimizer by imaginary-time iteration:
/// each sweep applies `e^{-τ(−Δ)/2} e^{-τ√αΦ} e^{-τ(−Δ)/2}` with `φ` held at
/// the fixed point of the current density, then renormalizes. Starts from
/// the standard Gaussian.
pub fn approximate_ground_state(lattice: BoxLattice, alpha: f64, tau: f64, sweeps: usize) -> Result<PekarPair> {
    if !(tau > 0.0) {
        return Err(invalid("tau", format!("must be > 0, got {tau}")));
    }
    let solver = LpSolver::new(lattice);
    let plan = FourierPlan::new(lattice);
    let k_sq: Vec<f64> = (0..lattice.len())
        .map(|i| lattice.momentum_norm(i).powi(2))
        .collect();
    let mut psi = gaussian_psi(lattice);
    let damp = |psi: &mut Vec<C64>| {
        plan.forward_in_place(psi);
        for (v, k2) in psi.iter_mut().zip(&k_sq) {
            *v *= (-0.5 * tau * k2).exp();
        }
        plan.inverse_in_place(psi);
    };
    for _ in 0..sweeps {
        let phi = fixed_point_phi(&psi, alpha);
        let pot = solver.potential_from_phi(&phi, PotentialRange::Full)?;
        damp(&mut psi.values);
        for (v, p) in psi.values.iter_mut().zip(&pot.values) {
            *v *= (-tau * alpha.sqrt() * p.re).exp();
        }
        damp(&mut psi.values);
        psi = psi.normalized();
    }
    let phi = fixed_point_phi(&psi, alpha);
    PekarPair::new(psi, phi, alpha)
}

#[cfg(test)]
mod tests;
