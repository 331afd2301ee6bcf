use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{spectral_margin, InequalityReport};
use crate::error::Result;
use crate::fock::{
    build_free_hamiltonian, build_frohlich_hamiltonian, correction_operator, field_operator,
    kinetic, number_operator, site_potential, summed_amplitudes, FockModel, GrossHamiltonian,
    SparseOperator,
};
use crate::spectral::FormFactorKind;

/// Smallest `C ≥ 0` with `½H⁰ − CN ≤ H ≤ (3/2)H⁰ + CN`.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichFit {
    pub hamiltonian: String,
    /// `−λ_min(H − ½H⁰)/N`
    pub lower: f64,
    /// `−λ_min((3/2)H⁰ − H)/N`
    pub upper: f64,
    pub c: f64,
}

/// The same model with unit coupling, for inequalities stated without `α`.
fn unit_coupling(model: &FockModel) -> Result<FockModel> {
    let mut spec = model.spec.clone();
    spec.alpha = 1.0;
    FockModel::new(spec)
}

fn identity(dim: usize) -> SparseOperator {
    SparseOperator::diagonal(&vec![1.0; dim])
}

fn sandwich_for(
    name: &str,
    model: &FockModel,
    h: &SparseOperator,
    h0: &SparseOperator,
    seed: u64,
) -> Result<(SandwichFit, Vec<InequalityReport>)> {
    let n = model.n() as f64;
    let lower_diff = h.add_scaled(h0, -0.5);
    let upper_diff = h0.scale(1.5).add_scaled(h, -1.0);
    let (l1, _) = spectral_margin(&lower_diff, seed)?;
    let (l2, _) = spectral_margin(&upper_diff, seed + 1)?;
    let fit = SandwichFit {
        hamiltonian: name.to_string(),
        lower: -l1 / n,
        upper: -l2 / n,
        c: (-l1 / n).max(-l2 / n).max(0.0),
    };
    let shift = identity(model.dim());
    let mut reports = Vec::new();
    for (side, diff, lam) in [("lower", &lower_diff, l1), ("upper", &upper_diff, l2)] {
        let shifted = diff.add_scaled(&shift, fit.c * n);
        reports.push(
            InequalityReport::spectral(format!("sandwich.{name}.{side}"), lam + fit.c * n, shifted.max_abs())
                .with("C", fit.c)
                .with("N", n)
                .with("alpha", model.spec.alpha)
                .with("K", model.spec.cutoff),
        );
    }
    Ok((fit, reports))
}

/// `½H⁰ − CN ≤ H ≤ (3/2)H⁰ + CN` for `H = H^F` and `H = H^G`, with the
/// smallest admissible `C` read off the two extremal eigenvalues.
pub fn verify_hamiltonian_sandwich(
    model: &FockModel,
    seed: u64,
) -> Result<(Vec<SandwichFit>, Vec<InequalityReport>)> {
    let h0 = build_free_hamiltonian(model)?;
    let hf = build_frohlich_hamiltonian(model)?;
    let hg = GrossHamiltonian::new(model)?.to_sparse()?;
    let (ff, mut reports) = sandwich_for("frohlich", model, &hf, &h0, seed)?;
    let (fg, rg) = sandwich_for("gross", model, &hg, &h0, seed + 2)?;
    reports.extend(rg);
    Ok((vec![ff, fg], reports))
}

/// `Σ_j ±N^{-1/2}Φ(G_{K,x_j}) ≤ ε(Σ_j −Δ_j + 𝒩 + 1) + 2N(16π)²/ε³`, the
/// single-particle bound summed over the particles, at unit coupling.
pub fn verify_interaction_bound(model: &FockModel, eps: &[f64], seed: u64) -> Result<Vec<InequalityReport>> {
    let unit = unit_coupling(model)?;
    let n = unit.n() as f64;
    let amps = summed_amplitudes(&unit, FormFactorKind::GLow, n.powf(-0.5));
    let lhs = field_operator(&unit, |c| amps[c].clone());
    let free = kinetic(&unit)
        .add_scaled(&number_operator(&unit), 1.0)
        .add_scaled(&identity(unit.dim()), 1.0);
    let mut reports = Vec::new();
    for (i, &e) in eps.iter().enumerate() {
        let constant = 2.0 * n * (16.0 * PI).powi(2) / e.powi(3);
        let rhs = free.scale(e).add_scaled(&identity(unit.dim()), constant);
        for (j, sign) in [1.0, -1.0].into_iter().enumerate() {
            let diff = rhs.add_scaled(&lhs, -sign);
            let (m, scale) = spectral_margin(&diff, seed + (2 * i + j) as u64)?;
            reports.push(
                InequalityReport::spectral("interaction_bound", m, scale)
                    .with("eps", e)
                    .with("sign", sign)
                    .with("N", n)
                    .with("K", unit.spec.cutoff)
                    .with("constant", constant),
            );
        }
    }
    if let Some(best) = reports.iter().min_by(|a, b| a.margin.total_cmp(&b.margin)) {
        let e = best.context["eps"];
        let summary = InequalityReport::spectral("interaction_bound.min_over_eps", best.margin, best.slack / super::SPECTRAL_SLACK)
            .with("eps_at_min", e)
            .with("N", n)
            .note("smallest margin over the ε grid and both signs");
        reports.push(summary);
    }
    Ok(reports)
}

/// `±Σ_j A_{K,x_j} ≤ √(64π/K)(Σ_j −Δ_j + 𝒩) + 16π/K` at unit coupling, with
/// the continuum-form correction on central differences.
pub fn verify_correction_bound(model: &FockModel, seed: u64) -> Result<Vec<InequalityReport>> {
    let unit = unit_coupling(model)?;
    let k = unit.spec.cutoff;
    let a = correction_operator(&unit);
    let rhs = kinetic(&unit)
        .add_scaled(&number_operator(&unit), 1.0)
        .scale((64.0 * PI / k).sqrt())
        .add_scaled(&identity(unit.dim()), 16.0 * PI / k);
    let mut reports = Vec::new();
    for (j, sign) in [1.0, -1.0].into_iter().enumerate() {
        let diff = rhs.add_scaled(&a, -sign);
        let (m, scale) = spectral_margin(&diff, seed + j as u64)?;
        reports.push(
            InequalityReport::spectral("correction_bound", m, scale)
                .with("sign", sign)
                .with("K", k)
                .with("N", unit.n() as f64)
                .with("lhs_max_abs", a.max_abs()),
        );
    }
    Ok(reports)
}

/// `a(f)` on every configuration, with per-configuration amplitudes.
fn annihilator(model: &FockModel, z: &[C64]) -> SparseOperator {
    let p = model.phonons.len();
    let mut t = Vec::new();
    for c in 0..model.particles.len() {
        for q in 0..p {
            for (m, zm) in z.iter().enumerate() {
                if let Some((r, s)) = model.phonons.lower(m, q) {
                    t.push((model.index(c, r), model.index(c, q), zm.conj() * s));
                }
            }
        }
    }
    SparseOperator::from_triplets(model.dim(), t)
}

/// `Σ_j a†(G_{K,x_j}) a(G_{K,x_j}) ≤ C_G Σ_j (1 − Δ_j) 𝒩`.
pub fn verify_lieb_yamazaki(model: &FockModel, c_g: f64, seed: u64) -> Result<InequalityReport> {
    let mut lhs = SparseOperator::from_triplets(model.dim(), Vec::new());
    for s in 0..model.sites() {
        let a = annihilator(model, &model.form_factor_amplitudes(FormFactorKind::GLow, s));
        let mut occ = vec![0.0; model.sites()];
        occ[s] = 1.0;
        let block = site_potential(model, &occ).matmul(&a.adjoint().matmul(&a));
        lhs = lhs.add_scaled(&block, 1.0);
    }
    let n = model.n() as f64;
    let rhs = kinetic(model)
        .add_scaled(&identity(model.dim()), n)
        .matmul(&number_operator(model))
        .scale(c_g);
    let (m, scale) = spectral_margin(&rhs.add_scaled(&lhs, -1.0), seed)?;
    Ok(InequalityReport::spectral("lieb_yamazaki", m, scale)
        .with("C_G", c_g)
        .with("N", n)
        .with("K", model.spec.cutoff)
        .with("modes", model.modes.len() as f64))
}
