use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::krylov::imaginary_time_filter;
use super::model::FockModel;
use super::weyl::{coherent_vector, GrossTransform};
use crate::error::{invalid, Error, Result};
use crate::linalg::{norm, random_unit, Operator};

/// `ψ^{⊗N}` on the symmetric configurations:
/// coefficient `√(N!/Π n_s!) Π ψ_s^{n_s}`.
pub fn product_coefficients(model: &FockModel, psi: &[C64]) -> Vec<C64> {
    let n = model.n();
    let log_fact = |k: usize| (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
    (0..model.particles.len())
        .map(|c| {
            let occ = model.particles.occupied(c);
            let mut v = C64::new(1.0, 0.0);
            let mut lf = log_fact(n);
            for &(s, k) in &occ {
                v *= psi[s].powu(k as u32);
                lf -= log_fact(k);
            }
            v * (0.5 * lf).exp()
        })
        .collect()
}

/// `Σ_c a_c |c⟩ ⊗ χ`
pub fn tensor(model: &FockModel, particle: &[C64], phonon: &[C64]) -> Vec<C64> {
    let p = model.phonons.len();
    let mut out = vec![C64::new(0.0, 0.0); model.dim()];
    for (c, a) in particle.iter().enumerate() {
        for (q, b) in phonon.iter().enumerate() {
            out[c * p + q] = a * b;
        }
    }
    out
}

/// Truncated coherent vector `W(z)Ω`.
pub fn coherent(model: &FockModel, z: &[C64]) -> Vec<C64> {
    coherent_vector(&model.phonons, z)
}

/// Normalized `1 + a cos x₁ + (a/2) sin x₂` on the sites (the second term
/// only in two or more dimensions); a smooth, non-uniform condensate.
pub fn modulated_profile(model: &FockModel, amplitude: f64) -> Vec<C64> {
    let dim = model.spec.sites.dim;
    let mut psi: Vec<C64> = (0..model.sites())
        .map(|s| {
            let x = model.site_position(s);
            let second = if dim > 1 { 0.5 * amplitude * x[1].sin() } else { 0.0 };
            C64::new(1.0 + amplitude * x[0].cos() + second, 0.0)
        })
        .collect();
    let n = norm(&psi);
    psi.iter_mut().for_each(|c| *c /= n);
    psi
}

fn check_psi(model: &FockModel, psi: &[C64]) -> Result<()> {
    if psi.len() != model.sites() {
        return Err(invalid("psi", format!("expected {} sites, got {}", model.sites(), psi.len())));
    }
    if (norm(psi) - 1.0).abs() > 1e-10 {
        return Err(invalid("psi", "must be normalized"));
    }
    Ok(())
}

/// `ψ^{⊗N} ⊗ W(√N φ)Ω` for discrete amplitudes `z_φ`. Fails when the
/// truncated coherent state puts more than `leakage_tol` on the top shell.
pub fn pekar_state(model: &FockModel, psi: &[C64], z_phi: &[C64], leakage_tol: f64) -> Result<Vec<C64>> {
    check_psi(model, psi)?;
    let sn = (model.n() as f64).sqrt();
    let z: Vec<C64> = z_phi.iter().map(|v| v * sn).collect();
    let chi = coherent(model, &z);
    let state = tensor(model, &product_coefficients(model, psi), &chi);
    let leak = model.leakage(&state);
    if leak > leakage_tol {
        return Err(Error::Leakage {
            leakage: leak,
            tolerance: leakage_tol,
        });
    }
    Ok(state)
}

/// `U_K† (ψ^{⊗N} ⊗ W(√N φ)Ω)`
pub fn gross_dressed_pekar_state(
    model: &FockModel,
    psi: &[C64],
    z_phi: &[C64],
    leakage_tol: f64,
) -> Result<Vec<C64>> {
    let base = pekar_state(model, psi, z_phi, leakage_tol)?;
    let out = GrossTransform::new(model).adjoint().apply_vec(&base);
    let leak = model.leakage(&out);
    if leak > leakage_tol {
        return Err(Error::Leakage {
            leakage: leak,
            tolerance: leakage_tol,
        });
    }
    Ok(out)
}

/// Uniformly random unit vectors in the truncated space.
pub fn random_states(model: &FockModel, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_unit(model.dim(), &mut rng)).collect()
}

/// Random vectors damped by `exp(−τH)` and renormalized.
pub fn random_low_energy_states(
    h: &dyn Operator,
    count: usize,
    tau: f64,
    seed: u64,
) -> Result<Vec<Vec<C64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| imaginary_time_filter(h, &random_unit(h.dim(), &mut rng), tau))
        .collect()
}
