use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use super::hamiltonian::{gradient_entries, number_operator, one_body};
use super::model::FockModel;
use super::sparse::SparseOperator;
use super::weyl::{apply_weyl, GrossTransform};
use crate::error::{invalid, Result};
use crate::linalg::{dot, hermitian_eigen, norm, Operator};

/// `γ_{xy} = N^{-1} ⟨Ψ, b_y† b_x Ψ⟩`, traced over the phonons.
pub fn reduced_density(model: &FockModel, psi: &[C64]) -> DMatrix<C64> {
    let s = model.sites();
    let p = model.phonons.len();
    let mut g = DMatrix::zeros(s, s);
    for c in 0..model.particles.len() {
        let col = &psi[c * p..(c + 1) * p];
        for (x, n) in model.particles.occupied(c) {
            for y in 0..s {
                let (target, amp) = if x == y {
                    (c, n as f64)
                } else {
                    model.particles.hop(c, x, y).expect("occupied site")
                };
                let row = &psi[target * p..(target + 1) * p];
                let v: C64 = row.iter().zip(col).map(|(a, b)| a.conj() * b).sum();
                g[(x, y)] += v * amp;
            }
        }
    }
    g / C64::new(model.n() as f64, 0.0)
}

/// `Tr|γ − |ψ⟩⟨ψ||` by full eigendecomposition.
pub fn trace_distance(gamma: &DMatrix<C64>, psi: &[C64]) -> f64 {
    let v = DVector::from_column_slice(psi);
    let d = gamma - &v * v.adjoint();
    hermitian_eigen(&d).0.iter().map(|l| l.abs()).sum()
}

/// `⟨Ψ, q₁ Ψ⟩ = 1 − ⟨ψ, γ ψ⟩`
pub fn depletion(gamma: &DMatrix<C64>, psi: &[C64]) -> f64 {
    let v = DVector::from_column_slice(psi);
    1.0 - (v.adjoint() * gamma * &v)[(0, 0)].re
}

/// One record of the condensate and coherent-state functionals.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FunctionalReport {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub beta_a: f64,
    pub beta_b: f64,
    pub beta_c: f64,
    pub trace_dist: f64,
    /// `Tr|γ_{U_KΨ} − |ψ⟩⟨ψ||`
    pub trace_dist_gross: f64,
    pub energy_per_particle: f64,
    /// `‖∇₂ q₁ U_K Ψ‖²`; absent for a single particle.
    pub grad_q_norm: Option<f64>,
    /// top-shell phonon mass of `Ψ` and of `U_K Ψ`, whichever is larger
    pub leakage: f64,
}

impl FunctionalReport {
    /// `β^a_K + β^b_K + β^c`
    pub fn beta(&self) -> f64 {
        self.beta_a + self.beta_b + self.beta_c
    }
}

/// Operators reused across many reports for one model.
pub struct FunctionalContext<'a> {
    pub model: &'a FockModel,
    pub hamiltonian: &'a SparseOperator,
    pub gross: GrossTransform<'a>,
    number: SparseOperator,
    /// `dΓ(Σ_a ∂_a†∂_a)`
    grad_sq: Option<SparseOperator>,
    grad_sites: DMatrix<C64>,
    /// per configuration `c`: `(x, y, c', ⟨c'|b_y† b_x|c⟩)` for every occupied
    /// `x` and every site `y`
    moves: Vec<Vec<(usize, usize, usize, f64)>>,
}

impl<'a> FunctionalContext<'a> {
    pub fn new(model: &'a FockModel, hamiltonian: &'a SparseOperator) -> Self {
        let s = model.sites();
        let mut d = DMatrix::<C64>::zeros(s, s);
        for axis in 0..model.spec.sites.dim {
            let g = super::hamiltonian::site_matrix(model, &gradient_entries(model, axis));
            d += g.adjoint() * g;
        }
        let grad_sq = (model.n() > 1).then(|| one_body(model, &dense_entries(&d)));
        let moves = (0..model.particles.len())
            .into_par_iter()
            .map(|c| {
                let mut m = Vec::new();
                for (x, n) in model.particles.occupied(c) {
                    for y in 0..s {
                        if x == y {
                            m.push((x, y, c, n as f64));
                        } else if let Some((t, amp)) = model.particles.hop(c, x, y) {
                            m.push((x, y, t, amp));
                        }
                    }
                }
                m
            })
            .collect();
        Self {
            model,
            hamiltonian,
            gross: GrossTransform::new(model),
            number: number_operator(model),
            grad_sq,
            grad_sites: d,
            moves,
        }
    }

    /// `dΓ(A)Φ` for a dense one-body matrix `A`, tensored with the phonon
    /// identity: `(dΓ(A)Φ)_c = Σ A_{xy} ⟨c|b_x† b_y|c'⟩ Φ_{c'}`.
    fn apply_one_body(&self, a: &DMatrix<C64>, phi: &[C64]) -> Vec<C64> {
        let p = self.model.phonons.len();
        let mut out = vec![C64::new(0.0, 0.0); phi.len()];
        out.par_chunks_mut(p).enumerate().for_each(|(c, ob)| {
            for &(x, y, src, amp) in &self.moves[c] {
                let coef = a[(x, y)] * amp;
                if coef == C64::new(0.0, 0.0) {
                    continue;
                }
                let ib = &phi[src * p..(src + 1) * p];
                ob.iter_mut().zip(ib).for_each(|(o, v)| *o += coef * v);
            }
        });
        out
    }

    /// `N^{-1} ⟨W*(√N φ)Ψ, 𝒩 W*(√N φ)Ψ⟩` with `φ` given by its discrete
    /// amplitudes on the retained modes.
    pub fn coherent_excess(&self, psi: &[C64], z_phi: &[C64]) -> f64 {
        let sn = (self.model.n() as f64).sqrt();
        let shift: Vec<C64> = z_phi.iter().map(|z| -z * sn).collect();
        let x = apply_weyl(self.model, &shift, psi);
        self.number.expectation(&x).re / self.model.n() as f64
    }

    /// `‖N^{-1}(H − ⟨H⟩)Ψ‖²` and `⟨H⟩`.
    pub fn variance(&self, psi: &[C64]) -> (f64, f64) {
        let hp = self.hamiltonian.apply_vec(psi);
        let e = dot(psi, &hp).re;
        let n = self.model.n() as f64;
        let r: Vec<C64> = hp.iter().zip(psi).map(|(h, p)| (h - p * e) / n).collect();
        (dot(&r, &r).re, e)
    }

    /// `‖∇₂ q₁ Φ‖²` for a symmetric `Φ`, via
    /// `[⟨dΓ(q)Φ, dΓ(D)Φ⟩ − ⟨Φ, dΓ(qD)Φ⟩] / (N(N−1))`.
    pub fn grad_q_norm(&self, phi: &[C64], psi_ref: &[C64]) -> Option<f64> {
        let grad_sq = self.grad_sq.as_ref()?;
        let s = self.model.sites();
        let v = DVector::from_column_slice(psi_ref);
        let q = DMatrix::<C64>::identity(s, s) - &v * v.adjoint();
        let n = self.model.n() as f64;
        let a = dot(&self.apply_one_body(&q, phi), &grad_sq.apply_vec(phi)).re;
        let b = dot(phi, &self.apply_one_body(&(&q * &self.grad_sites), phi)).re;
        Some(((a - b) / (n * (n - 1.0))).max(0.0))
    }

    pub fn report(&self, t: f64, psi: &[C64], psi_ref: &[C64], z_phi: &[C64]) -> Result<FunctionalReport> {
        let model = self.model;
        if psi_ref.len() != model.sites() || z_phi.len() != model.modes.len() {
            return Err(invalid("reference", "wrong length for this model"));
        }
        if (norm(psi_ref) - 1.0).abs() > 1e-10 {
            return Err(invalid("psi_ref", "must be normalized"));
        }
        let gamma = reduced_density(model, psi);
        let a = trace_distance(&gamma, psi_ref);
        let b = self.coherent_excess(psi, z_phi);
        let (c, e) = self.variance(psi);
        let up = self.gross.apply_vec(psi);
        let gamma_u = reduced_density(model, &up);
        Ok(FunctionalReport {
            t,
            a,
            b,
            c,
            beta_a: depletion(&gamma_u, psi_ref),
            beta_b: self.coherent_excess(&up, z_phi),
            beta_c: c,
            trace_dist: a,
            trace_dist_gross: trace_distance(&gamma_u, psi_ref),
            energy_per_particle: e / model.n() as f64,
            grad_q_norm: self.grad_q_norm(&up, psi_ref),
            leakage: model.leakage(psi).max(model.leakage(&up)),
        })
    }
}

fn dense_entries(m: &DMatrix<C64>) -> Vec<(usize, usize, C64)> {
    let mut t = Vec::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if m[(i, j)].norm() > 0.0 {
                t.push((i, j, m[(i, j)]));
            }
        }
    }
    t
}
