use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::hamiltonian::{
    field_operator, gradient_entries, laplacian_entries, number_operator, site_potential,
};
use super::model::FockModel;
use super::sparse::SparseOperator;
use super::weyl::{weyl_matrix, GrossTransform};
use crate::error::Result;
use crate::linalg::{dot, Operator};
use crate::spectral::FormFactorKind;

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Per-site discrete amplitudes of `B_{K,x}`, `G_x` and `G_{<K,x}`.
struct SiteFactors {
    b: Vec<Vec<C64>>,
    g: Vec<Vec<C64>>,
    g_low: Vec<Vec<C64>>,
}

impl SiteFactors {
    fn new(model: &FockModel) -> Self {
        let k = model.spec.cutoff;
        let b: Vec<Vec<C64>> = (0..model.sites())
            .map(|s| model.form_factor_amplitudes(FormFactorKind::B, s))
            .collect();
        let g: Vec<Vec<C64>> = (0..model.sites())
            .map(|s| model.form_factor_amplitudes(FormFactorKind::G, s))
            .collect();
        // strict complement of the B support so that G = G_{<K} + G_{≥K}
        let g_low = g
            .iter()
            .map(|gs| {
                gs.iter()
                    .zip(&model.modes)
                    .map(|(v, m)| if m.norm < k { *v } else { C64::new(0.0, 0.0) })
                    .collect()
            })
            .collect();
        Self { b, g, g_low }
    }
}

/// `V_K(x_s − x_t) = (α/N)(⟨B_{K,x_s}, B_{K,x_t}⟩ + 2 Re⟨G_{x_s}, B_{K,x_t}⟩)`
/// on the retained modes.
pub fn interaction_kernel(model: &FockModel) -> DMatrix<f64> {
    let f = SiteFactors::new(model);
    let c = model.spec.alpha / model.n() as f64;
    let s = model.sites();
    DMatrix::from_fn(s, s, |i, j| {
        c * (inner(&f.b[i], &f.b[j]).re + 2.0 * inner(&f.g[i], &f.b[j]).re)
    })
}

/// `Σ_{j,l} V(x_j − x_l)` per configuration, diagonal terms included.
pub fn pair_energies(model: &FockModel, v: &DMatrix<f64>) -> Vec<f64> {
    model
        .particles
        .configs
        .iter()
        .map(|cfg| {
            cfg.iter()
                .flat_map(|&a| cfg.iter().map(move |&b| v[(a as usize, b as usize)]))
                .sum()
        })
        .collect()
}

/// Gross-transformed Hamiltonian on the truncated space.
///
/// Hopping between configurations `X'` and `X` carries the phonon factor
/// `W(F(X) − F(X')) e^{i Im⟨F(X), F(X')⟩}`, which is the lattice form of
/// conjugating the kinetic energy with `U_K`. The configuration-diagonal
/// part is
/// `√(α/N) Σ_j Φ(G_{<K,x_j} − k²B_{K,x_j}) + 𝒩 + Σ_{j,l} V_K(x_j − x_l)`.
pub struct GrossHamiltonian<'a> {
    pub model: &'a FockModel,
    shifts: Vec<Vec<C64>>,
    /// `(to, from, value, W(F_to − F_from))` for off-diagonal hops
    hops: Vec<(usize, usize, C64, DMatrix<C64>)>,
    /// on-site part of the Laplacian
    onsite: Vec<f64>,
    pair: Vec<f64>,
    diagonal: SparseOperator,
}

impl<'a> GrossHamiltonian<'a> {
    pub fn new(model: &'a FockModel) -> Result<Self> {
        let f = SiteFactors::new(model);
        let g = (model.spec.alpha / model.n() as f64).sqrt();
        let shifts = GrossTransform::new(model).shifts;
        let mut onsite = vec![0.0; model.sites()];
        let mut hops = Vec::new();
        for (to, from, v) in laplacian_entries(model) {
            if to == from {
                onsite[to] += v.re;
                continue;
            }
            // F(X) − F(X') when one particle moves from → to
            let z: Vec<C64> = f.b[to].iter().zip(&f.b[from]).map(|(a, b)| -(a - b) * g).collect();
            hops.push((to, from, v, weyl_matrix(&model.phonons, &z)));
        }
        // Φ(G_{<K,x} − k²B_{K,x}) = Φ(G_x + B_{K,x}) amplitudes per site
        let lin: Vec<Vec<C64>> = (0..model.sites())
            .map(|s| {
                f.g_low[s]
                    .iter()
                    .zip(&f.b[s])
                    .zip(&model.modes)
                    .map(|((gl, b), m)| (gl - b * m.norm * m.norm) * g)
                    .collect()
            })
            .collect();
        let amps: Vec<Vec<C64>> = model
            .particles
            .configs
            .iter()
            .map(|cfg| {
                let mut z = vec![C64::new(0.0, 0.0); model.modes.len()];
                for &s in cfg {
                    z.iter_mut().zip(&lin[s as usize]).for_each(|(a, b)| *a += b);
                }
                z
            })
            .collect();
        let v = interaction_kernel(model);
        let p = model.phonons.len();
        let pair = pair_energies(model, &v);
        let expanded: Vec<f64> = (0..model.dim()).map(|i| pair[i / p]).collect();
        let diagonal = field_operator(model, |c| amps[c].clone())
            .add_scaled(&number_operator(model), 1.0)
            .add_scaled(&SparseOperator::diagonal(&expanded), 1.0);
        Ok(Self {
            model,
            shifts,
            hops,
            onsite,
            pair,
            diagonal,
        })
    }

    /// Scalar `Σ_{j,l} V_K(x_j − x_l)` of configuration `c`.
    pub fn pair_energy(&self, c: usize) -> f64 {
        self.pair[c]
    }

    /// Assembled matrix; the hop blocks are dense in the phonon factor, so
    /// this is only practical for small bases.
    pub fn to_sparse(&self) -> Result<SparseOperator> {
        let model = self.model;
        let p = model.phonons.len();
        let mut t = self.diagonal.triplets();
        for c in 0..model.particles.len() {
            for (site, n) in model.particles.occupied(c) {
                let e = self.onsite[site] * n as f64;
                for q in 0..p {
                    t.push((c * p + q, c * p + q, C64::new(e, 0.0)));
                }
            }
            for (to, from, v, w) in &self.hops {
                let Some((src, amp)) = model.particles.hop(c, *to, *from) else {
                    continue;
                };
                let phase = C64::from_polar(1.0, inner(&self.shifts[c], &self.shifts[src]).im);
                let coef = v * amp * phase;
                for i in 0..p {
                    for j in 0..p {
                        if w[(i, j)] != C64::new(0.0, 0.0) {
                            t.push((c * p + i, src * p + j, coef * w[(i, j)]));
                        }
                    }
                }
            }
        }
        SparseOperator::from_triplets(model.dim(), t).mark_hermitian()
    }
}

impl Operator for GrossHamiltonian<'_> {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let model = self.model;
        let p = model.phonons.len();
        self.diagonal.apply(x, y);
        y.par_chunks_mut(p).enumerate().for_each(|(c, yb)| {
            for (site, n) in model.particles.occupied(c) {
                let e = self.onsite[site] * n as f64;
                let xb = &x[c * p..(c + 1) * p];
                yb.iter_mut().zip(xb).for_each(|(a, b)| *a += b * e);
            }
            // ⟨X| b†_to b_from |X'⟩ with X' = X after moving to → from
            for (to, from, v, w) in &self.hops {
                let Some((src, amp)) = model.particles.hop(c, *to, *from) else {
                    continue;
                };
                let phase = C64::from_polar(1.0, inner(&self.shifts[c], &self.shifts[src]).im);
                let coef = v * amp * phase;
                let xb = &x[src * p..(src + 1) * p];
                for i in 0..p {
                    let mut acc = C64::new(0.0, 0.0);
                    for j in 0..p {
                        acc += w[(i, j)] * xb[j];
                    }
                    yb[i] += coef * acc;
                }
            }
        });
    }
}

/// `U_K H U_K†` applied to a vector.
pub fn conjugated_apply(u: &GrossTransform, h: &dyn Operator, x: &[C64]) -> Vec<C64> {
    let t = u.adjoint().apply_vec(x);
    let ht = h.apply_vec(&t);
    u.apply_vec(&ht)
}

/// Continuum-form correction
/// `Σ_j A_{K,x_j}` with
/// `A_{K,x} = −2i√(α/N)(∇·a(kB_{K,x}) + a†(kB_{K,x})·∇) + (α/N) Φ(kB_{K,x})²`,
/// using central differences for `∇`.
pub fn correction_operator(model: &FockModel) -> SparseOperator {
    let g = (model.spec.alpha / model.n() as f64).sqrt();
    let f = SiteFactors::new(model);
    let dim = model.spec.sites.dim;
    let p = model.phonons.len();
    let mut total = SparseOperator::from_triplets(model.dim(), Vec::new());
    for axis in 0..dim {
        // amplitudes of k_a B_{K,x} per site
        let kb: Vec<Vec<C64>> = (0..model.sites())
            .map(|s| {
                f.b[s]
                    .iter()
                    .zip(&model.modes)
                    .map(|(b, m)| b * m.momentum[axis])
                    .collect()
            })
            .collect();
        let grad = gradient_entries(model, axis);
        let mut t = Vec::new();
        for c in 0..model.particles.len() {
            for &(to, from, d) in &grad {
                let (target, amp) = if to == from {
                    (c, model.particles.occupation(c, from) as f64)
                } else {
                    match model.particles.hop(c, from, to) {
                        Some(x) => x,
                        None => continue,
                    }
                };
                if amp == 0.0 {
                    continue;
                }
                let pref = C64::new(0.0, -2.0) * g * d * amp;
                for q in 0..p {
                    for (m, zm) in kb[from].iter().enumerate() {
                        // ∂ ∘ a(k_a B_{x_from})
                        if let Some((r, s)) = model.phonons.lower(m, q) {
                            t.push((model.index(target, r), model.index(c, q), pref * zm.conj() * s));
                        }
                    }
                    for (m, zm) in kb[to].iter().enumerate() {
                        // a†(k_a B_{x_to}) ∘ ∂
                        if let Some((r, s)) = model.phonons.raise(m, q) {
                            t.push((model.index(target, r), model.index(c, q), pref * zm * s));
                        }
                    }
                }
            }
        }
        total = total.add_scaled(&SparseOperator::from_triplets(model.dim(), t), 1.0);
        // (α/N) Σ_j Φ(k_a B_{x_j})² acts per particle, so square the
        // single-particle field before summing over particles
        for s in 0..model.sites() {
            let phi = field_operator(model, |_| kb[s].clone());
            let sq = phi.matmul(&phi);
            let mut occ = vec![0.0; model.sites()];
            occ[s] = 1.0;
            let proj = site_potential(model, &occ);
            total = total.add_scaled(&proj.matmul(&sq), g * g);
        }
    }
    total
}

/// `H^F_K + Σ_j A_{K,x_j} + Σ_{j,l} V_K(x_j − x_l)` with the continuum-form
/// correction; differs from [`GrossHamiltonian`] by lattice discretization
/// of the commutator `[∇, B]`.
pub fn continuum_form_gross_hamiltonian(model: &FockModel) -> Result<SparseOperator> {
    let p = model.phonons.len();
    let pair = pair_energies(model, &interaction_kernel(model));
    let pair: Vec<f64> = (0..model.dim()).map(|i| pair[i / p]).collect();
    let hk = super::hamiltonian::build_cutoff_frohlich_hamiltonian(model)?;
    hk.add_scaled(&correction_operator(model), 1.0)
        .add_scaled(&SparseOperator::diagonal(&pair), 1.0)
        .mark_hermitian()
}

/// Relative residual `‖(U H^F U† − H^G)Ψ‖ / ‖H^G Ψ‖`.
pub fn representation_residual(
    u: &GrossTransform,
    hf: &SparseOperator,
    hg: &GrossHamiltonian,
    psi: &[C64],
) -> f64 {
    let a = conjugated_apply(u, hf, psi);
    let b = hg.apply_vec(psi);
    let diff: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    (dot(&diff, &diff).re / dot(&b, &b).re).sqrt()
}
