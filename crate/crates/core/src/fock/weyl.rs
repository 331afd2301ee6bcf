use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::model::{FockModel, PhononBasis};
use super::sparse::SparseOperator;
use crate::linalg::{expm_hermitian, Operator};
use crate::spectral::FormFactorKind;

/// Truncated generator `X = Σ_m (z_m a_m† − conj(z_m) a_m)` as a dense
/// phonon matrix.
pub fn displacement_generator(phonons: &PhononBasis, z: &[C64]) -> DMatrix<C64> {
    let p = phonons.len();
    let mut m = DMatrix::zeros(p, p);
    let mut e = vec![C64::new(0.0, 0.0); p];
    let mut col = vec![C64::new(0.0, 0.0); p];
    for j in 0..p {
        e[j] = C64::new(1.0, 0.0);
        col.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        phonons.apply_displacement_generator(z, &e, &mut col);
        for i in 0..p {
            m[(i, j)] = col[i];
        }
        e[j] = C64::new(0.0, 0.0);
    }
    m
}

/// `W(f) = exp(X)` on the truncated phonon space through the eigenvectors of
/// the hermitian matrix `iX`; exactly unitary.
pub fn weyl_matrix(phonons: &PhononBasis, z: &[C64]) -> DMatrix<C64> {
    let x = displacement_generator(phonons, z);
    let h = x * C64::new(0.0, 1.0);
    expm_hermitian(&h, C64::new(0.0, -1.0))
}

/// `exp(X) v` by Taylor series with scaling, matrix free.
pub fn apply_weyl_taylor(phonons: &PhononBasis, z: &[C64], v: &[C64], out: &mut [C64]) {
    let bound: f64 = z.iter().map(|c| c.norm()).sum::<f64>() * 2.0 * ((phonons.cutoff as f64) + 1.0).sqrt();
    let steps = (bound / 0.5).ceil().max(1.0) as usize;
    let zs: Vec<C64> = z.iter().map(|c| c / steps as f64).collect();
    out.copy_from_slice(v);
    let mut term = vec![C64::new(0.0, 0.0); v.len()];
    let mut next = vec![C64::new(0.0, 0.0); v.len()];
    let vnorm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if vnorm == 0.0 {
        return;
    }
    for _ in 0..steps {
        term.copy_from_slice(out);
        for k in 1..60 {
            next.iter_mut().for_each(|c| *c = C64::new(0.0, 0.0));
            phonons.apply_displacement_generator(&zs, &term, &mut next);
            let inv = 1.0 / k as f64;
            let mut tn = 0.0;
            for (t, n) in term.iter_mut().zip(&next) {
                *t = n * inv;
                tn += t.norm_sqr();
            }
            out.iter_mut().zip(&term).for_each(|(o, t)| *o += t);
            if tn.sqrt() < 1e-18 * vnorm {
                break;
            }
        }
    }
}

/// Same phonon matrix on every particle configuration, `1 ⊗ M`.
#[derive(Debug, Clone)]
pub struct PhononOperator {
    pub configs: usize,
    pub matrix: DMatrix<C64>,
}

impl PhononOperator {
    pub fn to_sparse(&self) -> SparseOperator {
        let p = self.matrix.nrows();
        let mut t = Vec::new();
        for c in 0..self.configs {
            for i in 0..p {
                for j in 0..p {
                    let v = self.matrix[(i, j)];
                    if v.norm() > 0.0 {
                        t.push((c * p + i, c * p + j, v));
                    }
                }
            }
        }
        SparseOperator::from_triplets(self.configs * p, t)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            configs: self.configs,
            matrix: self.matrix.adjoint(),
        }
    }
}

impl Operator for PhononOperator {
    fn dim(&self) -> usize {
        self.configs * self.matrix.nrows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let p = self.matrix.nrows();
        y.par_chunks_mut(p).zip(x.par_chunks(p)).for_each(|(yb, xb)| {
            for i in 0..p {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..p {
                    acc += self.matrix[(i, j)] * xb[j];
                }
                yb[i] = acc;
            }
        });
    }
}

/// `W(f)` on the full space for discrete amplitudes `z_m = w^{1/2} f(k_m)`.
pub fn weyl_operator(model: &FockModel, z: &[C64]) -> PhononOperator {
    PhononOperator {
        configs: model.particles.len(),
        matrix: weyl_matrix(&model.phonons, z),
    }
}

/// `W(f) Ψ` on the full space, matrix free: the same Taylor-applied
/// displacement on every particle configuration.
pub fn apply_weyl(model: &FockModel, z: &[C64], x: &[C64]) -> Vec<C64> {
    let p = model.phonons.len();
    let mut y = vec![C64::new(0.0, 0.0); x.len()];
    y.par_chunks_mut(p)
        .zip(x.par_chunks(p))
        .for_each(|(yb, xb)| apply_weyl_taylor(&model.phonons, z, xb, yb));
    y
}

/// Truncated coherent vector `W(f)Ω` on the phonon factor.
pub fn coherent_vector(phonons: &PhononBasis, z: &[C64]) -> Vec<C64> {
    let mut vac = vec![C64::new(0.0, 0.0); phonons.len()];
    vac[0] = C64::new(1.0, 0.0);
    let mut out = vac.clone();
    apply_weyl_taylor(phonons, z, &vac, &mut out);
    out
}

/// Top-shell mass of the truncated coherent state `W(f)Ω`.
pub fn coherent_leakage(model: &FockModel, z: &[C64]) -> f64 {
    let chi = coherent_vector(&model.phonons, z);
    chi.iter()
        .enumerate()
        .filter(|&(q, _)| model.phonons.total(q) == model.phonons.cutoff)
        .map(|(_, v)| v.norm_sqr())
        .sum()
}

/// Gross transform `U_K`: on configuration `X` it acts as `W(F(X))` with
/// `F(X) = −√(α/N) Σ_j B_{K,x_j}` restricted to the retained modes.
#[derive(Debug, Clone)]
pub struct GrossTransform<'a> {
    pub model: &'a FockModel,
    /// `F(X)` per configuration.
    pub shifts: Vec<Vec<C64>>,
    adjoint: bool,
}

impl<'a> GrossTransform<'a> {
    pub fn new(model: &'a FockModel) -> Self {
        let scale = -(model.spec.alpha / model.n() as f64).sqrt();
        let shifts = super::hamiltonian::summed_amplitudes(model, FormFactorKind::B, scale);
        Self {
            model,
            shifts,
            adjoint: false,
        }
    }

    /// `U_K = 1` exactly when no retained mode lies in the `B_K` support.
    pub fn is_identity(&self) -> bool {
        self.shifts.iter().all(|z| z.iter().all(|c| *c == C64::new(0.0, 0.0)))
    }

    pub fn adjoint(&self) -> Self {
        Self {
            model: self.model,
            shifts: self.shifts.clone(),
            adjoint: !self.adjoint,
        }
    }

    /// Dense `W(F(X))` block of configuration `c`.
    pub fn block(&self, c: usize) -> DMatrix<C64> {
        let z = self.signed(c);
        weyl_matrix(&self.model.phonons, &z)
    }

    fn signed(&self, c: usize) -> Vec<C64> {
        if self.adjoint {
            self.shifts[c].iter().map(|v| -v).collect()
        } else {
            self.shifts[c].clone()
        }
    }
}

impl Operator for GrossTransform<'_> {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let p = self.model.phonons.len();
        y.par_chunks_mut(p)
            .zip(x.par_chunks(p))
            .enumerate()
            .for_each(|(c, (yb, xb))| {
                let z = self.signed(c);
                if z.iter().all(|v| *v == C64::new(0.0, 0.0)) {
                    yb.copy_from_slice(xb);
                } else {
                    apply_weyl_taylor(&self.model.phonons, &z, xb, yb);
                }
            });
    }
}
