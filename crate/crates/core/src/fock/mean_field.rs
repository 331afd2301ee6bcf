use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::hamiltonian::{laplacian_entries, site_matrix};
use super::model::FockModel;
use crate::error::{invalid, Result};
use crate::linalg::{apply_dense, expm_hermitian};

/// Landau–Pekar flow restricted to the lattice sites and retained modes,
/// the mean-field reference for the many-body dynamics:
///
/// ```text
/// iψ̇_s = (T ψ)_s + √α Φ_s ψ_s,        Φ_s = Σ_m 2 Re(g_m(s) z_m),
/// iż_m = z_m + √α Σ_s conj(g_m(s)) |ψ_s|²,
/// ```
///
/// with `g_m(s) = w^{1/2}|k_m|^{-1} e^{ik_m·x_s}` and discrete amplitudes
/// `z = w^{1/2} φ`.
pub struct LatticePekarFlow {
    alpha: f64,
    coupling: Vec<Vec<C64>>,
    laplacian: DMatrix<C64>,
    half_kinetic: Option<(f64, DMatrix<C64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticePekarState {
    pub psi: Vec<C64>,
    pub z: Vec<C64>,
}

impl LatticePekarFlow {
    pub fn new(model: &FockModel) -> Self {
        let sw = model.mode_weight.sqrt();
        let coupling = (0..model.sites())
            .map(|s| {
                model
                    .modes
                    .iter()
                    .enumerate()
                    .map(|(m, mode)| model.plane_wave(m, s) * (sw / mode.norm))
                    .collect()
            })
            .collect();
        Self {
            alpha: model.spec.alpha,
            coupling,
            laplacian: site_matrix(model, &laplacian_entries(model)),
            half_kinetic: None,
        }
    }

    pub fn potential(&self, z: &[C64]) -> Vec<f64> {
        self.coupling
            .iter()
            .map(|g| 2.0 * g.iter().zip(z).map(|(a, b)| a * b).sum::<C64>().re)
            .collect()
    }

    /// Field amplitudes with `ż = 0` for a frozen density:
    /// `z = −√α Σ_s conj(g(s)) |ψ_s|²`.
    pub fn stationary_field(&self, psi: &[C64]) -> Vec<C64> {
        self.source(psi).into_iter().map(|s| -s).collect()
    }

    fn source(&self, psi: &[C64]) -> Vec<C64> {
        let sa = self.alpha.sqrt();
        let m = self.coupling.first().map_or(0, |g| g.len());
        let mut s = vec![C64::new(0.0, 0.0); m];
        for (g, p) in self.coupling.iter().zip(psi) {
            let rho = p.norm_sqr();
            s.iter_mut().zip(g).for_each(|(a, b)| *a += b.conj() * rho * sa);
        }
        s
    }

    /// Mean-field energy per particle
    /// `⟨ψ,Tψ⟩ + √α Σ_s Φ_s|ψ_s|² + Σ_m |z_m|²`.
    pub fn energy(&self, state: &LatticePekarState) -> f64 {
        let tp = apply_dense(&self.laplacian, &state.psi);
        let kin: f64 = state.psi.iter().zip(&tp).map(|(a, b)| (a.conj() * b).re).sum();
        let pot = self.potential(&state.z);
        let int: f64 = state.psi.iter().zip(&pot).map(|(a, v)| a.norm_sqr() * v).sum();
        kin + self.alpha.sqrt() * int + state.z.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// One symmetric step: kinetic half, exact coupling flow, kinetic half.
    pub fn step(&mut self, state: &mut LatticePekarState, h: f64) {
        let needs = !matches!(&self.half_kinetic, Some((hh, _)) if *hh == h);
        if needs {
            self.half_kinetic = Some((h, expm_hermitian(&self.laplacian, C64::new(0.0, -0.5 * h))));
        }
        let u = &self.half_kinetic.as_ref().unwrap().1;
        state.psi = apply_dense(u, &state.psi);
        let s = self.source(&state.psi);
        let avg = (C64::new(1.0, 0.0) - C64::from_polar(1.0, -h)) / C64::new(0.0, h);
        let mean: Vec<C64> = state.z.iter().zip(&s).map(|(z, s)| avg * (z + s) - s).collect();
        let pot = self.potential(&mean);
        let sa = self.alpha.sqrt();
        for (p, v) in state.psi.iter_mut().zip(&pot) {
            *p *= C64::from_polar(1.0, -h * sa * v);
        }
        let e = C64::from_polar(1.0, -h);
        for (z, s) in state.z.iter_mut().zip(&s) {
            *z = e * *z + (e - 1.0) * s;
        }
        state.psi = apply_dense(u, &state.psi);
    }

    /// States at `times` (sorted, starting at or after 0) using steps no
    /// larger than `dt`.
    pub fn trajectory(
        &mut self,
        initial: &LatticePekarState,
        times: &[f64],
        dt: f64,
    ) -> Result<Vec<LatticePekarState>> {
        if !(dt > 0.0) {
            return Err(invalid("dt", "must be > 0"));
        }
        let mut out = Vec::with_capacity(times.len());
        let mut state = initial.clone();
        let mut now = 0.0;
        for &t in times {
            if t < now {
                return Err(invalid("times", "must be sorted and non-negative"));
            }
            let span = t - now;
            if span > 0.0 {
                let n = (span / dt).ceil() as usize;
                let h = span / n as f64;
                for _ in 0..n {
                    self.step(&mut state, h);
                }
            }
            now = t;
            out.push(state.clone());
        }
        Ok(out)
    }
}
