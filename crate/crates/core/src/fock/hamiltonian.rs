use num_complex::Complex64 as C64;

use super::model::FockModel;
use super::sparse::SparseOperator;
use crate::error::Result;
use crate::spectral::FormFactorKind;

type Triplets = Vec<(usize, usize, C64)>;

/// Periodic neighbour of `site` one step along `axis` in direction `sign`.
pub fn neighbour(model: &FockModel, site: usize, axis: usize, sign: i64) -> usize {
    let lat = model.spec.sites;
    let n = lat.points_per_dim as i64;
    let mut c = lat.unflatten(site);
    c[axis] = ((c[axis] as i64 + sign).rem_euclid(n)) as usize;
    lat.flatten(c)
}

/// Nearest-neighbour second difference `−Δ` on the sites as
/// `(to, from, value)` entries; coinciding neighbours are summed.
pub fn laplacian_entries(model: &FockModel) -> Triplets {
    let lat = model.spec.sites;
    let h2 = lat.spacing().powi(2);
    let mut t = Vec::new();
    for s in 0..lat.len() {
        for axis in 0..lat.dim {
            t.push((s, s, C64::new(2.0 / h2, 0.0)));
            for sign in [1, -1] {
                t.push((neighbour(model, s, axis, sign), s, C64::new(-1.0 / h2, 0.0)));
            }
        }
    }
    merge(t)
}

/// Central difference `∂_axis` as `(to, from, value)` entries.
pub fn gradient_entries(model: &FockModel, axis: usize) -> Triplets {
    let h = model.spec.sites.spacing();
    let mut t = Vec::new();
    for s in 0..model.sites() {
        // (∂ψ)(s) = (ψ(s+e) − ψ(s−e)) / 2h
        t.push((s, neighbour(model, s, axis, 1), C64::new(0.5 / h, 0.0)));
        t.push((s, neighbour(model, s, axis, -1), C64::new(-0.5 / h, 0.0)));
    }
    merge(t)
}

/// Dense site matrix from entries.
pub fn site_matrix(model: &FockModel, entries: &Triplets) -> nalgebra::DMatrix<C64> {
    let s = model.sites();
    let mut m = nalgebra::DMatrix::zeros(s, s);
    for &(r, c, v) in entries {
        m[(r, c)] += v;
    }
    m
}

fn merge(mut t: Triplets) -> Triplets {
    t.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let mut out: Triplets = Vec::new();
    for (r, c, v) in t {
        match out.last_mut() {
            Some(last) if last.0 == r && last.1 == c => last.2 += v,
            _ => out.push((r, c, v)),
        }
    }
    out.retain(|e| e.2 != C64::new(0.0, 0.0));
    out
}

/// Second quantization `Σ_j h_j` of a one-body site operator, tensored with
/// the phonon identity.
pub fn one_body(model: &FockModel, h: &Triplets) -> SparseOperator {
    let p = model.phonons.len();
    let mut t = Vec::new();
    for c in 0..model.particles.len() {
        for &(to, from, v) in h {
            let (target, amp) = if to == from {
                let n = model.particles.occupation(c, from);
                if n == 0 {
                    continue;
                }
                (c, n as f64)
            } else {
                match model.particles.hop(c, from, to) {
                    Some(x) => x,
                    None => continue,
                }
            };
            for q in 0..p {
                t.push((model.index(target, q), model.index(c, q), v * amp));
            }
        }
    }
    SparseOperator::from_triplets(model.dim(), t)
}

/// Diagonal operator `Σ_j f(x_j)` for a real site function.
pub fn site_potential(model: &FockModel, f: &[f64]) -> SparseOperator {
    let p = model.phonons.len();
    let mut d = vec![0.0; model.dim()];
    for c in 0..model.particles.len() {
        let v: f64 = model.particles.configs[c].iter().map(|&s| f[s as usize]).sum();
        d[c * p..(c + 1) * p].iter_mut().for_each(|x| *x = v);
    }
    SparseOperator::diagonal(&d)
}

/// `𝒩`
pub fn number_operator(model: &FockModel) -> SparseOperator {
    let p = model.phonons.len();
    let d: Vec<f64> = (0..model.dim()).map(|i| model.phonons.total(i % p) as f64).collect();
    SparseOperator::diagonal(&d)
}

/// `Σ_j −Δ_j`
pub fn kinetic(model: &FockModel) -> SparseOperator {
    one_body(model, &laplacian_entries(model))
}

/// Field operator `Φ(f_X) = a(f_X) + a†(f_X)` for configuration-dependent
/// discrete amplitudes `z(X)` (`a(f) = Σ_m conj(z_m) a_m`).
pub fn field_operator(model: &FockModel, z: impl Fn(usize) -> Vec<C64>) -> SparseOperator {
    let p = model.phonons.len();
    let mut t = Vec::new();
    for c in 0..model.particles.len() {
        let zc = z(c);
        for q in 0..p {
            for (m, zm) in zc.iter().enumerate() {
                if *zm == C64::new(0.0, 0.0) {
                    continue;
                }
                if let Some((r, s)) = model.phonons.lower(m, q) {
                    t.push((model.index(c, r), model.index(c, q), zm.conj() * s));
                }
                if let Some((r, s)) = model.phonons.raise(m, q) {
                    t.push((model.index(c, r), model.index(c, q), zm * s));
                }
            }
        }
    }
    SparseOperator::from_triplets(model.dim(), t)
}

/// Per-configuration amplitudes of `Σ_j f_{x_j}` for a site-anchored form
/// factor, scaled by `scale`.
pub fn summed_amplitudes(model: &FockModel, kind: FormFactorKind, scale: f64) -> Vec<Vec<C64>> {
    let per_site: Vec<Vec<C64>> = (0..model.sites())
        .map(|s| model.form_factor_amplitudes(kind, s))
        .collect();
    model
        .particles
        .configs
        .iter()
        .map(|cfg| {
            let mut z = vec![C64::new(0.0, 0.0); model.modes.len()];
            for &s in cfg {
                for (a, b) in z.iter_mut().zip(&per_site[s as usize]) {
                    *a += b * scale;
                }
            }
            z
        })
        .collect()
}

/// `√(α/N) Σ_j Φ(f_{x_j})`
pub fn coupling(model: &FockModel, kind: FormFactorKind) -> SparseOperator {
    let g = (model.spec.alpha / model.n() as f64).sqrt();
    let amps = summed_amplitudes(model, kind, g);
    field_operator(model, |c| amps[c].clone())
}

/// `H⁰ = Σ_j −Δ_j + 𝒩`
pub fn build_free_hamiltonian(model: &FockModel) -> Result<SparseOperator> {
    kinetic(model).add_scaled(&number_operator(model), 1.0).mark_hermitian()
}

/// `H^F = Σ_j [−Δ_j + √(α/N) Φ(G_{x_j})] + 𝒩`
pub fn build_frohlich_hamiltonian(model: &FockModel) -> Result<SparseOperator> {
    build_free_hamiltonian(model)?
        .add_scaled(&coupling(model, FormFactorKind::G), 1.0)
        .mark_hermitian()
}

/// `H^F_K`: as [`build_frohlich_hamiltonian`] with the low-pass form factor
/// `G_K` (`|k| ≤ K`).
pub fn build_cutoff_frohlich_hamiltonian(model: &FockModel) -> Result<SparseOperator> {
    build_free_hamiltonian(model)?
        .add_scaled(&coupling(model, FormFactorKind::GLow), 1.0)
        .mark_hermitian()
}
