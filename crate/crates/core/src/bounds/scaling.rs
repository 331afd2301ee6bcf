use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use super::InequalityReport;
use crate::error::{invalid, Error, Result};
use crate::fock::{
    build_frohlich_hamiltonian, depletion, gross_dressed_pekar_state, random_low_energy_states,
    reduced_density, representation_residual, trace_distance, FockModel, FunctionalContext,
    GrossHamiltonian, GrossTransform, ModelSpec,
};
use crate::linalg::{hermitian_eigen, min_eigenvalue, Operator};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    /// standard error of the slope
    pub slope_error: f64,
    pub points: usize,
    pub x_min: f64,
    pub x_max: f64,
}

/// Fit `y ≈ e^b x^m` on the points with `y > 0`; needs at least three.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<PowerLawFit> {
    let kept: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (*a, *b))
        .collect();
    let pts: Vec<(f64, f64)> = kept.iter().map(|(a, b)| (a.ln(), b.ln())).collect();
    let n = pts.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!(
            "power-law fit needs 3 positive points, got {n}"
        )));
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae equal".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let (x_min, x_max) = kept
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    Ok(PowerLawFit {
        slope,
        intercept,
        slope_error: (rss / (n as f64 - 2.0) / sxx).sqrt(),
        points: n,
        x_min,
        x_max,
    })
}

fn with_cutoff(spec: &ModelSpec, k: f64) -> ModelSpec {
    let mut s = spec.clone();
    s.cutoff = k;
    s
}

/// `Σ_j |λ_j|` of a hermitian matrix.
fn trace_norm(m: &DMatrix<C64>) -> f64 {
    hermitian_eigen(m).0.iter().map(|l| l.abs()).sum()
}

/// Lift a vector to the basis with phonon cutoff `Λ + 1`.
fn embed(from: &FockModel, to: &FockModel, v: &[C64]) -> Vec<C64> {
    let p = from.phonons.len();
    let map: Vec<usize> = from
        .phonons
        .states
        .iter()
        .map(|occ| to.phonons.index_of(occ).expect("smaller cutoff is a subset"))
        .collect();
    let mut out = vec![C64::new(0.0, 0.0); to.dim()];
    for (i, x) in v.iter().enumerate() {
        let (c, q) = (i / p, i % p);
        out[to.index(c, map[q])] = *x;
    }
    out
}

/// Per-state outcome of the representation check at `Λ` and `Λ + 1`.
#[derive(Debug, Clone, Serialize)]
pub struct RepresentationSample {
    pub residual: f64,
    pub leakage: f64,
    pub residual_refined: f64,
    pub leakage_refined: f64,
}

/// `‖(U_K H^F U_K† − H^G)Ψ‖/‖H^GΨ‖` on `count` random states damped by
/// `exp(−τH^G)`, compared with the truncation leakage (top-shell mass of
/// `Ψ` or `U_K†Ψ`, whichever is larger), then repeated on the same states
/// lifted to cutoff `Λ + 1`, where the residual must be strictly smaller.
pub fn verify_gross_representation(
    spec: &ModelSpec,
    count: usize,
    tau: f64,
    seed: u64,
) -> Result<(Vec<RepresentationSample>, Vec<InequalityReport>)> {
    let coarse = FockModel::new(spec.clone())?;
    let mut fine_spec = spec.clone();
    fine_spec.phonon_cutoff += 1;
    let fine = FockModel::new(fine_spec)?;
    let measure = |model: &FockModel, psi: &[C64]| -> Result<(f64, f64)> {
        let hf = build_frohlich_hamiltonian(model)?;
        let hg = GrossHamiltonian::new(model)?;
        let u = GrossTransform::new(model);
        let back = u.adjoint().apply_vec(psi);
        let leak = model.leakage(psi).max(model.leakage(&back));
        Ok((representation_residual(&u, &hf, &hg, psi), leak))
    };
    let hg = GrossHamiltonian::new(&coarse)?;
    let states = random_low_energy_states(&hg, count, tau, seed)?;
    let mut samples = Vec::with_capacity(count);
    for s in &states {
        let (residual, leakage) = measure(&coarse, s)?;
        let (residual_refined, leakage_refined) = measure(&fine, &embed(&coarse, &fine, s))?;
        samples.push(RepresentationSample {
            residual,
            leakage,
            residual_refined,
            leakage_refined,
        });
    }
    let lambda = spec.phonon_cutoff as f64;
    let worst = |f: &dyn Fn(&RepresentationSample) -> (f64, f64)| {
        samples
            .iter()
            .map(f)
            .min_by(|a, b| (a.1 - a.0).total_cmp(&(b.1 - b.0)))
            .unwrap_or((0.0, 0.0))
    };
    let failures = |f: &dyn Fn(&RepresentationSample) -> bool| samples.iter().filter(|s| f(s)).count() as f64;
    let mut reports = Vec::new();
    for (label, cut, pick) in [
        ("coarse", lambda, &(|s: &RepresentationSample| (s.residual, s.leakage)) as &dyn Fn(&RepresentationSample) -> (f64, f64)),
        ("refined", lambda + 1.0, &|s: &RepresentationSample| (s.residual_refined, s.leakage_refined)),
    ] {
        let (r, l) = worst(pick);
        reports.push(
            InequalityReport::scalar("gross_representation.residual_vs_leakage", r, l, 0.0)
                .with("lambda", cut)
                .with("states", count as f64)
                .with("violations", failures(&|s| {
                    let (r, l) = pick(s);
                    r > l
                }))
                .with("tau", tau)
                .note(format!("{label} cutoff; worst state shown")),
        );
    }
    let (r_fine, r_coarse) = worst(&|s| (s.residual_refined, s.residual));
    let mut dec = InequalityReport::scalar("gross_representation.truncation_decrease", r_fine, r_coarse, 0.0)
        .with("lambda", lambda)
        .with("states", count as f64)
        .with("violations", failures(&|s| s.residual_refined >= s.residual))
        .note("residual at Λ+1 must be strictly below the residual at Λ for every state");
    dec.pass = samples.iter().all(|s| s.residual_refined < s.residual);
    reports.push(dec);
    Ok((samples, reports))
}

/// `⟨Ψ, q₁Ψ⟩ ≤ Tr|γ − |ψ⟩⟨ψ|| ≤ 4√⟨Ψ, q₁Ψ⟩` on every state; the slack
/// `1e-12` only absorbs rounding.
pub fn verify_trace_norm_chain(model: &FockModel, states: &[Vec<C64>], psi: &[C64]) -> Vec<InequalityReport> {
    const SLACK: f64 = 1e-12;
    let mut lower: Vec<(f64, f64)> = Vec::new();
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for s in states {
        let g = reduced_density(model, s);
        let q = depletion(&g, psi).max(0.0);
        let d = trace_distance(&g, psi);
        lower.push((q, d));
        upper.push((d, 4.0 * q.sqrt()));
    }
    let summarize = |name: &str, v: &[(f64, f64)]| {
        let violations = v.iter().filter(|(l, r)| r - l < -SLACK).count() as f64;
        let (l, r) = v
            .iter()
            .copied()
            .min_by(|a, b| (a.1 - a.0).total_cmp(&(b.1 - b.0)))
            .unwrap_or((0.0, 0.0));
        let mut rep = InequalityReport::scalar(name, l, r, SLACK)
            .with("states", v.len() as f64)
            .with("violations", violations);
        rep.pass = violations == 0.0;
        rep
    };
    vec![
        summarize("trace_norm_chain.lower", &lower),
        summarize("trace_norm_chain.upper", &upper),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosenessRow {
    pub cutoff: f64,
    /// largest `Tr|γ_Ψ − γ_{U_KΨ}|` over the states
    pub max_lhs: f64,
    /// largest `LHS / (K^{-3/2} ‖((H^F + CN)/N)^{1/2}Ψ‖)`
    pub max_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosenessStudy {
    pub c_fit: f64,
    /// `C` making `H^F + CN ≥ 0`
    pub energy_shift: f64,
    pub rows: Vec<ClosenessRow>,
    pub reports: Vec<InequalityReport>,
}

/// `Tr|γ_Ψ − γ_{U_KΨ}| ≤ C K^{-3/2} ‖((H^F + CN)/N)^{1/2}Ψ‖` across `cutoffs`
/// (sorted ascending): the constant is fitted, and the largest left side
/// must not grow with `K`.
pub fn verify_gross_closeness(
    spec: &ModelSpec,
    cutoffs: &[f64],
    states: &[Vec<C64>],
    seed: u64,
) -> Result<ClosenessStudy> {
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("cutoffs", "must be strictly increasing"));
    }
    let base = FockModel::new(spec.clone())?;
    let n = base.n() as f64;
    let hf = build_frohlich_hamiltonian(&base)?;
    let e0 = min_eigenvalue(&hf, 1e-9 * hf.max_abs(), seed)?.value;
    let shift = (-e0 / n).max(0.0);
    let energy: Vec<f64> = states
        .iter()
        .map(|s| ((hf.expectation(s).re + shift * n) / n).max(0.0).sqrt())
        .collect();
    let gammas: Vec<DMatrix<C64>> = states.iter().map(|s| reduced_density(&base, s)).collect();
    let mut rows = Vec::new();
    for &k in cutoffs {
        let model = FockModel::new(with_cutoff(spec, k))?;
        let u = GrossTransform::new(&model);
        let mut max_lhs: f64 = 0.0;
        let mut max_ratio: f64 = 0.0;
        for ((s, g), e) in states.iter().zip(&gammas).zip(&energy) {
            let gu = reduced_density(&model, &u.apply_vec(s));
            let lhs = trace_norm(&(g - gu));
            max_lhs = max_lhs.max(lhs);
            if *e > 0.0 {
                max_ratio = max_ratio.max(lhs / (k.powf(-1.5) * e));
            }
        }
        rows.push(ClosenessRow {
            cutoff: k,
            max_lhs,
            max_ratio,
        });
    }
    let c_fit = rows.iter().map(|r| r.max_ratio).fold(0.0, f64::max);
    let mut reports = Vec::new();
    for w in rows.windows(2) {
        reports.push(
            InequalityReport::scalar("gross_closeness.monotone", w[1].max_lhs, w[0].max_lhs, 1e-12)
                .with("K", w[1].cutoff)
                .with("K_prev", w[0].cutoff)
                .with("C_fit", c_fit),
        );
    }
    Ok(ClosenessStudy {
        c_fit,
        energy_shift: shift,
        rows,
        reports,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub cutoff: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub leakage: f64,
    /// `c / (C_fit (K^{-1} + N^{-1} + K/N²))`
    pub c_envelope_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingStudy {
    pub rows: Vec<ScalingRow>,
    /// `(N, fit of a(K), fit of b(K))`
    pub fits: Vec<(usize, PowerLawFit, PowerLawFit)>,
    pub c_fit: f64,
    pub reports: Vec<InequalityReport>,
}

fn c_envelope(n: f64, k: f64) -> f64 {
    1.0 / k + 1.0 / n + k / (n * n)
}

/// `a`, `b`, `c` of the Gross-dressed Pekar state `U_K†(ψ^{⊗N} ⊗ W(√Nφ)Ω)`
/// for every `N` in `particles` and `K` in `cutoffs`; log–log slopes of
/// `a(K)` and `b(K)` must reach `−3/2` and `−3` within `0.3`, and `c` is
/// bounded by a fitted `C(K^{-1} + N^{-1} + K/N²)`.
pub fn verify_initial_state_scalings(
    spec: &ModelSpec,
    particles: &[usize],
    cutoffs: &[f64],
    psi: &[C64],
    z_phi: &[C64],
    leakage_tol: f64,
) -> Result<ScalingStudy> {
    if cutoffs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 cutoffs, got {}",
            cutoffs.len()
        )));
    }
    let mut rows = Vec::new();
    for &n in particles {
        let mut base = spec.clone();
        base.n_particles = n;
        let hf = build_frohlich_hamiltonian(&FockModel::new(base.clone())?)?;
        for &k in cutoffs {
            let model = FockModel::new(with_cutoff(&base, k))?;
            let state = gross_dressed_pekar_state(&model, psi, z_phi, leakage_tol)?;
            let ctx = FunctionalContext::new(&model, &hf);
            let r = ctx.report(0.0, &state, psi, z_phi)?;
            rows.push(ScalingRow {
                n,
                cutoff: k,
                a: r.a,
                b: r.b,
                c: r.c,
                leakage: r.leakage,
                c_envelope_ratio: 0.0,
            });
        }
    }
    let c_fit = rows
        .iter()
        .map(|r| r.c / c_envelope(r.n as f64, r.cutoff))
        .fold(0.0, f64::max);
    for r in &mut rows {
        let env = c_fit * c_envelope(r.n as f64, r.cutoff);
        r.c_envelope_ratio = if env > 0.0 { r.c / env } else { 0.0 };
    }
    let mut fits = Vec::new();
    let mut reports = Vec::new();
    for &n in particles {
        let sel: Vec<&ScalingRow> = rows.iter().filter(|r| r.n == n).collect();
        let ks: Vec<f64> = sel.iter().map(|r| r.cutoff).collect();
        let fa = fit_power_law(&ks, &sel.iter().map(|r| r.a).collect::<Vec<_>>())?;
        let fb = fit_power_law(&ks, &sel.iter().map(|r| r.b).collect::<Vec<_>>())?;
        for (name, f, target) in [("initial_scaling.a_slope", fa, -1.5), ("initial_scaling.b_slope", fb, -3.0)] {
            reports.push(
                InequalityReport::scalar(name, f.slope, target + 0.3, 0.0)
                    .with("N", n as f64)
                    .with("slope_error", f.slope_error)
                    .with("points", f.points as f64)
                    .with("K_min", f.x_min)
                    .with("K_max", f.x_max),
            );
            reports.push(
                InequalityReport::scalar(format!("{name}.decade"), 10.0, f.x_max / f.x_min, 0.0)
                    .with("N", n as f64),
            );
        }
        fits.push((n, fa, fb));
    }
    let worst = rows.iter().map(|r| r.c_envelope_ratio).fold(0.0, f64::max);
    reports.push(
        InequalityReport::scalar("initial_scaling.c_envelope", worst, 1.0, 1e-12)
            .with("C_fit", c_fit)
            .with("points", rows.len() as f64)
            .note("largest c / (C_fit (1/K + 1/N + K/N²)) over all (N, K)"),
    );
    Ok(ScalingStudy {
        rows,
        fits,
        c_fit,
        reports,
    })
}
