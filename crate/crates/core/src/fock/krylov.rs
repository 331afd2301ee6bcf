use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::linalg::{axpy, lanczos, norm, tridiagonal_eigen, Operator};

const KRYLOV_DIM: usize = 30;

/// `exp(c·H) v` for hermitian `H` and complex `c`, by Lanczos with adaptive
/// substeps. Each substep `τ` (a fraction of the whole step) is accepted when
/// the a-posteriori estimate `|β_m [exp(cτT_m) e₁]_m| · ‖v‖` is below
/// `tol · τ · max(1, ‖result‖)`, so growing imaginary-time norms are
/// controlled relatively.
pub fn krylov_exp(h: &dyn Operator, v: &[C64], c: C64, tol: f64) -> Result<Vec<C64>> {
    if c == C64::new(0.0, 0.0) {
        return Ok(v.to_vec());
    }
    let mut out = v.to_vec();
    let mut done: f64 = 0.0;
    let mut tau: f64 = 1.0;
    let mut failures = 0;
    while done < 1.0 - 1e-15 {
        tau = tau.min(1.0 - done);
        let nv = norm(&out);
        if nv == 0.0 {
            return Ok(out);
        }
        let (basis, alphas, betas) = lanczos(h, &out, KRYLOV_DIM + 1);
        let m = alphas.len();
        let breakdown = m <= KRYLOV_DIM;
        let k = if breakdown { m } else { KRYLOV_DIM };
        let (evals, evecs) = tridiagonal_eigen(&alphas[..k], &betas[..k - 1]);
        // coefficients of exp(cτT) e₁
        let coeffs = |s: f64| -> Vec<C64> {
            (0..k)
                .map(|i| {
                    (0..k)
                        .map(|l| {
                            let vi = evecs[(i, l)];
                            let v0 = evecs[(0, l)];
                            (c * s * evals[l]).exp() * vi * v0
                        })
                        .sum::<C64>()
                })
                .collect()
        };
        let y = coeffs(tau);
        let err = if breakdown { 0.0 } else { betas[k - 1] * y[k - 1].norm() * nv };
        let size = (nv * y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()).max(1.0);
        if err > tol * tau * size && !breakdown {
            tau *= 0.5;
            failures += 1;
            if failures > 200 {
                return Err(Error::IntegratorAbort {
                    t: done,
                    reason: format!("Krylov step size underflow (error {err:.3e})"),
                });
            }
            continue;
        }
        let mut next = vec![C64::new(0.0, 0.0); out.len()];
        for (i, b) in basis.iter().take(k).enumerate() {
            axpy(&mut next, y[i] * nv, b);
        }
        out = next;
        done += tau;
        if err < 0.1 * tol * tau * size {
            tau *= 1.5;
        }
    }
    Ok(out)
}

/// `exp(−iHt) Ψ`; renormalizes the result only within the tolerance check.
pub fn evolve_krylov(h: &dyn Operator, psi: &[C64], t: f64, tol: f64) -> Result<Vec<C64>> {
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be > 0"));
    }
    let out = krylov_exp(h, psi, C64::new(0.0, -t), tol)?;
    let n0 = norm(psi);
    let n1 = norm(&out);
    if (n1 - n0).abs() > 1e-10 * n0.max(1.0) {
        return Err(Error::IntegratorAbort {
            t,
            reason: format!("norm drift {:.3e}", n1 - n0),
        });
    }
    Ok(out)
}

/// Checked wrapper of [`evolve_krylov`] for sparse operators: rejects
/// matrices without the hermitian flag.
pub fn evolve_sparse(
    h: &super::sparse::SparseOperator,
    psi: &[C64],
    t: f64,
    tol: f64,
) -> Result<Vec<C64>> {
    if !h.hermitian {
        return Err(Error::NotHermitian {
            asymmetry: h.hermitian_defect(),
        });
    }
    evolve_krylov(h, psi, t, tol)
}

/// Normalized `exp(−τH) v`, used to filter random vectors toward low energy.
pub fn imaginary_time_filter(h: &dyn Operator, v: &[C64], tau: f64) -> Result<Vec<C64>> {
    let mut out = krylov_exp(h, v, C64::new(-tau, 0.0), 1e-10)?;
    let n = norm(&out);
    out.iter_mut().for_each(|x| *x /= n);
    Ok(out)
}
