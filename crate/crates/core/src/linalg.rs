//! Dense hermitian helpers and a Lanczos extremal eigensolver for
//! matrix-free operators.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Square complex linear map acting on vectors.
pub trait Operator: Sync {
    fn dim(&self) -> usize;

    /// `y = A x`
    fn apply(&self, x: &[C64], y: &mut [C64]);

    fn apply_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.dim()];
        self.apply(x, &mut y);
        y
    }

    /// Columns `A e_j`; only sensible for small dimensions.
    fn to_dense(&self) -> DMatrix<C64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        let mut col = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            e[j] = C64::new(1.0, 0.0);
            self.apply(&e, &mut col);
            for i in 0..n {
                m[(i, j)] = col[i];
            }
            e[j] = C64::new(0.0, 0.0);
        }
        m
    }
}

/// `Σ cᵢ Aᵢ` evaluated lazily.
pub struct LinearCombination<'a> {
    pub terms: Vec<(f64, &'a dyn Operator)>,
}

impl Operator for LinearCombination<'_> {
    fn dim(&self) -> usize {
        self.terms[0].1.dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        let mut tmp = vec![C64::new(0.0, 0.0); x.len()];
        for (c, op) in &self.terms {
            op.apply(x, &mut tmp);
            y.iter_mut().zip(&tmp).for_each(|(a, b)| *a += b * c);
        }
    }
}

/// Identity times a scalar shift, handy inside [`LinearCombination`].
pub struct Identity(pub usize);

impl Operator for Identity {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.copy_from_slice(x);
    }
}

pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    if a.len() > 1 << 14 {
        a.par_chunks(1 << 12)
            .zip(b.par_chunks(1 << 12))
            .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u.conj() * v).sum::<C64>())
            .collect::<Vec<_>>()
            .into_iter()
            .sum()
    } else {
        a.iter().zip(b).map(|(u, v)| u.conj() * v).sum()
    }
}

pub fn norm(a: &[C64]) -> f64 {
    dot(a, a).re.max(0.0).sqrt()
}

pub fn axpy(y: &mut [C64], alpha: C64, x: &[C64]) {
    y.iter_mut().zip(x).for_each(|(u, v)| *u += alpha * v);
}

pub fn scale(y: &mut [C64], alpha: f64) {
    y.iter_mut().for_each(|u| *u *= alpha);
}

pub fn sub_norm(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>().sqrt()
}

/// Normal complex Gaussian vector normalized to 1.
pub fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim)
        .map(|_| {
            let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            C64::new(a, b)
        })
        .collect();
    let n = norm(&v);
    scale(&mut v, 1.0 / n);
    v
}

/// Eigenvalues ascending with matching eigenvector columns.
///
/// Householder reduction to a complex tridiagonal matrix, a diagonal phase
/// change that makes it real, then [`tridiagonal_eigen`]. nalgebra's
/// `symmetric_eigen` loses accuracy on these matrices (reconstruction
/// errors near 1e-4 on phonon-coupled Hamiltonians), so it is not used.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    let mut a = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut q = DMatrix::<C64>::identity(n, n);
    let zero = C64::new(0.0, 0.0);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let xn = norm(&x);
        if xn == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C64::new(1.0, 0.0) };
        let mut v = x.clone();
        v[0] += phase * xn;
        let vn = norm(&v);
        v.iter_mut().for_each(|c| *c /= vn);
        let len = v.len();
        let off = k + 1;
        // trailing block: A ← A − 2 v w† − 2 w v†, w = A v − (v†Av) v
        let data = a.as_mut_slice();
        let mut p = vec![zero; len];
        for j in 0..len {
            let col = &data[(off + j) * n + off..(off + j) * n + n];
            let vj = v[j];
            p.iter_mut().zip(col).for_each(|(pi, aij)| *pi += aij * vj);
        }
        let kk = dot(&v, &p);
        let w: Vec<C64> = p.iter().zip(&v).map(|(pi, vi)| pi - vi * kk).collect();
        for j in 0..len {
            let (wj, vj) = (w[j].conj() * 2.0, v[j].conj() * 2.0);
            let col = &mut data[(off + j) * n + off..(off + j) * n + n];
            for i in 0..len {
                col[i] -= v[i] * wj + w[i] * vj;
            }
        }
        let alpha = -phase * xn;
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            a[(i, k)] = zero;
            a[(k, i)] = zero;
        }
        // Q ← Q (I − 2 v v†) on columns k+1..
        let qd = q.as_mut_slice();
        let mut sv = vec![zero; n];
        for j in 0..len {
            let col = &qd[(off + j) * n..(off + j + 1) * n];
            let vj = v[j];
            sv.iter_mut().zip(col).for_each(|(si, qij)| *si += qij * vj);
        }
        for j in 0..len {
            let vj = v[j].conj() * 2.0;
            let col = &mut qd[(off + j) * n..(off + j + 1) * n];
            col.iter_mut().zip(&sv).for_each(|(qij, si)| *qij -= si * vj);
        }
    }
    // D† T D real with D = diag(δ), δ_{i+1} = δ_i e_i/|e_i|
    let mut delta = vec![C64::new(1.0, 0.0); n];
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for i in 0..n {
        diag[i] = a[(i, i)].re;
        if i + 1 < n {
            let e = a[(i + 1, i)];
            let r = e.norm();
            delta[i + 1] = if r > 0.0 { delta[i] * e / r } else { delta[i] };
            off[i] = r;
        }
    }
    let (values, z) = tridiagonal_eigen(&diag, &off);
    let dz = DMatrix::from_fn(n, n, |r, c| delta[r] * z[(r, c)]);
    (values, q * dz)
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of the real
/// symmetric tridiagonal matrix with diagonal `d` and off-diagonal `e`,
/// by implicit QL with Wilkinson shifts.
pub fn tridiagonal_eigen(d: &[f64], e: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let n = d.len();
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.iter().copied().chain(std::iter::once(0.0)).take(n).collect();
    let mut v = DMatrix::<f64>::identity(n, n);
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            for _ in 0..(60 * n.max(1)) {
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let h = v[(k, i + 1)];
                        v[(k, i + 1)] = s * v[(k, i)] + c * h;
                        v[(k, i)] = c * v[(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

/// `exp(c·H)` for hermitian `H` through its eigendecomposition.
pub fn expm_hermitian(h: &DMatrix<C64>, c: C64) -> DMatrix<C64> {
    let (vals, vecs) = hermitian_eigen(h);
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|&l| (c * l).exp()));
    let mut scaled = vecs.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= d[j];
    }
    scaled * vecs.adjoint()
}

pub fn apply_dense(m: &DMatrix<C64>, x: &[C64]) -> Vec<C64> {
    let v = DVector::from_column_slice(x);
    (m * v).iter().copied().collect()
}

/// Result of an extremal eigenvalue computation.
#[derive(Debug, Clone, Copy)]
pub struct Extremal {
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Dense path size limit for [`min_eigenvalue`].
pub const DENSE_EIGEN_LIMIT: usize = 2500;

/// Smallest eigenvalue of a hermitian operator. Dense diagonalization up to
/// [`DENSE_EIGEN_LIMIT`], otherwise restarted Lanczos with full
/// reorthogonalization until the Ritz residual drops below `tol`.
pub fn min_eigenvalue(op: &dyn Operator, tol: f64, seed: u64) -> Result<Extremal> {
    let n = op.dim();
    if n <= DENSE_EIGEN_LIMIT {
        let (vals, _) = hermitian_eigen(&op.to_dense());
        return Ok(Extremal {
            value: vals[0],
            residual: 0.0,
            iterations: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start = random_unit(n, &mut rng);
    let block = 120.min(n);
    let mut total = 0;
    let mut last = Extremal {
        value: f64::NAN,
        residual: f64::INFINITY,
        iterations: 0,
    };
    for _restart in 0..60 {
        let (basis, alphas, betas) = lanczos(op, &start, block);
        total += alphas.len();
        let m = alphas.len();
        let (vals, vecs) = tridiagonal_eigen(&alphas, &betas[..m - 1]);
        let lmin = vals[0];
        let y = vecs.column(0);
        let mut ritz = vec![C64::new(0.0, 0.0); n];
        for (k, v) in basis.iter().enumerate() {
            axpy(&mut ritz, C64::new(y[k], 0.0), v);
        }
        let rn = norm(&ritz);
        scale(&mut ritz, 1.0 / rn);
        let mut hr = op.apply_vec(&ritz);
        axpy(&mut hr, C64::new(-lmin, 0.0), &ritz);
        let residual = norm(&hr);
        last = Extremal {
            value: lmin,
            residual,
            iterations: total,
        };
        if residual <= tol || m < block {
            return Ok(last);
        }
        start = ritz;
    }
    Err(Error::EigenSolver {
        iterations: last.iterations,
        residual: last.residual,
    })
}

/// Plain Lanczos with full reorthogonalization; stops early on breakdown.
pub fn lanczos(op: &dyn Operator, start: &[C64], steps: usize) -> (Vec<Vec<C64>>, Vec<f64>, Vec<f64>) {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(steps);
    let mut alphas = Vec::with_capacity(steps);
    let mut betas = Vec::with_capacity(steps);
    let mut v = start.to_vec();
    let n0 = norm(&v);
    scale(&mut v, 1.0 / n0);
    for k in 0..steps {
        let mut w = op.apply_vec(&v);
        let a = dot(&v, &w).re;
        alphas.push(a);
        basis.push(v);
        // twice is enough
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                axpy(&mut w, -c, b);
            }
        }
        let beta = norm(&w);
        if k + 1 == steps || beta < 1e-13 * (a.abs() + 1.0) {
            break;
        }
        betas.push(beta);
        scale(&mut w, 1.0 / beta);
        v = w;
    }
    (basis, alphas, betas)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Diag(Vec<f64>);

    impl Operator for Diag {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn apply(&self, x: &[C64], y: &mut [C64]) {
            for i in 0..x.len() {
                y[i] = x[i] * self.0[i];
            }
        }
    }

    #[test]
    fn dense_eigen_of_pauli_y() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        );
        let (vals, _) = hermitian_eigen(&m);
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        let e = expm_hermitian(&m, C64::new(0.0, -0.3));
        // exp(-i θ σ_y) = cos θ − i sin θ σ_y
        assert!((e[(0, 0)] - C64::new(0.3f64.cos(), 0.0)).norm() < 1e-14);
        assert!((e[(0, 1)] - C64::new(-(0.3f64.sin()), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn eigendecomposition_reconstructs_degenerate_hermitian_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2, 5, 17, 40] {
            // U diag(λ) U† with repeated λ and a random unitary U
            let g = DMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let (_, u) = hermitian_eigen(&(&g + g.adjoint()));
            let lam: Vec<f64> = (0..n).map(|i| (i / 3) as f64 - 2.0).collect();
            let d = DMatrix::from_diagonal(&DVector::from_iterator(n, lam.iter().map(|&l| C64::new(l, 0.0))));
            let h = &u * d * u.adjoint();
            let (vals, vecs) = hermitian_eigen(&h);
            let back = &vecs
                * DMatrix::from_diagonal(&DVector::from_iterator(n, vals.iter().map(|&l| C64::new(l, 0.0))))
                * vecs.adjoint();
            assert!((back - &h).norm() < 1e-12 * n as f64);
            assert!((vecs.adjoint() * &vecs - DMatrix::identity(n, n)).norm() < 1e-12 * n as f64);
            let mut sorted = lam.clone();
            sorted.sort_by(f64::total_cmp);
            for (a, b) in vals.iter().zip(&sorted) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn toeplitz_tridiagonal_spectrum_is_closed_form() {
        let n = 200;
        let (vals, vecs) = tridiagonal_eigen(&vec![2.0; n], &vec![-1.0; n - 1]);
        for (k, v) in vals.iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - want).abs() < 1e-12);
        }
        assert!((vecs.transpose() * &vecs - DMatrix::<f64>::identity(n, n)).norm() < 1e-11);
    }

    #[test]
    fn eigendecomposition_handles_sparse_displacement_generators() {
        // i(z a† − z̄ a) on a truncated oscillator pair: many zero entries
        let n = 10;
        let mut h = DMatrix::<C64>::zeros(n, n);
        let z = C64::new(0.67, 0.39);
        for k in 0..n - 1 {
            let s = ((k + 1) as f64).sqrt();
            h[(k + 1, k)] = C64::new(0.0, 1.0) * z * s;
            h[(k, k + 1)] = h[(k + 1, k)].conj();
        }
        let (vals, vecs) = hermitian_eigen(&h);
        let d = DMatrix::from_diagonal(&DVector::from_iterator(n, vals.iter().map(|&l| C64::new(l, 0.0))));
        assert!((&vecs * d * vecs.adjoint() - &h).norm() < 1e-12);
    }

    #[test]
    fn lanczos_finds_bottom_of_large_diagonal() {
        let vals: Vec<f64> = (0..4000).map(|i| ((i * 7919) % 4000) as f64 * 0.01 - 3.0).collect();
        let ex = min_eigenvalue(&Diag(vals), 1e-8, 1).unwrap();
        assert!((ex.value + 3.0).abs() < 1e-9, "{}", ex.value);
    }
}
