//! Hermitian eigensolver: Householder reduction to a real symmetric
//! tridiagonal matrix followed by implicit QL with Wilkinson-type shifts.

use num_complex::Complex64;

use super::{sort_decomposition, ComplexMatrix, EigenDecomposition, LinalgError, UnitVector};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Absolute Hermitian check, relaxed proportionally for matrices with large
/// entries.
const HERMITIAN_TOL: f64 = 1e-12;

/// `A = Q D T D* Q*` with `T` real symmetric tridiagonal, `D` a diagonal of
/// phases and `Q` a product of Householder reflectors.
struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
    phases: Vec<Complex64>,
    reflectors: Vec<Option<Reflector>>,
}

struct Reflector {
    /// Acts on coordinates `start..n`.
    start: usize,
    v: Vec<Complex64>,
    tau: f64,
}

impl Tridiagonal {
    fn reduce(a: &ComplexMatrix) -> Self {
        let n = a.rows();
        let mut w: Vec<Complex64> = a.entries().to_vec();
        let at = |i: usize, j: usize| i * n + j;
        let mut reflectors = Vec::with_capacity(n.saturating_sub(2));

        for k in 0..n.saturating_sub(2) {
            let tail: f64 = (k + 2..n).map(|i| w[at(i, k)].norm_sqr()).sum();
            if tail == 0.0 {
                reflectors.push(None);
                continue;
            }
            let x0 = w[at(k + 1, k)];
            let xnorm = (x0.norm_sqr() + tail).sqrt();
            let phase = if x0 == ZERO { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
            let alpha = -phase * xnorm;

            let start = k + 1;
            let len = n - start;
            let mut v: Vec<Complex64> = (start..n).map(|i| w[at(i, k)]).collect();
            v[0] -= alpha;
            let tau = 2.0 / (v[0].norm_sqr() + tail);

            w[at(start, k)] = alpha;
            w[at(k, start)] = alpha.conj();
            for i in start + 1..n {
                w[at(i, k)] = ZERO;
                w[at(k, i)] = ZERO;
            }

            // Trailing block update A22 <- A22 - v w* - w v*.
            let mut p = vec![ZERO; len];
            for (r, pr) in p.iter_mut().enumerate() {
                let row = &w[at(start + r, start)..at(start + r, start) + len];
                *pr = row.iter().zip(&v).fold(ZERO, |acc, (a, b)| acc + a * b) * tau;
            }
            let vp = v.iter().zip(&p).fold(ZERO, |acc, (a, b)| acc + a.conj() * b);
            let beta = 0.5 * tau * vp.re;
            let wv: Vec<Complex64> = p.iter().zip(&v).map(|(pi, vi)| pi - vi * beta).collect();
            for r in 0..len {
                let (vr, wr) = (v[r], wv[r]);
                let base = at(start + r, start);
                for c in 0..len {
                    w[base + c] -= vr * wv[c].conj() + wr * v[c].conj();
                }
            }
            reflectors.push(Some(Reflector { start, v, tau }));
        }

        let diag: Vec<f64> = (0..n).map(|i| w[at(i, i)].re).collect();
        let mut off = Vec::with_capacity(n.saturating_sub(1));
        let mut phases = Vec::with_capacity(n);
        phases.push(Complex64::new(1.0, 0.0));
        for k in 0..n.saturating_sub(1) {
            let s = w[at(k + 1, k)];
            let mag = s.norm();
            off.push(mag);
            let next = if mag > 0.0 { phases[k] * (s / mag) } else { phases[k] };
            phases.push(next);
        }
        Self {
            diag,
            off,
            phases,
            reflectors,
        }
    }

    /// Maps an eigenvector of the real tridiagonal back to the original basis.
    fn back_transform(&self, z: &[f64]) -> Vec<Complex64> {
        let mut y: Vec<Complex64> = z.iter().zip(&self.phases).map(|(&zi, &p)| p * zi).collect();
        for refl in self.reflectors.iter().rev().flatten() {
            let seg = &mut y[refl.start..];
            let dot = refl.v.iter().zip(seg.iter()).fold(ZERO, |acc, (v, s)| acc + v.conj() * s);
            let scale = dot * refl.tau;
            for (s, v) in seg.iter_mut().zip(&refl.v) {
                *s -= v * scale;
            }
        }
        y
    }

    fn scale(&self) -> f64 {
        let d = self.diag.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let e = self.off.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        d + 2.0 * e
    }
}

/// Implicit QL on a real symmetric tridiagonal matrix (diagonal `d`,
/// subdiagonal `e[i] = T[i+1][i]`, with `e.len() == d.len()` and a trailing
/// zero). When `z` is given it must hold an `n×n` row-major matrix whose
/// columns are rotated along; eigenvalues come back ascending.
fn tql2(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>, max_iter: usize) -> Result<(), LinalgError> {
    let n = d.len();
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let mut total = 0usize;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                total += 1;
                if total > max_iter {
                    return Err(LinalgError::NoConvergence { iterations: total });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
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
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        for k in 0..n {
                            let hk = z[k * n + i + 1];
                            z[k * n + i + 1] = s * z[k * n + i] + c * hk;
                            z[k * n + i] = c * z[k * n + i] - s * hk;
                        }
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

    // Selection sort keeps the eigenvector columns aligned.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        for j in i + 1..n {
            if d[j] < d[k] {
                k = j;
            }
        }
        if k != i {
            d.swap(i, k);
            if let Some(z) = z.as_deref_mut() {
                for row in 0..n {
                    z.swap(row * n + i, row * n + k);
                }
            }
        }
    }
    Ok(())
}

/// Eigenvalues (ascending) of the real symmetric tridiagonal matrix with
/// diagonal `diag` and off-diagonal `off`.
pub fn symmetric_tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = diag.len();
    if n == 0 {
        return Err(LinalgError::EmptyMatrix);
    }
    if off.len() + 1 != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n - 1,
            actual: off.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    tql2(&mut d, &mut e, None, 100 * n)?;
    Ok(d)
}

fn check_hermitian(m: &ComplexMatrix) -> Result<(), LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(LinalgError::NotHermitian { defect });
    }
    Ok(())
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Values are real and ascending, vectors orthonormal. Fails with
/// `NotHermitian` when `max |M - M*|` exceeds `1e-12` (scaled by the largest
/// entry when that exceeds one).
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<EigenDecomposition, LinalgError> {
    check_hermitian(m)?;
    let n = m.rows();
    let tri = Tridiagonal::reduce(m);
    let mut d = tri.diag.clone();
    let mut e = tri.off.clone();
    e.push(0.0);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tql2(&mut d, &mut e, Some(&mut z), 100 * n)?;

    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    let bound = tol * (1.0 + m.frobenius_norm());
    for (k, &lambda) in d.iter().enumerate() {
        let col: Vec<f64> = (0..n).map(|row| z[row * n + k]).collect();
        let v = UnitVector::normalize(tri.back_transform(&col))?;
        let res = residual(m, Complex64::new(lambda, 0.0), v.as_slice());
        if res > bound {
            return Err(LinalgError::ResidualTooLarge { residual: res, bound });
        }
        values.push(Complex64::new(lambda, 0.0));
        vectors.push(v);
        residuals.push(res);
    }
    Ok(sort_decomposition(values, Some(vectors), residuals))
}

/// Eigenvalues (ascending) of a Hermitian matrix, without vectors.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    check_hermitian(m)?;
    let n = m.rows();
    let tri = Tridiagonal::reduce(m);
    let mut d = tri.diag;
    let mut e = tri.off;
    e.push(0.0);
    tql2(&mut d, &mut e, None, 100 * n)?;
    Ok(d)
}

/// Largest eigenvalue of a Hermitian matrix and a unit eigenvector for it.
///
/// Cheaper than [`hermitian_eig`]: eigenvalues of the tridiagonal form come
/// without rotations and the vector is recovered by shifted inverse
/// iteration, so a tridiagonal input costs `O(n²)`.
pub fn hermitian_top_eigenpair(m: &ComplexMatrix) -> Result<(f64, UnitVector), LinalgError> {
    check_hermitian(m)?;
    let n = m.rows();
    if n == 1 {
        return Ok((m[(0, 0)].re, UnitVector::basis(1, 0)));
    }
    let tri = Tridiagonal::reduce(m);
    if tri.scale() == 0.0 {
        return Ok((0.0, UnitVector::basis(n, 0)));
    }
    let mut d = tri.diag.clone();
    let mut e = tri.off.clone();
    e.push(0.0);
    tql2(&mut d, &mut e, None, 100 * n)?;
    let lambda = d[n - 1];

    // T - σI is negative definite for σ above the top eigenvalue, so the
    // unpivoted tridiagonal solve is stable.
    let sigma = lambda + 1e-10 * tri.scale() + f64::MIN_POSITIVE;
    let mut y: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_7).fract()).collect();
    for _ in 0..4 {
        y = solve_shifted_tridiagonal(&tri.diag, &tri.off, sigma, &y);
        let nrm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(nrm > 0.0) || !nrm.is_finite() {
            return Err(LinalgError::NoConvergence { iterations: 0 });
        }
        y.iter_mut().for_each(|v| *v /= nrm);
    }
    let v = UnitVector::normalize(tri.back_transform(&y))?;
    Ok((lambda, v))
}

fn solve_shifted_tridiagonal(diag: &[f64], off: &[f64], sigma: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut denom = diag[0] - sigma;
    c[0] = if n > 1 { off[0] / denom } else { 0.0 };
    x[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - sigma - off[i - 1] * c[i - 1];
        if i + 1 < n {
            c[i] = off[i] / denom;
        }
        x[i] = (rhs[i] - off[i - 1] * x[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

pub(crate) fn residual(m: &ComplexMatrix, lambda: Complex64, v: &[Complex64]) -> f64 {
    m.matvec(v)
        .iter()
        .zip(v)
        .map(|(mv, vi)| (mv - lambda * vi).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
