//! Non-Hermitian eigenvalues: Householder reduction to upper Hessenberg form,
//! then single-shift implicit QR in complex arithmetic with deflation.
//! Eigenvectors are recovered by inverse iteration on request.

use num_complex::Complex64;

use super::hermitian::residual;
use super::{sort_decomposition, ComplexMatrix, EigenDecomposition, LinalgError, UnitVector};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Sweeps allowed per eigenvalue, in units of the dimension.
const SWEEPS_PER_DIM: usize = 40;
const EXCEPTIONAL_EVERY: usize = 10;

/// Eigenvalues (with multiplicity) of a square matrix, sorted by `(Re, Im)`.
/// No vectors are computed and `residuals` is empty.
pub fn general_eig(m: &ComplexMatrix, _tol: f64) -> Result<EigenDecomposition, LinalgError> {
    let values = eigenvalues(m)?;
    Ok(sort_decomposition(values, None, Vec::new()))
}

/// Eigenvalues plus one inverse-iteration eigenvector per value. Fails with
/// `ResidualTooLarge` if any pair misses `tol·(1 + ‖M‖_F)`.
pub fn general_eig_with_vectors(m: &ComplexMatrix, tol: f64) -> Result<EigenDecomposition, LinalgError> {
    let values = eigenvalues(m)?;
    let bound = tol * (1.0 + m.frobenius_norm());
    let mut vectors = Vec::with_capacity(values.len());
    let mut residuals = Vec::with_capacity(values.len());
    for &lambda in &values {
        let v = inverse_iteration(m, lambda)?;
        let res = residual(m, lambda, v.as_slice());
        if res > bound {
            return Err(LinalgError::ResidualTooLarge { residual: res, bound });
        }
        vectors.push(v);
        residuals.push(res);
    }
    Ok(sort_decomposition(values, Some(vectors), residuals))
}

fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut h = m.entries().to_vec();
    hessenberg(&mut h, n);
    hessenberg_qr(&mut h, n)
}

/// In-place reduction of the row-major `n×n` matrix to upper Hessenberg form.
fn hessenberg(h: &mut [Complex64], n: usize) {
    for k in 0..n.saturating_sub(2) {
        let tail: f64 = (k + 2..n).map(|i| h[i * n + k].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = h[(k + 1) * n + k];
        let xnorm = (x0.norm_sqr() + tail).sqrt();
        let phase = if x0 == ZERO { ONE } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        let start = k + 1;
        let mut v: Vec<Complex64> = (start..n).map(|i| h[i * n + k]).collect();
        v[0] -= alpha;
        let tau = 2.0 / (v[0].norm_sqr() + tail);

        // Left: rows start..n, columns k..n.
        for col in k..n {
            let dot = v
                .iter()
                .enumerate()
                .fold(ZERO, |acc, (r, vr)| acc + vr.conj() * h[(start + r) * n + col]);
            let s = dot * tau;
            for (r, vr) in v.iter().enumerate() {
                h[(start + r) * n + col] -= vr * s;
            }
        }
        // Right: all rows, columns start..n.
        for row in 0..n {
            let base = row * n + start;
            let dot = v.iter().enumerate().fold(ZERO, |acc, (c, vc)| acc + h[base + c] * vc);
            let s = dot * tau;
            for (c, vc) in v.iter().enumerate() {
                h[base + c] -= s * vc.conj();
            }
        }
        for i in start + 1..n {
            h[i * n + k] = ZERO;
        }
    }
}

fn two_by_two(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let mean = (a + d) * 0.5;
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    (mean + disc, mean - disc)
}

fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    let ax = x.norm();
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

fn hessenberg_qr(h: &mut [Complex64], n: usize) -> Result<Vec<Complex64>, LinalgError> {
    let at = |i: usize, j: usize| i * n + j;
    let eps = f64::EPSILON;
    let mut values = vec![ZERO; n];
    let mut hi = n as isize - 1;
    let mut its = 0usize;
    let cap = SWEEPS_PER_DIM * n.max(1);

    while hi >= 0 {
        let hiu = hi as usize;
        // Locate the start of the active unreduced block.
        let mut l = hiu;
        while l > 0 {
            let mut tst = h[at(l, l)].l1_norm() + h[at(l - 1, l - 1)].l1_norm();
            if tst == 0.0 {
                tst = (0..=hiu).map(|j| h[at(l, j)].l1_norm()).sum();
            }
            if h[at(l, l - 1)].l1_norm() <= eps * tst {
                h[at(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }

        if l == hiu {
            values[hiu] = h[at(hiu, hiu)];
            hi -= 1;
            its = 0;
            continue;
        }
        if l + 1 == hiu {
            let (a, b) = two_by_two(h[at(l, l)], h[at(l, hiu)], h[at(hiu, l)], h[at(hiu, hiu)]);
            values[l] = a;
            values[hiu] = b;
            hi -= 2;
            its = 0;
            continue;
        }

        its += 1;
        if its > cap {
            return Err(LinalgError::NoConvergence { iterations: its });
        }
        let shift = if its.is_multiple_of(EXCEPTIONAL_EVERY) {
            h[at(hiu, hiu)] + 0.75 * h[at(hiu, hiu - 1)].norm()
        } else {
            let corner = h[at(hiu, hiu)];
            let (a, b) = two_by_two(
                h[at(hiu - 1, hiu - 1)],
                h[at(hiu - 1, hiu)],
                h[at(hiu, hiu - 1)],
                corner,
            );
            if (a - corner).norm() <= (b - corner).norm() {
                a
            } else {
                b
            }
        };

        // Bulge chase across rows/columns l..=hi.
        let mut x = h[at(l, l)] - shift;
        let mut y = h[at(l + 1, l)];
        for k in l..hiu {
            if k > l {
                x = h[at(k, k - 1)];
                y = h[at(k + 1, k - 1)];
            }
            let (c, s) = givens(x, y);
            let first_col = if k > l { k - 1 } else { l };
            for col in first_col..=hiu {
                let a = h[at(k, col)];
                let b = h[at(k + 1, col)];
                h[at(k, col)] = a * c + s * b;
                h[at(k + 1, col)] = -s.conj() * a + b * c;
            }
            if k > l {
                h[at(k + 1, k - 1)] = ZERO;
            }
            let last_row = (k + 2).min(hiu);
            for row in l..=last_row {
                let a = h[at(row, k)];
                let b = h[at(row, k + 1)];
                h[at(row, k)] = a * c + b * s.conj();
                h[at(row, k + 1)] = -a * s + b * c;
            }
        }
    }
    Ok(values)
}

/// LU factorization with partial pivoting; zero pivots are nudged so the
/// nearly singular shifted systems of inverse iteration stay solvable.
struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(mut a: Vec<Complex64>, n: usize, tiny: f64) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm()))
                .unwrap_or(k);
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            if a[k * n + k].norm() < tiny {
                a[k * n + k] = Complex64::new(tiny, 0.0);
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                a[i * n + k] = f;
                if f != ZERO {
                    for j in k + 1..n {
                        let u = a[k * n + j];
                        a[i * n + j] -= f * u;
                    }
                }
            }
        }
        Self { n, lu: a, perm }
    }

    fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }
}

fn inverse_iteration(m: &ComplexMatrix, lambda: Complex64) -> Result<UnitVector, LinalgError> {
    let n = m.rows();
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let shifted = m.shifted(-(lambda + Complex64::new(scale * 1e-14, 0.0)));
    let lu = Lu::factor(shifted.entries().to_vec(), n, scale * f64::EPSILON);
    let mut y: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.5 * ((i as f64) * 0.618_033_988_7).fract(), 0.0))
        .collect();
    for _ in 0..3 {
        y = lu.solve(&y);
        y = UnitVector::normalize(y)?.into_inner();
    }
    UnitVector::normalize(y)
}
