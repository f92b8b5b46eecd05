use num_complex::Complex64;

use super::{ModelKind, OperatorModel};
use crate::linalg::ComplexMatrix;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `diag(n + i(−1)ⁿn²)` indexed from `n = 0`.
pub fn diag_alternating() -> OperatorModel {
    OperatorModel::new(ModelKind::Diagonal, "diag n + i(-1)^n n^2", 0, 0, true, |i, j| {
        if i != j {
            return re(0.0);
        }
        let n = i as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(n, sign * n * n)
    })
}

/// `diag(n)`, `n ≥ 1`: selfadjoint with empty essential spectrum.
pub fn diagonal_linear() -> OperatorModel {
    OperatorModel::new(ModelKind::Diagonal, "diag n", 0, 1, true, |i, j| if i == j { re(i as f64) } else { re(0.0) })
}

/// `T = diag([[n², 0], [0, 1]])` and `S = diag([[0, 1], [1, 0]])`.
pub fn ex1_models() -> (OperatorModel, OperatorModel) {
    let t = OperatorModel::from_blocks("ex1 T", true, |n| {
        let n2 = (n * n) as f64;
        [[re(n2), re(0.0)], [re(0.0), re(1.0)]]
    });
    let s = OperatorModel::from_blocks("ex1 S", true, |_| [[re(0.0), re(1.0)], [re(1.0), re(0.0)]]);
    (t, s)
}

/// `T = diag([[n², 0], [0, 1]])` and `S = diag([[0, 0], [n, 0]])`.
pub fn ex2_models() -> (OperatorModel, OperatorModel) {
    let (t, _) = ex1_models();
    let s = OperatorModel::from_blocks("ex2 S", false, |n| [[re(0.0), re(0.0)], [re(n as f64), re(0.0)]]);
    (t, s)
}

/// Neutral delay operator `A = T + S` in the `(cos n·, sin n·)` basis:
/// block `n` is `[[n², 0], [n, 1]]`.
pub fn delay_operator() -> OperatorModel {
    OperatorModel::from_blocks("delay A", false, |n| {
        let nf = n as f64;
        [[re(nf * nf), re(0.0)], [re(nf), re(1.0)]]
    })
}

/// Jacobi matrix with zero diagonal and unit off-diagonals, `σ = [−2, 2]`.
pub fn free_jacobi() -> OperatorModel {
    OperatorModel::new(ModelKind::Banded, "free Jacobi", 1, 1, true, |i, j| {
        if i.abs_diff(j) == 1 {
            re(1.0)
        } else {
            re(0.0)
        }
    })
}

/// Constant tridiagonal Toeplitz operator with rows `(sub, diag, sup)`.
pub fn toeplitz_tridiagonal(sub: Complex64, diag: Complex64, sup: Complex64) -> OperatorModel {
    let adjoint = true;
    OperatorModel::new(ModelKind::Banded, "tridiagonal Toeplitz", 1, 1, adjoint, move |i, j| {
        if i == j {
            diag
        } else if i == j + 1 {
            sub
        } else if j == i + 1 {
            sup
        } else {
            re(0.0)
        }
    })
}

/// `[[1, 0], [n, n²]]`, whose numerical range is the ellipse with foci
/// `1, n²` and minor semi-axis `n/2`.
pub fn ellipse_block(n: usize) -> ComplexMatrix {
    let nf = n as f64;
    ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[nf, nf * nf]])
}
