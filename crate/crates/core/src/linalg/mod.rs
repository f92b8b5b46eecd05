//! Dense complex linear algebra: eigensolvers, orthonormalization and
//! compressions onto subspaces.

mod general;
mod hermitian;
mod matrix;
mod ortho;
mod vector;

use num_complex::Complex64;

pub use general::{general_eig, general_eig_with_vectors};
pub use hermitian::{hermitian_eig, hermitian_eigenvalues, hermitian_top_eigenpair, symmetric_tridiagonal_eigenvalues};
pub use matrix::ComplexMatrix;
pub use ortho::{compress, orthonormal_complement_basis, orthonormalize};
pub use vector::{inner, norm, UnitVector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max |M - M*| = {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("eigensolver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("eigenpair residual {residual:e} exceeds bound {bound:e}")]
    ResidualTooLarge { residual: f64, bound: f64 },
    #[error("vector norm {norm} is not one")]
    NotUnit { norm: f64 },
    #[error("cannot normalize a zero or non-finite vector")]
    ZeroVector,
    #[error("basis is not orthonormal (Gram defect {defect:e})")]
    BasisNotOrthonormal { defect: f64 },
    #[error("basis is empty")]
    EmptyBasis,
}

/// Eigenvalues sorted by `(Re, Im)`, optionally with unit eigenvectors and
/// their residuals `‖Mv − λv‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: Option<Vec<UnitVector>>,
    /// Empty when no vectors were computed.
    pub residuals: Vec<f64>,
}

/// Lexicographic `(Re, Im)` order; ties keep their original position.
pub fn sort_lexicographic(values: &mut [Complex64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

pub(crate) fn sort_decomposition(
    values: Vec<Complex64>,
    vectors: Option<Vec<UnitVector>>,
    residuals: Vec<f64>,
) -> EigenDecomposition {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| {
        values[i]
            .re
            .total_cmp(&values[j].re)
            .then(values[i].im.total_cmp(&values[j].im))
    });
    let pick_res = !residuals.is_empty();
    let mut vectors = vectors.map(|v| v.into_iter().map(Some).collect::<Vec<_>>());
    EigenDecomposition {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: vectors
            .as_mut()
            .map(|vs| order.iter().map(|&i| vs[i].take().expect("permutation")).collect()),
        residuals: if pick_res { order.iter().map(|&i| residuals[i]).collect() } else { Vec::new() },
    }
}

/// `⟨Mx, x⟩`.
pub fn rayleigh(m: &ComplexMatrix, x: &UnitVector) -> Result<Complex64, LinalgError> {
    if m.cols() != x.dim() || !m.is_square() {
        return Err(LinalgError::DimensionMismatch {
            expected: m.cols(),
            actual: x.dim(),
        });
    }
    Ok(inner(&m.matvec(x.as_slice()), x.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rayleigh_examples() {
        let d = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(rayleigh(&d, &UnitVector::basis(2, 0)).unwrap(), Complex64::new(0.0, 0.0));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mid = UnitVector::new(vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)]).unwrap();
        assert!((rayleigh(&d, &mid).unwrap() - Complex64::new(0.5, 0.0)).norm() < 1e-15);

        // Block [[n², 0], [n, 1]] with n = 10 against f = (-i/10, 1)/√1.01.
        let m = ComplexMatrix::from_real_rows(&[&[100.0, 0.0], &[10.0, 1.0]]);
        let s = 1.01f64.sqrt();
        let x = UnitVector::new(vec![Complex64::new(0.0, -0.1 / s), Complex64::new(1.0 / s, 0.0)]).unwrap();
        let value = rayleigh(&m, &x).unwrap();
        let expected = Complex64::new(2.0, -1.0) / 1.01;
        assert!((value - expected).norm() < 1e-14);
        assert!((value - Complex64::new(1.9802, -0.9901)).norm() < 1e-4);

        assert!(matches!(
            rayleigh(&m, &UnitVector::basis(3, 0)),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lexicographic_sort_is_stable() {
        let mut v = vec![
            Complex64::new(1.0, 1.0),
            Complex64::new(0.0, 5.0),
            Complex64::new(1.0, -1.0),
        ];
        sort_lexicographic(&mut v);
        assert_eq!(v[0], Complex64::new(0.0, 5.0));
        assert_eq!(v[1], Complex64::new(1.0, -1.0));
    }
}
