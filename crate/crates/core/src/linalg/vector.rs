use num_complex::Complex64;

use super::LinalgError;

/// `⟨x, y⟩ = Σ x_i conj(y_i)`: linear in the first slot, conjugate-linear in
/// the second.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a * b.conj())
}

pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Complex vector of Euclidean norm one (to within `1e-12`).
#[derive(Clone, Debug, PartialEq)]
pub struct UnitVector(Vec<Complex64>);

impl UnitVector {
    pub const NORM_TOL: f64 = 1e-12;

    /// Accepts an already normalized vector.
    pub fn new(components: Vec<Complex64>) -> Result<Self, LinalgError> {
        let n = norm(&components);
        if components.is_empty() || (n - 1.0).abs() > Self::NORM_TOL {
            return Err(LinalgError::NotUnit { norm: n });
        }
        Ok(Self(components))
    }

    /// Scales a nonzero vector to unit length.
    pub fn normalize(mut components: Vec<Complex64>) -> Result<Self, LinalgError> {
        let n = norm(&components);
        if components.is_empty() || !(n > 0.0) || !n.is_finite() {
            return Err(LinalgError::ZeroVector);
        }
        components.iter_mut().for_each(|z| *z /= n);
        Ok(Self(components))
    }

    /// Standard basis vector `e_k` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[k] = Complex64::new(1.0, 0.0);
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// Zero-pads (or places at `offset`) into a longer ambient space.
    pub fn embed(&self, ambient_dim: usize, offset: usize) -> Self {
        assert!(offset + self.dim() <= ambient_dim);
        let mut v = vec![Complex64::new(0.0, 0.0); ambient_dim];
        v[offset..offset + self.dim()].copy_from_slice(&self.0);
        Self(v)
    }
}

impl AsRef<[Complex64]> for UnitVector {
    fn as_ref(&self) -> &[Complex64] {
        &self.0
    }
}
