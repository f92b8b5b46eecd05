use num_complex::Complex64;

use super::{hermitian_eig, inner, norm, ComplexMatrix, LinalgError, UnitVector};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
/// Relative residual below which a vector counts as dependent.
const RANK_TOL: f64 = 1e-10;
const ORTHONORMAL_TOL: f64 = 1e-10;

fn project_out(v: &mut [Complex64], q: &[Complex64]) {
    let c = inner(v, q);
    for (vi, qi) in v.iter_mut().zip(q) {
        *vi -= c * qi;
    }
}

/// Modified Gram–Schmidt with one reorthogonalization pass. Vectors whose
/// residual falls below `1e-10` of their original norm are dropped.
pub fn orthonormalize(vectors: &[Vec<Complex64>]) -> Vec<UnitVector> {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for v in vectors {
        let original = norm(v);
        if !(original > 0.0) {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                project_out(&mut w, q);
            }
        }
        let r = norm(&w);
        if r > RANK_TOL * original {
            w.iter_mut().for_each(|z| *z /= r);
            basis.push(w);
        }
    }
    basis
        .into_iter()
        .map(|b| UnitVector::normalize(b).expect("nonzero after rank test"))
        .collect()
}

/// Orthonormal basis of `span(vectors)^⊥` in `ℂ^ambient_dim`.
///
/// The complement is read off as the unit eigenspace of `I − QQ*`, which
/// yields exactly `ambient_dim − rank` vectors.
pub fn orthonormal_complement_basis(vectors: &[UnitVector], ambient_dim: usize, tol: f64) -> Vec<UnitVector> {
    assert!(vectors.iter().all(|v| v.dim() == ambient_dim), "vectors must live in the ambient space");
    let raw: Vec<Vec<Complex64>> = vectors.iter().map(|v| v.as_slice().to_vec()).collect();
    let q = orthonormalize(&raw);
    let rank = q.len();
    if rank == ambient_dim {
        return Vec::new();
    }
    if rank == 0 {
        return (0..ambient_dim).map(|k| UnitVector::basis(ambient_dim, k)).collect();
    }
    let n = ambient_dim;
    let p = ComplexMatrix::from_fn(n, n, |i, j| {
        let qq: Complex64 = q.iter().map(|b| b.as_slice()[i] * b.as_slice()[j].conj()).sum();
        let id = if i == j { 1.0 } else { 0.0 };
        Complex64::new(id, 0.0) - qq
    });
    // Symmetrize away roundoff so the Hermitian solver accepts it.
    let p = ComplexMatrix::from_fn(n, n, |i, j| (p[(i, j)] + p[(j, i)].conj()) * 0.5);
    let eig = hermitian_eig(&p, tol.max(1e-12)).expect("projector is Hermitian");
    let vectors = eig.vectors.expect("hermitian_eig returns vectors");
    // Eigenvalues ascend: the last n − rank belong to the complement.
    let mut out: Vec<Vec<Complex64>> = vectors[rank..].iter().map(|v| v.as_slice().to_vec()).collect();
    // Polish against the input span and among themselves.
    for k in 0..out.len() {
        for b in &q {
            project_out(&mut out[k], b.as_slice());
        }
        for j in 0..k {
            let prev = out[j].clone();
            project_out(&mut out[k], &prev);
        }
        let r = norm(&out[k]);
        out[k].iter_mut().for_each(|z| *z /= r);
    }
    out.into_iter()
        .map(|v| UnitVector::normalize(v).expect("complement vector is nonzero"))
        .collect()
}

/// Largest entry of `|G − I|` for the Gram matrix of `basis`.
pub(crate) fn gram_defect(basis: &[UnitVector]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i) {
            let g = inner(b.as_slice(), a.as_slice());
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// `k×k` compression with entries `⟨M b_j, b_i⟩`.
pub fn compress(m: &ComplexMatrix, basis: &[UnitVector]) -> Result<ComplexMatrix, LinalgError> {
    if basis.is_empty() {
        return Err(LinalgError::EmptyBasis);
    }
    if let Some(b) = basis.iter().find(|b| b.dim() != m.cols()) {
        return Err(LinalgError::DimensionMismatch {
            expected: m.cols(),
            actual: b.dim(),
        });
    }
    let defect = gram_defect(basis);
    if defect > ORTHONORMAL_TOL {
        return Err(LinalgError::BasisNotOrthonormal { defect });
    }
    let images: Vec<Vec<Complex64>> = basis.iter().map(|b| m.matvec(b.as_slice())).collect();
    let k = basis.len();
    let mut out = ComplexMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            out[(i, j)] = images[j]
                .iter()
                .zip(basis[i].as_slice())
                .fold(ZERO, |acc, (a, b)| acc + a * b.conj());
        }
    }
    Ok(out)
}
