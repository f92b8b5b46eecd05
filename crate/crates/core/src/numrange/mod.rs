//! Numerical ranges as support functions on a uniform angle grid.
//!
//! The support of `W(M)` in direction `θ` is the top eigenvalue of the
//! Hermitian part of `e^{-iθ}M`; its eigenvector is a boundary witness.

mod attain;
mod region;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::linalg::{hermitian_top_eigenpair, rayleigh, ComplexMatrix, LinalgError, UnitVector};

pub use attain::attain;
pub use region::{hausdorff_clipped, hull, hull_in, ClipBox, ConvexRegion};

pub const DEFAULT_ANGLES: usize = 720;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumRangeError {
    #[error("need at least 8 angles, got {0}")]
    TooFewAngles(usize),
    #[error("target lies outside the numerical range (support violated by {excess:e})")]
    OutsideRange { excess: f64 },
    #[error("no witness found: {0}")]
    NoWitness(String),
    #[error("region is empty")]
    EmptyRegion,
    #[error("regions use different angle grids ({0} vs {1})")]
    GridMismatch(usize, usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `(cos θ_j, sin θ_j)` for `θ_j = 2πj/n`, exact at quarter turns.
pub fn direction(j: usize, n: usize) -> (f64, f64) {
    let j = j % n;
    if (4 * j).is_multiple_of(n) {
        return match 4 * j / n {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        };
    }
    let theta = std::f64::consts::TAU * j as f64 / n as f64;
    (theta.cos(), theta.sin())
}

/// `Re(e^{-iθ} z)` for the direction `(c, s)`.
#[inline]
pub fn project(z: Complex64, (c, s): (f64, f64)) -> f64 {
    z.re * c + z.im * s
}

/// Sampled support function `s_j = sup_{z∈K} Re(e^{-iθ_j} z)`; `+∞` marks
/// unbounded directions.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportFunction {
    pub angles: Vec<f64>,
    pub support: Vec<f64>,
    /// Points of `K` attaining the support, where known.
    pub boundary_points: Vec<Option<Complex64>>,
    pub witnesses: Option<Vec<UnitVector>>,
}

impl SupportFunction {
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn direction(&self, j: usize) -> (f64, f64) {
        direction(j, self.len())
    }

    /// Support values only, without boundary points.
    pub fn from_values(support: Vec<f64>) -> Self {
        let n = support.len();
        Self {
            angles: angle_grid(n),
            boundary_points: vec![None; n],
            support,
            witnesses: None,
        }
    }

    /// Support values from a closed form in terms of `(cos θ, sin θ)`.
    pub fn from_fn(n: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        Self::from_values((0..n).map(|j| {
            let (c, s) = direction(j, n);
            f(c, s)
        }).collect())
    }

    /// The whole plane.
    pub fn unbounded(n: usize) -> Self {
        Self::from_values(vec![f64::INFINITY; n])
    }

    /// Support of the convex hull of a finite point set.
    pub fn from_points(points: &[Complex64], n: usize) -> Self {
        assert!(!points.is_empty(), "need at least one point");
        let mut support = Vec::with_capacity(n);
        let mut boundary = Vec::with_capacity(n);
        for j in 0..n {
            let d = direction(j, n);
            let (best, value) = points
                .iter()
                .map(|&p| (p, project(p, d)))
                .fold((points[0], f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            support.push(value);
            boundary.push(Some(best));
        }
        Self {
            angles: angle_grid(n),
            support,
            boundary_points: boundary,
            witnesses: None,
        }
    }

    /// Axis-aligned ellipse with the given centre and semi-axes `a` (real
    /// direction) and `b` (imaginary direction).
    pub fn ellipse(center: Complex64, a: f64, b: f64, n: usize) -> Self {
        let mut sf = Self::from_fn(n, |c, s| center.re * c + center.im * s + (a * a * c * c + b * b * s * s).sqrt());
        for j in 0..n {
            let (c, s) = direction(j, n);
            let r = (a * a * c * c + b * b * s * s).sqrt();
            sf.boundary_points[j] = Some(if r > 0.0 {
                center + Complex64::new(a * a * c / r, b * b * s / r)
            } else {
                center
            });
        }
        sf
    }

    /// Pointwise maximum: support of the convex hull of the union.
    pub fn hull_union(parts: &[&SupportFunction]) -> Result<Self, NumRangeError> {
        let n = common_len(parts)?;
        let mut out = Self::from_values(vec![f64::NEG_INFINITY; n]);
        for part in parts {
            for j in 0..n {
                if part.support[j] > out.support[j] {
                    out.support[j] = part.support[j];
                    out.boundary_points[j] = part.boundary_points[j];
                }
            }
        }
        Ok(out)
    }

    /// Pointwise minimum: half-plane description of the intersection.
    pub fn intersection(parts: &[&SupportFunction]) -> Result<Self, NumRangeError> {
        let n = common_len(parts)?;
        let mut support = vec![f64::INFINITY; n];
        for part in parts {
            for (s, p) in support.iter_mut().zip(&part.support) {
                *s = s.min(*p);
            }
        }
        Ok(Self::from_values(support))
    }

    /// Minimal width `s(θ) + s(θ+π)` and the index where it occurs.
    pub fn min_width(&self) -> (f64, usize) {
        let n = self.len();
        let mut best = (f64::INFINITY, 0);
        if !n.is_multiple_of(2) {
            return best;
        }
        for j in 0..n / 2 {
            let w = self.support[j] + self.support[j + n / 2];
            if w < best.0 {
                best = (w, j);
            }
        }
        best
    }
}

fn common_len(parts: &[&SupportFunction]) -> Result<usize, NumRangeError> {
    let n = parts.first().map_or(0, |p| p.len());
    for p in parts {
        if p.len() != n {
            return Err(NumRangeError::GridMismatch(n, p.len()));
        }
    }
    Ok(n)
}

pub fn angle_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| std::f64::consts::TAU * j as f64 / n as f64).collect()
}

/// Contiguous index ranges `[a, b)` on which `m` decouples into a direct
/// sum. `W` of a direct sum is the hull of the blocks' ranges.
fn diagonal_blocks(m: &ComplexMatrix) -> Vec<(usize, usize)> {
    let n = m.rows();
    let zero = Complex64::new(0.0, 0.0);
    let mut reach = vec![0usize; n];
    for i in 0..n {
        for j in 0..n {
            if m[(i, j)] != zero {
                reach[i] = reach[i].max(j);
                reach[j] = reach[j].max(i);
            }
        }
    }
    let mut blocks = Vec::new();
    let mut start = 0;
    let mut furthest = 0;
    for i in 0..n {
        furthest = furthest.max(reach[i]).max(i);
        if furthest == i {
            blocks.push((start, i + 1));
            start = i + 1;
        }
    }
    blocks
}

struct AngleSample {
    support: f64,
    point: Complex64,
    witness: Option<UnitVector>,
}

fn sample_angle(
    m: &ComplexMatrix,
    blocks: &[(usize, ComplexMatrix)],
    d: (f64, f64),
    keep_witness: bool,
) -> Result<AngleSample, NumRangeError> {
    let omega = Complex64::new(d.0, -d.1);
    let mut best: Option<(f64, usize, UnitVector)> = None;
    for (k, (_, block)) in blocks.iter().enumerate() {
        let h = block.rotated_hermitian_part(omega);
        let (value, vector) = hermitian_top_eigenpair(&h)?;
        if best.as_ref().is_none_or(|b| value > b.0) {
            best = Some((value, k, vector));
        }
    }
    let (value, k, vector) = best.expect("at least one block");
    let (offset, block) = &blocks[k];
    let point = rayleigh(block, &vector)?;
    let witness = keep_witness.then(|| vector.embed(m.rows(), *offset));
    Ok(AngleSample {
        support: value,
        point,
        witness,
    })
}

fn boundary_impl(m: &ComplexMatrix, n_angles: usize, tol: f64, keep: bool) -> Result<SupportFunction, NumRangeError> {
    if n_angles < 8 {
        return Err(NumRangeError::TooFewAngles(n_angles));
    }
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        }
        .into());
    }
    let blocks: Vec<(usize, ComplexMatrix)> = diagonal_blocks(m)
        .into_iter()
        .map(|(a, b)| (a, m.principal_submatrix(a, b)))
        .collect();
    let samples: Vec<AngleSample> = (0..n_angles)
        .into_par_iter()
        .map(|j| sample_angle(m, &blocks, direction(j, n_angles), keep))
        .collect::<Result<_, _>>()?;

    let scale = 1.0 + m.max_abs();
    for (j, s) in samples.iter().enumerate() {
        let gap = (project(s.point, direction(j, n_angles)) - s.support).abs();
        if gap > tol.max(1e-12) * scale {
            return Err(LinalgError::ResidualTooLarge {
                residual: gap,
                bound: tol * scale,
            }
            .into());
        }
    }
    let mut support = Vec::with_capacity(n_angles);
    let mut points = Vec::with_capacity(n_angles);
    let mut witnesses = Vec::with_capacity(if keep { n_angles } else { 0 });
    for s in samples {
        support.push(s.support);
        points.push(Some(s.point));
        if let Some(w) = s.witness {
            witnesses.push(w);
        }
    }
    Ok(SupportFunction {
        angles: angle_grid(n_angles),
        support,
        boundary_points: points,
        witnesses: keep.then_some(witnesses),
    })
}

/// Support function of `W(M)` with boundary points and witness vectors.
///
/// `tol` bounds the mismatch between each boundary point's projection and
/// the support value, relative to `1 + max|M_ij|`.
pub fn nr_boundary(m: &ComplexMatrix, n_angles: usize, tol: f64) -> Result<SupportFunction, NumRangeError> {
    boundary_impl(m, n_angles, tol, true)
}

/// Like [`nr_boundary`] but without storing witnesses.
pub fn nr_support(m: &ComplexMatrix, n_angles: usize, tol: f64) -> Result<SupportFunction, NumRangeError> {
    boundary_impl(m, n_angles, tol, false)
}
