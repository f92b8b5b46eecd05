//! Estimates of the essential numerical range.
//!
//! The window estimator realizes the characterization of `W_e` as the
//! intersection of numerical ranges on complements of finite-dimensional
//! subspaces: windows far down the index range stand in for those
//! complements.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, LinalgError};
use crate::numrange::{
    hausdorff_clipped, hull_in, nr_support, ClipBox, ConvexRegion, NumRangeError, SupportFunction, DEFAULT_ANGLES,
};
use crate::operators::{symbol_eval, ModelKind, OperatorModel, SymbolSpec};

/// Successive tail intersections closer than this count as converged.
pub const STABILIZATION_TOL: f64 = 1e-3;
const HERMITIAN_WINDOW_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EssRangeError {
    #[error("schedule needs at least 3 strictly increasing starts and width ≥ 2")]
    BadSchedule,
    #[error("window starting at {0} is below the model's first index")]
    WindowBeforeStart(usize),
    #[error("window at {m} is not Hermitian (defect {defect:e})")]
    NotHermitian { m: usize, defect: f64 },
    #[error("need at least 3 matrices, got {0}")]
    TooFewMatrices(usize),
    #[error("tail fraction must lie in (0, 1), got {0}")]
    BadTailFraction(f64),
    #[error("symbol grid must be symmetric about 0 with at least 3 points")]
    BadSymbolGrid,
    #[error("doubling the ξ-grid extent moves the clipped hull by {change:e}")]
    GridInsufficient { change: f64 },
    #[error(transparent)]
    NumRange(#[from] NumRangeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Tail windows `[m_k, m_k + width − 1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowSchedule {
    pub starts: Vec<usize>,
    pub width: usize,
    pub clip: ClipBox,
    pub n_angles: usize,
}

impl WindowSchedule {
    pub fn new(starts: Vec<usize>, width: usize, clip: ClipBox) -> Result<Self, EssRangeError> {
        if starts.len() < 3 || width < 2 || starts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(EssRangeError::BadSchedule);
        }
        Ok(Self {
            starts,
            width,
            clip,
            n_angles: DEFAULT_ANGLES,
        })
    }

    /// `m_k = 2^k·w` for `k = 0..count`.
    pub fn geometric(width: usize, count: usize, clip: ClipBox) -> Result<Self, EssRangeError> {
        Self::new((0..count).map(|k| width << k).collect(), width, clip)
    }

    /// Windows made of whole 2×2 blocks: block `b` starts at flat index
    /// `2b − 1`.
    pub fn blocks(block_starts: &[usize], blocks_per_window: usize, clip: ClipBox) -> Result<Self, EssRangeError> {
        if block_starts.contains(&0) {
            return Err(EssRangeError::WindowBeforeStart(0));
        }
        Self::new(block_starts.iter().map(|b| 2 * b - 1).collect(), 2 * blocks_per_window, clip)
    }

    pub fn with_angles(mut self, n_angles: usize) -> Self {
        self.n_angles = n_angles;
        self
    }

    pub fn end(&self, k: usize) -> usize {
        self.starts[k] + self.width - 1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowRegion {
    pub m: usize,
    pub region: ConvexRegion,
}

/// Per-window regions `R_k`, their tail hulls `H_k = hull(R_k ∪ … ∪ R_K)`,
/// and the running intersections `I_k = H_1 ∩ … ∩ H_k`; the limit is `I_K`.
#[derive(Clone, Debug, Serialize)]
pub struct EssRangeEstimate {
    pub windows: Vec<WindowRegion>,
    pub limit: ConvexRegion,
    pub empty: bool,
    /// Hausdorff distance between `I_{k−1}` and `I_k`; `null` when either is
    /// empty.
    #[serde(serialize_with = "finite_or_null")]
    pub increments: Vec<Option<f64>>,
    #[serde(skip)]
    pub tail_hulls: Vec<SupportFunction>,
    #[serde(skip)]
    pub running: Vec<ConvexRegion>,
    /// Last two increments below [`STABILIZATION_TOL`].
    #[serde(skip)]
    pub stabilized: bool,
}

fn finite_or_null<S: Serializer>(v: &[Option<f64>], s: S) -> Result<S::Ok, S::Error> {
    let cleaned: Vec<Option<f64>> = v.iter().map(|x| x.filter(|y| y.is_finite())).collect();
    cleaned.serialize(s)
}

impl EssRangeEstimate {
    /// `min Re` over the tail hull `H_k`, read from the support at `θ = π`.
    pub fn tail_min_re(&self, k: usize) -> f64 {
        let sf = &self.tail_hulls[k];
        -sf.support[sf.len() / 2]
    }
}

fn accumulate(labels: Vec<usize>, regions: Vec<ConvexRegion>, clip: ClipBox) -> Result<EssRangeEstimate, EssRangeError> {
    let k_count = regions.len();
    let mut tail_hulls: Vec<SupportFunction> = Vec::with_capacity(k_count);
    let mut acc: Option<SupportFunction> = None;
    for r in regions.iter().rev() {
        let next = match acc {
            None => r.support.clone(),
            Some(prev) => SupportFunction::hull_union(&[&prev, &r.support])?,
        };
        tail_hulls.push(next.clone());
        acc = Some(next);
    }
    tail_hulls.reverse();

    let mut running: Vec<ConvexRegion> = Vec::with_capacity(k_count);
    let mut current: Option<SupportFunction> = None;
    for h in &tail_hulls {
        let next = match current {
            None => h.clone(),
            Some(prev) => SupportFunction::intersection(&[&prev, h])?,
        };
        running.push(ConvexRegion::from_support(next.clone(), clip));
        current = Some(next);
    }

    let increments: Vec<Option<f64>> = running
        .windows(2)
        .map(|w| hausdorff_clipped(&w[0], &w[1], clip).ok())
        .collect();
    let stabilized = increments.len() >= 2
        && increments[increments.len() - 2..]
            .iter()
            .all(|d| d.is_some_and(|d| d < STABILIZATION_TOL));
    let limit = running.last().expect("at least one window").clone();
    Ok(EssRangeEstimate {
        windows: labels
            .into_iter()
            .zip(regions)
            .map(|(m, region)| WindowRegion { m, region })
            .collect(),
        empty: limit.empty,
        limit,
        increments,
        tail_hulls,
        running,
        stabilized,
    })
}

/// Window estimate of `W_e(op)`.
pub fn estimate_we(op: &OperatorModel, sched: &WindowSchedule) -> Result<EssRangeEstimate, EssRangeError> {
    if let Some(&m) = sched.starts.iter().find(|&&m| m < op.first_index()) {
        return Err(EssRangeError::WindowBeforeStart(m));
    }
    let regions = sched
        .starts
        .par_iter()
        .enumerate()
        .map(|(k, &m)| {
            let w = op.window(m, sched.end(k));
            let sf = nr_support(&w, sched.n_angles, 1e-8)?;
            Ok(ConvexRegion::from_support(sf, sched.clip))
        })
        .collect::<Result<Vec<_>, EssRangeError>>()?;
    accumulate(sched.starts.clone(), regions, sched.clip)
}

/// Clipped hull of `{p(ξ)}` over a symmetric grid. Fails with
/// `GridInsufficient` if doubling the grid extent (same step) moves the
/// clipped hull by more than `tol`. Support values that still grow on the
/// doubled grid are set to `+∞`.
pub fn symbol_we(sym: &SymbolSpec, xi_grid: &[f64], clip: ClipBox, tol: f64) -> Result<ConvexRegion, EssRangeError> {
    let n = xi_grid.len();
    if n < 3 {
        return Err(EssRangeError::BadSymbolGrid);
    }
    let extent = xi_grid[n - 1];
    let symmetric = (xi_grid[0] + extent).abs() <= 1e-12 * (1.0 + extent);
    if !symmetric || xi_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EssRangeError::BadSymbolGrid);
    }
    let points = |grid: &[f64]| -> Vec<Complex64> { grid.iter().map(|&x| symbol_eval(sym, x)).collect() };
    let base = hull_in(&points(xi_grid), clip, DEFAULT_ANGLES);

    let step = (extent - xi_grid[0]) / (n - 1) as f64;
    let extra = ((extent / step).round() as usize).max(1);
    let mut doubled: Vec<f64> = (1..=extra).rev().map(|k| xi_grid[0] - k as f64 * step).collect();
    doubled.extend_from_slice(xi_grid);
    doubled.extend((1..=extra).map(|k| extent + k as f64 * step));
    let wide = hull_in(&points(&doubled), clip, DEFAULT_ANGLES);

    let change = match (base.empty, wide.empty) {
        (true, true) => 0.0,
        (false, false) => hausdorff_clipped(&base, &wide, clip)?,
        _ => f64::INFINITY,
    };
    if change > tol {
        return Err(EssRangeError::GridInsufficient { change });
    }
    // Directions whose support still grows on the doubled grid are unbounded.
    let mut base = base;
    for (s, w) in base.support.support.iter_mut().zip(&wide.support.support) {
        if *w > *s + tol {
            *s = f64::INFINITY;
        }
    }
    Ok(base)
}

/// [`symbol_we`] on a grid whose extent is doubled until the symbol leaves
/// the clip box at both ends, with 4000 steps per half-line.
pub fn symbol_we_adaptive(sym: &SymbolSpec, clip: ClipBox) -> Result<ConvexRegion, EssRangeError> {
    let mut extent = 1.0f64;
    while extent < 1e6
        && (clip.contains(symbol_eval(sym, extent), 0.0) || clip.contains(symbol_eval(sym, -extent), 0.0))
    {
        extent *= 2.0;
    }
    let half = 4000usize;
    let grid: Vec<f64> = (0..=2 * half)
        .map(|k| -extent + extent * k as f64 / half as f64)
        .collect();
    symbol_we(sym, &grid, clip, STABILIZATION_TOL)
}

/// `W_e` of a selfadjoint model: the interval spanned by the tail windows'
/// extreme eigenvalues.
///
/// An endpoint that still moves between the last two windows is treated as
/// escaping: the lower end moving up (or the upper end moving down) empties
/// the set, the other directions make it unbounded.
pub fn selfadjoint_we(op: &OperatorModel, sched: &WindowSchedule) -> Result<ConvexRegion, EssRangeError> {
    let extremes = sched
        .starts
        .par_iter()
        .enumerate()
        .map(|(k, &m)| {
            let w = op.window(m, sched.end(k));
            let defect = w.hermitian_defect();
            if defect > HERMITIAN_WINDOW_TOL {
                return Err(EssRangeError::NotHermitian { m, defect });
            }
            let vals = hermitian_eigenvalues(&w)?;
            Ok((vals[0], vals[vals.len() - 1]))
        })
        .collect::<Result<Vec<_>, EssRangeError>>()?;
    let k = extremes.len();
    let (lo, hi) = extremes[k - 1];
    let (lo_prev, hi_prev) = extremes[k - 2];
    let moved = |a: f64, b: f64| (a - b).abs() > STABILIZATION_TOL * (1.0 + a.abs());
    let n = sched.n_angles;
    if (moved(lo, lo_prev) && lo > lo_prev) || (moved(hi, hi_prev) && hi < hi_prev) {
        return Ok(ConvexRegion::empty(n, sched.clip));
    }
    let lo = if moved(lo, lo_prev) { f64::NEG_INFINITY } else { lo };
    let hi = if moved(hi, hi_prev) { f64::INFINITY } else { hi };
    Ok(ConvexRegion::from_support(interval_support(lo, hi, n), sched.clip))
}

/// Support of the real interval `[lo, hi]` (endpoints may be infinite).
pub fn interval_support(lo: f64, hi: f64, n: usize) -> SupportFunction {
    SupportFunction::from_fn(n, |c, _| {
        if c > 0.0 {
            hi * c
        } else if c < 0.0 {
            lo * c
        } else {
            0.0
        }
    })
}

/// Limiting essential numerical range of a matrix sequence: each matrix is
/// compressed to its trailing `⌈f·dim⌉` coordinates and the regions are
/// accumulated as in [`estimate_we`]. Window labels are sequence positions.
pub fn limiting_we(seq: &[ComplexMatrix], tail_fraction: f64, clip: ClipBox) -> Result<EssRangeEstimate, EssRangeError> {
    if seq.len() < 3 {
        return Err(EssRangeError::TooFewMatrices(seq.len()));
    }
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(EssRangeError::BadTailFraction(tail_fraction));
    }
    let regions = seq
        .par_iter()
        .map(|t| {
            let dim = t.rows();
            let keep = ((tail_fraction * dim as f64).ceil() as usize).clamp(1, dim);
            let tail = t.principal_submatrix(dim - keep, dim);
            let sf = nr_support(&tail, DEFAULT_ANGLES, 1e-8)?;
            Ok(ConvexRegion::from_support(sf, clip))
        })
        .collect::<Result<Vec<_>, EssRangeError>>()?;
    accumulate((0..seq.len()).collect(), regions, clip)
}

/// Model with finitely many entries overwritten.
pub fn finite_rank_perturb(op: &OperatorModel, patches: &[(usize, usize, Complex64)]) -> OperatorModel {
    op.with_patches(patches)
}

/// The limit region `E = {Re z ≥ 3/4 + (Im z)²}` of the delay operator's
/// block ranges.
pub fn parabola_e(n: usize, clip: ClipBox) -> ConvexRegion {
    let sf = SupportFunction::from_fn(n, |c, s| {
        if c < 0.0 {
            0.75 * c - s * s / (4.0 * c)
        } else {
            f64::INFINITY
        }
    });
    ConvexRegion::from_support(sf, clip)
}

/// Default schedule for a model: whole blocks for block models, geometric
/// starts otherwise.
pub fn default_schedule(op: &OperatorModel, clip: ClipBox) -> Result<WindowSchedule, EssRangeError> {
    match op.kind() {
        ModelKind::Block2x2 => WindowSchedule::blocks(&[25, 50, 100, 200], 100, clip),
        _ => WindowSchedule::geometric(64, 4, clip),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{delay_operator, diag_alternating, diagonal_linear, ex1_models, free_jacobi};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diag_alternating_is_empty() {
        let clip = ClipBox::new(-10.0, 10.0, -10.0, 10.0);
        let sched = WindowSchedule::new(vec![11, 21, 41, 81], 16, clip).unwrap();
        let est = estimate_we(&diag_alternating(), &sched).unwrap();
        assert!(est.empty);
        for (k, &m) in sched.starts.iter().enumerate() {
            assert_eq!(est.tail_min_re(k), m as f64);
        }
    }

    #[test]
    fn ex1_sum_lower_endpoint() {
        let (t, s) = ex1_models();
        let sum = t.plus(&s, "T+S");
        let clip = ClipBox::new(0.0, 50.0, -5.0, 5.0);
        let sched = WindowSchedule::blocks(&[5, 10, 20, 40], 10, clip).unwrap();
        let est = estimate_we(&sum, &sched).unwrap();
        let (lo, hi) = est.limit.re_extent().unwrap();
        let m = 40.0f64;
        assert!((lo - (1.0 - 1.0 / (m * m - 1.0))).abs() < 1e-6, "lo = {lo}");
        assert!((hi - 50.0).abs() < 1e-9);
        let (ilo, ihi) = est.limit.im_extent().unwrap();
        assert!(ilo.abs() < 1e-9 && ihi.abs() < 1e-9);
    }

    #[test]
    fn monotone_running_intersections() {
        let clip = ClipBox::new(0.0, 30.0, -6.0, 6.0);
        let sched = WindowSchedule::blocks(&[5, 10, 20, 40], 40, clip).unwrap();
        let est = estimate_we(&delay_operator(), &sched).unwrap();
        for w in est.running.windows(2) {
            for (a, b) in w[0].support.support.iter().zip(&w[1].support.support) {
                assert!(b <= &(a + 1e-8));
            }
        }
        assert!(est.limit.contains(c(2.0, 0.0), 1e-9));
        assert!(!est.limit.contains(c(0.5, 0.0), 1e-9));
    }

    #[test]
    fn symbol_regions() {
        let clip = ClipBox::new(-10.0, 100.0, -30.0, 30.0);
        let grid: Vec<f64> = (-1000..=1000).map(|k| k as f64 * 0.01).collect();
        let sym = SymbolSpec::advection_diffusion(c(-2.0, 0.0), c(0.0, 0.0));
        let r = symbol_we(&sym, &grid, clip, 1e-3).unwrap();
        assert!(r.contains(c(1.0, 0.0), 1e-9));
        assert!(!r.contains(c(-3.25, 0.0), 1e-9));

        let real = SymbolSpec::advection_diffusion(c(0.0, 0.0), c(0.0, 0.0));
        let r = symbol_we(&real, &grid, clip, 1e-3).unwrap();
        let (lo, hi) = r.re_extent().unwrap();
        assert_eq!((lo, hi), (0.0, 100.0));

        let shifted = SymbolSpec::advection_diffusion(c(-2.0, 0.0), c(5.0, 0.0));
        let r5 = symbol_we_adaptive(&shifted, clip).unwrap();
        assert!(r5.contains(c(5.0, 0.0), 1e-9) && !r5.contains(c(4.9, 0.0), 1e-9));

        let coarse: Vec<f64> = (-10..=10).map(|k| k as f64 * 0.1).collect();
        assert!(matches!(
            symbol_we(&sym, &coarse, clip, 1e-3),
            Err(EssRangeError::GridInsufficient { .. })
        ));
    }

    #[test]
    fn selfadjoint_examples() {
        let clip = ClipBox::default();
        let (t, _) = ex1_models();
        let r = selfadjoint_we(&t, &WindowSchedule::blocks(&[10, 20, 40], 10, clip).unwrap()).unwrap();
        assert_eq!(r.re_extent().unwrap(), (1.0, 100.0));

        let sched = WindowSchedule::new(vec![100, 200, 400], 256, clip).unwrap();
        let r = selfadjoint_we(&free_jacobi(), &sched).unwrap();
        let (lo, hi) = r.re_extent().unwrap();
        assert!((lo + 2.0).abs() < 1e-3 && (hi - 2.0).abs() < 1e-3);

        let r = selfadjoint_we(&diagonal_linear(), &WindowSchedule::new(vec![10, 20, 40], 8, clip).unwrap()).unwrap();
        assert!(r.empty);

        let nh = selfadjoint_we(&delay_operator(), &WindowSchedule::blocks(&[1, 2, 3], 1, clip).unwrap());
        assert!(matches!(nh, Err(EssRangeError::NotHermitian { .. })));
    }

    #[test]
    fn limiting_examples() {
        let clip = ClipBox::default();
        let ones: Vec<ComplexMatrix> = (3..8).map(ComplexMatrix::identity).collect();
        let est = limiting_we(&ones, 0.5, clip).unwrap();
        assert_eq!(est.limit.re_extent().unwrap(), (1.0, 1.0));
        let d = diag_alternating();
        let seq: Vec<ComplexMatrix> = [40, 80, 160].iter().map(|&n| d.window(0, n)).collect();
        assert!(limiting_we(&seq, 0.5, ClipBox::new(-10.0, 10.0, -10.0, 10.0)).unwrap().empty);
        assert_eq!(limiting_we(&seq[..2], 0.5, clip).unwrap_err(), EssRangeError::TooFewMatrices(2));
    }

    #[test]
    fn e_region_membership() {
        let e = parabola_e(720, ClipBox::new(0.0, 30.0, -6.0, 6.0));
        assert!(e.contains(c(1.0, 0.0), 1e-12));
        assert!(e.contains(c(1.0, 0.5), 1e-9));
        assert!(!e.contains(c(0.0, 0.0), 1e-9));
        assert!(!e.contains(c(1.0, 0.6), 1e-9));
    }
}
