//! Dirichlet truncation of `−u″ + q1 u′ + q0 u` to bounded intervals,
//! discretized by second-order central differences.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::essrange::{symbol_we_adaptive, EssRangeError};
use crate::linalg::{general_eig, symmetric_tridiagonal_eigenvalues, ComplexMatrix, LinalgError};
use crate::numrange::{ClipBox, ConvexRegion};
use crate::operators::DiffOp1D;

#[derive(Debug, thiserror::Error)]
pub enum TruncationError {
    #[error("Liouville transform needs a real first-order coefficient")]
    ComplexQ1,
    #[error("grid needs at least 16 interior nodes and a positive length, got N = {nodes} on [{a}, {b}]")]
    BadGrid { a: f64, b: f64, nodes: usize },
    #[error("interval half-widths must be positive and increasing")]
    BadSchedule,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    EssRange(#[from] EssRangeError),
    #[error("csv output failed: {0}")]
    Csv(String),
}

/// Uniform grid on `[a, b]` with `N` interior nodes `x_j = a + j·h`,
/// `h = (b − a)/(N + 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub a: f64,
    pub b: f64,
    pub nodes: usize,
}

impl Grid {
    pub fn new(a: f64, b: f64, nodes: usize) -> Result<Self, TruncationError> {
        if nodes < 16 || !(b > a) {
            return Err(TruncationError::BadGrid { a, b, nodes });
        }
        Ok(Self { a, b, nodes })
    }

    /// `[−s, s]` with `N` interior nodes.
    pub fn symmetric(s: f64, nodes: usize) -> Result<Self, TruncationError> {
        Self::new(-s, s, nodes)
    }

    /// Grid whose step is as close to `h` as the interval allows.
    pub fn with_step(a: f64, b: f64, h: f64) -> Self {
        let nodes = (((b - a) / h).round() as usize).saturating_sub(1).max(16);
        Self { a, b, nodes }
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / (self.nodes + 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (1..=self.nodes).map(|j| self.a + j as f64 * h).collect()
    }
}

/// Tridiagonal Dirichlet matrix: row `i` reads `(sub[i−1], diag[i], sup[i])`.
#[derive(Clone, Debug)]
pub struct DirichletDiscretization {
    pub grid: Grid,
    pub label: String,
    /// `M[i+1][i]`.
    pub sub: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    /// `M[i][i+1]`.
    pub sup: Vec<Complex64>,
}

pub fn discretize(op: &DiffOp1D, grid: Grid) -> DirichletDiscretization {
    let h = grid.step();
    let x = grid.nodes();
    let inv_h2 = 1.0 / (h * h);
    let n = grid.nodes;
    let mut sub = Vec::with_capacity(n - 1);
    let mut diag = Vec::with_capacity(n);
    let mut sup = Vec::with_capacity(n - 1);
    for (i, &xi) in x.iter().enumerate() {
        let q1 = op.q1_at(xi);
        let q0 = op.q0_at(xi);
        diag.push(Complex64::new(2.0 * inv_h2, 0.0) + q0);
        if i > 0 {
            sub.push(Complex64::new(-inv_h2, 0.0) - q1 / (2.0 * h));
        }
        if i + 1 < n {
            sup.push(Complex64::new(-inv_h2, 0.0) + q1 / (2.0 * h));
        }
    }
    DirichletDiscretization {
        grid,
        label: op.label.clone(),
        sub,
        diag,
        sup,
    }
}

impl DirichletDiscretization {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.sup[i];
                m[(i + 1, i)] = self.sub[i];
            }
        }
        m
    }

    /// Real symmetric tridiagonal form `(diag, off)` reachable by a diagonal
    /// similarity, when the matrix is real with positive off-diagonal
    /// products.
    fn symmetrized(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let real = |z: &Complex64| z.im == 0.0;
        if !(self.diag.iter().all(real) && self.sub.iter().all(real) && self.sup.iter().all(real)) {
            return None;
        }
        let mut off = Vec::with_capacity(self.sub.len());
        for (l, u) in self.sub.iter().zip(&self.sup) {
            let p = l.re * u.re;
            if !(p > 0.0) {
                return None;
            }
            off.push(p.sqrt());
        }
        Some((self.diag.iter().map(|d| d.re).collect(), off))
    }

    /// Eigenvalues sorted by `(Re, Im)`.
    ///
    /// Real models with positive off-diagonal products go through the
    /// symmetrized tridiagonal form, which avoids the severe non-normality of
    /// the advection term; everything else uses the dense QR solver.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>, TruncationError> {
        if let Some((d, e)) = self.symmetrized() {
            let vals = symmetric_tridiagonal_eigenvalues(&d, &e)?;
            return Ok(vals.into_iter().map(|v| Complex64::new(v, 0.0)).collect());
        }
        Ok(general_eig(&self.matrix(), 1e-10)?.values)
    }
}

/// Half-widths `s_1 < … < s_K`, resolved with `N = ⌈ρ·2s⌉` nodes (capped)
/// unless a fixed node count is given.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationSchedule {
    pub s_values: Vec<f64>,
    pub density: f64,
    pub max_nodes: usize,
    pub fixed_nodes: Option<usize>,
    /// Relative retention tolerance: keep `λ` when refinement moves it by at
    /// most `tol·(1 + |λ|)`.
    pub retain_tol: f64,
}

impl TruncationSchedule {
    pub const DEFAULT_DENSITY: f64 = 50.0;
    pub const DEFAULT_MAX_NODES: usize = 4000;
    pub const DEFAULT_RETAIN_TOL: f64 = 1e-3;

    pub fn new(s_values: Vec<f64>) -> Result<Self, TruncationError> {
        if s_values.is_empty() || s_values[0] <= 0.0 || s_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(TruncationError::BadSchedule);
        }
        Ok(Self {
            s_values,
            density: Self::DEFAULT_DENSITY,
            max_nodes: Self::DEFAULT_MAX_NODES,
            fixed_nodes: None,
            retain_tol: Self::DEFAULT_RETAIN_TOL,
        })
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.fixed_nodes = Some(nodes);
        self
    }

    pub fn with_density(mut self, density: f64) -> Self {
        self.density = density;
        self
    }

    pub fn nodes_for(&self, s: f64) -> usize {
        self.fixed_nodes
            .unwrap_or_else(|| ((self.density * 2.0 * s).ceil() as usize).min(self.max_nodes))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationLevel {
    pub s: f64,
    pub nodes: usize,
    pub eigenvalues: Vec<Complex64>,
    /// Per eigenvalue: stable under grid refinement. All true without
    /// refinement.
    pub retained: Vec<bool>,
}

impl TruncationLevel {
    pub fn retained_values(&self) -> Vec<Complex64> {
        self.eigenvalues
            .iter()
            .zip(&self.retained)
            .filter(|(_, &r)| r)
            .map(|(&v, _)| v)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationRun {
    pub label: String,
    pub levels: Vec<TruncationLevel>,
}

impl TruncationRun {
    /// Retained eigenvalues per level, for tracking.
    pub fn retained_spectra(&self) -> Vec<Vec<Complex64>> {
        self.levels.iter().map(TruncationLevel::retained_values).collect()
    }

    /// `s,N,eig_index,re,im,retained`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), TruncationError> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| TruncationError::Csv(e.to_string());
        w.write_record(["s", "N", "eig_index", "re", "im", "retained"]).map_err(err)?;
        for level in &self.levels {
            for (k, (v, r)) in level.eigenvalues.iter().zip(&level.retained).enumerate() {
                w.write_record([
                    level.s.to_string(),
                    level.nodes.to_string(),
                    k.to_string(),
                    v.re.to_string(),
                    v.im.to_string(),
                    r.to_string(),
                ])
                .map_err(err)?;
            }
        }
        w.flush().map_err(|e| TruncationError::Csv(e.to_string()))
    }
}

fn nearest_distance(z: Complex64, sorted: &[Complex64]) -> f64 {
    // Values are sorted by real part: scan outward from the insertion point
    // and stop once the real-part gap alone exceeds the best distance.
    let pos = sorted.partition_point(|w| w.re < z.re);
    let mut best = f64::INFINITY;
    for w in sorted[pos..].iter() {
        if w.re - z.re > best {
            break;
        }
        best = best.min((w - z).norm());
    }
    for w in sorted[..pos].iter().rev() {
        if z.re - w.re > best {
            break;
        }
        best = best.min((w - z).norm());
    }
    best
}

/// Spectra of the Dirichlet truncations to `[−s, s]` for each `s`. With
/// `refine`, eigenvalues are recomputed at `2N` nodes and those that move by
/// more than the retention tolerance are flagged as discretization artifacts.
pub fn truncated_spectrum(
    op: &DiffOp1D,
    sched: &TruncationSchedule,
    refine: bool,
) -> Result<TruncationRun, TruncationError> {
    let levels = sched
        .s_values
        .par_iter()
        .map(|&s| {
            let nodes = sched.nodes_for(s);
            let eigenvalues = discretize(op, Grid::symmetric(s, nodes)?).eigenvalues()?;
            let retained = if refine {
                let fine = discretize(op, Grid::symmetric(s, 2 * nodes)?).eigenvalues()?;
                eigenvalues
                    .iter()
                    .map(|&v| nearest_distance(v, &fine) <= sched.retain_tol * (1.0 + v.norm()))
                    .collect()
            } else {
                vec![true; eigenvalues.len()]
            };
            Ok(TruncationLevel {
                s,
                nodes,
                eigenvalues,
                retained,
            })
        })
        .collect::<Result<Vec<_>, TruncationError>>()?;
    Ok(TruncationRun {
        label: op.label.clone(),
        levels,
    })
}

/// Removes the first-order term: `−d²/dx² + q̃0` with
/// `q̃0 = q0 − q1′/2 + q1²/4`. Requires real `q1`.
pub fn liouville_transform(op: &DiffOp1D) -> Result<DiffOp1D, TruncationError> {
    if op.c1.im != 0.0 || !op.has_real_q1(60.0) {
        return Err(TruncationError::ComplexQ1);
    }
    let src = op.clone();
    let q0 = move |x: f64| {
        let q1 = src.q1_at(x);
        src.q0_at(x) - src.q1_prime_at(x) * 0.5 + q1 * q1 * 0.25
    };
    Ok(DiffOp1D {
        label: format!("{} (Liouville)", op.label),
        q1: std::sync::Arc::new(|_| Complex64::new(0.0, 0.0)),
        q0: std::sync::Arc::new(q0),
        q1_prime: Some(std::sync::Arc::new(|_| Complex64::new(0.0, 0.0))),
        c1: Complex64::new(0.0, 0.0),
        c0: op.c0 + op.c1 * op.c1 * 0.25,
    })
}

/// `1 + π²k²/(4s²)` for `k = 1..=k_max`: the Dirichlet spectrum of the
/// constant model on `[−s, s]`.
pub fn exact_constant_spectrum(s: f64, k_max: usize) -> Vec<f64> {
    assert!(s > 0.0);
    (1..=k_max)
        .map(|k| 1.0 + PI * PI * (k * k) as f64 / (4.0 * s * s))
        .collect()
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..100 {
        if hi - lo < 1e-12 {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Infimum of the Liouville potential `q̃0` over `[−extent, extent]` and
/// its limit at infinity, refined by golden-section search around the best
/// grid node.
pub fn essinf_potential(op: &DiffOp1D, extent: f64, step: f64) -> Result<f64, TruncationError> {
    let t = liouville_transform(op)?;
    let q = |x: f64| t.q0_at(x).re;
    let count = ((2.0 * extent / step).ceil() as usize).max(2);
    let (x_best, f_best) = (0..=count)
        .map(|k| {
            let x = -extent + 2.0 * extent * k as f64 / count as f64;
            (x, q(x))
        })
        .fold((0.0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
    let (_, refined) = golden_min(q, x_best - step, x_best + step);
    Ok(f_best.min(refined).min(t.c0.re))
}

/// `W_e` of the operator from its limiting symbol `ξ² + c1·iξ + c0`.
pub fn truncation_we(op: &DiffOp1D, clip: ClipBox) -> Result<ConvexRegion, TruncationError> {
    Ok(symbol_we_adaptive(&op.limiting_symbol(), clip)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{advdiff_constant, advdiff_gaussian, advection_diffusion};

    fn zero_op() -> DiffOp1D {
        advection_diffusion("laplacian", |_| Complex64::new(0.0, 0.0), |_| Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)).unwrap()
    }

    #[test]
    fn laplacian_on_zero_pi() {
        let grid = Grid::new(0.0, PI, 199).unwrap();
        let d = discretize(&zero_op(), grid);
        assert_eq!(d.matrix().hermitian_defect(), 0.0);
        let vals = d.eigenvalues().unwrap();
        assert!(vals.iter().all(|v| v.re > 0.0));
        let h = grid.step();
        assert!((vals[0].re - 1.0).abs() <= 4.0 * h * h);
        assert!((vals[1].re - 4.0).abs() <= 16.0 * 4.0 * h * h);
    }

    #[test]
    fn stencil_signs() {
        let d = discretize(&advdiff_constant(), Grid::symmetric(1.0, 19).unwrap());
        let h = 0.1;
        assert!((d.sub[0].re - (-1.0 / (h * h) + 1.0 / h)).abs() < 1e-9);
        assert!((d.sup[0].re - (-1.0 / (h * h) - 1.0 / h)).abs() < 1e-9);
        assert!((d.diag[0].re - 2.0 / (h * h)).abs() < 1e-9);
    }

    #[test]
    fn exact_formula_values() {
        let v = exact_constant_spectrum(9.0, 1);
        assert!((v[0] - 1.030462).abs() < 1e-6);
        assert!((exact_constant_spectrum(std::f64::consts::FRAC_PI_2, 1)[0] - 2.0).abs() < 1e-14);
        assert!((exact_constant_spectrum(1e6, 3)[2] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn liouville_examples() {
        let t = liouville_transform(&advdiff_constant()).unwrap();
        assert_eq!(t.q0_at(3.0), Complex64::new(1.0, 0.0));
        let g = liouville_transform(&advdiff_gaussian()).unwrap();
        assert!((g.q0_at(0.7) - advdiff_gaussian().q0_at(0.7) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let z = liouville_transform(&zero_op()).unwrap();
        assert_eq!(z.q0_at(1.0), Complex64::new(0.0, 0.0));
        let complex = advection_diffusion("c", |_| Complex64::new(0.0, 1.0), |_| Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)).unwrap();
        assert!(matches!(liouville_transform(&complex), Err(TruncationError::ComplexQ1)));
    }

    #[test]
    fn essinf_examples() {
        assert!((essinf_potential(&advdiff_constant(), 10.0, 0.01).unwrap() - 1.0).abs() < 1e-14);
        let g = essinf_potential(&advdiff_gaussian(), 10.0, 0.01).unwrap();
        assert!((g - (-6.933059)).abs() < 1e-5);
        let c = advection_diffusion("c", |_| Complex64::new(0.0, 0.0), |_| Complex64::new(2.5, 0.0), Complex64::new(0.0, 0.0), Complex64::new(2.5, 0.0)).unwrap();
        assert!((essinf_potential(&c, 5.0, 0.1).unwrap() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn schedule_rejects_non_increasing() {
        assert!(TruncationSchedule::new(vec![5.0, 5.0]).is_err());
        assert_eq!(TruncationSchedule::new(vec![9.0]).unwrap().nodes_for(9.0), 900);
    }
}
