use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::OperatorError;
use crate::truncation1d::Grid;

pub type CoefFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Points where built-in models are checked against their declared limits.
const LIMIT_PROBE: f64 = 50.0;
const LIMIT_TOL: f64 = 1e-6;

/// `A = −d²/dx² + q1(x) d/dx + q0(x)` on the real line with
/// `q_k(x) → c_k` as `|x| → ∞`.
#[derive(Clone)]
pub struct DiffOp1D {
    pub label: String,
    pub q1: CoefFn,
    pub q0: CoefFn,
    /// Exact `q1′` when known; otherwise central differences are used.
    pub q1_prime: Option<CoefFn>,
    pub c1: Complex64,
    pub c0: Complex64,
}

impl fmt::Debug for DiffOp1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffOp1D")
            .field("label", &self.label)
            .field("c1", &self.c1)
            .field("c0", &self.c0)
            .finish()
    }
}

impl DiffOp1D {
    pub fn q1_at(&self, x: f64) -> Complex64 {
        (self.q1)(x)
    }

    pub fn q0_at(&self, x: f64) -> Complex64 {
        (self.q0)(x)
    }

    pub fn q1_prime_at(&self, x: f64) -> Complex64 {
        match &self.q1_prime {
            Some(d) => d(x),
            None => {
                let h = 1e-5 * (1.0 + x.abs());
                ((self.q1)(x + h) - (self.q1)(x - h)) / (2.0 * h)
            }
        }
    }

    pub fn with_derivative(mut self, q1_prime: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        self.q1_prime = Some(Arc::new(q1_prime));
        self
    }

    /// Whether `q1` is real on a probe grid.
    pub fn has_real_q1(&self, extent: f64) -> bool {
        (0..=400).all(|k| {
            let x = -extent + 2.0 * extent * k as f64 / 400.0;
            self.q1_at(x).im.abs() <= 1e-14 * (1.0 + self.q1_at(x).re.abs())
        })
    }

    /// Limiting symbol `ξ² + c1·iξ + c0`.
    pub fn limiting_symbol(&self) -> SymbolSpec {
        SymbolSpec::advection_diffusion(self.c1, self.c0)
    }
}

/// Builds a model after checking `q_k(±50)` against the declared limits.
pub fn advection_diffusion(
    label: impl Into<String>,
    q1: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    q0: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    c1: Complex64,
    c0: Complex64,
) -> Result<DiffOp1D, OperatorError> {
    for x in [-LIMIT_PROBE, LIMIT_PROBE] {
        for (name, f, limit) in [("q1", &q1 as &dyn Fn(f64) -> Complex64, c1), ("q0", &q0, c0)] {
            let value = f(x);
            if (value - limit).norm() > LIMIT_TOL {
                return Err(OperatorError::LimitMismatch { name, x, value, limit });
            }
        }
    }
    Ok(DiffOp1D {
        label: label.into(),
        q1: Arc::new(q1),
        q0: Arc::new(q0),
        q1_prime: None,
        c1,
        c0,
    })
}

/// `q1 ≡ −2`, `q0 ≡ 0`.
pub fn advdiff_constant() -> DiffOp1D {
    advection_diffusion(
        "advection-diffusion, constant",
        |_| Complex64::new(-2.0, 0.0),
        |_| Complex64::new(0.0, 0.0),
        Complex64::new(-2.0, 0.0),
        Complex64::new(0.0, 0.0),
    )
    .expect("constant coefficients equal their limits")
    .with_derivative(|_| Complex64::new(0.0, 0.0))
}

/// `q1 ≡ −2`, `q0(x) = 20 sin(x) e^{−x²}`.
pub fn advdiff_gaussian() -> DiffOp1D {
    advection_diffusion(
        "advection-diffusion, Gaussian potential",
        |_| Complex64::new(-2.0, 0.0),
        |x| Complex64::new(20.0 * x.sin() * (-x * x).exp(), 0.0),
        Complex64::new(-2.0, 0.0),
        Complex64::new(0.0, 0.0),
    )
    .expect("Gaussian potential decays to zero")
    .with_derivative(|_| Complex64::new(0.0, 0.0))
}

/// Polynomial symbol `p(ξ) = Σ_k coeffs[k]·ξ^k` (complex coefficients).
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolSpec {
    pub coeffs: Vec<Complex64>,
}

impl SymbolSpec {
    /// `ξ² + c1·(iξ) + c0`.
    pub fn advection_diffusion(c1: Complex64, c0: Complex64) -> Self {
        Self {
            coeffs: vec![c0, Complex64::i() * c1, Complex64::new(1.0, 0.0)],
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// `Re` of the top-order part is positive away from `ξ = 0`, sampled on
    /// `[−10, 10]`.
    pub fn is_strongly_elliptic(&self) -> bool {
        let m = self.degree();
        if m == 0 || !m.is_multiple_of(2) {
            return false;
        }
        let top = self.coeffs[m];
        (1..=200).all(|k| {
            let xi = k as f64 * 0.05;
            (top * xi.powi(m as i32)).re > 0.0 && (top * (-xi).powi(m as i32)).re > 0.0
        })
    }
}

pub fn symbol_eval(sym: &SymbolSpec, xi: f64) -> Complex64 {
    sym.coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * xi + c)
}

/// Two-bump witness for the complex Airy operator `−d²/dx² + ix`.
#[derive(Clone, Debug)]
pub struct AiryWitness {
    /// Samples of `f` on the grid nodes.
    pub values: Vec<f64>,
    /// Quadrature value of `‖f′‖² + ⟨ixf, f⟩`.
    pub rayleigh_value: Complex64,
    pub norm_sq: f64,
    pub centers: (f64, f64),
    pub width: f64,
}

fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

fn bump_prime(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        let d = 1.0 - x * x;
        bump(x) * (-2.0 * x / (d * d))
    }
}

/// `(∫ψ², ∫ψ′²)` for the standard bump on `(−1, 1)`.
fn bump_moments() -> (f64, f64) {
    static MOMENTS: OnceLock<(f64, f64)> = OnceLock::new();
    *MOMENTS.get_or_init(|| {
        let n = 200_000;
        let h = 2.0 / n as f64;
        let (mut i0, mut i1) = (0.0, 0.0);
        for k in 1..n {
            let x = -1.0 + k as f64 * h;
            i0 += bump(x).powi(2);
            i1 += bump_prime(x).powi(2);
        }
        (i0 * h, i1 * h)
    })
}

/// Unit-norm witness `f = φ(· − a) + φ(· − b)` with `⟨Tf, f⟩ ≈ λ` for the
/// complex Airy operator.
///
/// `φ = Aψ(·/w)` satisfies `‖φ‖² = 1/2` and `‖φ′‖² = Re λ / 2`; the centres
/// sit at `−n` and `n + 2|Im λ|` (mirrored for `Im λ < 0`) and are pushed
/// apart symmetrically if the bumps would overlap.
pub fn airy_witness(lambda: Complex64, n: usize, grid: &Grid) -> Result<AiryWitness, OperatorError> {
    let (u, v) = (lambda.re, lambda.im);
    if !(u > 0.0) {
        return Err(OperatorError::NonPositiveReal(lambda));
    }
    let (i0, i1) = bump_moments();
    let width = (i1 / (u * i0)).sqrt();
    let amp = (0.5 / (width * i0)).sqrt();
    let nf = n as f64;
    let (mut a, mut b) = if v >= 0.0 { (-nf, nf + 2.0 * v) } else { (-nf - 2.0 * v.abs(), nf) };
    let gap = b - a;
    if gap < 2.0 * width {
        let spread = width - 0.5 * gap;
        a -= spread;
        b += spread;
    }
    if grid.a > a - width || grid.b < b + width {
        return Err(OperatorError::GridTooCoarse(format!(
            "grid [{}, {}] does not cover bump supports [{}, {}]",
            grid.a,
            grid.b,
            a - width,
            b + width
        )));
    }

    let nodes = grid.nodes();
    let h = grid.step();
    let f = |x: f64| amp * (bump((x - a) / width) + bump((x - b) / width));
    let df = |x: f64| amp / width * (bump_prime((x - a) / width) + bump_prime((x - b) / width));
    let values: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
    // Trapezoid rule; the integrands vanish at the grid ends.
    let norm_sq: f64 = values.iter().map(|y| y * y).sum::<f64>() * h;
    let kinetic: f64 = nodes.iter().map(|&x| df(x).powi(2)).sum::<f64>() * h;
    let position: f64 = nodes.iter().zip(&values).map(|(&x, y)| x * y * y).sum::<f64>() * h;
    if (norm_sq - 1.0).abs() > 0.01 {
        return Err(OperatorError::GridTooCoarse(format!("quadrature norm² = {norm_sq}")));
    }
    Ok(AiryWitness {
        values,
        rayleigh_value: Complex64::new(kinetic, position),
        norm_sq,
        centers: (a, b),
        width,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_examples() {
        let s = SymbolSpec::advection_diffusion(Complex64::new(-2.0, 0.0), Complex64::new(0.0, 0.0));
        assert_eq!(symbol_eval(&s, 1.0), Complex64::new(1.0, -2.0));
        assert_eq!(symbol_eval(&s, -1.0), Complex64::new(1.0, 2.0));
        let s5 = SymbolSpec::advection_diffusion(Complex64::new(-2.0, 0.0), Complex64::new(5.0, 0.0));
        assert_eq!(symbol_eval(&s5, 0.0), Complex64::new(5.0, 0.0));
        assert!(s.is_strongly_elliptic());
    }

    #[test]
    fn limit_mismatch_is_reported() {
        let err = advection_diffusion(
            "bad",
            |_| Complex64::new(-2.0, 0.0),
            |x| Complex64::new(x, 0.0),
            Complex64::new(-2.0, 0.0),
            Complex64::new(0.0, 0.0),
        )
        .unwrap_err();
        assert!(matches!(err, OperatorError::LimitMismatch { name: "q0", .. }));
        assert_eq!(advdiff_gaussian().q0_at(0.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn airy_witness_hits_target() {
        let grid = Grid::with_step(-40.0, 40.0, 1e-3);
        for lambda in [Complex64::new(1.0, 0.0), Complex64::new(2.0, 3.0)] {
            let w = airy_witness(lambda, 20, &grid).unwrap();
            assert!((w.rayleigh_value - lambda).norm() < 0.01);
            assert!(w.rayleigh_value.re >= 0.0);
        }
        assert!(matches!(
            airy_witness(Complex64::new(0.0, 1.0), 20, &grid),
            Err(OperatorError::NonPositiveReal(_))
        ));
    }
}
