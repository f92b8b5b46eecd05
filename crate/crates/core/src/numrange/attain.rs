//! Inverse numerical-range problem: a unit vector `x` with `⟨Mx, x⟩ = z`.
//!
//! Three boundary witnesses whose values surround `z` are combined by two
//! two-vector solves: first along the chord of the triangle hit by the ray
//! from the third vertex through `z`, then along that ray.

use num_complex::Complex64;

use super::region::{point_polygon_distance, polygon_contains};
use super::{direction, nr_boundary, project, NumRangeError, SupportFunction, DEFAULT_ANGLES};
use crate::linalg::{hermitian_top_eigenpair, inner, rayleigh, ComplexMatrix, UnitVector};

const MAX_TRIANGLE_VERTICES: usize = 64;
const MAX_REFINEMENTS: usize = 60;
const DEGENERATE_WIDTH: f64 = 1e-10;

#[derive(Clone)]
struct Sample {
    theta: f64,
    point: Complex64,
    witness: UnitVector,
}

/// Unit `x` with `|⟨Mx, x⟩ − z| ≤ tol`.
pub fn attain(m: &ComplexMatrix, z: Complex64, tol: f64) -> Result<UnitVector, NumRangeError> {
    let sf = nr_boundary(m, DEFAULT_ANGLES, 1e-8)?;
    let n = sf.len();
    let excess = (0..n)
        .map(|j| project(z, direction(j, n)) - sf.support[j])
        .fold(f64::NEG_INFINITY, f64::max);
    if excess > tol {
        return Err(NumRangeError::OutsideRange { excess });
    }
    let witnesses = sf.witnesses.clone().expect("nr_boundary keeps witnesses");
    let samples: Vec<Sample> = (0..n)
        .map(|j| Sample {
            theta: sf.angles[j],
            point: sf.boundary_points[j].expect("matrix boundary points are finite"),
            witness: witnesses[j].clone(),
        })
        .collect();

    let (width, j_min) = sf.min_width();
    if width < DEGENERATE_WIDTH {
        return attain_degenerate(m, z, tol, &sf, &samples, j_min);
    }

    let samples = refine_until_inside(m, z, samples)?;
    let poly: Vec<Complex64> = samples.iter().map(|s| s.point).collect();
    let scale = 1.0 + poly.iter().map(|p| p.norm()).fold(0.0, f64::max);
    if !polygon_contains(&poly, z, 1e-14 * scale) {
        // z sits in the sliver between the sampled polygon and W(M).
        let (i, gap) = nearest_edge(&poly, z);
        if gap > tol {
            return Err(NumRangeError::NoWitness(format!(
                "target is {gap:e} outside the sampled boundary polygon"
            )));
        }
        let a = &samples[i];
        let b = &samples[(i + 1) % samples.len()];
        let target = project_on_segment(z, a.point, b.point);
        return finish(m, two_point(m, &a.witness, &b.witness, target)?, z, tol);
    }

    let (ia, ib, ic) = best_triangle(&poly, z).ok_or_else(|| NumRangeError::NoWitness("no triangle contains the target".into()))?;
    let (a, b, c) = (&samples[ia], &samples[ib], &samples[ic]);
    if (c.point - z).norm() <= tol * 1e-3 {
        return finish(m, c.witness.clone(), z, tol);
    }
    let w = ray_hit(c.point, z, a.point, b.point)
        .ok_or_else(|| NumRangeError::NoWitness("degenerate triangle".into()))?;
    let x1 = two_point(m, &a.witness, &b.witness, w)?;
    let x = two_point(m, &x1, &c.witness, z)?;
    finish(m, x, z, tol)
}

fn finish(m: &ComplexMatrix, x: UnitVector, z: Complex64, tol: f64) -> Result<UnitVector, NumRangeError> {
    let got = rayleigh(m, &x)?;
    if (got - z).norm() > tol {
        return Err(NumRangeError::NoWitness(format!(
            "reached {got} for target {z} (error {:e})",
            (got - z).norm()
        )));
    }
    Ok(x)
}

/// `W(M)` is a segment or a point: its endpoints are the support points in
/// the two directions along the segment.
fn attain_degenerate(
    m: &ComplexMatrix,
    z: Complex64,
    tol: f64,
    sf: &SupportFunction,
    samples: &[Sample],
    j_min: usize,
) -> Result<UnitVector, NumRangeError> {
    let n = sf.len();
    let a = &samples[(j_min + n / 4) % n];
    let b = &samples[(j_min + 3 * n / 4) % n];
    let target = project_on_segment(z, a.point, b.point);
    finish(m, two_point(m, &a.witness, &b.witness, target)?, z, tol)
}

fn project_on_segment(z: Complex64, p: Complex64, q: Complex64) -> Complex64 {
    let d = q - p;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return p;
    }
    let t = (((z - p) * d.conj()).re / len2).clamp(0.0, 1.0);
    p + d * t
}

fn nearest_edge(poly: &[Complex64], z: Complex64) -> (usize, f64) {
    let n = poly.len();
    (0..n)
        .map(|i| (i, point_polygon_distance(z, &[poly[i], poly[(i + 1) % n]])))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// Inserts boundary samples at bisected angles across the edge that
/// separates `z` from the polygon, until `z` is inside.
fn refine_until_inside(m: &ComplexMatrix, z: Complex64, mut samples: Vec<Sample>) -> Result<Vec<Sample>, NumRangeError> {
    for _ in 0..MAX_REFINEMENTS {
        let poly: Vec<Complex64> = samples.iter().map(|s| s.point).collect();
        if polygon_contains(&poly, z, 0.0) {
            break;
        }
        let n = samples.len();
        let mut worst = (0usize, 0.0f64);
        for i in 0..n {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            let len = (b - a).norm();
            if len == 0.0 {
                continue;
            }
            let outside = -((b.re - a.re) * (z.im - a.im) - (b.im - a.im) * (z.re - a.re)) / len;
            if outside > worst.1 {
                worst = (i, outside);
            }
        }
        let i = worst.0;
        let t0 = samples[i].theta;
        let mut t1 = samples[(i + 1) % n].theta;
        if t1 <= t0 {
            t1 += std::f64::consts::TAU;
        }
        if t1 - t0 < 1e-13 {
            break;
        }
        let theta = 0.5 * (t0 + t1);
        let omega = Complex64::from_polar(1.0, -theta);
        let (_, witness) = hermitian_top_eigenpair(&m.rotated_hermitian_part(omega))?;
        let point = rayleigh(m, &witness)?;
        let theta = theta.rem_euclid(std::f64::consts::TAU);
        let pos = if i + 1 == n { n } else { i + 1 };
        samples.insert(pos, Sample { theta, point, witness });
    }
    Ok(samples)
}

fn in_triangle(a: Complex64, b: Complex64, c: Complex64, z: Complex64, eps: f64) -> bool {
    let cr = |o: Complex64, p: Complex64, q: Complex64| (p.re - o.re) * (q.im - o.im) - (p.im - o.im) * (q.re - o.re);
    let area = cr(a, b, c);
    if area.abs() <= eps {
        return false;
    }
    let s = area.signum();
    cr(a, b, z) * s >= -eps && cr(b, c, z) * s >= -eps && cr(c, a, z) * s >= -eps
}

fn inradius(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    let area2 = ((b.re - a.re) * (c.im - a.im) - (b.im - a.im) * (c.re - a.re)).abs();
    let perimeter = (b - a).norm() + (c - b).norm() + (a - c).norm();
    if perimeter == 0.0 {
        0.0
    } else {
        area2 / perimeter
    }
}

/// Triangle of polygon vertices containing `z`, preferring a large
/// inradius among a subsample; falls back to a fan from the vertex farthest
/// from `z`.
fn best_triangle(poly: &[Complex64], z: Complex64) -> Option<(usize, usize, usize)> {
    let n = poly.len();
    let scale = 1.0 + poly.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let eps = 1e-14 * scale * scale;
    let step = n.div_ceil(MAX_TRIANGLE_VERTICES).max(1);
    let idx: Vec<usize> = (0..n).step_by(step).collect();
    let mut best: Option<((usize, usize, usize), f64)> = None;
    for (p, &i) in idx.iter().enumerate() {
        for (q, &j) in idx.iter().enumerate().skip(p + 1) {
            for &k in idx.iter().skip(q + 1) {
                if in_triangle(poly[i], poly[j], poly[k], z, eps) {
                    let r = inradius(poly[i], poly[j], poly[k]);
                    if best.is_none_or(|b| r > b.1) {
                        best = Some(((i, j, k), r));
                    }
                }
            }
        }
    }
    if let Some((t, _)) = best {
        return Some(t);
    }
    let apex = (0..n).max_by(|&a, &b| (poly[a] - z).norm().total_cmp(&(poly[b] - z).norm()))?;
    (0..n)
        .map(|s| ((apex + 1 + s) % n, (apex + 2 + s) % n))
        .filter(|&(i, j)| i != apex && j != apex)
        .find(|&(i, j)| in_triangle(poly[i], poly[j], poly[apex], z, eps))
        .map(|(i, j)| (i, j, apex))
}

/// Point where the ray from `c` through `z` meets the segment `[a, b]`.
fn ray_hit(c: Complex64, z: Complex64, a: Complex64, b: Complex64) -> Option<Complex64> {
    let d = z - c;
    let e = b - a;
    let denom = d.re * (-e.im) - d.im * (-e.re);
    if denom.abs() < f64::MIN_POSITIVE {
        return None;
    }
    let r = a - c;
    let u = (d.re * r.im - d.im * r.re) / denom;
    Some(a + e * u.clamp(0.0, 1.0))
}

/// Unit combination of `u` and `v` whose Rayleigh quotient is the point of
/// the segment `[⟨Mu,u⟩, ⟨Mv,v⟩]` closest to `target`.
///
/// After rotating the segment onto the positive real axis, the phase `φ` of
/// `x(t) = cos t·u + e^{iφ} sin t·v` is fixed so that the imaginary part of
/// the quotient vanishes for every `t`; `t` is then found by bisection.
fn two_point(m: &ComplexMatrix, u: &UnitVector, v: &UnitVector, target: Complex64) -> Result<UnitVector, NumRangeError> {
    let (us, vs) = (u.as_slice(), v.as_slice());
    let mu = m.matvec(us);
    let mv = m.matvec(vs);
    let p = inner(&mu, us);
    let q = inner(&mv, vs);
    let len = (q - p).norm();
    if len <= 1e-15 * (1.0 + p.norm()) {
        return Ok(u.clone());
    }
    let omega = (q - p).conj() / len;
    let zeta = (omega * (target - p)).re.clamp(0.0, len);

    let mvu = inner(&mv, us);
    let muv = inner(&mu, vs);
    let vu = inner(vs, us);
    // ⟨Kv, u⟩ for K = (N − N*)/(2i), N = ω(M − p).
    let nvu = omega * (mvu - p * vu);
    let nuv = omega * (muv - p * vu.conj());
    let kappa = (nvu - nuv.conj()) / Complex64::new(0.0, 2.0);
    let phase = if kappa.norm() > 0.0 {
        Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_2 - kappa.arg())
    } else {
        Complex64::new(1.0, 0.0)
    };

    let value = |t: f64| {
        let (s, c) = t.sin_cos();
        let cross = phase * mvu + phase.conj() * muv;
        let num = p * c * c + q * s * s + cross * (c * s);
        let den = c * c + s * s + 2.0 * c * s * (phase * vu).re;
        omega * (num / den - p)
    };
    let (mut lo, mut hi) = (0.0f64, std::f64::consts::FRAC_PI_2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if value(mid).re < zeta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = if (value(lo).re - zeta).abs() <= (value(hi).re - zeta).abs() { lo } else { hi };
    let (s, c) = t.sin_cos();
    let x: Vec<Complex64> = us.iter().zip(vs).map(|(a, b)| a * c + phase * b * s).collect();
    UnitVector::normalize(x).map_err(Into::into)
}
