use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{project, NumRangeError, SupportFunction, DEFAULT_ANGLES};

/// Axis-aligned box `[re_min, re_max] × [im_min, im_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct ClipBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl From<[f64; 4]> for ClipBox {
    fn from([re_min, re_max, im_min, im_max]: [f64; 4]) -> Self {
        Self::new(re_min, re_max, im_min, im_max)
    }
}

impl From<ClipBox> for [f64; 4] {
    fn from(b: ClipBox) -> Self {
        [b.re_min, b.re_max, b.im_min, b.im_max]
    }
}

impl Default for ClipBox {
    fn default() -> Self {
        Self::new(-100.0, 100.0, -100.0, 100.0)
    }
}

impl ClipBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        assert!(re_min <= re_max && im_min <= im_max, "inverted clip box");
        Self {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        z.re >= self.re_min - tol && z.re <= self.re_max + tol && z.im >= self.im_min - tol && z.im <= self.im_max + tol
    }

    /// Corners in counterclockwise order.
    pub fn corners(&self) -> Vec<Complex64> {
        vec![
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    fn scale(&self) -> f64 {
        1.0 + self.re_min.abs().max(self.re_max.abs()).max(self.im_min.abs()).max(self.im_max.abs())
    }
}

/// Closed convex set: half-plane description from a support function,
/// realized as a polygon inside a clip box.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexRegion {
    pub support: SupportFunction,
    pub clip: ClipBox,
    /// Counterclockwise vertices of the clipped polygon (possibly degenerate).
    pub vertices: Vec<Complex64>,
    pub empty: bool,
}

/// One half-plane cut `{z : project(z, d) ≤ s}` of a convex polygon.
fn clip_half_plane(poly: &[Complex64], d: (f64, f64), s: f64, slack: f64) -> Vec<Complex64> {
    let n = poly.len();
    if n == 0 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let fp = project(p, d) - s;
        let fq = project(q, d) - s;
        let p_in = fp <= slack;
        let q_in = fq <= slack;
        if p_in {
            out.push(p);
        }
        if p_in != q_in {
            let t = (fp / (fp - fq)).clamp(0.0, 1.0);
            out.push(p + (q - p) * t);
        }
    }
    out
}

fn dedupe(poly: Vec<Complex64>, eps: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::with_capacity(poly.len());
    for p in poly {
        if out.last().is_none_or(|q: &Complex64| (p - q).norm() > eps) {
            out.push(p);
        }
    }
    while out.len() > 1 && (out[0] - out[out.len() - 1]).norm() <= eps {
        out.pop();
    }
    out
}

/// Clips the box by every finite support half-plane.
pub(super) fn polygon_from_support(sf: &SupportFunction, clip: &ClipBox) -> Vec<Complex64> {
    let scale = clip.scale();
    let slack = 1e-12 * scale;
    let mut poly = clip.corners();
    for (j, &s) in sf.support.iter().enumerate() {
        if s.is_finite() {
            poly = clip_half_plane(&poly, sf.direction(j), s, slack);
            if poly.is_empty() {
                break;
            }
        } else if s == f64::NEG_INFINITY {
            return Vec::new();
        }
    }
    dedupe(poly, 1e-13 * scale)
}

impl ConvexRegion {
    pub fn from_support(support: SupportFunction, clip: ClipBox) -> Self {
        let vertices = polygon_from_support(&support, &clip);
        Self {
            empty: vertices.is_empty(),
            support,
            clip,
            vertices,
        }
    }

    /// The empty region on an `n`-angle grid.
    pub fn empty(n: usize, clip: ClipBox) -> Self {
        Self {
            support: SupportFunction::from_values(vec![f64::NEG_INFINITY; n]),
            clip,
            vertices: Vec::new(),
            empty: true,
        }
    }

    /// `Re(e^{-iθ_j} z) ≤ s_j + tol` for every `j`, and `z` in the clip box.
    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        if self.empty || !self.clip.contains(z, tol) {
            return false;
        }
        self.support
            .support
            .iter()
            .enumerate()
            .all(|(j, &s)| project(z, self.support.direction(j)) <= s + tol)
    }

    /// Re-clips the half-plane description to another box.
    pub fn reclip(&self, clip: ClipBox) -> Self {
        Self::from_support(self.support.clone(), clip)
    }

    /// Hull of the union of regions sharing an angle grid.
    pub fn hull_of(regions: &[&ConvexRegion], clip: ClipBox) -> Result<Self, NumRangeError> {
        // Regions clipped away still carry their supports, so the hull can
        // re-enter the box; truly empty sets carry −∞ and drop out.
        if regions.is_empty() {
            return Ok(Self::empty(DEFAULT_ANGLES, clip));
        }
        let parts: Vec<&SupportFunction> = regions.iter().map(|r| &r.support).collect();
        Ok(Self::from_support(SupportFunction::hull_union(&parts)?, clip))
    }

    /// Intersection of regions sharing an angle grid.
    pub fn intersection_of(regions: &[&ConvexRegion], clip: ClipBox) -> Result<Self, NumRangeError> {
        if regions.is_empty() {
            return Ok(Self::from_support(SupportFunction::unbounded(DEFAULT_ANGLES), clip));
        }
        let parts: Vec<&SupportFunction> = regions.iter().map(|r| &r.support).collect();
        Ok(Self::from_support(SupportFunction::intersection(&parts)?, clip))
    }

    /// Smallest and largest real part over the polygon.
    pub fn re_extent(&self) -> Option<(f64, f64)> {
        if self.empty {
            return None;
        }
        let lo = self.vertices.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
        let hi = self.vertices.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
        Some((lo, hi))
    }

    pub fn im_extent(&self) -> Option<(f64, f64)> {
        if self.empty {
            return None;
        }
        let lo = self.vertices.iter().map(|v| v.im).fold(f64::INFINITY, f64::min);
        let hi = self.vertices.iter().map(|v| v.im).fold(f64::NEG_INFINITY, f64::max);
        Some((lo, hi))
    }

    /// Point of the polygon closest to `z`; `z` itself when inside.
    pub fn nearest_point(&self, z: Complex64) -> Option<Complex64> {
        let poly = &self.vertices;
        if self.empty || poly.is_empty() {
            return None;
        }
        if point_polygon_distance(z, poly) == 0.0 {
            return Some(z);
        }
        let n = poly.len();
        (0..n)
            .map(|i| closest_on_segment(z, poly[i], poly[(i + 1) % n]))
            .min_by(|p, q| (z - p).norm().total_cmp(&(z - q).norm()))
    }

    /// Euclidean distance from `z` to the polygon.
    pub fn distance(&self, z: Complex64) -> f64 {
        point_polygon_distance(z, &self.vertices)
    }
}

/// Wire format: `{"angles","support","clip","vertices","empty"}` with
/// unbounded support values written as `null`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionRepr {
    angles: Vec<f64>,
    support: Vec<Option<f64>>,
    clip: ClipBox,
    vertices: Vec<[f64; 2]>,
    empty: bool,
}

impl Serialize for ConvexRegion {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RegionRepr {
            angles: self.support.angles.clone(),
            support: self
                .support
                .support
                .iter()
                .map(|&s| if s == f64::INFINITY { None } else { Some(s) })
                .collect(),
            clip: self.clip,
            vertices: self.vertices.iter().map(|v| [v.re, v.im]).collect(),
            empty: self.empty,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ConvexRegion {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = RegionRepr::deserialize(deserializer)?;
        if repr.angles.len() != repr.support.len() {
            return Err(serde::de::Error::custom("angles and support differ in length"));
        }
        // Empty regions carry -∞ supports, which JSON also writes as null.
        let missing = if repr.empty { f64::NEG_INFINITY } else { f64::INFINITY };
        let mut support =
            SupportFunction::from_values(repr.support.into_iter().map(|s| s.unwrap_or(missing)).collect());
        support.angles = repr.angles;
        Ok(Self {
            support,
            clip: repr.clip,
            vertices: repr.vertices.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
            empty: repr.empty,
        })
    }
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Andrew's monotone chain; collinear points are dropped.
pub(crate) fn convex_hull(points: &[Complex64]) -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Complex64> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Complex64> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn clip_polygon_to_box(poly: &[Complex64], clip: &ClipBox) -> Vec<Complex64> {
    let slack = 1e-12 * clip.scale();
    let mut p = poly.to_vec();
    if p.len() == 2 {
        // Segment: clip as a two-sided polygon, then collapse duplicates.
        p = vec![p[0], p[1], p[0]];
    }
    p = clip_half_plane(&p, (1.0, 0.0), clip.re_max, slack);
    p = clip_half_plane(&p, (-1.0, 0.0), -clip.re_min, slack);
    p = clip_half_plane(&p, (0.0, 1.0), clip.im_max, slack);
    p = clip_half_plane(&p, (0.0, -1.0), -clip.im_min, slack);
    dedupe(p, 1e-13 * clip.scale())
}

/// Convex hull of finitely many points in the default box and grid.
pub fn hull(points: &[Complex64]) -> ConvexRegion {
    hull_in(points, ClipBox::default(), DEFAULT_ANGLES)
}

/// Convex hull of finitely many points: exact polygon, sampled support.
pub fn hull_in(points: &[Complex64], clip: ClipBox, n_angles: usize) -> ConvexRegion {
    assert!(!points.is_empty(), "hull of an empty point set");
    assert!(points.iter().all(|p| p.re.is_finite() && p.im.is_finite()), "non-finite point");
    let poly = convex_hull(points);
    let vertices = if poly.len() == 1 {
        if clip.contains(poly[0], 0.0) { poly } else { Vec::new() }
    } else {
        clip_polygon_to_box(&poly, &clip)
    };
    ConvexRegion {
        support: SupportFunction::from_points(points, n_angles),
        clip,
        empty: vertices.is_empty(),
        vertices,
    }
}

fn closest_on_segment(z: Complex64, a: Complex64, b: Complex64) -> Complex64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return a;
    }
    let t = (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    a + ab * t
}

fn point_segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    (z - closest_on_segment(z, a, b)).norm()
}

fn polygon_area2(poly: &[Complex64]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| cross(Complex64::new(0.0, 0.0), poly[i], poly[(i + 1) % n])).sum()
}

pub(crate) fn polygon_contains(poly: &[Complex64], z: Complex64, eps: f64) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    (0..n).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let len = (b - a).norm();
        len == 0.0 || cross(a, b, z) / len >= -eps
    })
}

pub(crate) fn point_polygon_distance(z: Complex64, poly: &[Complex64]) -> f64 {
    match poly.len() {
        0 => f64::INFINITY,
        1 => (z - poly[0]).norm(),
        n => {
            let scale = poly.iter().map(|p| p.norm()).fold(1.0, f64::max);
            if polygon_area2(poly).abs() > 1e-14 * scale * scale && polygon_contains(poly, z, 0.0) {
                return 0.0;
            }
            (0..n)
                .map(|i| point_segment_distance(z, poly[i], poly[(i + 1) % n]))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

/// Symmetric Hausdorff distance between two regions after clipping both to
/// `clip`. Vertex maximization is exact for convex polygons.
pub fn hausdorff_clipped(a: &ConvexRegion, b: &ConvexRegion, clip: ClipBox) -> Result<f64, NumRangeError> {
    let pa = clip_polygon_to_box(&a.vertices, &clip);
    let pb = clip_polygon_to_box(&b.vertices, &clip);
    if a.empty || b.empty || pa.is_empty() || pb.is_empty() {
        return Err(NumRangeError::EmptyRegion);
    }
    let directed = |from: &[Complex64], to: &[Complex64]| {
        from.iter().map(|&p| point_polygon_distance(p, to)).fold(0.0, f64::max)
    };
    Ok(directed(&pa, &pb).max(directed(&pb, &pa)))
}
