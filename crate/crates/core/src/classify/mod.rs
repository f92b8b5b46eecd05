//! Eigenvalue tracking across approximation levels and the verdict of each
//! accumulation candidate against an essential-range region.

mod matching;

use num_complex::Complex64;
use serde::Serialize;

use crate::numrange::{project, ConvexRegion};

pub use matching::hungarian as assignment;

/// Matching radius `δ₀` in `δ(λ) = δ₀(1 + |λ|)`.
pub const DEFAULT_RADIUS: f64 = 0.05;
/// Drift above `CAUCHY_TOL·(1 + |λ|)` marks a chain as a moving family.
pub const CAUCHY_TOL: f64 = 1e-3;
pub const DEFAULT_MARGIN: f64 = 1e-2;
const MIN_LEVELS: usize = 4;
const MIN_SPAN: usize = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error("tracking needs at least {MIN_LEVELS} levels, got {0}")]
    TooFewLevels(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AccumulationPoint {
    pub value: Complex64,
    /// `(level parameter, matched eigenvalue)`, oldest first.
    pub chain: Vec<(f64, Complex64)>,
    pub span: usize,
    /// Largest of the last three link increments.
    pub cauchy_rate: f64,
}

impl AccumulationPoint {
    /// Still moving between levels: an accumulating family rather than a
    /// fixed point.
    pub fn is_drifting(&self) -> bool {
        self.cauchy_rate > CAUCHY_TOL * (1.0 + self.value.norm())
    }
}

struct Chain {
    links: Vec<(f64, Complex64)>,
}

/// Nearest-neighbour chains through the levels; chains reaching the last
/// level with at least three links and non-growing increments become
/// accumulation points.
///
/// Matching is global greedy by distance, ties broken by eigenvalue order, so
/// the result is deterministic.
pub fn track(levels: &[(f64, Vec<Complex64>)], radius: f64) -> Result<Vec<AccumulationPoint>, ClassifyError> {
    if levels.len() < MIN_LEVELS {
        return Err(ClassifyError::TooFewLevels(levels.len()));
    }
    let mut live: Vec<Chain> = Vec::new();
    let mut first = true;
    for (param, values) in levels {
        let mut sorted = values.clone();
        crate::linalg::sort_lexicographic(&mut sorted);
        if first {
            live = sorted.iter().map(|&z| Chain { links: vec![(*param, z)] }).collect();
            first = false;
            continue;
        }
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (ci, chain) in live.iter().enumerate() {
            let last = chain.links.last().expect("chains are nonempty").1;
            let r = radius * (1.0 + last.norm());
            for (vi, z) in sorted.iter().enumerate() {
                let d = (z - last).norm();
                if d <= r {
                    pairs.push((d, ci, vi));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut chain_used = vec![false; live.len()];
        let mut value_used = vec![false; sorted.len()];
        let mut next: Vec<Chain> = Vec::new();
        for (_, ci, vi) in pairs {
            if chain_used[ci] || value_used[vi] {
                continue;
            }
            chain_used[ci] = true;
            value_used[vi] = true;
            let mut links = std::mem::take(&mut live[ci].links);
            links.push((*param, sorted[vi]));
            next.push(Chain { links });
        }
        for (vi, z) in sorted.iter().enumerate() {
            if !value_used[vi] {
                next.push(Chain {
                    links: vec![(*param, *z)],
                });
            }
        }
        live = next;
    }

    let mut points: Vec<AccumulationPoint> = live
        .into_iter()
        .filter(|c| c.links.len() >= MIN_SPAN)
        .filter_map(|c| {
            let k = c.links.len();
            let increments: Vec<f64> = c.links.windows(2).map(|w| (w[1].1 - w[0].1).norm()).collect();
            let tail = &increments[increments.len().saturating_sub(3)..];
            let value = c.links[k - 1].1;
            let slack = CAUCHY_TOL * (1.0 + value.norm());
            let shrinking = tail.last().copied().unwrap_or(0.0) <= tail[0] + slack;
            shrinking.then(|| AccumulationPoint {
                value,
                span: k,
                cauchy_rate: tail.iter().copied().fold(0.0, f64::max),
                chain: c.links,
            })
        })
        .collect();
    points.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    Ok(points)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "approximated-true")]
    ApproximatedTrue,
    #[serde(rename = "pollution-candidate")]
    PollutionCandidate,
    #[serde(rename = "undecided-inside-We")]
    UndecidedInsideWe,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportPoint {
    pub re: f64,
    pub im: f64,
    pub verdict: Verdict,
    pub in_region: bool,
    pub drift: f64,
    #[serde(skip)]
    pub drifting: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub points: Vec<ReportPoint>,
    pub region_ref: String,
}

/// `max_j (Re(e^{−iθ_j} z) − s_j)`: how far `z` sits outside the half-plane
/// description, independent of the clip box. `+∞` for an empty region.
pub fn support_excess(region: &ConvexRegion, z: Complex64) -> f64 {
    if region.empty {
        return f64::INFINITY;
    }
    let sf = &region.support;
    (0..sf.len())
        .map(|j| project(z, sf.direction(j)) - sf.support[j])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Outside `region + margin` ⇒ approximated-true. Inside ⇒ pollution
/// candidate when an exact list is supplied and the point is absent from it,
/// otherwise undecided.
pub fn classify(
    points: &[AccumulationPoint],
    region: &ConvexRegion,
    region_ref: impl Into<String>,
    exact: Option<&[Complex64]>,
    margin: f64,
) -> SpectralReport {
    let report = points
        .iter()
        .map(|p| {
            let z = p.value;
            let in_region = support_excess(region, z) <= margin;
            let verdict = match (in_region, exact) {
                (false, _) => Verdict::ApproximatedTrue,
                (true, Some(list)) if !list.iter().any(|e| (e - z).norm() <= margin) => Verdict::PollutionCandidate,
                (true, _) => Verdict::UndecidedInsideWe,
            };
            ReportPoint {
                re: z.re,
                im: z.im,
                verdict,
                in_region,
                drift: p.cauchy_rate,
                drifting: p.is_drifting(),
            }
        })
        .collect();
    SpectralReport {
        points: report,
        region_ref: region_ref.into(),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MatchReport {
    /// `(point index, exact index, distance)`.
    pub matched: Vec<(usize, usize, f64)>,
    pub unmatched_points: Vec<usize>,
    pub unmatched_exact: Vec<usize>,
}

impl MatchReport {
    pub fn is_full(&self) -> bool {
        self.unmatched_points.is_empty() && self.unmatched_exact.is_empty()
    }
}

fn optimal_pairs(a: &[Complex64], b: &[Complex64]) -> Vec<(usize, usize, f64)> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let swap = a.len() > b.len();
    let (rows, cols) = if swap { (b, a) } else { (a, b) };
    let cost: Vec<Vec<f64>> = rows.iter().map(|r| cols.iter().map(|c| (r - c).norm()).collect()).collect();
    assignment(&cost)
        .into_iter()
        .enumerate()
        .map(|(i, j)| if swap { (j, i, cost[i][j]) } else { (i, j, cost[i][j]) })
        .collect()
}

/// Minimal-cost assignment of points to exact values; pairs farther apart
/// than `tol` count as unmatched on both sides.
pub fn compare_exact(points: &[Complex64], exact: &[Complex64], tol: f64) -> MatchReport {
    let mut report = MatchReport::default();
    let mut point_hit = vec![false; points.len()];
    let mut exact_hit = vec![false; exact.len()];
    let mut pairs = optimal_pairs(points, exact);
    pairs.sort_by_key(|p| p.0);
    for (i, j, d) in pairs {
        if d <= tol {
            point_hit[i] = true;
            exact_hit[j] = true;
            report.matched.push((i, j, d));
        }
    }
    report.unmatched_points = (0..points.len()).filter(|&i| !point_hit[i]).collect();
    report.unmatched_exact = (0..exact.len()).filter(|&j| !exact_hit[j]).collect();
    report
}

/// Largest pair distance in an optimal matching of two multisets; `+∞`
/// when their sizes differ.
pub fn max_matching_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    optimal_pairs(a, b).into_iter().map(|p| p.2).fold(0.0, f64::max)
}
