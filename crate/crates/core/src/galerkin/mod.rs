//! Galerkin compressions and the spurious-eigenvalue construction.
//!
//! A witness `x` placed in a tail window orthogonal to `U = span(V ∪ TV)`
//! makes the compression onto `V ⊕ span{x}` block upper triangular, so its
//! spectrum is `σ(T_V) ∪ {⟨Tx, x⟩}`. Sweeping the target over a region
//! manufactures pollution anywhere inside the essential numerical range.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::max_matching_distance;
use crate::essrange::{default_schedule, estimate_we, EssRangeError};
use crate::linalg::{
    compress, general_eig, inner, orthonormal_complement_basis, orthonormalize, rayleigh, ComplexMatrix, LinalgError,
    UnitVector,
};
use crate::numrange::{attain, hull_in, nr_boundary, ClipBox, ConvexRegion, NumRangeError, DEFAULT_ANGLES};
use crate::operators::{ModelKind, OperatorModel};

const GRAM_TOL: f64 = 1e-10;
/// Orthogonality required of witnesses against `V`, `TV` (and `T*V`).
pub const ORTHOGONALITY_TOL: f64 = 1e-8;
pub const TRIANGULAR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GalerkinError {
    #[error("{0}")]
    BadBasis(String),
    #[error("target {lambda} lies {distance:e} from the essential range estimate (ε = {epsilon:e})")]
    HypothesisViolated { lambda: Complex64, distance: f64, epsilon: f64 },
    #[error("no window up to index {last_start} reaches {lambda} within ε")]
    WindowExhausted { lambda: Complex64, last_start: usize },
    #[error("epsilon must be positive and finite, got {0}")]
    BadEpsilon(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    NumRange(#[from] NumRangeError),
    #[error(transparent)]
    EssRange(#[from] EssRangeError),
}

/// Orthonormal vectors in the coordinates of the index window
/// `[first, end]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    pub first: usize,
    pub end: usize,
    pub vectors: Vec<UnitVector>,
    pub label: String,
}

impl SubspaceBasis {
    pub fn new(first: usize, end: usize, vectors: Vec<UnitVector>, label: impl Into<String>) -> Result<Self, GalerkinError> {
        if end < first {
            return Err(GalerkinError::BadBasis(format!("window [{first}, {end}] is empty")));
        }
        let dim = end - first + 1;
        if let Some(v) = vectors.iter().find(|v| v.dim() != dim) {
            return Err(GalerkinError::BadBasis(format!("vector of length {} in a window of {dim}", v.dim())));
        }
        let basis = Self {
            first,
            end,
            vectors,
            label: label.into(),
        };
        let defect = basis.gram_defect();
        if defect > GRAM_TOL {
            return Err(GalerkinError::BadBasis(format!("Gram defect {defect:e}")));
        }
        Ok(basis)
    }

    /// `span{e_first, …, e_{first+dim−1}}`.
    pub fn coordinates(first: usize, dim: usize) -> Self {
        assert!(dim > 0, "empty coordinate basis");
        Self {
            first,
            end: first + dim - 1,
            vectors: (0..dim).map(|k| UnitVector::basis(dim, k)).collect(),
            label: format!("coordinates {first}..{}", first + dim - 1),
        }
    }

    /// First `n` blocks of a block model: indices `1..=2n`.
    pub fn blocks(n: usize) -> Self {
        let mut b = Self::coordinates(1, 2 * n);
        b.label = format!("V_{n} (first {n} blocks)");
        b
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn window_len(&self) -> usize {
        self.end - self.first + 1
    }

    /// Same subspace written in the larger window `[first, end]`.
    pub fn extended(&self, end: usize) -> Self {
        assert!(end >= self.end, "cannot shrink a basis window");
        let len = end - self.first + 1;
        Self {
            first: self.first,
            end,
            vectors: self.vectors.iter().map(|v| v.embed(len, 0)).collect(),
            label: self.label.clone(),
        }
    }

    /// `V ⊕ span{witness}`, written in a window covering both.
    pub fn with_witness(&self, w: &Witness) -> Self {
        let end = self.end.max(w.end());
        let mut out = self.extended(end);
        out.vectors.push(w.vector.embed(out.window_len(), w.start - self.first));
        out.label = format!("{} + witness at {}", self.label, w.start);
        out
    }

    /// Largest absolute index where some vector is nonzero.
    pub fn max_index(&self) -> Option<usize> {
        self.vectors
            .iter()
            .filter_map(|v| v.as_slice().iter().rposition(|c| *c != Complex64::new(0.0, 0.0)))
            .max()
            .map(|k| self.first + k)
    }

    pub fn gram_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((inner(a.as_slice(), b.as_slice()) - target).norm());
            }
        }
        worst
    }

    /// `T_V` for the model restricted to this window.
    pub fn compress(&self, op: &OperatorModel) -> Result<ComplexMatrix, GalerkinError> {
        Ok(compress(&op.window(self.first, self.end), &self.vectors)?)
    }
}

/// A unit vector supported on `[start, start + dim − 1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub start: usize,
    #[serde(skip)]
    pub vector: UnitVector,
}

impl Witness {
    pub fn end(&self) -> usize {
        self.start + self.vector.dim() - 1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GalerkinLevel {
    pub n: usize,
    pub dim: usize,
    #[serde(skip)]
    pub matrix: ComplexMatrix,
    pub eigenvalues: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GalerkinRun {
    pub label: String,
    pub levels: Vec<GalerkinLevel>,
}

impl GalerkinRun {
    pub fn spectra(&self) -> Vec<Vec<Complex64>> {
        self.levels.iter().map(|l| l.eigenvalues.clone()).collect()
    }

    /// CSV with columns `n, dim, eig_index, re, im`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "dim", "eig_index", "re", "im"])?;
        for level in &self.levels {
            for (k, z) in level.eigenvalues.iter().enumerate() {
                w.write_record([
                    level.n.to_string(),
                    level.dim.to_string(),
                    k.to_string(),
                    z.re.to_string(),
                    z.im.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Compressions of `op` onto each basis and their spectra. Level `n` is the
/// 1-based position in `bases`.
pub fn compress_sequence(op: &OperatorModel, bases: &[SubspaceBasis]) -> Result<GalerkinRun, GalerkinError> {
    let levels = bases
        .par_iter()
        .enumerate()
        .map(|(k, b)| {
            let matrix = b.compress(op)?;
            let eigenvalues = general_eig(&matrix, 1e-12)?.values;
            Ok(GalerkinLevel {
                n: k + 1,
                dim: b.dim(),
                matrix,
                eigenvalues,
            })
        })
        .collect::<Result<Vec<_>, GalerkinError>>()?;
    Ok(GalerkinRun {
        label: op.label().to_string(),
        levels,
    })
}

/// Tail-window search for [`inject_spurious`].
#[derive(Clone, Debug)]
pub struct WindowPolicy {
    pub width: usize,
    /// Windows never start beyond this index.
    pub cap: usize,
    pub clip: ClipBox,
    /// Accuracy asked of the numerical-range inversion.
    pub attain_tol: f64,
    /// Essential-range estimate for the hypothesis check; computed from the
    /// model's default schedule when absent.
    pub region: Option<ConvexRegion>,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        Self {
            width: 16,
            cap: 1 << 16,
            clip: ClipBox::default(),
            attain_tol: 1e-10,
            region: None,
        }
    }
}

impl WindowPolicy {
    pub fn with_region(mut self, region: ConvexRegion) -> Self {
        self.region = Some(region);
        self
    }

    /// Fills in the essential-range estimate if it is missing.
    pub fn resolved(&self, op: &OperatorModel) -> Result<Self, GalerkinError> {
        if self.region.is_some() {
            return Ok(self.clone());
        }
        let sched = default_schedule(op, self.clip)?;
        let est = estimate_we(op, &sched)?;
        Ok(self.clone().with_region(est.limit))
    }
}

/// One achieved spurious eigenvalue.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Injection {
    pub target: Complex64,
    pub mu: Complex64,
    pub witness: Witness,
    pub window: (usize, usize),
    /// `|μ − target|`.
    pub residual: f64,
    /// Largest `|⟨v, x⟩|`, `|⟨Tv, x⟩|` (and `|⟨Tx, v⟩|`) over the basis.
    pub orthogonality: f64,
    /// Whether the witness is also orthogonal to `T*V`.
    pub adjoint_variant: bool,
}

/// `U = span(V ∪ TV ∪ T*V)` in absolute coordinates from `lo`.
struct Span {
    lo: usize,
    vectors: Vec<Vec<Complex64>>,
    v_images: Vec<(Vec<Complex64>, Vec<Complex64>, Option<Vec<Complex64>>)>,
}

fn span_u(op: &OperatorModel, v: &SubspaceBasis) -> Span {
    let bw = op.bandwidth();
    let lo = v.first.saturating_sub(bw).max(op.first_index());
    let hi = v.end + bw;
    let len = hi - lo + 1;
    let big = op.window(lo, hi);
    let offset = v.first - lo;
    let mut vectors = Vec::new();
    let mut v_images = Vec::new();
    for b in &v.vectors {
        let pad = b.embed(len, offset).into_inner();
        let tv = big.matvec(&pad);
        let tsv = op.adjoint_available().then(|| big.adjoint().matvec(&pad));
        vectors.push(pad.clone());
        vectors.push(tv.clone());
        if let Some(t) = &tsv {
            vectors.push(t.clone());
        }
        v_images.push((pad, tv, tsv));
    }
    Span { lo, vectors, v_images }
}

/// Entries of `u` (absolute coordinates from `lo`) inside `[start, end]`.
fn restrict(u: &[Complex64], lo: usize, start: usize, end: usize) -> Vec<Complex64> {
    (start..=end)
        .map(|i| if i >= lo && i - lo < u.len() { u[i - lo] } else { Complex64::new(0.0, 0.0) })
        .collect()
}

/// Largest of `|⟨v, x⟩|`, `|⟨Tv, x⟩|` and, in the adjoint variant,
/// `|⟨Tx, v⟩| = |⟨x, T*v⟩|`.
fn orthogonality_defect(span: &Span, x: &Witness) -> f64 {
    let (s, e) = (x.start, x.end());
    let xs = x.vector.as_slice();
    let mut worst = 0.0f64;
    for (v, tv, tsv) in &span.v_images {
        worst = worst.max(inner(&restrict(v, span.lo, s, e), xs).norm());
        worst = worst.max(inner(&restrict(tv, span.lo, s, e), xs).norm());
        if let Some(t) = tsv {
            worst = worst.max(inner(xs, &restrict(t, span.lo, s, e)).norm());
        }
    }
    worst
}

/// Point of `W(B)` for the target: `λ` itself when inside the sampled
/// boundary polygon, else the nearest polygon point nudged slightly inward.
fn reachable_target(b: &ComplexMatrix, lambda: Complex64, epsilon: f64) -> Result<Option<Complex64>, GalerkinError> {
    let sf = nr_boundary(b, DEFAULT_ANGLES, 1e-8)?;
    let points: Vec<Complex64> = sf.boundary_points.iter().flatten().copied().collect();
    let (mut re_min, mut re_max, mut im_min, mut im_max) = (lambda.re, lambda.re, lambda.im, lambda.im);
    for p in &points {
        re_min = re_min.min(p.re);
        re_max = re_max.max(p.re);
        im_min = im_min.min(p.im);
        im_max = im_max.max(p.im);
    }
    let pad = 1.0 + (re_max - re_min).max(im_max - im_min);
    let clip = ClipBox::new(re_min - pad, re_max + pad, im_min - pad, im_max + pad);
    let poly = hull_in(&points, clip, DEFAULT_ANGLES);
    let dist = poly.distance(lambda);
    if dist <= 1e-13 * pad {
        return Ok(Some(lambda));
    }
    if dist > 0.9 * epsilon {
        return Ok(None);
    }
    let nearest = poly.nearest_point(lambda).expect("nonempty polygon");
    let centroid = points.iter().sum::<Complex64>() / points.len() as f64;
    let inward = centroid - nearest;
    let step = (0.05 * epsilon).min(0.5 * inward.norm());
    Ok(Some(if inward.norm() > 0.0 { nearest + inward / inward.norm() * step } else { nearest }))
}

/// A unit vector `x` outside `V` with `⟨Tx, x⟩ = μ`, `|μ − λ| ≤ ε`, and
/// `x ⊥ V, TV` (and `T*V` when the adjoint is available).
///
/// Windows start past the support of `V` plus twice the bandwidth and double
/// until one of them reaches `λ` or the cap is passed.
pub fn inject_spurious(
    op: &OperatorModel,
    v: &SubspaceBasis,
    lambda: Complex64,
    epsilon: f64,
    policy: &WindowPolicy,
) -> Result<Injection, GalerkinError> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(GalerkinError::BadEpsilon(epsilon));
    }
    let policy = policy.resolved(op)?;
    let region = policy.region.as_ref().expect("resolved policy has a region");
    let distance = if region.empty { f64::INFINITY } else { region.distance(lambda) };
    if distance > epsilon {
        return Err(GalerkinError::HypothesisViolated {
            lambda,
            distance,
            epsilon,
        });
    }

    let span = span_u(op, v);
    let touched = v.max_index().unwrap_or(v.first);
    let mut m = (touched + 2 * op.bandwidth() + 1).max(op.first_index());
    let width = policy.width.max(2);
    let mut last_start = m;
    while m <= policy.cap {
        last_start = m;
        let end = m + width - 1;
        if let Some(inj) = try_window(op, &span, lambda, epsilon, &policy, m, end)? {
            return Ok(inj);
        }
        m *= 2;
    }
    Err(GalerkinError::WindowExhausted { lambda, last_start })
}

fn try_window(
    op: &OperatorModel,
    span: &Span,
    lambda: Complex64,
    epsilon: f64,
    policy: &WindowPolicy,
    m: usize,
    end: usize,
) -> Result<Option<Injection>, GalerkinError> {
    let width = end - m + 1;
    let t_win = op.window(m, end);
    let restricted: Vec<Vec<Complex64>> = span.vectors.iter().map(|u| restrict(u, span.lo, m, end)).collect();
    let u_local = orthonormalize(&restricted);
    let c = if u_local.is_empty() {
        None
    } else {
        let c = orthonormal_complement_basis(&u_local, width, 1e-10);
        if c.is_empty() {
            return Ok(None);
        }
        Some(c)
    };
    let b = match &c {
        None => t_win.clone(),
        Some(c) => compress(&t_win, c)?,
    };
    let Some(target) = reachable_target(&b, lambda, epsilon)? else {
        return Ok(None);
    };
    let y = match attain(&b, target, policy.attain_tol) {
        Ok(y) => y,
        Err(NumRangeError::OutsideRange { .. } | NumRangeError::NoWitness(_)) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let x = match &c {
        None => y,
        Some(c) => {
            let mut acc = vec![Complex64::new(0.0, 0.0); width];
            for (coef, col) in y.as_slice().iter().zip(c) {
                for (a, ci) in acc.iter_mut().zip(col.as_slice()) {
                    *a += coef * ci;
                }
            }
            UnitVector::normalize(acc)?
        }
    };
    let mu = rayleigh(&t_win, &x)?;
    let witness = Witness { start: m, vector: x };
    let orthogonality = orthogonality_defect(span, &witness);
    let residual = (mu - lambda).norm();
    if orthogonality > ORTHOGONALITY_TOL || residual > epsilon {
        return Ok(None);
    }
    Ok(Some(Injection {
        target: lambda,
        mu,
        witness,
        window: (m, end),
        residual,
        orthogonality,
        adjoint_variant: op.adjoint_available(),
    }))
}

/// Targets, their disk cover and the achieved spurious eigenvalues.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InjectionPlan {
    pub targets: Vec<Complex64>,
    pub epsilon: f64,
    /// Disk centres; every target lies within `epsilon` of one.
    pub disks: Vec<Complex64>,
    pub achieved: Vec<Injection>,
}

impl InjectionPlan {
    /// Largest `|⟨x_i, x_j⟩ − δ_ij|` over the witnesses.
    pub fn witness_gram_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.achieved.iter().enumerate() {
            for (j, b) in self.achieved.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                let lo = a.witness.start.min(b.witness.start);
                let hi = a.witness.end().max(b.witness.end());
                let len = hi - lo + 1;
                let va = a.witness.vector.embed(len, a.witness.start - lo);
                let vb = b.witness.vector.embed(len, b.witness.start - lo);
                worst = worst.max((inner(va.as_slice(), vb.as_slice()) - target).norm());
            }
        }
        worst
    }
}

/// Greedy cover: each point not yet within `epsilon` of a centre becomes one.
pub fn disk_cover(points: &[Complex64], epsilon: f64) -> Vec<Complex64> {
    let mut centres: Vec<Complex64> = Vec::new();
    for &p in points {
        if !centres.iter().any(|c| (c - p).norm() < epsilon) {
            centres.push(p);
        }
    }
    centres
}

/// Result of [`fill_region`].
#[derive(Clone, Debug)]
pub struct FilledSubspace {
    pub basis: SubspaceBasis,
    pub plan: InjectionPlan,
    pub eigenvalues: Vec<Complex64>,
    /// `sup_{λ ∈ Ω} dist(λ, σ(T_H))`; zero for empty `Ω`.
    pub sup_distance: f64,
}

/// `H = V ⊕ span{x_1, …}` with one witness per disk of radius `1/n`
/// covering `omega`. Earlier witnesses join `V` before the next search, so
/// witnesses are mutually orthogonal and the compression stays triangular.
pub fn fill_region(
    op: &OperatorModel,
    v: &SubspaceBasis,
    omega: &[Complex64],
    n: usize,
    policy: &WindowPolicy,
) -> Result<FilledSubspace, GalerkinError> {
    assert!(n > 0, "n must be positive");
    let epsilon = 1.0 / n as f64;
    let disks = disk_cover(omega, epsilon);
    let policy = if disks.is_empty() { policy.clone() } else { policy.resolved(op)? };
    let mut basis = v.clone();
    let mut achieved = Vec::with_capacity(disks.len());
    for &centre in &disks {
        let inj = inject_spurious(op, &basis, centre, epsilon, &policy)?;
        basis = basis.with_witness(&inj.witness);
        achieved.push(inj);
    }
    basis.label = format!("H_{n} = {} + {} witnesses", v.label, achieved.len());
    let eigenvalues = general_eig(&basis.compress(op)?, 1e-12)?.values;
    let sup_distance = omega
        .iter()
        .map(|z| eigenvalues.iter().map(|e| (e - z).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    Ok(FilledSubspace {
        basis,
        plan: InjectionPlan {
            targets: omega.to_vec(),
            epsilon,
            disks,
            achieved,
        },
        eigenvalues,
        sup_distance,
    })
}

/// The delay example's `f_n`: coordinates `(γ̄/n, 1)/‖·‖` on block `n`,
/// written in the window `[1, 2(n + 1)]`, with `λ_n = ⟨A f_n, f_n⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct DelayVector {
    pub n: usize,
    pub vector: UnitVector,
    pub lambda: Complex64,
}

pub fn delay_fn_vector(op: &OperatorModel, gamma: Complex64, n: usize) -> Result<DelayVector, GalerkinError> {
    assert!(n >= 1, "block index starts at 1");
    if op.kind() != ModelKind::Block2x2 {
        return Err(GalerkinError::BadBasis(format!("'{}' is not a block model", op.label())));
    }
    let local = UnitVector::normalize(vec![gamma.conj() / n as f64, Complex64::new(1.0, 0.0)])?;
    let lambda = rayleigh(&op.window(2 * n - 1, 2 * n), &local)?;
    Ok(DelayVector {
        n,
        vector: local.embed(2 * (n + 1), 2 * n - 2),
        lambda,
    })
}

/// Limit of `λ_n` in the convention of [`delay_fn_vector`]:
/// `|γ|² + 1 + γ̄`.
pub fn delay_limit(gamma: Complex64) -> Complex64 {
    Complex64::new(gamma.norm_sqr() + 1.0, 0.0) + gamma.conj()
}

/// Whether the block below the leading `split.0 × split.0` corner vanishes.
pub fn verify_triangular(m: &ComplexMatrix, split: (usize, usize)) -> bool {
    let (k, r) = split;
    assert_eq!(k + r, m.rows(), "split must cover the matrix");
    (k..m.rows()).all(|i| (0..k).all(|j| m[(i, j)].norm() <= TRIANGULAR_TOL))
}

/// `σ(T_H) = σ(T_V) ∪ {μ_i}` up to the returned matching distance.
pub fn bookkeeping_defect(t_h: &[Complex64], t_v: &[Complex64], mus: &[Complex64]) -> f64 {
    let mut expected = t_v.to_vec();
    expected.extend_from_slice(mus);
    max_matching_distance(t_h, &expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{delay_operator, ex1_models};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn delay_galerkin_spectra_are_squares() {
        let a = delay_operator();
        let bases: Vec<SubspaceBasis> = (1..=6).map(SubspaceBasis::blocks).collect();
        let run = compress_sequence(&a, &bases).unwrap();
        for level in &run.levels {
            let n = level.n;
            let mut expected: Vec<Complex64> = (1..=n).map(|k| c((k * k) as f64, 0.0)).collect();
            expected.extend(std::iter::repeat_n(c(1.0, 0.0), n));
            assert!(max_matching_distance(&level.eigenvalues, &expected) < 1e-8);
            assert_eq!(level.dim, 2 * n);
        }
        let mut buf = Vec::new();
        run.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,dim,eig_index,re,im\n1,2,0,1,0\n"));
    }

    #[test]
    fn one_dimensional_basis_gives_rayleigh_quotient() {
        let a = delay_operator();
        let x = UnitVector::normalize(vec![c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.0), c(0.0, 0.0)]).unwrap();
        let b = SubspaceBasis::new(1, 4, vec![x.clone()], "x").unwrap();
        let run = compress_sequence(&a, &[b]).unwrap();
        let expected = rayleigh(&a.window(1, 4), &x).unwrap();
        assert!((run.levels[0].eigenvalues[0] - expected).norm() < 1e-14);
    }

    #[test]
    fn injection_into_delay_operator() {
        let a = delay_operator();
        let v = SubspaceBasis::blocks(10);
        let inj = inject_spurious(&a, &v, c(2.0, 0.0), 1e-3, &WindowPolicy::default()).unwrap();
        assert!(inj.residual <= 1e-3);
        assert!(inj.orthogonality <= 1e-8);
        assert_eq!(inj.window.0, 23);
        let h = v.with_witness(&inj.witness);
        let t_h = h.compress(&a).unwrap();
        assert!(verify_triangular(&t_h, (20, 1)));
        let eig_h = general_eig(&t_h, 1e-12).unwrap().values;
        let eig_v = general_eig(&v.compress(&a).unwrap(), 1e-12).unwrap().values;
        assert!(bookkeeping_defect(&eig_h, &eig_v, &[inj.mu]) <= 1e-7);

        let err = inject_spurious(&a, &v, c(-5.0, 0.0), 1e-3, &WindowPolicy::default()).unwrap_err();
        assert!(matches!(err, GalerkinError::HypothesisViolated { .. }));
    }

    #[test]
    fn selfadjoint_injection_is_real() {
        let (t, _) = ex1_models();
        let v = SubspaceBasis::coordinates(1, 4);
        let inj = inject_spurious(&t, &v, c(1.5, 0.0), 1e-3, &WindowPolicy::default()).unwrap();
        assert!(inj.mu.im.abs() < 1e-12);
        assert!((inj.mu.re - 1.5).abs() <= 1e-3);
        assert!(inj.adjoint_variant);
        let t_h = v.with_witness(&inj.witness).compress(&t).unwrap();
        assert!(t_h[(0, 4)].norm() < 1e-8 && t_h[(4, 0)].norm() < 1e-8);
    }

    #[test]
    fn exhausted_when_cap_is_too_small() {
        let a = delay_operator();
        let policy = WindowPolicy {
            cap: 30,
            ..WindowPolicy::default()
        };
        let err = inject_spurious(&a, &SubspaceBasis::blocks(10), c(20.0, 4.35), 1e-3, &policy).unwrap_err();
        assert!(matches!(err, GalerkinError::WindowExhausted { last_start: 23, .. }));
    }

    #[test]
    fn fill_region_on_delay() {
        let a = delay_operator();
        let v = SubspaceBasis::blocks(10);
        let omega = [c(2.0, 0.0), c(3.0, 1.0), c(3.0, -1.0)];
        let filled = fill_region(&a, &v, &omega, 10, &WindowPolicy::default()).unwrap();
        assert!(filled.sup_distance <= 0.2);
        assert_eq!(filled.plan.achieved.len(), 3);
        assert!(filled.plan.witness_gram_defect() <= 1e-8);
        assert_eq!(filled.basis.dim(), 23);

        let empty = fill_region(&a, &v, &[], 10, &WindowPolicy::default()).unwrap();
        assert_eq!(empty.basis.dim(), 20);
        assert_eq!(empty.sup_distance, 0.0);
    }

    #[test]
    fn delay_vectors() {
        let a = delay_operator();
        let f = delay_fn_vector(&a, c(0.0, 0.0), 7).unwrap();
        assert_eq!(f.lambda, c(1.0, 0.0));
        assert_eq!(f.vector.dim(), 16);
        assert_eq!(f.vector.as_slice()[13], c(1.0, 0.0));
        let g = delay_fn_vector(&a, c(1.0, 0.0), 10).unwrap();
        assert!((g.lambda - c(3.0 / 1.01, 0.0)).norm() < 1e-12);
        assert_eq!(delay_limit(c(0.0, 1.0)), c(2.0, -1.0));
    }

    #[test]
    fn triangular_check() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 3.0]]);
        assert!(verify_triangular(&m, (1, 1)));
        assert!(!verify_triangular(&m.adjoint(), (1, 1)));
        assert!(verify_triangular(&ComplexMatrix::identity(1), (1, 0)));
    }

    #[test]
    fn disk_cover_is_greedy() {
        let pts = [c(0.0, 0.0), c(0.05, 0.0), c(1.0, 0.0)];
        assert_eq!(disk_cover(&pts, 0.1), vec![c(0.0, 0.0), c(1.0, 0.0)]);
    }
}
