//! Structured infinite operators, queried through finite windows.

mod diffop;
mod zoo;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::ComplexMatrix;

pub use diffop::{
    advdiff_constant, advdiff_gaussian, advection_diffusion, airy_witness, symbol_eval, AiryWitness, CoefFn, DiffOp1D,
    SymbolSpec,
};
pub use zoo::{
    delay_operator, diag_alternating, diagonal_linear, ellipse_block, ex1_models, ex2_models, free_jacobi,
    toeplitz_tridiagonal,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OperatorError {
    #[error("coefficient {name} at x = {x} is {value}, declared limit is {limit}")]
    LimitMismatch {
        name: &'static str,
        x: f64,
        value: Complex64,
        limit: Complex64,
    },
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("Re λ must be positive, got {0}")]
    NonPositiveReal(Complex64),
    #[error("model '{0}' has no 2x2 block structure")]
    NotBlockModel(String),
    #[error("window [{start}, {end}] is invalid for a model indexed from {first}")]
    BadWindow { start: usize, end: usize, first: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Banded,
    Block2x2,
    Diagonal,
    Diffop1d,
}

pub type EntryRule = Arc<dyn Fn(usize, usize) -> Complex64 + Send + Sync>;

/// Infinite matrix given by an entry rule with finite bandwidth.
///
/// Block models place block `n ≥ 1` on the flat indices `(2n−1, 2n)`.
#[derive(Clone)]
pub struct OperatorModel {
    kind: ModelKind,
    label: String,
    rule: EntryRule,
    bandwidth: usize,
    first_index: usize,
    adjoint_available: bool,
    patches: BTreeMap<(usize, usize), Complex64>,
}

impl fmt::Debug for OperatorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorModel")
            .field("kind", &self.kind)
            .field("label", &self.label)
            .field("bandwidth", &self.bandwidth)
            .field("first_index", &self.first_index)
            .field("adjoint_available", &self.adjoint_available)
            .field("patches", &self.patches.len())
            .finish()
    }
}

impl OperatorModel {
    pub fn new(
        kind: ModelKind,
        label: impl Into<String>,
        bandwidth: usize,
        first_index: usize,
        adjoint_available: bool,
        rule: impl Fn(usize, usize) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            kind,
            label: label.into(),
            rule: Arc::new(rule),
            bandwidth,
            first_index,
            adjoint_available,
            patches: BTreeMap::new(),
        }
    }

    /// Block model from a rule `n ↦ 2×2 block`, `n ≥ 1`.
    pub fn from_blocks(
        label: impl Into<String>,
        adjoint_available: bool,
        block: impl Fn(usize) -> [[Complex64; 2]; 2] + Send + Sync + 'static,
    ) -> Self {
        Self::new(ModelKind::Block2x2, label, 1, 1, adjoint_available, move |i, j| {
            let (bi, bj) = (i.div_ceil(2), j.div_ceil(2));
            if bi != bj {
                return Complex64::new(0.0, 0.0);
            }
            let base = 2 * bi - 1;
            block(bi)[i - base][j - base]
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Smallest valid index: 1 for most models, 0 for `diag_alternating`.
    pub fn first_index(&self) -> usize {
        self.first_index
    }

    /// Whether `dom(T) ⊂ dom(T*)`, so that adjoint windows are meaningful
    /// for the injection construction.
    pub fn adjoint_available(&self) -> bool {
        self.adjoint_available
    }

    pub fn patches(&self) -> &BTreeMap<(usize, usize), Complex64> {
        &self.patches
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        if let Some(&v) = self.patches.get(&(i, j)) {
            return v;
        }
        if i.abs_diff(j) > self.bandwidth || i < self.first_index || j < self.first_index {
            return Complex64::new(0.0, 0.0);
        }
        (self.rule)(i, j)
    }

    /// Compression to `span{e_start, …, e_end}` (inclusive).
    pub fn window(&self, start: usize, end: usize) -> ComplexMatrix {
        assert!(
            start >= self.first_index && start <= end,
            "window [{start}, {end}] invalid for first index {}",
            self.first_index
        );
        let n = end - start + 1;
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            let lo = i.saturating_sub(self.bandwidth);
            let hi = (i + self.bandwidth).min(n - 1);
            for j in lo..=hi {
                m[(i, j)] = (self.rule)(start + i, start + j);
            }
        }
        for (&(i, j), &v) in self.patches.range((start, 0)..=(end, usize::MAX)) {
            if j >= start && j <= end {
                m[(i - start, j - start)] = v;
            }
        }
        m
    }

    /// Window of the adjoint: the conjugate transpose of [`Self::window`].
    pub fn adjoint_window(&self, start: usize, end: usize) -> ComplexMatrix {
        self.window(start, end).adjoint()
    }

    /// Block `n` of a block model.
    pub fn block(&self, n: usize) -> Result<ComplexMatrix, OperatorError> {
        if self.kind != ModelKind::Block2x2 {
            return Err(OperatorError::NotBlockModel(self.label.clone()));
        }
        Ok(self.window(2 * n - 1, 2 * n))
    }

    /// Window spanning whole blocks `first..=last`.
    pub fn block_window(&self, first: usize, last: usize) -> Result<ComplexMatrix, OperatorError> {
        if self.kind != ModelKind::Block2x2 {
            return Err(OperatorError::NotBlockModel(self.label.clone()));
        }
        Ok(self.window(2 * first - 1, 2 * last))
    }

    /// Entrywise sum of two models.
    pub fn plus(&self, other: &OperatorModel, label: impl Into<String>) -> OperatorModel {
        let kind = if self.kind == other.kind { self.kind } else { ModelKind::Banded };
        let (a, b) = (self.clone(), other.clone());
        OperatorModel::new(
            kind,
            label,
            self.bandwidth.max(other.bandwidth),
            self.first_index.min(other.first_index),
            self.adjoint_available && other.adjoint_available,
            move |i, j| a.entry(i, j) + b.entry(i, j),
        )
    }

    /// Copy with individual entries overwritten; the bandwidth grows to cover
    /// the patches.
    pub fn with_patches(&self, patches: &[(usize, usize, Complex64)]) -> OperatorModel {
        let mut out = self.clone();
        for &(i, j, v) in patches {
            out.bandwidth = out.bandwidth.max(i.abs_diff(j));
            out.patches.insert((i, j), v);
        }
        out
    }

    /// Largest row or column index touched by a patch.
    pub fn patch_extent(&self) -> Option<usize> {
        self.patches.keys().map(|&(i, j)| i.max(j)).max()
    }
}

/// Model description for files and the command line:
/// `{"kind": "...", "params": {...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    DiagAlternating {},
    Ex1T {},
    Ex1S {},
    Ex1Sum {},
    Ex2T {},
    Ex2S {},
    Delay {},
    FreeJacobi {},
    DiagonalLinear {},
    /// Block `[[1, 0], [n, n²]]` as a standalone 2×2 matrix.
    EllipseBlock { n: usize },
    Toeplitz { sub: [f64; 2], diag: [f64; 2], sup: [f64; 2] },
}

impl ModelSpec {
    /// Builds the infinite model; `EllipseBlock` has none.
    pub fn build(&self) -> Option<OperatorModel> {
        let c = |[re, im]: [f64; 2]| Complex64::new(re, im);
        Some(match *self {
            ModelSpec::DiagAlternating {} => diag_alternating(),
            ModelSpec::Ex1T {} => ex1_models().0,
            ModelSpec::Ex1S {} => ex1_models().1,
            ModelSpec::Ex1Sum {} => {
                let (t, s) = ex1_models();
                t.plus(&s, "ex1 T+S")
            }
            ModelSpec::Ex2T {} => ex2_models().0,
            ModelSpec::Ex2S {} => ex2_models().1,
            ModelSpec::Delay {} => delay_operator(),
            ModelSpec::FreeJacobi {} => free_jacobi(),
            ModelSpec::DiagonalLinear {} => diagonal_linear(),
            ModelSpec::Toeplitz { sub, diag, sup } => toeplitz_tridiagonal(c(sub), c(diag), c(sup)),
            ModelSpec::EllipseBlock { .. } => return None,
        })
    }

    /// A finite matrix for `numrange`: the ellipse block itself, or the
    /// first `dim` rows and columns of an infinite model.
    pub fn matrix(&self, dim: usize) -> ComplexMatrix {
        match *self {
            ModelSpec::EllipseBlock { n } => ellipse_block(n),
            _ => {
                let model = self.build().expect("infinite model");
                let start = model.first_index();
                model.window(start, start + dim - 1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_round_trip() {
        let spec = ModelSpec::Delay {};
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"kind":"delay","params":{}}"#);
        assert_eq!(serde_json::from_str::<ModelSpec>(&text).unwrap(), spec);
        let e: ModelSpec = serde_json::from_str(r#"{"kind":"ellipse-block","params":{"n":2}}"#).unwrap();
        assert_eq!(e, ModelSpec::EllipseBlock { n: 2 });
        assert!(serde_json::from_str::<ModelSpec>(r#"{"kind":"nope","params":{}}"#).is_err());
    }

    #[test]
    fn window_consistency_and_adjoint() {
        let a = delay_operator();
        let big = a.window(1, 12);
        let small = a.window(3, 8);
        assert_eq!(small, big.principal_submatrix(2, 8));
        assert_eq!(a.adjoint_window(3, 8), small.adjoint());
    }

    #[test]
    fn patches_override_and_widen() {
        let (t, _) = ex1_models();
        let p = t.with_patches(&[(1, 7, Complex64::new(5.0, 0.0))]);
        assert_eq!(p.bandwidth(), 6);
        assert_eq!(p.entry(1, 7), Complex64::new(5.0, 0.0));
        assert_eq!(p.window(1, 8)[(0, 6)], Complex64::new(5.0, 0.0));
        assert_eq!(p.window(3, 10), t.window(3, 10));
        assert_eq!(p.patch_extent(), Some(7));
    }
}
