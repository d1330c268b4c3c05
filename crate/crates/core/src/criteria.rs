//! Separability detectors with a uniform result type.
//!
//! Every detector reports a norm value, the bound a separable state must
//! respect and the margin between them, so that threshold searches can work
//! with a continuous quantity instead of a boolean.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmat::{
    kron, matrix_purity, min_hermitian_eigenvalue, partial_trace, partial_transpose_cut,
    trace_norm, DensityMatrix, Keep,
};
use crate::realign::{self, pair_map_norm, MapOptions, PairMapKind};

pub use crate::realign::{CriterionParams, GSpec};

/// Margin a detector must exceed before it reports entanglement.
pub const DEFAULT_DETECT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CriterionId {
    #[serde(rename = "ccnr")]
    Ccnr,
    #[serde(rename = "thm21")]
    Theorem21,
    #[serde(rename = "zr")]
    Zr,
    #[serde(rename = "ppt")]
    Ppt,
    #[serde(rename = "hr")]
    Hr,
    #[serde(rename = "thm31")]
    Theorem31,
}

impl CriterionId {
    pub fn as_str(self) -> &'static str {
        match self {
            CriterionId::Ccnr => "ccnr",
            CriterionId::Theorem21 => "thm21",
            CriterionId::Zr => "zr",
            CriterionId::Ppt => "ppt",
            CriterionId::Hr => "hr",
            CriterionId::Theorem31 => "thm31",
        }
    }
}

impl std::fmt::Display for CriterionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A contiguous bipartition: subsystems `0..k` against `k..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Cut(pub usize);

impl Default for Cut {
    fn default() -> Self {
        Cut(1)
    }
}

impl Cut {
    /// `(d_A, d_B)` of the two sides.
    pub fn split(self, dims: &[usize]) -> Result<(usize, usize)> {
        let k = self.0;
        if k == 0 || k >= dims.len() {
            return Err(Error::InvalidParameter(format!(
                "cut after subsystem {k} is not a bipartition of {} subsystems",
                dims.len()
            )));
        }
        Ok((dims[..k].iter().product(), dims[k..].iter().product()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    pub criterion: CriterionId,
    pub norm_value: f64,
    pub bound: f64,
    /// `norm_value - bound`; the augmented criteria measure it against
    /// `bound · Tr(ρ)` instead, which agrees on unit-trace input.
    pub margin: f64,
    pub detected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<CriterionParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cut: Option<usize>,
    pub detect_tol: f64,
}

impl CriterionResult {
    fn new(criterion: CriterionId, norm_value: f64, bound: f64, margin: f64, tol: f64) -> Self {
        CriterionResult {
            criterion,
            norm_value,
            bound,
            margin,
            detected: margin > tol,
            params: None,
            pair: None,
            cut: None,
            detect_tol: tol,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EvalOptions {
    pub detect_tol: f64,
    pub map: MapOptions,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            detect_tol: DEFAULT_DETECT_TOL,
            map: MapOptions::default(),
        }
    }
}

/// `ρ` regrouped as a two-party state across `cut`.
fn bipartite(rho: &DensityMatrix, cut: Cut) -> Result<(DensityMatrix, usize, usize)> {
    let (da, db) = cut.split(rho.dims())?;
    Ok((rho.with_dims(vec![da, db])?, da, db))
}

/// CCNR: `‖R(ρ)‖_tr ≤ 1` for separable `ρ`.
pub fn ccnr(rho: &DensityMatrix, cut: Cut) -> Result<CriterionResult> {
    ccnr_with(rho, cut, &EvalOptions::default())
}

pub fn ccnr_with(rho: &DensityMatrix, cut: Cut, opts: &EvalOptions) -> Result<CriterionResult> {
    let (da, db) = cut.split(rho.dims())?;
    let norm = trace_norm(&realign::realign(rho.mat(), da, db)?)?;
    let mut res = CriterionResult::new(CriterionId::Ccnr, norm, 1.0, norm - 1.0, opts.detect_tol);
    res.cut = Some(cut.0);
    Ok(res)
}

/// Augmented realignment: `‖N‖_tr ≤ 1 + Tr(G)` for separable `ρ`, provided
/// `G - α² E ⪰ 0`.
pub fn theorem21(
    rho: &DensityMatrix,
    cut: Cut,
    params: &CriterionParams,
) -> Result<CriterionResult> {
    theorem21_with(rho, cut, params, &EvalOptions::default())
}

pub fn theorem21_with(
    rho: &DensityMatrix,
    cut: Cut,
    params: &CriterionParams,
    opts: &EvalOptions,
) -> Result<CriterionResult> {
    let (bi, _, _) = bipartite(rho, cut)?;
    let kind = PairMapKind::Augmented(params.clone());
    let report = pair_map_norm(&bi, (0, 1), &kind, &opts.map)?;
    let mut res = CriterionResult::new(
        CriterionId::Theorem21,
        report.norm,
        report.bound,
        report.excess,
        opts.detect_tol,
    );
    res.params = Some(params.clone());
    res.cut = Some(cut.0);
    Ok(res)
}

/// Closed-form choices of `G`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Corollary {
    /// `G = ℓα² I_ℓ`, bound `1 + ℓ²α²`.
    ScaledIdentity,
    /// `G = α² E_{ℓxℓ}`, bound `1 + ℓα²`.
    ScaledOnes,
}

pub fn corollary_preset(variant: Corollary, alpha: f64, ell: usize) -> Result<CriterionParams> {
    let g = match variant {
        Corollary::ScaledIdentity => GSpec::ScaledIdentity,
        Corollary::ScaledOnes => GSpec::ScaledOnes,
    };
    CriterionParams::new(alpha, ell, g)
}

/// Z-R: `‖R(ρ - ρ_A ⊗ ρ_B)‖_tr ≤ sqrt((1 - Tr ρ_A²)(1 - Tr ρ_B²))`.
pub fn zr(rho: &DensityMatrix, cut: Cut) -> Result<CriterionResult> {
    zr_with(rho, cut, &EvalOptions::default())
}

pub fn zr_with(rho: &DensityMatrix, cut: Cut, opts: &EvalOptions) -> Result<CriterionResult> {
    let (da, db) = cut.split(rho.dims())?;
    let ra = partial_trace(rho.mat(), [da, db], Keep::A)?;
    let rb = partial_trace(rho.mat(), [da, db], Keep::B)?;
    let centered = rho.mat() - &kron(&ra, &rb);
    let norm = trace_norm(&realign::realign(&centered, da, db)?)?;
    let bound = ((1.0 - matrix_purity(&ra)) * (1.0 - matrix_purity(&rb)))
        .max(0.0)
        .sqrt();
    let mut res = CriterionResult::new(CriterionId::Zr, norm, bound, norm - bound, opts.detect_tol);
    res.cut = Some(cut.0);
    Ok(res)
}

/// PPT: the partial transpose of a separable state is PSD.
///
/// The norm value is the negated smallest eigenvalue of `ρ^{T_B}`, clamped
/// at zero, so the margin is positive exactly when an eigenvalue is negative.
pub fn ppt(rho: &DensityMatrix, cut: Cut) -> Result<CriterionResult> {
    ppt_with(rho, cut, &EvalOptions::default())
}

pub fn ppt_with(rho: &DensityMatrix, cut: Cut, opts: &EvalOptions) -> Result<CriterionResult> {
    let (da, db) = cut.split(rho.dims())?;
    let min = min_hermitian_eigenvalue(&partial_transpose_cut(rho.mat(), da, db)?)?;
    let neg = (-min).max(0.0);
    let mut res = CriterionResult::new(CriterionId::Ppt, neg, 0.0, neg, opts.detect_tol);
    res.cut = Some(cut.0);
    Ok(res)
}

/// Pair-map criterion on an n-partite state: `‖Λ ⊗ I(ρ)‖_tr ≤ 1`.
///
/// With [`PairMapKind::Realign`] this is the H-R criterion. With
/// [`PairMapKind::Augmented`] the map is normalized by `1 + Tr(G)`, so the
/// bound is again 1; the margin is computed on the unnormalized scale and
/// rescaled, and `detect_tol` is rescaled the same way.
pub fn multipartite_eval(
    rho: &DensityMatrix,
    pair: (usize, usize),
    kind: &PairMapKind,
) -> Result<CriterionResult> {
    multipartite_eval_with(rho, pair, kind, &EvalOptions::default())
}

pub fn multipartite_eval_with(
    rho: &DensityMatrix,
    pair: (usize, usize),
    kind: &PairMapKind,
    opts: &EvalOptions,
) -> Result<CriterionResult> {
    let report = pair_map_norm(rho, pair, kind, &opts.map)?;
    let mut res = match kind {
        PairMapKind::Realign => CriterionResult::new(
            CriterionId::Hr,
            report.norm,
            1.0,
            report.excess,
            opts.detect_tol,
        ),
        PairMapKind::Augmented(params) => {
            let s = report.bound;
            let mut r = CriterionResult::new(
                CriterionId::Theorem31,
                report.norm / s,
                1.0,
                report.excess / s,
                opts.detect_tol / s,
            );
            r.params = Some(params.clone());
            r
        }
    };
    res.pair = Some(pair);
    Ok(res)
}

/// Evaluates every ordered pair and returns the result with the largest
/// margin (ties go to the first pair in lexicographic order).
pub fn multipartite_all_pairs(
    rho: &DensityMatrix,
    kind: &PairMapKind,
    opts: &EvalOptions,
) -> Result<CriterionResult> {
    let n = rho.parties();
    let mut best: Option<CriterionResult> = None;
    for a in 0..n {
        for b in (0..n).filter(|&b| b != a) {
            let r = multipartite_eval_with(rho, (a, b), kind, opts)?;
            if best.as_ref().is_none_or(|x| r.margin > x.margin) {
                best = Some(r);
            }
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("pair maps need at least two subsystems".into()))
}
