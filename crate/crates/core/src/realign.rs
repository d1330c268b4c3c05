//! The realignment operator and the augmented realignment matrix.
//!
//! For a square `Y` of dimension `d_A d_B` made of `d_B x d_B` blocks
//! `Y_{i,j}`, the realignment `R(Y)` is the `d_A² x d_B²` matrix whose rows
//! are `vec(Y_{i,j})^T` taken with `i` running fastest. With column-stacking
//! `vec`, this gives `R(A ⊗ B) = vec(A) vec(B)^T`.
//!
//! The augmented matrix puts a Hermitian `ℓ x ℓ` block `G` in the corner and
//! `ℓ` copies of the vectorized reduced matrices on the borders:
//!
//! ```text
//!   [ Tr(X) G          α ω_ℓ(X_B)^T ]
//!   [ α ω_ℓ(X_A)       R(X)         ]
//! ```
//!
//! For any product state with `G - α² E ⪰ 0` its trace norm is exactly
//! `1 + Tr(G)`, so a larger value certifies entanglement.

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::qmat::{
    self, min_hermitian_eigenvalue, partial_trace, permute_matrix, real, trace_norm, CMatrix,
    DensityMatrix, Keep,
};

/// Upper bound on `ℓ` accepted by [`CriterionParams::new`].
pub const MAX_ELL: usize = 10_000;
/// Default cap on the side length of a materialized pair-map output.
pub const DEFAULT_DIM_CAP: usize = 4096;
/// `G - α² E` counts as PSD when its smallest eigenvalue is at least `-G_PSD_TOL`.
pub const G_PSD_TOL: f64 = 1e-10;
/// Entrywise Hermiticity tolerance for an explicit `G`.
pub const G_HERMITIAN_TOL: f64 = 1e-12;

/// `R(Y)` for `Y` of dimension `d_A d_B`.
pub fn realign(y: &CMatrix, da: usize, db: usize) -> Result<CMatrix> {
    check_bipartite(y, da, db)?;
    Ok(CMatrix::from_fn(da * da, db * db, |r, c| {
        let (j, i) = (r / da, r % da);
        let (l, k) = (c / db, c % db);
        y[(i * db + k, j * db + l)]
    }))
}

/// Inverse of [`realign`].
pub fn unrealign(r: &CMatrix, da: usize, db: usize) -> Result<CMatrix> {
    if r.rows() != da * da || r.cols() != db * db {
        return Err(Error::DimensionMismatch(format!(
            "realigned matrix must be {}x{}, got {}x{}",
            da * da,
            db * db,
            r.rows(),
            r.cols()
        )));
    }
    Ok(CMatrix::from_fn(da * db, da * db, |row, col| {
        let (i, k) = (row / db, row % db);
        let (j, l) = (col / db, col % db);
        r[(j * da + i, l * db + k)]
    }))
}

/// `ℓ` copies of `vec(x)` side by side.
pub fn omega(x: &CMatrix, ell: usize) -> Result<CMatrix> {
    if ell == 0 {
        return Err(Error::InvalidParameter("ℓ must be positive".into()));
    }
    let v = qmat::vec(x);
    Ok(CMatrix::from_fn(v.rows(), ell, |i, _| v[(i, 0)]))
}

fn check_bipartite(y: &CMatrix, da: usize, db: usize) -> Result<()> {
    if da == 0 || db == 0 || !y.is_square() || y.rows() != da * db {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix of dimension {da}*{db}, got {}x{}",
            y.rows(),
            y.cols()
        )));
    }
    Ok(())
}

/// The shape of the Hermitian parameter matrix `G`.
#[derive(Clone, Debug, PartialEq)]
pub enum GSpec {
    /// `ℓ α² I_ℓ`.
    ScaledIdentity,
    /// `α² E_{ℓ x ℓ}`.
    ScaledOnes,
    /// A user-supplied Hermitian `ℓ x ℓ` matrix.
    Explicit(CMatrix),
}

impl GSpec {
    pub fn name(&self) -> &'static str {
        match self {
            GSpec::ScaledIdentity => "identity",
            GSpec::ScaledOnes => "ones",
            GSpec::Explicit(_) => "explicit",
        }
    }
}

/// `(α, ℓ, G)` for the augmented criteria.
#[derive(Clone, Debug, PartialEq)]
pub struct CriterionParams {
    alpha: f64,
    ell: usize,
    g: GSpec,
}

impl CriterionParams {
    pub fn new(alpha: f64, ell: usize, g: GSpec) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "α must be finite, got {alpha}"
            )));
        }
        if ell == 0 || ell > MAX_ELL {
            return Err(Error::InvalidParameter(format!(
                "ℓ must lie in [1, {MAX_ELL}], got {ell}"
            )));
        }
        if let GSpec::Explicit(m) = &g {
            if !m.is_square() || m.rows() != ell {
                return Err(Error::DimensionMismatch(format!(
                    "explicit G is {}x{} but ℓ = {ell}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.is_finite() {
                return Err(Error::NonFinite);
            }
            let herm = m.hermiticity_error();
            if herm > G_HERMITIAN_TOL {
                return Err(Error::InvalidParameter(format!(
                    "explicit G is not Hermitian (max deviation {herm:.3e})"
                )));
            }
        }
        Ok(CriterionParams { alpha, ell, g })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn g(&self) -> &GSpec {
        &self.g
    }

    /// Writes `G` as `a I + b E` when it has that form.
    pub fn structured(&self) -> Option<(f64, f64)> {
        let a2 = self.alpha * self.alpha;
        match self.g {
            GSpec::ScaledIdentity => Some((self.ell as f64 * a2, 0.0)),
            GSpec::ScaledOnes => Some((0.0, a2)),
            GSpec::Explicit(_) => None,
        }
    }

    /// The `ℓ x ℓ` matrix `G`.
    pub fn g_matrix(&self) -> CMatrix {
        match (&self.g, self.structured()) {
            (GSpec::Explicit(m), _) => m.clone(),
            (_, Some((a, b))) => CMatrix::from_fn(self.ell, self.ell, |i, j| {
                real(if i == j { a + b } else { b })
            }),
            _ => unreachable!(),
        }
    }

    pub fn trace_g(&self) -> f64 {
        match self.structured() {
            Some((a, b)) => (a + b) * self.ell as f64,
            None => self.g_matrix().trace().re,
        }
    }

    /// `1 + Tr(G)`: the separable bound on the unnormalized augmented matrix.
    pub fn bound(&self) -> f64 {
        1.0 + self.trace_g()
    }
}

impl Serialize for CriterionParams {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CriterionParams", 4)?;
        st.serialize_field("alpha", &self.alpha)?;
        st.serialize_field("ell", &self.ell)?;
        st.serialize_field("g", self.g.name())?;
        st.serialize_field("trace_g", &self.trace_g())?;
        st.end()
    }
}

/// Outcome of the `G - α² E ⪰ 0` hypothesis check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GCondition {
    pub holds: bool,
    pub min_eigenvalue: f64,
}

pub fn check_g_condition(params: &CriterionParams) -> Result<GCondition> {
    let a2 = params.alpha * params.alpha;
    let ell = params.ell as f64;
    let min_eigenvalue = match params.structured() {
        // spectrum of a I + c E is {a (ℓ-1 times), a + c ℓ}
        Some((a, b)) => {
            let top = a + (b - a2) * ell;
            if params.ell > 1 {
                a.min(top)
            } else {
                top
            }
        }
        None => {
            let shifted =
                &params.g_matrix() - &CMatrix::ones(params.ell, params.ell).scale_real(a2);
            min_hermitian_eigenvalue(&shifted)?
        }
    };
    Ok(GCondition {
        holds: min_eigenvalue >= -G_PSD_TOL,
        min_eigenvalue,
    })
}

fn require_g_condition(params: &CriterionParams) -> Result<()> {
    let cond = check_g_condition(params)?;
    if cond.holds {
        Ok(())
    } else {
        Err(Error::GCondition {
            min_eigenvalue: cond.min_eigenvalue,
        })
    }
}

/// The unnormalized augmented matrix of a (not necessarily Hermitian) `x`.
pub fn build_augmented(
    x: &CMatrix,
    da: usize,
    db: usize,
    params: &CriterionParams,
) -> Result<CMatrix> {
    check_bipartite(x, da, db)?;
    let ell = params.ell;
    let alpha = real(params.alpha);
    let corner = params.g_matrix().scale(x.trace());
    let va = qmat::vec(&partial_trace(x, [da, db], Keep::A)?);
    let vb = qmat::vec(&partial_trace(x, [da, db], Keep::B)?);
    let r = realign(x, da, db)?;
    let (na, nb) = (da * da, db * db);
    Ok(CMatrix::from_fn(ell + na, ell + nb, |i, j| {
        match (i < ell, j < ell) {
            (true, true) => corner[(i, j)],
            (true, false) => alpha * vb[(j - ell, 0)],
            (false, true) => alpha * va[(i - ell, 0)],
            (false, false) => r[(i - ell, j - ell)],
        }
    }))
}

/// Map applied to the chosen pair of subsystems.
#[derive(Clone, Debug, PartialEq)]
pub enum PairMapKind {
    /// Plain realignment (H-R criterion).
    Realign,
    /// Augmented realignment normalized by `1 + Tr(G)`.
    Augmented(CriterionParams),
}

/// How [`pair_map_norm`] evaluates the trace norm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Route {
    /// Reduced evaluation whenever `G = a I + b E`, full materialization otherwise.
    #[default]
    Auto,
    /// Always materialize the full map output.
    Full,
}

#[derive(Clone, Copy, Debug)]
pub struct MapOptions {
    pub dim_cap: usize,
    pub execution: Execution,
    pub route: Route,
}

impl Default for MapOptions {
    fn default() -> Self {
        MapOptions {
            dim_cap: DEFAULT_DIM_CAP,
            execution: Execution::default(),
            route: Route::Auto,
        }
    }
}

/// `ρ` with the pair moved to the front, plus `(d_a, d_b, D)` where `D` is
/// the dimension of the untouched subsystems.
fn front_pair(rho: &DensityMatrix, pair: (usize, usize)) -> Result<(CMatrix, usize, usize, usize)> {
    let n = rho.parties();
    let (a, b) = pair;
    if n < 2 {
        return Err(Error::InvalidParameter(
            "pair maps need at least two subsystems".into(),
        ));
    }
    for idx in [a, b] {
        if idx >= n {
            return Err(Error::InvalidSubsystem {
                index: idx,
                count: n,
            });
        }
    }
    if a == b {
        return Err(Error::InvalidParameter(format!(
            "pair must name two distinct subsystems, got ({a}, {b})"
        )));
    }
    let mut perm = vec![a, b];
    perm.extend((0..n).filter(|&i| i != a && i != b));
    let dims = rho.dims();
    let rest: usize = perm[2..].iter().map(|&i| dims[i]).product();
    let mat = permute_matrix(rho.mat(), dims, &perm)?;
    Ok((mat, dims[a], dims[b], rest))
}

/// Applies `f` to every block `σ_kl[u,v] = ρ'[u D + k, v D + l]` and
/// interleaves the results as `Out[x D + k, y D + l] = f(σ_kl)[x, y]`.
fn assemble<F>(
    permuted: &CMatrix,
    pair_dim: usize,
    rest: usize,
    out_shape: (usize, usize),
    options: &MapOptions,
    f: F,
) -> Result<CMatrix>
where
    F: Fn(&CMatrix) -> Result<CMatrix> + Sync + Send,
{
    let (br, bc) = out_shape;
    let side = br.max(bc) * rest;
    if side > options.dim_cap {
        return Err(Error::DimensionCap {
            requested: side,
            cap: options.dim_cap,
        });
    }
    let block = |kl: usize| {
        let (k, l) = (kl / rest, kl % rest);
        let sigma = CMatrix::from_fn(pair_dim, pair_dim, |u, v| {
            permuted[(u * rest + k, v * rest + l)]
        });
        f(&sigma)
    };
    // small block counts are not worth a thread hop
    let exec = if rest * rest >= 16 {
        options.execution
    } else {
        Execution::Sequential
    };
    let blocks = exec::map_range(exec, rest * rest, block);
    let mut out = CMatrix::zeros(br * rest, bc * rest);
    for (kl, m) in blocks.into_iter().enumerate() {
        let m = m?;
        let (k, l) = (kl / rest, kl % rest);
        for x in 0..br {
            for y in 0..bc {
                out[(x * rest + k, y * rest + l)] = m[(x, y)];
            }
        }
    }
    Ok(out)
}

/// The chosen map on subsystems `pair = (a, b)` tensored with the identity
/// on the rest. For `n = 2` this is `R(ρ)` or the normalized augmented
/// matrix. Remaining subsystems keep their original relative order.
pub fn apply_pair_map(
    rho: &DensityMatrix,
    pair: (usize, usize),
    kind: &PairMapKind,
) -> Result<CMatrix> {
    apply_pair_map_with(rho, pair, kind, &MapOptions::default())
}

pub fn apply_pair_map_with(
    rho: &DensityMatrix,
    pair: (usize, usize),
    kind: &PairMapKind,
    options: &MapOptions,
) -> Result<CMatrix> {
    match kind {
        PairMapKind::Realign => pair_map_raw(rho, pair, None, options),
        PairMapKind::Augmented(params) => {
            let scale = 1.0 / params.bound();
            let out = pair_map_raw(rho, pair, Some(params), options)?;
            Ok(out.scale_real(scale))
        }
    }
}

/// Pair map without the `1 / (1 + Tr G)` normalization.
fn pair_map_raw(
    rho: &DensityMatrix,
    pair: (usize, usize),
    params: Option<&CriterionParams>,
    options: &MapOptions,
) -> Result<CMatrix> {
    let (permuted, da, db, rest) = front_pair(rho, pair)?;
    match params {
        None => assemble(&permuted, da * db, rest, (da * da, db * db), options, |s| {
            realign(s, da, db)
        }),
        Some(p) => {
            require_g_condition(p)?;
            let shape = (p.ell + da * da, p.ell + db * db);
            assemble(&permuted, da * db, rest, shape, options, |s| {
                build_augmented(s, da, db, p)
            })
        }
    }
}

/// Trace norm of a pair map, reported on the unnormalized scale.
///
/// For the augmented kind, `excess = norm - bound · Tr(ρ)`, assembled from its
/// parts rather than by subtraction. The map is linear, so this is the same
/// test as `norm - bound` on unit-trace input, but it keeps the rounding in
/// `Tr(ρ)` from being amplified by a large `Tr(G)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormReport {
    pub norm: f64,
    pub bound: f64,
    pub excess: f64,
}

pub fn pair_map_norm(
    rho: &DensityMatrix,
    pair: (usize, usize),
    kind: &PairMapKind,
    options: &MapOptions,
) -> Result<NormReport> {
    let params = match kind {
        PairMapKind::Realign => {
            let norm = trace_norm(&pair_map_raw(rho, pair, None, options)?)?;
            return Ok(NormReport {
                norm,
                bound: 1.0,
                excess: norm - 1.0,
            });
        }
        PairMapKind::Augmented(p) => p,
    };
    require_g_condition(params)?;
    let bound = params.bound();
    let tr = rho.mat().trace().re;
    let structured = match options.route {
        Route::Auto => params.structured(),
        Route::Full => None,
    };
    let Some((a, b)) = structured else {
        let norm = trace_norm(&pair_map_raw(rho, pair, Some(params), options)?)?;
        return Ok(NormReport {
            norm,
            bound,
            excess: norm - bound * tr,
        });
    };

    // Rotating the ℓ-block so the all-ones vector becomes e_1 splits the map
    // into (ℓ-1) copies of a·T, with T the reduced operator on the untouched
    // subsystems, plus the ℓ = 1 map with G' = a + bℓ and α' = α√ℓ.
    let ell = params.ell as f64;
    let g1 = a + b * ell;
    let reduced = CriterionParams::new(
        params.alpha * ell.sqrt(),
        1,
        GSpec::Explicit(CMatrix::from_real_diagonal(&[g1])),
    )?;
    let (permuted, da, db, rest) = front_pair(rho, pair)?;
    let pd = da * db;
    let core = assemble(
        &permuted,
        pd,
        rest,
        (1 + da * da, 1 + db * db),
        options,
        |s| build_augmented(s, da, db, &reduced),
    )?;
    let core_norm = trace_norm(&core)?;
    let t_norm = if params.ell > 1 && a != 0.0 {
        let t = CMatrix::from_fn(rest, rest, |k, l| {
            (0..pd)
                .map(|u| permuted[(u * rest + k, u * rest + l)])
                .sum()
        });
        trace_norm(&t)?
    } else {
        1.0
    };
    let spare = (ell - 1.0) * a.abs() * t_norm;
    Ok(NormReport {
        norm: core_norm + spare,
        bound,
        excess: (core_norm - (1.0 + g1) * tr) + (ell - 1.0) * (a.abs() * t_norm - a * tr),
    })
}
