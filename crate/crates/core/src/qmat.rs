//! Dense complex matrices and the subsystem operations used by the criteria.
//!
//! All index formulas are 0-based. Subsystem `0` is the most significant
//! factor of a tensor product, so for dims `[d_A, d_B]` the basis state
//! `|i>|k>` sits at flat index `i * d_B + k`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;

/// Maximum entrywise deviation from Hermiticity accepted for a state.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Maximum deviation of the trace from one accepted for a state.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues at or above `-PSD_TOL` count as nonnegative.
pub const PSD_TOL: f64 = 1e-9;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// A dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix(DMatrix<C64>);

impl CMatrix {
    /// Builds a matrix from entries listed row by row.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix shape {rows}x{cols} has an empty side"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CMatrix(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        CMatrix(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        CMatrix(DMatrix::identity(n, n))
    }

    /// The all-ones matrix `E_{rows x cols}`.
    pub fn ones(rows: usize, cols: usize) -> Self {
        CMatrix(DMatrix::from_element(rows, cols, real(1.0)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { real(diag[i]) } else { real(0.0) })
    }

    /// A column vector.
    pub fn column(entries: &[C64]) -> Self {
        CMatrix(DMatrix::from_column_slice(entries.len(), 1, entries))
    }

    /// `|v><v|` for a column of amplitudes.
    pub fn projector(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    pub fn from_inner(m: DMatrix<C64>) -> Self {
        CMatrix(m)
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        CMatrix(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        CMatrix(self.0.transpose())
    }

    pub fn trace(&self) -> C64 {
        self.0.diagonal().iter().sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(real(s))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.is_finite())
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if self.0.shape() != other.0.shape() {
            return f64::INFINITY;
        }
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(X + X^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        CMatrix((&self.0 + self.0.adjoint()) * real(0.5))
    }

    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 * &rhs.0)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    CMatrix(a.0.kronecker(&b.0))
}

/// Column-stacking vectorization: component `j * rows + i` is `x[i, j]`.
pub fn vec(x: &CMatrix) -> CMatrix {
    // nalgebra storage is column-major, which is exactly this ordering
    CMatrix::column(x.0.as_slice())
}

/// Inverse of [`vec`]: refills a `rows x cols` matrix column by column.
pub fn unvec(v: &CMatrix, rows: usize, cols: usize) -> Result<CMatrix> {
    if v.cols() != 1 || v.rows() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "cannot reshape a {}x{} matrix into {rows}x{cols}",
            v.rows(),
            v.cols()
        )));
    }
    Ok(CMatrix(DMatrix::from_column_slice(
        rows,
        cols,
        v.0.as_slice(),
    )))
}

/// Singular values, in no particular order.
pub fn singular_values(x: &CMatrix) -> Result<Vec<f64>> {
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    let max_iter = 1000 * x.rows().max(x.cols()).max(10);
    let svd =
        x.0.clone()
            .try_svd_unordered(false, false, f64::EPSILON, max_iter)
            .ok_or(Error::NoConvergence("singular value decomposition"))?;
    Ok(svd.singular_values.iter().copied().collect())
}

/// Sum of the singular values.
pub fn trace_norm(x: &CMatrix) -> Result<f64> {
    Ok(singular_values(x)?.iter().sum())
}

/// Eigenvalues of the Hermitian part of `x`, ascending.
pub fn hermitian_eigenvalues(x: &CMatrix) -> Result<Vec<f64>> {
    if !x.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalues of a non-square {}x{} matrix",
            x.rows(),
            x.cols()
        )));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    let max_iter = 1000 * x.rows().max(10);
    let eig = SymmetricEigen::try_new(x.hermitian_part().0, f64::EPSILON, max_iter)
        .ok_or(Error::NoConvergence("Hermitian eigendecomposition"))?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

pub fn min_hermitian_eigenvalue(x: &CMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(x)?[0])
}

/// Which factor of a bipartite product a partial trace keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    A,
    B,
}

/// Partial trace of a square `d_A d_B` matrix. Hermiticity is not required.
pub fn partial_trace(x: &CMatrix, dims: [usize; 2], keep: Keep) -> Result<CMatrix> {
    let [da, db] = dims;
    check_square_dim(x, da * db)?;
    Ok(match keep {
        Keep::A => CMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| x[(i * db + k, j * db + k)]).sum()
        }),
        Keep::B => CMatrix::from_fn(db, db, |k, l| {
            (0..da).map(|i| x[(i * db + k, i * db + l)]).sum()
        }),
    })
}

/// Partial transpose of the second factor of a `d_A x d_B` bipartition.
pub fn partial_transpose_cut(x: &CMatrix, da: usize, db: usize) -> Result<CMatrix> {
    check_square_dim(x, da * db)?;
    Ok(CMatrix::from_fn(da * db, da * db, |r, c| {
        let (i, k) = (r / db, r % db);
        let (j, l) = (c / db, c % db);
        x[(i * db + l, j * db + k)]
    }))
}

fn check_square_dim(x: &CMatrix, d: usize) -> Result<()> {
    if !x.is_square() || x.rows() != d {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix of dimension {d}, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    Ok(())
}

/// Row-major strides of a tensor-product index.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Relabels the tensor factors of a square matrix: factor `i` of the output
/// is factor `perm[i]` of the input.
pub fn permute_matrix(x: &CMatrix, dims: &[usize], perm: &[usize]) -> Result<CMatrix> {
    check_permutation(perm, dims.len())?;
    let d: usize = dims.iter().product();
    check_square_dim(x, d)?;
    let in_strides = strides(dims);
    let out_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let out_strides = strides(&out_dims);
    // src[o] = input flat index of output flat index o
    let src: Vec<usize> = (0..d)
        .map(|o| {
            perm.iter()
                .enumerate()
                .map(|(k, &p)| ((o / out_strides[k]) % out_dims[k]) * in_strides[p])
                .sum()
        })
        .collect();
    Ok(CMatrix::from_fn(d, d, |r, c| x[(src[r], src[c])]))
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::InvalidPermutation(perm.to_vec()));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidPermutation(perm.to_vec()));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Inverse of a permutation of `0..n`.
pub fn inverse_permutation(perm: &[usize]) -> Result<Vec<usize>> {
    check_permutation(perm, perm.len())?;
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    Ok(inv)
}

/// A violated [`DensityMatrix`] invariant together with its measured size.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    EmptyDims,
    NotSquare { rows: usize, cols: usize },
    DimsProduct { product: usize, dimension: usize },
    NonFinite,
    NotHermitian { max_deviation: f64 },
    Trace { trace: f64 },
    NotPsd { min_eigenvalue: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyDims => write!(f, "no subsystem dimensions given"),
            Violation::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}"),
            Violation::DimsProduct { product, dimension } => write!(
                f,
                "product of dims is {product} but the matrix dimension is {dimension}"
            ),
            Violation::NonFinite => write!(f, "non-finite entries"),
            Violation::NotHermitian { max_deviation } => {
                write!(
                    f,
                    "not Hermitian (max |X - X^dagger| = {max_deviation:.3e})"
                )
            }
            Violation::Trace { trace } => write!(f, "trace is {trace:.12}"),
            Violation::NotPsd { min_eigenvalue } => {
                write!(f, "not PSD (minimum eigenvalue {min_eigenvalue:.3e})")
            }
        }
    }
}

/// A density matrix on `C^{d_1} ⊗ ... ⊗ C^{d_n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates `mat` against `dims`; see [`validate_density`].
    pub fn new(mat: CMatrix, dims: Vec<usize>) -> Result<Self> {
        validate_density(mat, dims).map_err(Error::InvalidDensity)
    }

    /// Skips the Hermiticity/trace/PSD checks but still requires the shape to
    /// match `dims`. Used for intermediate operators and `--no-validate`.
    pub fn new_unchecked(mat: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::DimensionMismatch(format!("invalid dims {dims:?}")));
        }
        check_square_dim(&mat, d)?;
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(DensityMatrix { mat, dims })
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> CMatrix {
        self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total dimension `Π d_i`.
    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    /// Same matrix, viewed with different subsystem dimensions.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        Self::new_unchecked(self.mat.clone(), dims)
    }

    /// Tensor product of two states.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            mat: kron(&self.mat, &other.mat),
            dims,
        }
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        DensityMatrix {
            mat: CMatrix::identity(d).scale_real(1.0 / d as f64),
            dims,
        }
    }

    /// The projector onto a normalized ket.
    pub fn pure(ket: &[C64], dims: Vec<usize>) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter(
                "ket has zero or non-finite norm".into(),
            ));
        }
        let v: Vec<C64> = ket.iter().map(|z| z / norm).collect();
        Self::new_unchecked(CMatrix::projector(&v), dims)
    }
}

/// Checks every [`DensityMatrix`] invariant and reports all violations.
pub fn validate_density(
    mat: CMatrix,
    dims: Vec<usize>,
) -> std::result::Result<DensityMatrix, Vec<Violation>> {
    let mut violations = Vec::new();
    if dims.is_empty() {
        violations.push(Violation::EmptyDims);
    }
    if !mat.is_square() {
        violations.push(Violation::NotSquare {
            rows: mat.rows(),
            cols: mat.cols(),
        });
        return Err(violations);
    }
    let product: usize = dims.iter().product();
    if !dims.is_empty() && product != mat.rows() {
        violations.push(Violation::DimsProduct {
            product,
            dimension: mat.rows(),
        });
    }
    if !mat.is_finite() {
        violations.push(Violation::NonFinite);
        return Err(violations);
    }
    let herm = mat.hermiticity_error();
    if herm > HERMITIAN_TOL {
        violations.push(Violation::NotHermitian {
            max_deviation: herm,
        });
    }
    let tr = mat.trace().re;
    if (tr - 1.0).abs() > TRACE_TOL {
        violations.push(Violation::Trace { trace: tr });
    }
    match min_hermitian_eigenvalue(&mat) {
        Ok(min) if min < -PSD_TOL => violations.push(Violation::NotPsd {
            min_eigenvalue: min,
        }),
        Ok(_) => {}
        Err(_) => violations.push(Violation::NotPsd {
            min_eigenvalue: f64::NAN,
        }),
    }
    if violations.is_empty() {
        Ok(DensityMatrix { mat, dims })
    } else {
        Err(violations)
    }
}

/// Partial transpose on a single subsystem of an n-partite state.
pub fn partial_transpose(rho: &DensityMatrix, subsystem: usize) -> Result<CMatrix> {
    let dims = rho.dims();
    if subsystem >= dims.len() {
        return Err(Error::InvalidSubsystem {
            index: subsystem,
            count: dims.len(),
        });
    }
    let s = strides(dims)[subsystem];
    let ds = dims[subsystem];
    let d = rho.dim();
    let x = rho.mat();
    Ok(CMatrix::from_fn(d, d, |r, c| {
        let rs = (r / s) % ds;
        let cs = (c / s) % ds;
        x[(r - rs * s + cs * s, c - cs * s + rs * s)]
    }))
}

/// Relabels subsystems: factor `i` of the result is factor `perm[i]` of `rho`.
pub fn permute_systems(rho: &DensityMatrix, perm: &[usize]) -> Result<DensityMatrix> {
    let mat = permute_matrix(rho.mat(), rho.dims(), perm)?;
    let dims = perm.iter().map(|&p| rho.dims()[p]).collect();
    Ok(DensityMatrix { mat, dims })
}

/// `Tr(ρ²)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    matrix_purity(rho.mat())
}

/// `Tr(X²)` for a Hermitian `X`, computed as the squared Frobenius norm.
pub fn matrix_purity(x: &CMatrix) -> f64 {
    x.inner().iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_major(2, 2, vec![real(0.), real(1.), real(1.), real(0.)]).unwrap()
    }

    fn bell() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&[real(s), real(0.), real(0.), real(s)], vec![2, 2]).unwrap()
    }

    #[test]
    fn kron_examples() {
        let out = kron(&CMatrix::identity(2), &pauli_x());
        let expect = CMatrix::from_fn(4, 4, |i, j| {
            if i / 2 == j / 2 && i != j {
                real(1.)
            } else {
                real(0.)
            }
        });
        assert_eq!(out, expect);
        assert_eq!(kron(&CMatrix::identity(1), &pauli_x()), pauli_x());
        let d = kron(
            &CMatrix::from_real_diagonal(&[1., 2.]),
            &CMatrix::from_real_diagonal(&[3., 4.]),
        );
        assert_eq!(d, CMatrix::from_real_diagonal(&[3., 4., 6., 8.]));
    }

    #[test]
    fn kron_index_formula() {
        let a = CMatrix::from_fn(2, 3, |i, j| c64(i as f64, j as f64 + 1.));
        let b = CMatrix::from_fn(3, 2, |k, l| c64((k * l) as f64, 1.0 - k as f64));
        let out = kron(&a, &b);
        assert_eq!((out.rows(), out.cols()), (6, 6));
        for i in 0..2 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..2 {
                        assert_eq!(out[(i * 3 + k, j * 2 + l)], a[(i, j)] * b[(k, l)]);
                    }
                }
            }
        }
    }

    #[test]
    fn vec_is_column_stacking() {
        let x =
            CMatrix::from_row_major(2, 2, vec![real(1.), real(2.), real(3.), real(4.)]).unwrap();
        assert_eq!(
            vec(&x).to_row_major(),
            vec![real(1.), real(3.), real(2.), real(4.)]
        );
        let col = CMatrix::column(&[real(5.), c64(0., 1.)]);
        assert_eq!(vec(&col), col);
        let p0 = CMatrix::from_real_diagonal(&[1., 0.]);
        assert_eq!(
            vec(&p0).to_row_major(),
            vec![real(1.), real(0.), real(0.), real(0.)]
        );
        assert_eq!(unvec(&vec(&x), 2, 2).unwrap(), x);
    }

    #[test]
    fn trace_norm_examples() {
        let d = CMatrix::from_real_diagonal(&[1., -2.]);
        assert!((trace_norm(&d).unwrap() - 3.0).abs() < 1e-12);
        let mut bad = CMatrix::identity(2);
        bad[(0, 1)] = real(f64::NAN);
        assert!(matches!(trace_norm(&bad), Err(Error::NonFinite)));
    }

    #[test]
    fn trace_norm_rank_one() {
        let a = CMatrix::from_fn(2, 2, |i, j| c64(1.0 + i as f64, j as f64 - 0.5));
        let b = CMatrix::from_fn(3, 3, |i, j| c64((i + j) as f64 * 0.3, 0.1 * i as f64));
        let outer = &vec(&a) * &vec(&b).transpose();
        let expect = vec(&a).frobenius_norm() * vec(&b).frobenius_norm();
        assert!((trace_norm(&outer).unwrap() - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn partial_trace_examples() {
        let reduced = partial_trace(bell().mat(), [2, 2], Keep::A).unwrap();
        assert!(reduced.max_abs_diff(&CMatrix::identity(2).scale_real(0.5)) < 1e-15);

        let e00 = CMatrix::from_fn(2, 2, |i, j| real((i == 0 && j == 0) as u8 as f64));
        let e01 = CMatrix::from_fn(2, 2, |i, j| real((i == 0 && j == 1) as u8 as f64));
        let x = kron(&e00, &e01);
        assert_eq!(partial_trace(&x, [2, 2], Keep::B).unwrap(), e01);
        assert!(partial_trace(&x, [2, 3], Keep::A).is_err());
    }

    #[test]
    fn partial_trace_of_product_returns_factor() {
        let ra = CMatrix::from_fn(3, 3, |i, j| c64((i + 2 * j) as f64, (i as f64) - j as f64));
        let rb = CMatrix::from_fn(2, 2, |i, j| c64(1.0 + (i * j) as f64, 0.25));
        let x = kron(&ra, &rb);
        let tr_b = rb.trace();
        let got = partial_trace(&x, [3, 2], Keep::A).unwrap();
        assert!(got.max_abs_diff(&ra.scale(tr_b)) < 1e-13);
    }

    #[test]
    fn bell_partial_transpose_has_negative_eigenvalue() {
        let pt = partial_transpose(&bell(), 1).unwrap();
        let eig = hermitian_eigenvalues(&pt).unwrap();
        assert!((eig[0] + 0.5).abs() < 1e-12);
        assert!((pt.trace().re - 1.0).abs() < 1e-15);
        assert!(pt.hermiticity_error() < 1e-15);
        assert_eq!(pt, partial_transpose_cut(bell().mat(), 2, 2).unwrap());
        assert!(matches!(
            partial_transpose(&bell(), 2),
            Err(Error::InvalidSubsystem { index: 2, count: 2 })
        ));
    }

    #[test]
    fn partial_transpose_of_product() {
        let ra = DensityMatrix::pure(&[real(1.), c64(0., 1.)], vec![2]).unwrap();
        let rb = DensityMatrix::pure(&[real(1.), c64(0.5, 1.), real(-1.)], vec![3]).unwrap();
        let rho = ra.tensor(&rb);
        let pt = partial_transpose(&rho, 1).unwrap();
        let expect = kron(ra.mat(), &rb.mat().transpose());
        assert!(pt.max_abs_diff(&expect) < 1e-15);
        assert!(min_hermitian_eigenvalue(&pt).unwrap() > -1e-12);
    }

    #[test]
    fn permute_swaps_product_factors() {
        let ra = DensityMatrix::pure(&[real(1.), c64(0., 1.)], vec![2]).unwrap();
        let rb = DensityMatrix::pure(&[real(1.), c64(0.5, 1.), real(-1.)], vec![3]).unwrap();
        let swapped = permute_systems(&ra.tensor(&rb), &[1, 0]).unwrap();
        assert_eq!(swapped.dims(), &[3, 2]);
        assert!(swapped.mat().max_abs_diff(rb.tensor(&ra).mat()) < 1e-15);
        let same = permute_systems(&ra.tensor(&rb), &[0, 1]).unwrap();
        assert_eq!(same, ra.tensor(&rb));
        assert!(permute_systems(&ra.tensor(&rb), &[0, 0]).is_err());
        assert!(permute_systems(&ra.tensor(&rb), &[0]).is_err());
    }

    #[test]
    fn purity_examples() {
        assert!((purity(&bell()) - 1.0).abs() < 1e-15);
        let mm = DensityMatrix::maximally_mixed(vec![4]);
        assert!((purity(&mm) - 0.25).abs() < 1e-15);
        let half = DensityMatrix::new(CMatrix::from_real_diagonal(&[0.5, 0.5]), vec![2]).unwrap();
        assert!((purity(&half) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn validate_reports_violations() {
        assert!(validate_density(CMatrix::identity(4).scale_real(0.25), vec![2, 2]).is_ok());

        let errs = validate_density(CMatrix::identity(2), vec![2]).unwrap_err();
        assert_eq!(errs, vec![Violation::Trace { trace: 2.0 }]);

        let errs =
            validate_density(CMatrix::from_real_diagonal(&[1.5, -0.5]), vec![2]).unwrap_err();
        assert_eq!(errs.len(), 1);
        match errs[0] {
            Violation::NotPsd { min_eigenvalue } => {
                assert!((min_eigenvalue + 0.5).abs() < 1e-12)
            }
            ref v => panic!("unexpected {v:?}"),
        }

        let mut nh = CMatrix::identity(2).scale_real(0.5);
        nh[(0, 1)] = real(0.1);
        let errs = validate_density(nh, vec![3]).unwrap_err();
        assert!(errs
            .iter()
            .any(|v| matches!(v, Violation::NotHermitian { .. })));
        assert!(errs
            .iter()
            .any(|v| matches!(v, Violation::DimsProduct { product: 3, .. })));
    }
}
