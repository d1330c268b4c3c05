//! Example states, white-noise families and seeded random samplers.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::qmat::{c64, kron, real, CMatrix, DensityMatrix, C64};

fn ket(amps: &[f64]) -> CMatrix {
    CMatrix::column(&amps.iter().map(|&a| real(a)).collect::<Vec<_>>())
}

fn ket_product(factors: &[CMatrix]) -> Vec<C64> {
    let v = factors[1..]
        .iter()
        .fold(factors[0].clone(), |acc, f| kron(&acc, f));
    (0..v.rows()).map(|i| v[(i, 0)]).collect()
}

/// `(I - Σ |v><v|) / norm` for orthonormal kets `v`.
fn complement_state(kets: &[Vec<C64>], dims: Vec<usize>, norm: f64) -> DensityMatrix {
    let d: usize = dims.iter().product();
    let mut mat = CMatrix::identity(d);
    for v in kets {
        mat = &mat - &CMatrix::projector(v);
    }
    DensityMatrix::new_unchecked(mat.scale_real(1.0 / norm), dims)
        .expect("shape fixed by construction")
}

/// The five Tiles product vectors on `C³ ⊗ C³`.
pub fn tiles_kets() -> Vec<Vec<C64>> {
    let s = FRAC_1_SQRT_2;
    let e = |i: usize| {
        let mut a = [0.0; 3];
        a[i] = 1.0;
        ket(&a)
    };
    let diff = |i: usize, j: usize| {
        let mut a = [0.0; 3];
        a[i] = s;
        a[j] = -s;
        ket(&a)
    };
    let uniform = ket(&[1.0 / 3.0; 3]);
    let ones = ket(&[1.0; 3]);
    vec![
        ket_product(&[e(0), diff(0, 1)]),
        ket_product(&[diff(0, 1), e(2)]),
        ket_product(&[e(2), diff(1, 2)]),
        ket_product(&[diff(1, 2), e(0)]),
        ket_product(&[uniform, ones]),
    ]
}

/// The bound-entangled 3x3 state built from the Tiles unextendible product basis.
pub fn tiles_state() -> DensityMatrix {
    complement_state(&tiles_kets(), vec![3, 3], 4.0)
}

/// The four Shifts product vectors on `(C²)^{⊗3}`.
pub fn shifts_kets() -> Vec<Vec<C64>> {
    let s = FRAC_1_SQRT_2;
    let zero = ket(&[1.0, 0.0]);
    let one = ket(&[0.0, 1.0]);
    let plus = ket(&[s, s]);
    let minus = ket(&[s, -s]);
    vec![
        ket_product(&[zero.clone(), one.clone(), plus.clone()]),
        ket_product(&[one.clone(), plus.clone(), zero.clone()]),
        ket_product(&[plus, zero, one]),
        ket_product(&[minus.clone(), minus.clone(), minus]),
    ]
}

/// The three-qubit Shifts UPB state: biseparable across every cut, yet entangled.
///
/// `I_8` minus the four projectors has trace 4, hence the factor `1/4`.
pub fn shifts_state() -> DensityMatrix {
    complement_state(&shifts_kets(), vec![2, 2, 2], 4.0)
}

/// `(|000> + ε|110> + |111>) / sqrt(2 + ε²)`.
pub fn perturbed_ghz(epsilon: f64) -> Result<DensityMatrix> {
    if !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "ε must be finite, got {epsilon}"
        )));
    }
    let mut amps = vec![real(0.0); 8];
    amps[0] = real(1.0);
    amps[6] = real(epsilon);
    amps[7] = real(1.0);
    DensityMatrix::pure(&amps, vec![2, 2, 2])
}

/// `(1 - p) I / d + p ρ`.
pub fn noise_mix(base: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "p must lie in [0, 1], got {p}"
        )));
    }
    let d = base.dim();
    let mixed = &CMatrix::identity(d).scale_real((1.0 - p) / d as f64) + &base.mat().scale_real(p);
    DensityMatrix::new_unchecked(mixed, base.dims().to_vec())
}

/// A base state mixed with white noise, parameterized by `p ∈ [0, 1]`.
#[derive(Clone, Debug)]
pub struct NoiseFamily {
    base: DensityMatrix,
    label: String,
}

impl NoiseFamily {
    pub fn new(base: DensityMatrix, label: impl Into<String>) -> Self {
        NoiseFamily {
            base,
            label: label.into(),
        }
    }

    pub fn tiles() -> Self {
        Self::new(tiles_state(), "tiles")
    }

    pub fn shifts() -> Self {
        Self::new(shifts_state(), "shifts")
    }

    pub fn ghz(epsilon: f64) -> Result<Self> {
        Ok(Self::new(
            perturbed_ghz(epsilon)?,
            format!("ghz(eps={epsilon})"),
        ))
    }

    pub fn base(&self) -> &DensityMatrix {
        &self.base
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dims(&self) -> &[usize] {
        self.base.dims()
    }

    pub fn at(&self, p: f64) -> Result<DensityMatrix> {
        noise_mix(&self.base, p)
    }
}

fn gaussian_c64(rng: &mut ChaCha8Rng) -> C64 {
    c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn random_unit_ket(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    let v: Vec<C64> = (0..d).map(|_| gaussian_c64(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    CMatrix::column(&v.iter().map(|z| z / n).collect::<Vec<_>>())
}

/// `A A† / Tr(A A†)` with `A` a `d x rank` matrix of standard complex Gaussians.
pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if d == 0 || rank == 0 || rank > d {
        return Err(Error::InvalidParameter(format!(
            "rank must lie in [1, {d}], got {rank}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = CMatrix::from_fn(d, rank, |_, _| gaussian_c64(&mut rng));
    let aat = &a * &a.adjoint();
    let tr = aat.trace().re;
    // AA† is Hermitian up to rounding in the product; symmetrize exactly
    DensityMatrix::new_unchecked(aat.hermitian_part().scale_real(1.0 / tr), vec![d])
}

/// A convex mixture of `terms` random pure product states with
/// Dirichlet(1, ..., 1) weights.
pub fn random_separable(dims: &[usize], terms: usize, seed: u64) -> Result<DensityMatrix> {
    if terms == 0 {
        return Err(Error::InvalidParameter("terms must be positive".into()));
    }
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidParameter(format!("invalid dims {dims:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..terms).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = weights.iter().sum();
    let d: usize = dims.iter().product();
    let mut mat = CMatrix::zeros(d, d);
    for w in weights {
        let factors: Vec<CMatrix> = dims.iter().map(|&k| random_unit_ket(&mut rng, k)).collect();
        let v = ket_product(&factors);
        mat = &mat + &CMatrix::projector(&v).scale_real(w / total);
    }
    DensityMatrix::new_unchecked(mat, dims.to_vec())
}
