//! Realignment-based separability criteria for finite-dimensional density
//! matrices.
//!
//! The crate is organised bottom-up:
//!
//! * [`qmat`]: dense complex matrices, density matrices and the usual
//!   subsystem operations (Kronecker product, partial trace/transpose,
//!   subsystem permutation, trace norm).
//! * [`realign`]: the realignment operator, the augmented realignment matrix
//!   built from a Hermitian parameter matrix `G`, and the normalized
//!   contraction map applied to a pair of subsystems of an n-partite state.
//! * [`criteria`]: detectors (CCNR, augmented realignment, Z-R, PPT, H-R and
//!   its augmented multipartite extension) with a uniform result type.
//! * [`states`]: the UPB bound-entangled states, the perturbed GHZ family,
//!   white-noise mixing and seeded random samplers.
//! * [`sweep`]: noise-threshold search (grid scan plus bisection) and the
//!   reference table drivers.
//!
//! Data-parallel loops go through [`exec`], which uses rayon when the
//! `parallel` feature is enabled and falls back to plain iterators otherwise.

pub mod criteria;
pub mod error;
pub mod exec;
pub mod qmat;
pub mod realign;
pub mod states;
pub mod sweep;

pub use criteria::{CriterionId, CriterionParams, CriterionResult, Cut};
pub use error::{Error, Result};
pub use exec::Execution;
pub use qmat::{CMatrix, DensityMatrix, C64};
pub use realign::{GSpec, PairMapKind};
pub use states::NoiseFamily;
pub use sweep::{Detector, ThresholdReport};
