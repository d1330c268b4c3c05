//! JSON state files: `{ "dims": [..], "re": [..], "im": [..] }` with the
//! real and imaginary parts flattened in row-major order.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use sepcrit::qmat::{c64, CMatrix, DensityMatrix};

#[derive(Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let entries = rho.mat().to_row_major();
        StateFile {
            dims: rho.dims().to_vec(),
            re: entries.iter().map(|z| z.re).collect(),
            im: entries.iter().map(|z| z.im).collect(),
        }
    }

    pub fn into_state(self, validate: bool) -> Result<DensityMatrix> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            bail!(
                "dims must be a non-empty list of positive integers, got {:?}",
                self.dims
            );
        }
        let d = self
            .dims
            .iter()
            .try_fold(1usize, |acc, &k| acc.checked_mul(k))
            .context("dimension overflow")?;
        let len = d.checked_mul(d).context("dimension overflow")?;
        if self.re.len() != len || self.im.len() != len {
            bail!(
                "dims {:?} need {len} entries in `re` and `im`, got {} and {}",
                self.dims,
                self.re.len(),
                self.im.len()
            );
        }
        let entries = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&r, &i)| c64(r, i))
            .collect();
        let mat = CMatrix::from_row_major(d, d, entries)?;
        Ok(if validate {
            DensityMatrix::new(mat, self.dims)?
        } else {
            DensityMatrix::new_unchecked(mat, self.dims)?
        })
    }
}

pub fn read(path: &Path, validate: bool) -> Result<DensityMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: StateFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    file.into_state(validate)
        .with_context(|| format!("invalid state in {}", path.display()))
}

pub fn write<W: Write>(rho: &DensityMatrix, mut w: W) -> Result<()> {
    serde_json::to_writer(&mut w, &StateFile::from_state(rho))?;
    writeln!(w)?;
    Ok(())
}

/// A square matrix `{ "re": [..], "im": [..] }`; `im` may be omitted.
#[derive(Debug, Deserialize)]
struct MatrixFile {
    re: Vec<f64>,
    #[serde(default)]
    im: Option<Vec<f64>>,
}

pub fn read_matrix(path: &Path) -> Result<CMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: MatrixFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let n = (file.re.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != file.re.len() {
        bail!(
            "{}: `re` must hold n² entries, got {}",
            path.display(),
            file.re.len()
        );
    }
    let im = file.im.unwrap_or_else(|| vec![0.0; n * n]);
    if im.len() != n * n {
        bail!("{}: `im` must match `re` in length", path.display());
    }
    let entries = file.re.iter().zip(&im).map(|(&r, &i)| c64(r, i)).collect();
    Ok(CMatrix::from_row_major(n, n, entries)?)
}
