#![allow(dead_code)]

//! Test-only oracles that do not share code paths with the library's linear
//! algebra.

use sepcrit::qmat::{c64, CMatrix, DensityMatrix, C64};

/// Singular values by one-sided (Hestenes) Jacobi rotations on the columns.
pub fn jacobi_singular_values(x: &CMatrix) -> Vec<f64> {
    let (m, n) = (x.rows(), x.cols());
    // work with at least as many rows as columns
    let mut a: Vec<Vec<C64>> = if m >= n {
        (0..n)
            .map(|j| (0..m).map(|i| x[(i, j)]).collect())
            .collect()
    } else {
        (0..m)
            .map(|j| (0..n).map(|i| x[(j, i)].conj()).collect())
            .collect()
    };
    let cols = a.len();
    let dot = |u: &[C64], v: &[C64]| -> C64 { u.iter().zip(v).map(|(p, q)| p.conj() * q).sum() };
    for _sweep in 0..100 {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let alpha = dot(&a[i], &a[i]).re;
                let beta = dot(&a[j], &a[j]).re;
                let gamma = dot(&a[i], &a[j]);
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / g;
                for z in a[j].iter_mut() {
                    *z *= phase;
                }
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (head, tail) = a.split_at_mut(j);
                for (ui, uj) in head[i].iter_mut().zip(tail[0].iter_mut()) {
                    let (ai, aj) = (*ui, *uj);
                    *ui = ai * c - aj * s;
                    *uj = ai * s + aj * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    a.iter().map(|col| dot(col, col).re.sqrt()).collect()
}

pub fn jacobi_trace_norm(x: &CMatrix) -> f64 {
    jacobi_singular_values(x).iter().sum()
}

/// Realignment written straight from the block definition: row `j*m + i`
/// holds the column-stacked block `Y_{i,j}`.
pub fn realign_by_blocks(y: &CMatrix, m: usize, n: usize) -> CMatrix {
    let mut out = CMatrix::zeros(m * m, n * n);
    for j in 0..m {
        for i in 0..m {
            let row = j * m + i;
            let mut col = 0;
            for bc in 0..n {
                for br in 0..n {
                    out[(row, col)] = y[(i * n + br, j * n + bc)];
                    col += 1;
                }
            }
        }
    }
    out
}

/// Haar-ish random unitary: Gram-Schmidt on a deterministic pseudo-random
/// complex matrix.
pub fn pseudo_unitary(n: usize, seed: u64) -> CMatrix {
    let mut state = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let mut next = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for _ in 0..n {
        let mut v: Vec<C64> = (0..n).map(|_| c64(next(), next())).collect();
        for u in &cols {
            let p: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vk, uk) in v.iter_mut().zip(u) {
                *vk -= p * uk;
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / nrm).collect());
    }
    CMatrix::from_fn(n, n, |i, j| cols[j][i])
}

pub fn bell() -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DensityMatrix::pure(
        &[c64(s, 0.), c64(0., 0.), c64(0., 0.), c64(s, 0.)],
        vec![2, 2],
    )
    .unwrap()
}
