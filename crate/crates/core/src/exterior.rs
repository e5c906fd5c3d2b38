//! Exterior algebra helpers in the lexicographic basis `e_I = e_i1 ^ ... ^ e_ik`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scaled::ScaledMatrix;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        match (0..k).rev().find(|&i| cur[i] < n - k + i) {
            None => return out,
            Some(i) => {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
            }
        }
    }
}

fn minor(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    let k = rows.len();
    match k {
        0 => 1.0,
        1 => m[(rows[0], cols[0])],
        2 => m[(rows[0], cols[0])] * m[(rows[1], cols[1])] - m[(rows[0], cols[1])] * m[(rows[1], cols[0])],
        _ => DMatrix::from_fn(k, k, |i, j| m[(rows[i], cols[j])]).lu().determinant(),
    }
}

/// Matrix of the induced action on `k`-vectors: entry `(I, J)` is the minor
/// on rows `I` and columns `J`.
pub fn exterior_power_matrix(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let subsets = k_subsets(m.nrows(), k);
    let n = subsets.len();
    DMatrix::from_fn(n, n, |i, j| minor(m, &subsets[i], &subsets[j]))
}

/// Induced action of `m` on `Λ^k R^d`.
pub fn exterior_power(m: &ScaledMatrix, k: usize) -> Result<ScaledMatrix> {
    let d = m.dim();
    if k == 0 || k > d {
        return Err(Error::InvalidInput(format!(
            "exterior power degree {k} outside 1..={d}"
        )));
    }
    if k == 1 {
        return Ok(m.clone());
    }
    let lifted = exterior_power_matrix(m.unit(), k);
    let det_multiplicity = binomial(d - 1, k - 1) as f64;
    ScaledMatrix::with_log_det(lifted, k as f64 * m.log_scale(), det_multiplicity * m.log_abs_det())
}

/// Coordinates of `v_1 ^ ... ^ v_k`.
pub fn wedge(frame: &[DVector<f64>]) -> Result<DVector<f64>> {
    let k = frame.len();
    if k == 0 {
        return Err(Error::InvalidInput("empty frame".into()));
    }
    let d = frame[0].len();
    if frame.iter().any(|v| v.len() != d) || k > d {
        return Err(Error::InvalidInput("frame vectors must share a dimension >= k".into()));
    }
    let cols = DMatrix::from_columns(frame);
    let all: Vec<usize> = (0..k).collect();
    let subsets = k_subsets(d, k);
    Ok(DVector::from_iterator(
        subsets.len(),
        subsets.iter().map(|rows| minor(&cols, rows, &all)),
    ))
}

/// `|v_1 ^ ... ^ v_k| / prod |v_i|`; zero exactly for dependent frames.
pub fn frame_volume_ratio(frame: &[DVector<f64>]) -> Result<f64> {
    let w = wedge(frame)?;
    let prod: f64 = frame.iter().map(|v| v.norm()).product();
    if prod == 0.0 {
        return Ok(0.0);
    }
    Ok(w.norm() / prod)
}
