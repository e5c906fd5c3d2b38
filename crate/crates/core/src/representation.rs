//! Linear representations of free groups into `SL(d, R)`.
//!
//! Generators and their inverses are stored side by side, indexed by letter
//! code, so evaluating a word never inverts a matrix.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exterior::{binomial, exterior_power};
use crate::scaled::ScaledMatrix;
use crate::words::{Alphabet, Word};

pub const DEFAULT_DET_TOLERANCE: f64 = 1e-9;

/// Largest symmetric power supported by [`sym_power`].
pub const MAX_SYM_POWER: usize = 12;

#[derive(Clone, Debug)]
pub struct GroupRep {
    label: String,
    dim: usize,
    alphabet: Alphabet,
    /// indexed by letter code
    gens: Vec<ScaledMatrix>,
    raw: Vec<DMatrix<f64>>,
    det_tolerance: f64,
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

impl GroupRep {
    /// Builds a representation from `(generator, inverse)` pairs, validating
    /// unimodularity and the stored inverses.
    ///
    /// Both checks are relaxed by the conditioning of the generator, since a
    /// determinant computed in floating point from a matrix with condition
    /// number `κ` is only good to roughly `κ·ε`.
    pub fn new(
        label: impl Into<String>,
        pairs: Vec<(DMatrix<f64>, DMatrix<f64>)>,
        det_tolerance: f64,
    ) -> Result<Self> {
        let label = label.into();
        let alphabet = Alphabet::new(pairs.len())?;
        let dim = pairs
            .first()
            .map(|(g, _)| g.nrows())
            .ok_or_else(|| Error::InvalidConfig("representation needs at least one generator".into()))?;
        if dim < 2 {
            return Err(Error::InvalidConfig(format!("dimension must be at least 2, got {dim}")));
        }
        let mut gens = Vec::with_capacity(2 * pairs.len());
        let mut raw = Vec::with_capacity(2 * pairs.len());
        for (i, (g, ginv)) in pairs.into_iter().enumerate() {
            for (name, m) in [("generator", &g), ("inverse", &ginv)] {
                if m.shape() != (dim, dim) {
                    return Err(Error::InvalidConfig(format!(
                        "{name} {} has shape {:?}, expected {dim}x{dim}",
                        i + 1,
                        m.shape()
                    )));
                }
                if m.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NumericOverflow(format!("{name} {} has non-finite entries", i + 1)));
                }
            }
            let kappa = dim as f64 * max_abs(&g) * max_abs(&ginv);
            let slack = 1e-14 * kappa;
            let det = g.clone().lu().determinant();
            if (det.abs() - 1.0).abs() > det_tolerance + slack {
                return Err(Error::InvalidConfig(format!(
                    "generator {} has |det| = {:.12}, expected 1 within {det_tolerance:e}",
                    i + 1,
                    det.abs()
                )));
            }
            let residual = max_abs(&(&ginv * &g - DMatrix::<f64>::identity(dim, dim)));
            if residual > 1e-10 * kappa.max(1.0) {
                return Err(Error::InvalidConfig(format!(
                    "stored inverse of generator {} is off by {residual:.3e}",
                    i + 1
                )));
            }
            // the group lands in SL±(d); |det| is taken to be exactly one
            gens.push(ScaledMatrix::with_log_det(g.clone(), 0.0, 0.0)?);
            gens.push(ScaledMatrix::with_log_det(ginv.clone(), 0.0, 0.0)?);
            raw.push(g);
            raw.push(ginv);
        }
        Ok(GroupRep {
            label,
            dim,
            alphabet,
            gens,
            raw,
            det_tolerance,
        })
    }

    /// Like [`GroupRep::new`], computing each inverse once by LU.
    pub fn from_generators(label: impl Into<String>, gens: Vec<DMatrix<f64>>, det_tolerance: f64) -> Result<Self> {
        let pairs = gens
            .into_iter()
            .enumerate()
            .map(|(i, g)| {
                let inv = g
                    .clone()
                    .try_inverse()
                    .ok_or_else(|| Error::InvalidConfig(format!("generator {} is singular", i + 1)))?;
                Ok((g, inv))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(label, pairs, det_tolerance)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn det_tolerance(&self) -> f64 {
        self.det_tolerance
    }

    /// Matrix of generator `i` (zero based), or of its inverse.
    pub fn generator(&self, i: usize, inverse: bool) -> &DMatrix<f64> {
        &self.raw[2 * i + usize::from(inverse)]
    }

    /// `rho(w)` as a product in word order, renormalized after each factor.
    pub fn evaluate(&self, w: &Word) -> Result<ScaledMatrix> {
        evaluate_product(self.dim, w, &self.gens)
    }

    /// The representation `Λ^k ∘ rho` on `C(d, k)` dimensions.
    pub fn exterior_power_rep(&self, k: usize) -> Result<GroupRep> {
        if k == 0 || k > self.dim {
            return Err(Error::InvalidInput(format!("exterior degree {k} outside 1..={}", self.dim)));
        }
        let pairs = (0..self.alphabet.rank())
            .map(|i| {
                let g = exterior_power(&self.gens[2 * i], k)?.to_matrix()?;
                let ginv = exterior_power(&self.gens[2 * i + 1], k)?.to_matrix()?;
                Ok((g, ginv))
            })
            .collect::<Result<Vec<_>>>()?;
        GroupRep::new(format!("wedge^{k}({})", self.label), pairs, self.det_tolerance)
    }
}

pub(crate) fn evaluate_product(dim: usize, w: &Word, gens: &[ScaledMatrix]) -> Result<ScaledMatrix> {
    let mut acc = DMatrix::<f64>::identity(dim, dim);
    let mut tmp = DMatrix::<f64>::zeros(dim, dim);
    let mut log_scale = 0.0;
    let mut log_det = 0.0;
    for l in w.letters() {
        let g = gens
            .get(l.code() as usize)
            .ok_or_else(|| Error::InvalidInput(format!("letter {} outside representation", l.to_char())))?;
        acc.mul_to(g.unit(), &mut tmp);
        std::mem::swap(&mut acc, &mut tmp);
        let s = max_abs(&acc);
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::NumericOverflow(format!("product degenerated while evaluating {w}")));
        }
        acc /= s;
        log_scale += g.log_scale() + s.ln();
        log_det += g.log_abs_det();
    }
    ScaledMatrix::with_log_det(acc, log_scale, log_det)
}

fn rotation(angle: f64) -> DMatrix<f64> {
    let (s, c) = angle.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// Rank-2 Schottky group in `SL(2, R)`: `a = diag(λ, 1/λ)` and `b` its
/// conjugate by the rotation through `angle`.
pub fn schottky_sl2(multiplier: f64, angle: f64) -> Result<GroupRep> {
    if !(multiplier.is_finite() && multiplier > 1.0) {
        return Err(Error::InvalidConfig(format!("multiplier must exceed 1, got {multiplier}")));
    }
    if !angle.is_finite() || (angle / PI - (angle / PI).round()).abs() < 1e-12 {
        return Err(Error::InvalidConfig(format!(
            "angle must not be a multiple of pi, got {angle}"
        )));
    }
    let d = DMatrix::from_row_slice(2, 2, &[multiplier, 0.0, 0.0, 1.0 / multiplier]);
    let dinv = DMatrix::from_row_slice(2, 2, &[1.0 / multiplier, 0.0, 0.0, multiplier]);
    let r = rotation(angle);
    let rt = r.transpose();
    let b = &r * &d * &rt;
    let binv = &r * &dinv * &rt;
    GroupRep::new(
        format!("schottky_sl2(multiplier={multiplier}, angle={angle})"),
        vec![(d, dinv), (b, binv)],
        DEFAULT_DET_TOLERANCE,
    )
}

fn poly_mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Action of a 2x2 matrix on degree-`k` binary forms in the monomial basis
/// `x^k, x^(k-1) y, ..., y^k`.
pub fn sym_power_matrix(g: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let (a, b, c, d) = (g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
    // g·x = a x + c y, g·y = b x + d y; coefficient index = power of y
    let gx = [a, c];
    let gy = [b, d];
    let mut m = DMatrix::zeros(k + 1, k + 1);
    for i in 0..=k {
        let mut p = vec![1.0];
        for _ in 0..k - i {
            p = poly_mul(&p, &gx);
        }
        for _ in 0..i {
            p = poly_mul(&p, &gy);
        }
        for (j, coeff) in p.into_iter().enumerate() {
            m[(j, i)] = coeff;
        }
    }
    m
}

/// Symmetric-power lift of a two-dimensional representation to dimension `k + 1`.
pub fn sym_power(rep2: &GroupRep, k: usize) -> Result<GroupRep> {
    if rep2.dim() != 2 {
        return Err(Error::InvalidConfig(format!(
            "symmetric powers need a 2-dimensional representation, got dimension {}",
            rep2.dim()
        )));
    }
    if k == 0 || k > MAX_SYM_POWER {
        return Err(Error::InvalidConfig(format!("symmetric power must be in 1..={MAX_SYM_POWER}, got {k}")));
    }
    let pairs = (0..rep2.alphabet().rank())
        .map(|i| {
            (
                sym_power_matrix(rep2.generator(i, false), k),
                sym_power_matrix(rep2.generator(i, true), k),
            )
        })
        .collect();
    GroupRep::new(format!("sym^{k}({})", rep2.label()), pairs, rep2.det_tolerance())
}

/// Generator matrices lifted to every exterior power `Λ^1 .. Λ^(d-1)`, used to
/// evaluate words level by level without forming minors of long products.
#[derive(Clone, Debug)]
pub struct ExteriorLift {
    rep: GroupRep,
    /// `levels[k-1][code]` is `Λ^k` of the generator with that letter code
    levels: Vec<Vec<ScaledMatrix>>,
}

impl ExteriorLift {
    pub fn new(rep: &GroupRep) -> Result<Self> {
        let d = rep.dim();
        let levels = (1..d)
            .map(|k| {
                rep.gens
                    .iter()
                    .map(|g| {
                        let lifted = exterior_power(g, k)?;
                        ScaledMatrix::with_log_det(lifted.unit().clone(), lifted.log_scale(), 0.0)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExteriorLift { rep: rep.clone(), levels })
    }

    pub fn rep(&self) -> &GroupRep {
        &self.rep
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    /// `Λ^k rho(w)` for every `k = 1..d-1`.
    pub fn evaluate_levels(&self, w: &Word) -> Result<Vec<ScaledMatrix>> {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, gens)| evaluate_product(binomial(self.dim(), i + 1), w, gens))
            .collect()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepFile {
    label: String,
    dim: usize,
    #[serde(default)]
    det_tolerance: Option<f64>,
    generators: Vec<GeneratorEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorEntry {
    matrix: Vec<f64>,
    #[serde(default)]
    inverse: Option<Vec<f64>>,
}

impl GroupRep {
    /// Parses a representation definition:
    ///
    /// ```toml
    /// label = "example"
    /// dim = 2
    /// [[generators]]
    /// matrix = [4.0, 0.0, 0.0, 0.25]      # row-major
    /// inverse = [0.25, 0.0, 0.0, 4.0]     # optional
    /// ```
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: RepFile = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let d = file.dim;
        let to_matrix = |what: &str, i: usize, v: &[f64]| {
            if v.len() != d * d {
                return Err(Error::InvalidConfig(format!(
                    "{what} {} has {} entries, expected {}",
                    i + 1,
                    v.len(),
                    d * d
                )));
            }
            Ok(DMatrix::from_row_slice(d, d, v))
        };
        let tol = file.det_tolerance.unwrap_or(DEFAULT_DET_TOLERANCE);
        let mut pairs = Vec::new();
        for (i, g) in file.generators.iter().enumerate() {
            let m = to_matrix("generator", i, &g.matrix)?;
            let inv = match &g.inverse {
                Some(v) => to_matrix("inverse", i, v)?,
                None => m
                    .clone()
                    .try_inverse()
                    .ok_or_else(|| Error::InvalidConfig(format!("generator {} is singular", i + 1)))?,
            };
            pairs.push((m, inv));
        }
        GroupRep::new(file.label, pairs, tol)
    }
}
