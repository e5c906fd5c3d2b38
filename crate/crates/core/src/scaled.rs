//! Matrices carried as `exp(log_scale) * unit` with `max|unit_ij| = 1`.
//!
//! Long words overflow `f64` quickly (a length-40 word at multiplier 4 has
//! entries near `4^40`), so every product is renormalized and the scale is
//! accumulated in natural-log units. The logarithm of `|det|` is tracked
//! alongside: it is known exactly for generators and adds under products,
//! whereas recomputing it from `unit` loses all precision once the matrix is
//! badly conditioned.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ScaledMatrix {
    unit: DMatrix<f64>,
    log_scale: f64,
    log_abs_det: f64,
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

impl ScaledMatrix {
    pub fn identity(dim: usize) -> Self {
        ScaledMatrix {
            unit: DMatrix::identity(dim, dim),
            log_scale: 0.0,
            log_abs_det: 0.0,
        }
    }

    /// Wraps a plain square matrix; `log|det|` is computed by LU here, once.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidInput(format!(
                "expected a square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let det = m.clone().lu().determinant();
        Self::with_log_det(m, 0.0, det.abs().ln())
    }

    /// `exp(log_scale) * m` with a known `log|det|` of the represented matrix.
    pub fn with_log_det(m: DMatrix<f64>, log_scale: f64, log_abs_det: f64) -> Result<Self> {
        if m.iter().any(|x| !x.is_finite()) || !log_scale.is_finite() {
            return Err(Error::NumericOverflow("non-finite matrix entries".into()));
        }
        let s = max_abs(&m);
        if s == 0.0 {
            return Err(Error::InvalidInput("zero matrix has no scaled form".into()));
        }
        Ok(ScaledMatrix {
            unit: m / s,
            log_scale: log_scale + s.ln(),
            log_abs_det,
        })
    }

    pub fn unit(&self) -> &DMatrix<f64> {
        &self.unit
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// `log|det|` of the represented matrix (may be `-inf` for singular input).
    pub fn log_abs_det(&self) -> f64 {
        self.log_abs_det
    }

    pub fn dim(&self) -> usize {
        self.unit.nrows()
    }

    /// The represented matrix, if it fits in `f64`.
    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        let s = self.log_scale.exp();
        if !s.is_finite() {
            return Err(Error::NumericOverflow(format!(
                "scale exp({:.3}) is not representable",
                self.log_scale
            )));
        }
        Ok(&self.unit * s)
    }

    pub fn mul(&self, rhs: &ScaledMatrix) -> Result<ScaledMatrix> {
        if self.dim() != rhs.dim() {
            return Err(Error::InvalidInput(format!(
                "dimension mismatch {} vs {}",
                self.dim(),
                rhs.dim()
            )));
        }
        Self::with_log_det(
            &self.unit * &rhs.unit,
            self.log_scale + rhs.log_scale,
            self.log_abs_det + rhs.log_abs_det,
        )
    }

    pub fn pow(&self, n: u32) -> Result<ScaledMatrix> {
        let mut result = ScaledMatrix::identity(self.dim());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    pub fn transpose(&self) -> ScaledMatrix {
        ScaledMatrix {
            unit: self.unit.transpose(),
            log_scale: self.log_scale,
            log_abs_det: self.log_abs_det,
        }
    }

    /// Image of `v` as a direction plus `log` of the norm ratio `|Mv| / |v|`.
    pub fn apply(&self, v: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
        let nv = v.norm();
        if nv == 0.0 {
            return Err(Error::InvalidInput("cannot apply to the zero vector".into()));
        }
        let w = &self.unit * v;
        let nw = w.norm();
        if nw == 0.0 || !nw.is_finite() {
            return Err(Error::Numeric("image vector vanished".into()));
        }
        Ok((w / nw, nw.ln() - nv.ln() + self.log_scale))
    }

    /// Log of the largest singular value.
    pub fn log_norm(&self) -> Result<f64> {
        Ok(top_singular_value(&self.unit)?.ln() + self.log_scale)
    }

    /// Relative deviation from another scaled matrix, measured on the larger one.
    pub fn relative_distance(&self, other: &ScaledMatrix) -> f64 {
        let shift = self.log_scale.max(other.log_scale);
        let a = &self.unit * (self.log_scale - shift).exp();
        let b = &other.unit * (other.log_scale - shift).exp();
        let denom = max_abs(&a).max(max_abs(&b)).max(f64::MIN_POSITIVE);
        max_abs(&(a - b)) / denom
    }
}

pub(crate) fn top_singular_value(m: &DMatrix<f64>) -> Result<f64> {
    let svd = m
        .clone()
        .try_svd(false, false, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numeric(format!("SVD did not converge on {}x{} matrix", m.nrows(), m.ncols())))?;
    Ok(svd.singular_values.max())
}
