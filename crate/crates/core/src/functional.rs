//! Linear functionals on Cartan coordinates, written over the weights
//! `chi_k = lambda_1 + .. + lambda_k` for `k = 1..d-1`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Functional {
    name: String,
    coeffs: Vec<f64>,
}

impl Functional {
    pub fn new(name: impl Into<String>, coeffs: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if coeffs.is_empty() {
            return Err(Error::InvalidInput(format!("functional `{name}` has no coefficients")));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("functional `{name}` has non-finite coefficients")));
        }
        if coeffs.iter().all(|&c| c == 0.0) {
            return Err(Error::InvalidInput(format!("functional `{name}` is identically zero")));
        }
        Ok(Functional { name, coeffs })
    }

    /// `chi_1 + chi_(d-1)`, which is `lambda_1 - lambda_d` on `SL(d)`.
    pub fn length(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let mut c = vec![0.0; dim - 1];
        c[0] += 1.0;
        c[dim - 2] += 1.0;
        Self::new("length", c)
    }

    /// The weight `chi_k` itself.
    pub fn chi(dim: usize, k: usize) -> Result<Self> {
        check_dim(dim)?;
        if k == 0 || k >= dim {
            return Err(Error::InvalidInput(format!("chi{k} undefined in dimension {dim}")));
        }
        let mut c = vec![0.0; dim - 1];
        c[k - 1] = 1.0;
        Self::new(format!("chi{k}"), c)
    }

    /// `length`, `chi<k>`, resolved for the given dimension.
    pub fn named(name: &str, dim: usize) -> Result<Self> {
        if name == "length" {
            return Self::length(dim);
        }
        match name.strip_prefix("chi").map(str::parse::<usize>) {
            Some(Ok(k)) => Self::chi(dim, k),
            _ => Err(Error::InvalidConfig(format!(
                "unknown functional `{name}` (expected `length` or `chi<k>`)"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len() + 1
    }

    /// Levels `k` with a nonzero coefficient.
    pub fn levels(&self) -> Vec<usize> {
        (1..=self.coeffs.len()).filter(|&k| self.coeffs[k - 1] != 0.0).collect()
    }

    /// Value on a sorted Cartan vector (Jordan or Cartan projection).
    pub fn eval(&self, v: &[f64]) -> f64 {
        let mut partial = 0.0;
        let mut total = 0.0;
        for (c, x) in self.coeffs.iter().zip(v) {
            partial += x;
            total += c * partial;
        }
        total
    }

    /// Value on per-level weight components; `None` if a needed one is missing.
    pub fn eval_weights(&self, w: &[Option<f64>]) -> Option<f64> {
        self.coeffs
            .iter()
            .zip(w)
            .try_fold(0.0, |acc, (&c, x)| if c == 0.0 { Some(acc) } else { x.map(|x| acc + c * x) })
    }

    /// Whether the functional commutes with the opposition involution.
    pub fn is_opposition_symmetric(&self) -> bool {
        self.coeffs.iter().eq(self.coeffs.iter().rev())
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::InvalidConfig(format!(
                "functional `{}` has {} coefficients but the representation has dimension {dim}",
                self.name,
                self.coeffs.len()
            )));
        }
        Ok(())
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidInput(format!("dimension {dim} has no weights")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_is_top_minus_bottom() {
        let l = Functional::length(3).unwrap();
        assert_eq!(l.coeffs(), &[1.0, 1.0]);
        assert!((l.eval(&[2.0, 0.5, -2.5]) - 4.5).abs() < 1e-15);
        assert_eq!(Functional::length(2).unwrap().coeffs(), &[2.0]);
        assert!(l.is_opposition_symmetric());
        assert!(!Functional::chi(3, 1).unwrap().is_opposition_symmetric());
    }

    #[test]
    fn zero_functional_rejected() {
        assert!(Functional::new("zero", vec![0.0, 0.0]).is_err());
        assert!(Functional::named("chi3", 3).is_err());
        assert!(Functional::named("psi", 3).is_err());
        assert_eq!(Functional::named("chi2", 4).unwrap().levels(), vec![2]);
    }

    #[test]
    fn weights_need_touched_levels_only() {
        let chi1 = Functional::chi(3, 1).unwrap();
        assert_eq!(chi1.eval_weights(&[Some(-0.5), None]), Some(-0.5));
        assert_eq!(Functional::length(3).unwrap().eval_weights(&[Some(-0.5), None]), None);
    }
}
