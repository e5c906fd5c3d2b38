//! Double-double linear algebra for residual checks of exact identities.
//!
//! In plain `f64` an identity involving `g` and `g^-1` is only reproduced to
//! about `eps * cond(g)`, which for long words says more about rounding than
//! about the identity. Carrying ~32 digits pushes that floor far below every
//! tolerance used here.

use nalgebra::{DMatrix, DVector};
use twofloat::TwoFloat;

use crate::error::{Error, Result};

pub type Dd = TwoFloat;

pub fn lift(v: &DVector<f64>) -> Vec<Dd> {
    v.iter().map(|&x| Dd::from(x)).collect()
}

pub fn dot(a: &[Dd], b: &[Dd]) -> Dd {
    a.iter().zip(b).fold(Dd::from(0.0), |acc, (x, y)| acc + *x * *y)
}

pub fn norm(a: &[Dd]) -> Dd {
    dot(a, a).sqrt()
}

/// `a / b`. The quotient operator of `TwoFloat` is only good to about `f64`
/// precision, so the two correction terms are taken explicitly.
pub fn div(a: Dd, b: Dd) -> Dd {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    Dd::new_add(q1, q2) + Dd::from(q3)
}

/// `m v` with every product and sum carried in double-double.
pub fn mat_vec(m: &DMatrix<f64>, v: &[Dd]) -> Vec<Dd> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).fold(Dd::from(0.0), |acc, j| acc + v[j] * m[(i, j)]))
        .collect()
}

/// Solves `m^T x = b` by Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
pub fn solve_transpose(m: &DMatrix<f64>, b: &[Dd]) -> Result<Vec<Dd>> {
    let n = m.nrows();
    let mut a: Vec<Vec<Dd>> = (0..n)
        .map(|i| (0..n).map(|j| Dd::from(m[(j, i)])).collect())
        .collect();
    let mut x: Vec<Dd> = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| a[p][col].abs().hi().total_cmp(&a[q][col].abs().hi()))
            .unwrap_or(col);
        if a[pivot][col].hi() == 0.0 {
            return Err(Error::Numeric("singular matrix in extended solve".into()));
        }
        a.swap(col, pivot);
        x.swap(col, pivot);
        for row in col + 1..n {
            let f = div(a[row][col], a[col][col]);
            for j in col..n {
                let t = a[col][j];
                a[row][j] -= f * t;
            }
            let t = x[col];
            x[row] -= f * t;
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for j in col + 1..n {
            s -= a[col][j] * x[j];
        }
        x[col] = div(s, a[col][col]);
    }
    Ok(x)
}

/// `ln q` for `q` near 1, with the distance to 1 taken in double-double.
pub fn ln_near_one(q: Dd) -> f64 {
    (q - Dd::from(1.0)).hi().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_recovers_known_solution() {
        let m = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, -2.0, 0.5, 3.0, 1.0, 2.0, -1.0, 5.0]);
        let x = lift(&DVector::from_vec(vec![1.0, -2.0, 0.25]));
        let b = mat_vec(&m.transpose(), &x);
        let y = solve_transpose(&m, &b).unwrap();
        for (p, q) in x.iter().zip(&y) {
            assert!((*p - *q).abs().hi() < 1e-28);
        }
    }

    #[test]
    fn carries_digits_beyond_f64() {
        let a = [Dd::from(1.0), Dd::from(1e-20)];
        let b = [Dd::from(1.0), Dd::from(1.0)];
        let s = dot(&a, &b) - Dd::from(1.0);
        assert!((s.hi() - 1e-20).abs() < 1e-35);
        let third = div(Dd::from(1.0), Dd::from(3.0));
        assert!((third * 3.0 - Dd::from(1.0)).abs().hi() < 1e-31);
        assert!(solve_transpose(&DMatrix::zeros(2, 2), &b).is_err());
    }
}
