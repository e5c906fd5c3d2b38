//! Jordan and Cartan projections, attracting data and Gromov products.
//!
//! Everything is read off the exterior tower `Λ^1 g, .., Λ^(d-1) g`: the sum of
//! the top `k` Jordan (Cartan) entries is the log spectral radius (log operator
//! norm) of `Λ^k g`, and the attracting `k`-plane of `g` is the top eigenvector
//! of `Λ^k g`. Only dominant quantities are ever extracted, which keeps long,
//! badly conditioned products accurate where a direct eigen-solve of `g` would
//! lose the small eigenvalues to rounding.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{exterior_power, wedge};
use crate::representation::ExteriorLift;
use crate::scaled::{top_singular_value, ScaledMatrix};
use crate::words::Word;

/// Gaps at or below this (natural-log units) count as non-proximal.
pub const GAP_TOLERANCE: f64 = 1e-6;
/// Largest condition number accepted by the single-matrix entry points.
pub const MAX_CONDITION: f64 = 1e12;
pub const DEFAULT_SAMPLES: usize = 256;
const SAMPLE_SEED: u64 = 0x5eed_0fc0_ffee;

fn eigenvalue_moduli(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let schur = m.clone().try_schur(f64::EPSILON, 10_000).ok_or_else(|| {
        Error::Numeric(format!(
            "eigenvalue iteration did not converge ({}x{}, condition {:.3e})",
            m.nrows(),
            m.ncols(),
            condition_number(m).unwrap_or(f64::INFINITY)
        ))
    })?;
    let mut moduli: Vec<f64> = schur.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    Ok(moduli)
}

fn condition_number(m: &DMatrix<f64>) -> Option<f64> {
    let svd = m.clone().try_svd(false, false, f64::EPSILON, 10_000)?;
    let s = &svd.singular_values;
    Some(s.max() / s.min())
}

fn log_spectral_radius(m: &ScaledMatrix) -> Result<f64> {
    let top = eigenvalue_moduli(m.unit())?[0];
    if top == 0.0 {
        return Err(Error::Numeric("nilpotent matrix has no finite log spectral radius".into()));
    }
    Ok(top.ln() + m.log_scale())
}

/// Differences of cumulative logs, sorted descending.
fn from_partial_sums(partial: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = partial.windows(2).map(|w| w[1] - w[0]).collect();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

fn normalize_sign(mut v: DVector<f64>) -> DVector<f64> {
    let n = v.norm();
    v /= n;
    if let Some(x) = v.iter().find(|x| x.abs() > 1e-12) {
        if *x < 0.0 {
            v.neg_mut();
        }
    }
    v
}

/// Unit top eigenvector of `m`, given its log gap between the two largest
/// eigenvalue moduli. Repeated squaring drives `m` to its rank-one limit, then
/// a few power steps polish the direction.
fn dominant_eigenvector(m: &DMatrix<f64>, gap: f64) -> Result<DVector<f64>> {
    let squarings = (39.0 / gap).log2().ceil().clamp(1.0, 60.0) as usize;
    let mut p = m.clone();
    for _ in 0..squarings {
        p = &p * &p;
        let s = p.amax();
        if s == 0.0 || !s.is_finite() {
            return Err(Error::Numeric("power iteration collapsed".into()));
        }
        p /= s;
    }
    let best = (0..p.ncols())
        .max_by(|&a, &b| p.column(a).norm().total_cmp(&p.column(b).norm()))
        .unwrap_or(0);
    let mut v: DVector<f64> = p.column(best).into_owned();
    v /= v.norm();
    for _ in 0..2 {
        let w = m * &v;
        let n = w.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Numeric("power iteration collapsed".into()));
        }
        v = w / n;
    }
    Ok(normalize_sign(v))
}

/// `log(|theta(v)| / (|theta| |v|))`, always `<= 0`.
pub fn gromov_pair(theta: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    if theta.len() != v.len() {
        return Err(Error::InvalidInput(format!(
            "covector of length {} paired with vector of length {}",
            theta.len(),
            v.len()
        )));
    }
    let (nt, nv) = (theta.norm(), v.norm());
    if nt == 0.0 || nv == 0.0 {
        return Err(Error::InvalidInput("gromov_pair needs nonzero arguments".into()));
    }
    let ratio = (theta.dot(v) / nt / nv).abs();
    if ratio == 0.0 {
        return Err(Error::Transversality(0.0));
    }
    Ok(ratio.min(1.0).ln())
}

/// Gromov product between the `k`-planes spanned by a coframe and a frame,
/// evaluated on their wedges. `k` is the common frame length.
pub fn gromov_weight_k(theta_frame: &[DVector<f64>], v_frame: &[DVector<f64>]) -> Result<f64> {
    if theta_frame.len() != v_frame.len() {
        return Err(Error::InvalidInput("coframe and frame must have equal length".into()));
    }
    let wt = wedge(theta_frame)?;
    let wv = wedge(v_frame)?;
    if wt.norm() == 0.0 || wv.norm() == 0.0 {
        return Err(Error::Transversality(0.0));
    }
    gromov_pair(&wt, &wv)
}

/// Spectral data of one element.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralRecord {
    pub jordan: Vec<f64>,
    pub cartan: Vec<f64>,
    pub attract_vec: Option<Vec<f64>>,
    pub attract_covec: Option<Vec<f64>>,
    pub prox_gap: f64,
}

impl SpectralRecord {
    /// Largest violation of `sum_{i<=k} cartan >= sum_{i<=k} jordan`,
    /// including the equality of the full sums.
    pub fn majorization_violation(&self) -> f64 {
        let d = self.jordan.len();
        let (mut sj, mut sc, mut worst) = (0.0, 0.0, 0.0_f64);
        for k in 0..d {
            sj += self.jordan[k];
            sc += self.cartan[k];
            let scale = 1.0 + sj.abs().max(sc.abs());
            let v = if k + 1 == d { (sj - sc).abs() } else { (sj - sc).max(0.0) };
            worst = worst.max(v / scale);
        }
        worst
    }

    /// `|sum jordan - log|det||` and the same for the Cartan entries.
    pub fn det_sum_residual(&self, log_abs_det: f64) -> f64 {
        let sj: f64 = self.jordan.iter().sum();
        let sc: f64 = self.cartan.iter().sum();
        (sj - log_abs_det).abs().max((sc - log_abs_det).abs())
    }
}

/// Which clause of the `(r, eps)` test failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertClause {
    /// No spectral gap.
    Gap,
    /// Fixed points too close: `exp|Gr| > r`.
    Transversality,
    /// Points away from the repelling hyperplane are not pushed within `eps`.
    Contraction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertMethod {
    EigenGap,
    SampledContraction,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProximalityCert {
    /// `exp|Gr(g_-, g_+)|`, at least 1; infinite without a gap.
    pub r_value: f64,
    /// Contraction radius: an upper bound on the eigen-gap path, the largest
    /// sampled image distance otherwise.
    pub eps_estimate: f64,
    pub is_proximal: bool,
    pub method: CertMethod,
    pub failed: Option<CertClause>,
}

/// `Λ^1 g, .., Λ^(d-1) g` together with `log|det g|`.
#[derive(Clone, Debug)]
pub struct ExteriorTower {
    dim: usize,
    levels: Vec<ScaledMatrix>,
    log_abs_det: f64,
}

impl ExteriorTower {
    /// Tower of a single matrix, built from minors. Refuses matrices whose
    /// condition number exceeds `MAX_CONDITION`.
    pub fn from_matrix(m: &ScaledMatrix) -> Result<Self> {
        let d = m.dim();
        if d < 2 {
            return Err(Error::InvalidInput("spectral data needs dimension >= 2".into()));
        }
        let cond = condition_number(m.unit())
            .ok_or_else(|| Error::Numeric(format!("SVD did not converge on {d}x{d} matrix")))?;
        if cond > MAX_CONDITION {
            return Err(Error::Numeric(format!(
                "condition number {cond:.3e} exceeds {MAX_CONDITION:.0e}"
            )));
        }
        let levels = (1..d).map(|k| exterior_power(m, k)).collect::<Result<Vec<_>>>()?;
        Ok(ExteriorTower { dim: d, levels, log_abs_det: m.log_abs_det() })
    }

    /// Tower from precomputed levels `Λ^1 .. Λ^(d-1)`.
    pub fn from_levels(levels: Vec<ScaledMatrix>, log_abs_det: f64) -> Result<Self> {
        let dim = levels
            .first()
            .map(|m| m.dim())
            .ok_or_else(|| Error::InvalidInput("tower needs at least one level".into()))?;
        if levels.len() + 1 != dim {
            return Err(Error::InvalidInput(format!(
                "{} levels given for dimension {dim}",
                levels.len()
            )));
        }
        Ok(ExteriorTower { dim, levels, log_abs_det })
    }

    /// Tower of `rho(w)` evaluated level by level; generators are unimodular.
    pub fn from_word(lift: &ExteriorLift, w: &Word) -> Result<Self> {
        Self::from_levels(lift.evaluate_levels(w)?, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn log_abs_det(&self) -> f64 {
        self.log_abs_det
    }

    /// `Λ^k g` for `1 <= k < d`.
    pub fn level(&self, k: usize) -> &ScaledMatrix {
        &self.levels[k - 1]
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        Ok(ExteriorTower {
            dim: self.dim,
            levels: self.levels.iter().map(|m| m.pow(n)).collect::<Result<_>>()?,
            log_abs_det: self.log_abs_det * n as f64,
        })
    }

    fn cumulative(&self, f: impl Fn(&ScaledMatrix) -> Result<f64>) -> Result<Vec<f64>> {
        let mut partial = Vec::with_capacity(self.dim + 1);
        partial.push(0.0);
        for m in &self.levels {
            partial.push(f(m)?);
        }
        partial.push(self.log_abs_det);
        Ok(partial)
    }

    pub fn jordan(&self) -> Result<Vec<f64>> {
        Ok(from_partial_sums(&self.cumulative(log_spectral_radius)?))
    }

    pub fn cartan(&self) -> Result<Vec<f64>> {
        Ok(from_partial_sums(&self.cumulative(|m| m.log_norm())?))
    }

    /// `lambda_k - lambda_(k+1)` for `k = 1..d-1`.
    pub fn gaps(&self) -> Result<Vec<f64>> {
        Ok(self.jordan()?.windows(2).map(|w| w[0] - w[1]).collect())
    }

    fn level_gap(&self, k: usize, gap_tol: f64) -> Result<f64> {
        if k == 0 || k >= self.dim {
            return Err(Error::InvalidInput(format!("level {k} outside 1..{}", self.dim)));
        }
        let gap = self.gaps()?[k - 1];
        if gap <= gap_tol {
            return Err(Error::NotProximal { level: k, gap, tolerance: gap_tol });
        }
        Ok(gap)
    }

    /// Attracting `k`-plane and repelling coplane of `g` as unit vectors in
    /// `Λ^k`: the top right and left eigenvectors of `Λ^k g`.
    pub fn attracting(&self, k: usize, gap_tol: f64) -> Result<(DVector<f64>, DVector<f64>)> {
        let gap = self.level_gap(k, gap_tol)?;
        let m = self.level(k).unit();
        let v = dominant_eigenvector(m, gap)?;
        let theta = dominant_eigenvector(&m.transpose(), gap)?;
        Ok((v, theta))
    }

    /// `chi_k` component of the Gromov product at the fixed points.
    pub fn gromov_weight(&self, k: usize, gap_tol: f64) -> Result<f64> {
        let (v, theta) = self.attracting(k, gap_tol)?;
        gromov_pair(&theta, &v)
    }

    /// Weight components at every level, `None` where there is no gap.
    pub fn gromov_weights(&self, gap_tol: f64) -> Result<Vec<Option<f64>>> {
        (1..self.dim)
            .map(|k| match self.gromov_weight(k, gap_tol) {
                Ok(g) => Ok(Some(g)),
                Err(Error::NotProximal { .. }) | Err(Error::Transversality(_)) => Ok(None),
                Err(e) => Err(e),
            })
            .collect()
    }

    /// `sum_{i<=k} a_i - sum_{i<=k} lambda_i + Gr_k` at the fixed points.
    pub fn benoist_defect(&self, k: usize) -> Result<f64> {
        let gr = self.gromov_weight(k, GAP_TOLERANCE)?;
        let m = self.level(k);
        Ok(m.log_norm()? - log_spectral_radius(m)? + gr)
    }

    pub fn record(&self, gap_tol: f64) -> Result<SpectralRecord> {
        let jordan = self.jordan()?;
        let cartan = self.cartan()?;
        let prox_gap = jordan[0] - jordan[1];
        let (attract_vec, attract_covec) = if prox_gap > gap_tol {
            let (v, t) = self.attracting(1, gap_tol)?;
            (Some(v.as_slice().to_vec()), Some(t.as_slice().to_vec()))
        } else {
            (None, None)
        };
        Ok(SpectralRecord { jordan, cartan, attract_vec, attract_covec, prox_gap })
    }

    /// `(r, eps)` test on projective space `P(R^d)`.
    pub fn proximality_cert(&self, r: f64, eps: f64, n_samples: usize) -> Result<ProximalityCert> {
        if !(r > 0.0 && eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidInput(format!(
                "need r > 0 and 0 < eps < 1, got r = {r}, eps = {eps}"
            )));
        }
        let jordan = self.jordan()?;
        let gap = jordan[0] - jordan[1];
        if gap <= GAP_TOLERANCE {
            return Ok(ProximalityCert {
                r_value: f64::INFINITY,
                eps_estimate: f64::INFINITY,
                is_proximal: false,
                method: CertMethod::EigenGap,
                failed: Some(CertClause::Gap),
            });
        }
        let (v, theta) = self.attracting(1, GAP_TOLERANCE)?;
        let r_value = match gromov_pair(&theta, &v) {
            Ok(g) => (-g).exp(),
            Err(Error::Transversality(_)) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        let level = self.level(1);
        let mu = (jordan[0] - level.log_scale()).exp();
        let (eps_estimate, method) = contraction_estimate(level.unit(), mu, &v, &theta, eps, n_samples)?;
        let failed = if r_value > r {
            Some(CertClause::Transversality)
        } else if eps_estimate > eps {
            Some(CertClause::Contraction)
        } else {
            None
        };
        Ok(ProximalityCert { r_value, eps_estimate, is_proximal: failed.is_none(), method, failed })
    }
}

/// Orthonormal basis of the kernel of the unit covector `theta`.
fn hyperplane_basis(theta: &DVector<f64>) -> DMatrix<f64> {
    let d = theta.len();
    let mut cols = Vec::with_capacity(d);
    cols.push(theta.clone());
    for i in 0..d {
        if cols.len() == d {
            break;
        }
        let mut e = DVector::from_fn(d, |j, _| if i == j { 1.0 } else { 0.0 });
        for c in &cols {
            let p = c.dot(&e);
            e -= c * p;
        }
        let n = e.norm();
        if n > 1e-8 {
            cols.push(e / n);
        }
    }
    DMatrix::from_columns(&cols[1..])
}

fn sine_to(y: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let ny = y.norm();
    let along = y.dot(v);
    ((ny * ny - along * along).max(0.0)).sqrt() / ny
}

/// Contraction radius of `m` (unit part, top eigenvalue modulus `mu`) on
/// points at sine-distance `>= eps` from `ker theta`.
///
/// Splitting `x = a v + h` with `h` in the invariant hyperplane gives
/// `sin(mx, v) <= N(1 + s/c) / (mu s / c - N(1 + s/c))` where `N` is the norm of
/// `m` on the hyperplane, `c = |theta(v)|` and `s = |theta(x)| >= eps`. When that
/// bound already fits inside `eps` no sampling is needed.
fn contraction_estimate(
    m: &DMatrix<f64>,
    mu: f64,
    v: &DVector<f64>,
    theta: &DVector<f64>,
    eps: f64,
    n_samples: usize,
) -> Result<(f64, CertMethod)> {
    let q = hyperplane_basis(theta);
    let n = top_singular_value(&(m * &q))?;
    let c = theta.dot(v).abs();
    let alpha = eps / c;
    let denom = alpha * mu - n * (1.0 + alpha);
    let bound = if denom > 0.0 { n * (1.0 + alpha) / denom } else { f64::INFINITY };
    if bound <= eps {
        return Ok((bound, CertMethod::EigenGap));
    }
    let d = theta.len();
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut worst = 0.0_f64;
    for i in 0..n_samples {
        let coords = DVector::from_fn(d - 1, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let u = &q * coords;
        let nu = u.norm();
        if nu < 1e-12 {
            continue;
        }
        let s = if i % 2 == 0 { eps } else { eps + (1.0 - eps) * rng.random::<f64>() };
        let x = u * ((1.0 - s * s).sqrt() / nu) + theta * s;
        worst = worst.max(sine_to(&(m * x), v));
    }
    Ok((worst, CertMethod::SampledContraction))
}

pub fn jordan_projection(m: &ScaledMatrix) -> Result<Vec<f64>> {
    ExteriorTower::from_matrix(m)?.jordan()
}

pub fn cartan_projection(m: &ScaledMatrix) -> Result<Vec<f64>> {
    ExteriorTower::from_matrix(m)?.cartan()
}

/// Unit top right eigenvector and unit top left eigenvector (as a column).
pub fn attracting_data(m: &ScaledMatrix, gap_tol: f64) -> Result<(DVector<f64>, DVector<f64>)> {
    ExteriorTower::from_matrix(m)?.attracting(1, gap_tol)
}

pub fn spectral_record(m: &ScaledMatrix) -> Result<SpectralRecord> {
    ExteriorTower::from_matrix(m)?.record(GAP_TOLERANCE)
}

pub fn proximality_cert(m: &ScaledMatrix, r: f64, eps: f64, n_samples: usize) -> Result<ProximalityCert> {
    ExteriorTower::from_matrix(m)?.proximality_cert(r, eps, n_samples)
}

pub fn benoist_defect(m: &ScaledMatrix, k: usize) -> Result<f64> {
    ExteriorTower::from_matrix(m)?.benoist_defect(k)
}
