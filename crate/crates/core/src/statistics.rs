//! Period datasets and the counting / central-limit statistics computed on them.
//!
//! A dataset holds one record per conjugacy class up to a cyclic length. Counts
//! are only exact below the completeness horizon: the smallest period among
//! classes of the maximal length. Longer classes are not enumerated, so grids
//! never extend past it.
// `!(a < b)` is the NaN-rejecting comparison, kept deliberately.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::cocycles::transverse_representative;
use crate::error::{Error, Result};
use crate::functional::Functional;
use crate::representation::ExteriorLift;
use crate::spectral::{ProximalityCert, DEFAULT_SAMPLES};
use crate::words::{enumerate_classes_with_budget, CountMode, CyclicWord, DEFAULT_CLASS_BUDGET};

/// Minimum number of classes below every threshold of a CLT grid.
pub const MIN_CLASSES_PER_T: usize = 200;
pub const DEFAULT_GRID_POINTS: usize = 8;
pub const DEFAULT_GRID_START: f64 = 0.4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodRecord {
    pub class_id: usize,
    pub word: String,
    pub length: usize,
    /// Rotation of the canonical word at which fixed-point data was read.
    pub rotation: usize,
    /// Gap above tolerance at every level.
    pub proximal: bool,
    pub prox_gap: f64,
    /// `phi(lambda)` per functional.
    pub jordan_period: Vec<f64>,
    /// `phi(a)` per functional.
    pub cartan_value: Vec<f64>,
    /// `phi` of the Gromov weights at the fixed points, per functional.
    pub class_gromov: Vec<Option<f64>>,
    pub cert: Option<ProximalityCert>,
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub functionals: Vec<Functional>,
    pub mode: CountMode,
    /// Enumeration bound; `None` for synthetic data.
    pub max_len: Option<usize>,
    pub r: f64,
    pub eps: f64,
    pub records: Vec<PeriodRecord>,
}

#[derive(Clone, Copy, Debug)]
pub struct CollectOptions {
    pub max_len: usize,
    pub mode: CountMode,
    pub r: f64,
    pub eps: f64,
    pub n_samples: usize,
    pub class_budget: u64,
}

impl CollectOptions {
    pub fn new(max_len: usize, mode: CountMode) -> Self {
        CollectOptions {
            max_len,
            mode,
            r: 1.2,
            eps: 0.05,
            n_samples: DEFAULT_SAMPLES,
            class_budget: DEFAULT_CLASS_BUDGET,
        }
    }
}

fn class_record(
    lift: &ExteriorLift,
    functionals: &[Functional],
    opts: &CollectOptions,
    class_id: usize,
    cls: &CyclicWord,
) -> Result<PeriodRecord> {
    let rep = transverse_representative(lift, cls)?;
    let jordan = rep.tower.jordan()?;
    let cartan = rep.tower.cartan()?;
    let cert = rep.tower.proximality_cert(opts.r, opts.eps, opts.n_samples)?;
    Ok(PeriodRecord {
        class_id,
        word: cls.to_string(),
        length: cls.len(),
        rotation: rep.rotation,
        proximal: rep.weights.iter().all(Option::is_some),
        prox_gap: jordan[0] - jordan[1],
        jordan_period: functionals.iter().map(|f| f.eval(&jordan)).collect(),
        cartan_value: functionals.iter().map(|f| f.eval(&cartan)).collect(),
        class_gromov: functionals.iter().map(|f| f.eval_weights(&rep.weights)).collect(),
        cert: Some(cert),
    })
}

/// One record per class up to `opts.max_len`, in enumeration order. The map
/// runs on the current rayon pool; the result does not depend on its size.
pub fn collect(lift: &ExteriorLift, functionals: &[Functional], opts: &CollectOptions) -> Result<Dataset> {
    if functionals.is_empty() {
        return Err(Error::InvalidInput("at least one functional is required".into()));
    }
    for f in functionals {
        f.check_dim(lift.dim())?;
    }
    let classes = enumerate_classes_with_budget(lift.rep().alphabet(), opts.max_len, opts.mode, opts.class_budget)?;
    let records = classes
        .par_iter()
        .enumerate()
        .map(|(i, cls)| class_record(lift, functionals, opts, i, cls))
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        functionals: functionals.to_vec(),
        mode: opts.mode,
        max_len: Some(opts.max_len),
        r: opts.r,
        eps: opts.eps,
        records,
    })
}

impl Dataset {
    pub fn functional_index(&self, name: &str) -> Result<usize> {
        self.functionals
            .iter()
            .position(|f| f.name() == name)
            .ok_or_else(|| Error::InvalidConfig(format!("functional `{name}` is not in the dataset")))
    }

    pub fn exceptional(&self) -> usize {
        self.records.iter().filter(|r| !r.proximal).count()
    }

    /// Sorted `phi`-periods.
    fn sorted_periods(&self, phi: usize) -> Vec<f64> {
        let mut p: Vec<f64> = self.records.iter().map(|r| r.jordan_period[phi]).collect();
        p.sort_by(f64::total_cmp);
        p
    }

    /// Largest `t` up to which the counts are exact.
    pub fn completeness_horizon(&self, phi: usize) -> Result<f64> {
        let it = self.records.iter();
        let horizon = match self.max_len {
            Some(n) => it.filter(|r| r.length == n).map(|r| r.jordan_period[phi]).fold(f64::INFINITY, f64::min),
            None => it.map(|r| r.jordan_period[phi]).fold(f64::NEG_INFINITY, f64::max),
        };
        if !horizon.is_finite() {
            return Err(Error::InsufficientData("dataset has no classes to bound the counts".into()));
        }
        Ok(horizon)
    }

    /// `points` evenly spaced thresholds spanning `[start * T, T]` for the
    /// completeness horizon `T`.
    pub fn t_grid(&self, phi: usize, start: f64, points: usize) -> Result<Vec<f64>> {
        let t = self.completeness_horizon(phi)?;
        linspace(start * t, t, points)
    }

    /// Like [`Dataset::t_grid`], but starting no lower than the period of the
    /// `MIN_CLASSES_PER_T`-th class so every threshold has enough samples.
    pub fn clt_grid(&self, phi: usize, start: f64, points: usize) -> Result<Vec<f64>> {
        let t = self.completeness_horizon(phi)?;
        let sorted = self.sorted_periods(phi);
        let floor = sorted
            .get(MIN_CLASSES_PER_T - 1)
            .copied()
            .ok_or_else(|| Error::InsufficientData(format!("fewer than {MIN_CLASSES_PER_T} classes")))?;
        let lo = (start * t).max(floor);
        if lo >= t {
            return Err(Error::InsufficientData(format!(
                "only {} classes below the completeness horizon {t:.4}, need {MIN_CLASSES_PER_T}",
                count_le(&sorted, t)
            )));
        }
        linspace(lo, t, points)
    }
}

pub fn linspace(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(lo < hi) {
        return Err(Error::InvalidInput(format!("cannot space {points} points over [{lo}, {hi}]")));
    }
    Ok((0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect())
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.len() < 3 {
        return Err(Error::InvalidConfig("a t-grid needs at least 3 points".into()));
    }
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidConfig("t-grid must be strictly increasing".into()));
    }
    Ok(())
}

fn count_le(sorted: &[f64], t: f64) -> usize {
    sorted.partition_point(|&p| p <= t)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    pub functional: String,
    pub mode: CountMode,
    pub h_hat: f64,
    pub stderr: f64,
    pub t_range: (f64, f64),
    pub t_grid: Vec<f64>,
    pub counts: Vec<usize>,
    /// `h t exp(-h t) N(t)` with the fitted `h`.
    pub normalization: Vec<f64>,
}

fn growth_model(h: f64, t: f64) -> f64 {
    h * t - (h * t).ln()
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// Least-squares fit of `log N(t) = h t - log(h t)` over the grid.
pub fn count_and_fit(ds: &Dataset, order: usize, t_grid: &[f64]) -> Result<GrowthFit> {
    check_grid(t_grid)?;
    let phi = &ds.functionals[order];
    let bad: Vec<String> = ds
        .records
        .iter()
        .filter(|r| !(r.jordan_period[order] > 0.0))
        .take(20)
        .map(|r| r.word.clone())
        .collect();
    if !bad.is_empty() {
        return Err(Error::DualConeViolation { functional: phi.name().to_string(), classes: bad });
    }
    if ds.records.len() < 2 {
        return Err(Error::InsufficientData(format!("{} classes cannot determine a growth rate", ds.records.len())));
    }
    let sorted = ds.sorted_periods(order);
    let counts: Vec<usize> = t_grid.iter().map(|&t| count_le(&sorted, t)).collect();
    if counts.contains(&0) || counts.first() == counts.last() {
        return Err(Error::InsufficientData("counts do not grow across the t-grid".into()));
    }
    let logs: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let sse = |h: f64| -> f64 {
        t_grid.iter().zip(&logs).map(|(&t, &y)| (y - growth_model(h, t)).powi(2)).sum()
    };
    let (t0, t1) = (t_grid[0], *t_grid.last().unwrap());
    let slope = (logs.last().unwrap() - logs[0]) / (t1 - t0);
    let h_hat = golden_min(sse, slope.max(1e-3) / 10.0, slope.max(1e-3) * 10.0);
    let n = t_grid.len() as f64;
    let s2 = sse(h_hat) / (n - 1.0);
    let curvature: f64 = t_grid.iter().map(|&t| (t - 1.0 / h_hat).powi(2)).sum();
    let normalization = t_grid
        .iter()
        .zip(&counts)
        .map(|(&t, &c)| h_hat * t * (-h_hat * t).exp() * c as f64)
        .collect();
    Ok(GrowthFit {
        functional: phi.name().to_string(),
        mode: ds.mode,
        h_hat,
        stderr: (s2 / curvature).sqrt(),
        t_range: (t0, t1),
        t_grid: t_grid.to_vec(),
        counts,
        normalization,
    })
}

/// Standard normal mass of `[a, b]`; either end may be infinite.
pub fn gaussian_cdf_interval(a: f64, b: f64) -> Result<f64> {
    if a.is_nan() || b.is_nan() || a > b {
        return Err(Error::InvalidInput(format!("interval [{a}, {b}] is empty or undefined")));
    }
    let n = Normal::standard();
    // subtract upper tails when both ends are positive to avoid cancellation
    Ok(if a >= 0.0 { n.sf(a) - n.sf(b) } else { n.cdf(b) - n.cdf(a) })
}

/// One-sample Kolmogorov-Smirnov distance to the standard normal.
pub fn ks_distance(samples: &[f64]) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let normal = Normal::standard();
    s.iter().enumerate().fold(0.0_f64, |acc, (i, &x)| {
        let f = normal.cdf(x);
        acc.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Ordinary least squares `y = slope x + intercept`, with `R^2`.
fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let (mx, _) = mean_var(x);
    let (my, _) = mean_var(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, my - slope * mx, r2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    /// `phi(lambda)`, the period.
    Jordan,
    /// `phi(a)`, the Cartan value.
    Cartan,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalMass {
    pub lower: f64,
    /// `None` stands for `+inf`.
    pub upper: Option<f64>,
    pub observed: f64,
    /// `h t exp(-h t)` times the number of normalized samples in the interval.
    pub weighted: f64,
    pub gaussian: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CltPoint {
    pub t: f64,
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub normalized_mean: f64,
    pub normalized_variance: f64,
    pub ks: f64,
    pub normalization: f64,
    pub masses: Vec<IntervalMass>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CltReport {
    pub order_functional: String,
    pub observed_functional: String,
    pub observable: Observable,
    pub self_conditioned: bool,
    pub mode: CountMode,
    pub t_grid: Vec<f64>,
    pub l_hat: f64,
    pub l_intercept: f64,
    pub l_r2: f64,
    pub sigma_hat: f64,
    pub sigma2_intercept: f64,
    pub sigma2_r2: f64,
    pub h_hat: f64,
    pub points: Vec<CltPoint>,
    /// Normalized samples at the last threshold.
    #[serde(skip)]
    pub final_samples: Vec<f64>,
}

impl CltReport {
    pub fn final_point(&self) -> &CltPoint {
        self.points.last().expect("report has at least three points")
    }
}

const PANEL: [(f64, f64); 3] = [(-1.0, 1.0), (-2.0, 2.0), (0.0, f64::INFINITY)];

/// Empirical CLT for `obs` among classes ordered by `order`.
///
/// `L` and `sigma^2` are the slopes of the conditional mean and variance of
/// the observable against `t`; samples are centred on the fitted line
/// `L t + b` (intercept included) and scaled by `sigma sqrt(t)`.
pub fn clt_report(
    ds: &Dataset,
    order: usize,
    obs: usize,
    observable: Observable,
    t_grid: &[f64],
    fit: &GrowthFit,
) -> Result<CltReport> {
    check_grid(t_grid)?;
    let value = |r: &PeriodRecord| match observable {
        Observable::Jordan => r.jordan_period[obs],
        Observable::Cartan => r.cartan_value[obs],
    };
    let mut selections = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let sel: Vec<f64> = ds.records.iter().filter(|r| r.jordan_period[order] <= t).map(value).collect();
        if sel.len() < MIN_CLASSES_PER_T {
            return Err(Error::InsufficientData(format!(
                "{} classes below t = {t:.4}, need {MIN_CLASSES_PER_T}",
                sel.len()
            )));
        }
        selections.push(sel);
    }
    let moments: Vec<(f64, f64)> = selections.iter().map(|s| mean_var(s)).collect();
    let means: Vec<f64> = moments.iter().map(|m| m.0).collect();
    let vars: Vec<f64> = moments.iter().map(|m| m.1).collect();
    let (l_hat, l_intercept, l_r2) = ols(t_grid, &means);
    let (sigma2, sigma2_intercept, sigma2_r2) = ols(t_grid, &vars);
    let order_name = ds.functionals[order].name().to_string();
    let obs_name = ds.functionals[obs].name().to_string();
    if !(sigma2 > 0.0) {
        return Err(Error::Degenerate(format!(
            "variance of `{obs_name}` ordered by `{order_name}` does not grow with t (slope {sigma2:.3e})"
        )));
    }
    let sigma_hat = sigma2.sqrt();
    let mut points = Vec::with_capacity(t_grid.len());
    let mut final_samples = Vec::new();
    for ((&t, sel), &(mean, variance)) in t_grid.iter().zip(&selections).zip(&moments) {
        let z: Vec<f64> = sel.iter().map(|x| (x - l_hat * t - l_intercept) / (sigma_hat * t.sqrt())).collect();
        let (normalized_mean, normalized_variance) = mean_var(&z);
        let weight = fit.h_hat * t * (-fit.h_hat * t).exp();
        let masses = PANEL
            .iter()
            .map(|&(a, b)| {
                let inside = z.iter().filter(|&&x| a < x && x < b).count();
                Ok(IntervalMass {
                    lower: a,
                    upper: b.is_finite().then_some(b),
                    observed: inside as f64 / z.len() as f64,
                    weighted: weight * inside as f64,
                    gaussian: gaussian_cdf_interval(a, b)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        points.push(CltPoint {
            t,
            count: sel.len(),
            mean,
            variance,
            normalized_mean,
            normalized_variance,
            ks: ks_distance(&z),
            normalization: weight * sel.len() as f64,
            masses,
        });
        final_samples = z;
    }
    Ok(CltReport {
        order_functional: order_name.clone(),
        observed_functional: obs_name.clone(),
        observable,
        self_conditioned: observable == Observable::Jordan && (order == obs || order_name == obs_name),
        mode: ds.mode,
        t_grid: t_grid.to_vec(),
        l_hat,
        l_intercept,
        l_r2,
        sigma_hat,
        sigma2_intercept,
        sigma2_r2,
        h_hat: fit.h_hat,
        points,
        final_samples,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProximalPoint {
    pub t: f64,
    pub count: usize,
    pub certified: usize,
    pub fraction: f64,
    /// `h t exp(-h t)` times the certified count.
    pub weighted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProximalReport {
    pub r: f64,
    pub eps: f64,
    pub points: Vec<ProximalPoint>,
    pub warnings: Vec<String>,
}

/// Certified `(r, eps)`-proximal classes below each threshold.
pub fn proximal_fraction(ds: &Dataset, order: usize, t_grid: &[f64], fit: &GrowthFit) -> Result<ProximalReport> {
    check_grid(t_grid)?;
    let certified = |r: &PeriodRecord| r.cert.as_ref().is_some_and(|c| c.is_proximal);
    let points = t_grid
        .iter()
        .map(|&t| {
            let below = ds.records.iter().filter(|r| r.jordan_period[order] <= t);
            let (count, ok) = below.fold((0, 0), |(n, k), r| (n + 1, k + certified(r) as usize));
            ProximalPoint {
                t,
                count,
                certified: ok,
                fraction: if count == 0 { 0.0 } else { ok as f64 / count as f64 },
                weighted: fit.h_hat * t * (-fit.h_hat * t).exp() * ok as f64,
            }
        })
        .collect();
    let max_r = ds
        .records
        .iter()
        .filter_map(|r| r.cert.as_ref())
        .map(|c| c.r_value)
        .filter(|r| r.is_finite())
        .fold(0.0_f64, f64::max);
    let mut warnings = Vec::new();
    if ds.r >= max_r {
        warnings.push(format!(
            "r = {} is at least every observed exp|Gr| (max {max_r:.6}); the transversality clause excludes nothing",
            ds.r
        ));
    }
    Ok(ProximalReport { r: ds.r, eps: ds.eps, points, warnings })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenoistPoint {
    pub t: f64,
    pub count: usize,
    pub max: f64,
    pub q50: f64,
    pub q90: f64,
    pub q99: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenoistReport {
    pub functional: String,
    pub points: Vec<BenoistPoint>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

/// Distribution of `|phi(a) - phi(lambda) + phi(Gr)|` over proximal classes
/// below each threshold of the `order` functional.
pub fn benoist_report(ds: &Dataset, order: usize, phi: usize, t_grid: &[f64]) -> Result<BenoistReport> {
    let points = t_grid
        .iter()
        .map(|&t| {
            let mut d: Vec<f64> = ds
                .records
                .iter()
                .filter(|r| r.proximal && r.jordan_period[order] <= t)
                .filter_map(|r| r.class_gromov[phi].map(|g| (r.cartan_value[phi] - r.jordan_period[phi] + g).abs()))
                .collect();
            d.sort_by(f64::total_cmp);
            if d.is_empty() {
                return Err(Error::InsufficientData(format!("no proximal classes below t = {t:.4}")));
            }
            Ok(BenoistPoint {
                t,
                count: d.len(),
                max: *d.last().unwrap(),
                q50: quantile(&d, 0.5),
                q90: quantile(&d, 0.9),
                q99: quantile(&d, 0.99),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BenoistReport { functional: ds.functionals[phi].name().to_string(), points })
}

/// Solves `u - ln u = y` for `u > 1`, the increasing branch.
fn invert_growth(y: f64) -> f64 {
    let mut u = (y + y.max(1.0).ln()).max(1.0 + 1e-9);
    for _ in 0..100 {
        let step = (u - u.ln() - y) / (1.0 - 1.0 / u);
        u = (u - step).max(1.0 + 1e-12);
        if step.abs() < 1e-15 * u {
            break;
        }
    }
    u
}

/// Periods whose counting function is `ceil(e^(h t) / (h t))` for `t >= 1/h`.
pub fn synthetic_periods(h: f64, t_max: f64) -> Result<Vec<f64>> {
    if !(h > 0.0 && t_max * h > 1.0) {
        return Err(Error::InvalidInput(format!("need h > 0 and h t_max > 1, got h = {h}, t_max = {t_max}")));
    }
    let total = ((h * t_max).exp() / (h * t_max)).floor() as usize + 1;
    Ok((1..=total)
        .map(|n| {
            let level = ((n - 1) as f64).max(std::f64::consts::E);
            invert_growth(level.ln()) / h
        })
        .collect())
}

/// Synthetic dataset with periods from [`synthetic_periods`] and an observable
/// `L p + sigma sqrt(p) Z` with independent standard normal `Z`. Functional 0
/// orders, functional 1 observes.
pub fn synthetic_dataset(h: f64, l: f64, sigma: f64, t_max: f64, seed: u64) -> Result<Dataset> {
    let periods = synthetic_periods(h, t_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records = periods
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let z: f64 = StandardNormal.sample(&mut rng);
            let obs = l * p + sigma * p.sqrt() * z;
            PeriodRecord {
                class_id: i,
                word: format!("s{i}"),
                length: 0,
                rotation: 0,
                proximal: true,
                prox_gap: p,
                jordan_period: vec![p, obs],
                cartan_value: vec![p, obs],
                class_gromov: vec![Some(0.0), Some(0.0)],
                cert: None,
            }
        })
        .collect();
    Ok(Dataset {
        functionals: vec![Functional::new("order", vec![1.0])?, Functional::new("observable", vec![1.0])?],
        mode: CountMode::All,
        max_len: None,
        r: f64::INFINITY,
        eps: 1.0,
        records,
    })
}

/// `(lower, upper, count)` bins of width `width` over `[lo, hi]`; samples outside are dropped.
pub fn histogram(samples: &[f64], lo: f64, hi: f64, width: f64) -> Vec<(f64, f64, usize)> {
    let n = ((hi - lo) / width).round() as usize;
    let mut bins = vec![0usize; n];
    for &x in samples {
        if x >= lo && x < hi {
            bins[(((x - lo) / width) as usize).min(n - 1)] += 1;
        }
    }
    bins.into_iter()
        .enumerate()
        .map(|(i, c)| (lo + i as f64 * width, lo + (i + 1) as f64 * width, c))
        .collect()
}
