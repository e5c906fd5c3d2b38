//! Residual suites: the cocycle equation, the Gromov product relation, the
//! period identity, Weyl majorization and the power limit, each run over
//! seeded random matrices and over the classes of a representation.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::cocycles::{
    cocycle_identity_residual, cocycle_residual_on_level, gromov_cocycle_residual, gromov_residual_on_level,
    period_residual_of_tower,
};
use crate::error::{Error, Result};
use crate::representation::ExteriorLift;
use crate::scaled::ScaledMatrix;
use crate::spectral::{ExteriorTower, GAP_TOLERANCE};
use crate::words::{enumerate_classes, CountMode, CyclicWord, Word};

pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
/// Condition number bound for "well-conditioned" random instances.
pub const RANDOM_MAX_CONDITION: f64 = 1e3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub source: String,
    pub instances: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Enough to replay the worst instance.
    pub worst_instance: Option<String>,
}

#[derive(Default)]
struct Tally {
    instances: usize,
    max: f64,
    worst: Option<String>,
}

impl Tally {
    fn add(&mut self, residual: f64, describe: impl FnOnce() -> String) {
        self.instances += 1;
        // a NaN residual is a failure, never silently dropped
        if residual.is_nan() || residual > self.max || self.worst.is_none() {
            self.max = if residual.is_nan() { f64::INFINITY } else { residual.max(self.max) };
            self.worst = Some(describe());
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.instances += other.instances;
        if other.max > self.max || self.worst.is_none() {
            self.max = other.max;
            self.worst = other.worst;
        }
        self
    }

    fn finish(self, suite: &str, source: &str, tolerance: f64) -> SuiteResult {
        SuiteResult {
            suite: suite.into(),
            source: source.into(),
            instances: self.instances,
            max_residual: self.max,
            tolerance,
            passed: self.instances > 0 && self.max < tolerance,
            worst_instance: self.worst,
        }
    }
}

fn gaussian_vector(rng: &mut ChaCha8Rng, d: usize) -> DVector<f64> {
    DVector::from_fn(d, |_, _| StandardNormal.sample(rng))
}

/// Gaussian matrix rescaled to `|det| = 1` with positive determinant, redrawn
/// until its condition number is at most `max_cond`.
pub fn random_sl(rng: &mut ChaCha8Rng, d: usize, max_cond: f64) -> DMatrix<f64> {
    loop {
        let mut m: DMatrix<f64> = DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(rng));
        let det: f64 = m.clone().lu().determinant();
        if det == 0.0 {
            continue;
        }
        if det < 0.0 {
            m.row_mut(0).neg_mut();
        }
        m /= det.abs().powf(1.0 / d as f64);
        let s = m.clone().singular_values();
        if s.max() / s.min() <= max_cond {
            return m;
        }
    }
}

/// Random `SL(d)` element whose Jordan gaps all exceed `min_gap` and whose
/// first gap lies in `[min_gap, max_gap]`.
pub fn random_proximal(rng: &mut ChaCha8Rng, d: usize, min_gap: f64, max_gap: f64) -> Result<(DMatrix<f64>, ExteriorTower)> {
    for _ in 0..100_000 {
        let m = random_sl(rng, d, RANDOM_MAX_CONDITION);
        let tower = ExteriorTower::from_matrix(&ScaledMatrix::from_matrix(m.clone())?)?;
        let gaps = tower.gaps()?;
        if gaps.iter().all(|&g| g > min_gap) && gaps[0] <= max_gap {
            return Ok((m, tower));
        }
    }
    Err(Error::Numeric(format!("no proximal sample with gap in [{min_gap}, {max_gap}] found")))
}

fn fmt_matrix(m: &DMatrix<f64>) -> String {
    let rows: Vec<String> = m
        .row_iter()
        .map(|r| format!("[{}]", r.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

fn fmt_frame(f: &[DVector<f64>]) -> String {
    let vs: Vec<String> = f
        .iter()
        .map(|v| format!("[{}]", v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", vs.join(", "))
}

/// Max residuals of every suite over `n` seeded random instances in `SL(d)`.
pub fn random_suites(d: usize, n: usize, seed: u64) -> Result<Vec<SuiteResult>> {
    let source = format!("random SL({d}), seed {seed}");
    let per_instance: Vec<[Tally; 4]> = (0..n)
        .into_par_iter()
        .map(|i| random_instance(d, seed, i))
        .collect::<Result<Vec<_>>>()?;
    let mut merged: [Tally; 4] = Default::default();
    for tallies in per_instance {
        for (m, t) in merged.iter_mut().zip(tallies) {
            *m = std::mem::take(m).merge(t);
        }
    }
    let names = ["cocycle", "gromov_cocycle", "period_identity", "majorization"];
    Ok(merged
        .into_iter()
        .zip(names)
        .map(|(t, name)| t.finish(name, &source, RESIDUAL_TOLERANCE))
        .collect())
}

fn random_instance(d: usize, seed: u64, i: usize) -> Result<[Tally; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((d as u64) << 32) ^ i as u64);
    let mut tallies: [Tally; 4] = Default::default();
    let gm = random_sl(&mut rng, d, RANDOM_MAX_CONDITION);
    let hm = random_sl(&mut rng, d, RANDOM_MAX_CONDITION);
    let g = ScaledMatrix::from_matrix(gm.clone())?;
    let h = ScaledMatrix::from_matrix(hm.clone())?;
    let tag = || format!("instance {i}: g = {}, h = {}", fmt_matrix(&gm), fmt_matrix(&hm));
    for k in 1..d {
        let frame: Vec<DVector<f64>> = (0..k).map(|_| gaussian_vector(&mut rng, d)).collect();
        let coframe: Vec<DVector<f64>> = (0..k).map(|_| gaussian_vector(&mut rng, d)).collect();
        let r = cocycle_identity_residual(&g, &h, &frame, k)?;
        tallies[0].add(r, || format!("{}, k = {k}, frame = {}", tag(), fmt_frame(&frame)));
        let r = gromov_cocycle_residual(&g, &coframe, &frame, k)?;
        tallies[1].add(r, || {
            format!("{}, k = {k}, coframe = {}, frame = {}", tag(), fmt_frame(&coframe), fmt_frame(&frame))
        });
    }
    let (pm, tower) = random_proximal(&mut rng, d, 0.05, f64::INFINITY)?;
    for k in 1..=d {
        let r = period_residual_of_tower(&tower, k)?;
        tallies[2].add(r, || format!("instance {i}: p = {}, k = {k}", fmt_matrix(&pm)));
    }
    let gh = g.mul(&h)?;
    for (name, m) in [("g", &g), ("h", &h), ("gh", &gh)] {
        let rec = ExteriorTower::from_matrix(m)?.record(GAP_TOLERANCE)?;
        let r = rec.majorization_violation().max(rec.det_sum_residual(m.log_abs_det()));
        tallies[3].add(r, || format!("{}, element {name}", tag()));
    }
    let rec = tower.record(GAP_TOLERANCE)?;
    let r = rec.majorization_violation().max(rec.det_sum_residual(tower.log_abs_det()));
    tallies[3].add(r, || format!("instance {i}: p = {}", fmt_matrix(&pm)));
    Ok(tallies)
}

/// Max residuals of every suite over all classes of `lift` up to `max_len`.
///
/// For a class `w = u v` split at its midpoint, the cocycle equation is checked
/// for `(rho(u), rho(v))` and the Gromov relation for `rho(u)`, both at the
/// fixed points of `rho(w)`.
pub fn class_suites(lift: &ExteriorLift, max_len: usize) -> Result<Vec<SuiteResult>> {
    let source = format!("classes of {} up to length {max_len}", lift.rep().label());
    let classes = enumerate_classes(lift.rep().alphabet(), max_len, CountMode::All)?;
    let merged = classes
        .par_iter()
        .map(|cls| class_instance(lift, cls))
        .try_fold(<[Tally; 4]>::default, |mut acc, t| {
            let t = t?;
            for (a, b) in acc.iter_mut().zip(t) {
                *a = std::mem::take(a).merge(b);
            }
            Ok::<_, Error>(acc)
        })
        .try_reduce(<[Tally; 4]>::default, |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x = std::mem::take(x).merge(y);
            }
            Ok(a)
        })?;
    let names = ["cocycle", "gromov_cocycle", "period_identity", "majorization"];
    Ok(merged
        .into_iter()
        .zip(names)
        .map(|(t, name)| t.finish(name, &source, RESIDUAL_TOLERANCE))
        .collect())
}

fn class_instance(lift: &ExteriorLift, cls: &CyclicWord) -> Result<[Tally; 4]> {
    let mut tallies: [Tally; 4] = Default::default();
    let d = lift.dim();
    let w = cls.as_word();
    let letters = w.letters();
    let half = letters.len() / 2;
    let alphabet = lift.rep().alphabet();
    let u = Word::from_letters(alphabet, &letters[..half])?;
    let v = Word::from_letters(alphabet, &letters[half..])?;
    let tower = ExteriorTower::from_word(lift, &w)?;
    let gu = lift.evaluate_levels(&u)?;
    let hv = lift.evaluate_levels(&v)?;
    let tag = || format!("class {cls}");
    for k in 1..d {
        // non-proximal classes are the exceptional set, not a residual failure
        let Ok((vk, tk)) = tower.attracting(k, GAP_TOLERANCE) else { continue };
        let r = cocycle_residual_on_level(&gu[k - 1], &hv[k - 1], &vk)?;
        tallies[0].add(r, || format!("{}, split {u} * {v}, k = {k}", tag()));
        let r = gromov_residual_on_level(&gu[k - 1], &tk, &vk)?;
        tallies[1].add(r, || format!("{}, acting by {u}, k = {k}", tag()));
    }
    for k in 1..=d {
        match period_residual_of_tower(&tower, k) {
            Ok(r) => tallies[2].add(r, || format!("{}, k = {k}", tag())),
            Err(Error::NotProximal { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let rec = tower.record(GAP_TOLERANCE)?;
    let r = rec.majorization_violation().max(rec.det_sum_residual(0.0));
    tallies[3].add(r, tag);
    Ok(tallies)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerLimitResult {
    pub dim: usize,
    pub samples: usize,
    pub max_defect_32: f64,
    pub shrinking: usize,
    pub tolerance: f64,
    pub passed: bool,
}

/// `|a_1(g^n) - n lambda_1(g) + Gr(g_-, g_+)|` at `n = 16, 32` for random
/// proximal `g` with a first gap in `[0.7, 1.4]`: wide enough that `n = 32`
/// has converged, narrow enough that `n = 16` has not yet hit rounding.
pub fn power_limit_suite(d: usize, samples: usize, seed: u64) -> Result<PowerLimitResult> {
    let defects: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((d as u64) << 40) ^ i as u64);
            let (_, tower) = random_proximal(&mut rng, d, 0.7, 1.4)?;
            let lambda = tower.jordan()?[0];
            let gr = tower.gromov_weight(1, GAP_TOLERANCE)?;
            let defect = |n: u32| -> Result<f64> {
                Ok((tower.pow(n)?.level(1).log_norm()? - n as f64 * lambda + gr).abs())
            };
            Ok((defect(16)?, defect(32)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_defect_32 = defects.iter().fold(0.0_f64, |a, d| a.max(d.1));
    let shrinking = defects.iter().filter(|(d16, d32)| d32 < d16).count();
    let tolerance = 1e-5;
    Ok(PowerLimitResult {
        dim: d,
        samples,
        max_defect_32,
        shrinking,
        tolerance,
        passed: max_defect_32 < tolerance && shrinking * 100 >= 95 * samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_sl_is_unimodular_and_conditioned() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 2..=4 {
            let m = random_sl(&mut rng, d, RANDOM_MAX_CONDITION);
            assert!((m.clone().lu().determinant() - 1.0).abs() < 1e-12);
            let s = m.singular_values();
            assert!(s.max() / s.min() <= RANDOM_MAX_CONDITION);
        }
    }

    #[test]
    fn small_random_suites_pass() {
        for d in 2..=3 {
            for s in random_suites(d, 20, 7).unwrap() {
                assert!(s.passed, "{s:?}");
                assert!(s.instances >= 20);
            }
        }
    }

    #[test]
    fn nan_residual_is_recorded_as_failure() {
        let mut t = Tally::default();
        t.add(1e-12, || "a".into());
        t.add(f64::NAN, || "b".into());
        let r = t.finish("x", "y", 1e-8);
        assert!(!r.passed);
        assert_eq!(r.worst_instance.as_deref(), Some("b"));
    }
}
