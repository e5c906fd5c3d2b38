use std::f64::consts::FRAC_PI_4;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use periods_core::statistics::{
    benoist_report, clt_report, collect, count_and_fit, gaussian_cdf_interval, proximal_fraction,
    synthetic_dataset, CollectOptions, Dataset, Observable,
};
use periods_core::words::{class_count, CountMode};
use periods_core::{schottky_sl2, sym_power, Error, ExteriorLift, Functional, GroupRep};

fn default_lift() -> ExteriorLift {
    ExteriorLift::new(&schottky_sl2(4.0, FRAC_PI_4).unwrap()).unwrap()
}

/// Default representation ordered by length and observing `chi1`, up to length 12.
fn default_dataset() -> &'static Dataset {
    static DS: OnceLock<Dataset> = OnceLock::new();
    DS.get_or_init(|| {
        let phis = [Functional::length(2).unwrap(), Functional::chi(2, 1).unwrap()];
        collect(&default_lift(), &phis, &CollectOptions::new(12, CountMode::All)).unwrap()
    })
}

fn diagonal_dataset() -> Dataset {
    let a = DMatrix::from_row_slice(2, 2, &[100.0, 0.0, 0.0, 0.01]);
    let rep = GroupRep::from_generators("diag", vec![a], 1e-12).unwrap();
    let lift = ExteriorLift::new(&rep).unwrap();
    collect(&lift, &[Functional::length(2).unwrap()], &CollectOptions::new(30, CountMode::All)).unwrap()
}

/// Composite Simpson rule for the standard normal density.
fn simpson_gaussian(a: f64, b: f64, n: usize) -> f64 {
    let f = |x: f64| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

#[test]
fn gaussian_interval_matches_quadrature() {
    let q = simpson_gaussian(-1.96, 1.96, 20_000);
    let got = gaussian_cdf_interval(-1.96, 1.96).unwrap();
    // statrs' erf carries a few 1e-12 of error here
    assert!((got - q).abs() < 1e-11);
    assert!((got - 0.9500042).abs() < 1e-7);
    assert_eq!(gaussian_cdf_interval(f64::NEG_INFINITY, f64::INFINITY).unwrap(), 1.0);
    assert!((gaussian_cdf_interval(0.0, f64::INFINITY).unwrap() - 0.5).abs() < 1e-15);
    assert!(gaussian_cdf_interval(1.0, -1.0).is_err());
}

#[test]
fn generators_have_equal_periods() {
    let ds = collect(&default_lift(), &[Functional::length(2).unwrap()], &CollectOptions::new(1, CountMode::All))
        .unwrap();
    assert_eq!(ds.records.len(), 4);
    for r in &ds.records {
        assert!((r.jordan_period[0] - 2.0 * 4f64.ln()).abs() < 1e-12, "{}", r.word);
    }
}

/// Closed-form class counts: sum over divisors with Euler's totient.
fn necklace_count(n: usize) -> u128 {
    let phi = |m: usize| (1..=m).filter(|&k| gcd(k, m) == 1).count() as u128;
    let reduced = |m: usize| 3u128.pow(m as u32) + 1 + if m.is_multiple_of(2) { 2 } else { 0 };
    (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| phi(n / d) * reduced(d)).sum::<u128>() / n as u128
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn record_count_matches_class_count() {
    let ds = collect(&default_lift(), &[Functional::length(2).unwrap()], &CollectOptions::new(8, CountMode::All))
        .unwrap();
    let expected: u128 = (1..=8).map(necklace_count).sum();
    assert_eq!(ds.records.len() as u128, expected);
    assert_eq!((1..=8).map(|n| class_count(2, n)).sum::<u128>(), expected);
}

#[test]
fn synthetic_growth_rate_is_recovered() {
    let ds = synthetic_dataset(2.0, 1.0, 1.0, 6.0, 5).unwrap();
    let grid = ds.t_grid(0, 0.4, 8).unwrap();
    let fit = count_and_fit(&ds, 0, &grid).unwrap();
    assert!((fit.h_hat / 2.0 - 1.0).abs() < 0.05, "{}", fit.h_hat);
}

#[test]
fn one_class_is_insufficient() {
    let mut ds = synthetic_dataset(1.0, 1.0, 1.0, 5.0, 5).unwrap();
    ds.records.truncate(1);
    let err = count_and_fit(&ds, 0, &[1.0, 2.0, 3.0]).unwrap_err();
    assert!(matches!(err, Error::InsufficientData(_)), "{err}");
}

#[test]
fn synthetic_clt_recovers_planted_constants() {
    let (h, l, sigma) = (1.0, 1.0, 1.5);
    let ds = synthetic_dataset(h, l, sigma, 14.0, 1).unwrap();
    let grid: Vec<f64> = (0..8).map(|i| 8.0 + 6.0 * i as f64 / 7.0).collect();
    let fit = count_and_fit(&ds, 0, &grid).unwrap();
    let report = clt_report(&ds, 0, 1, Observable::Jordan, &grid, &fit).unwrap();
    assert!((fit.h_hat / h - 1.0).abs() < 0.05);
    assert!((report.l_hat / l - 1.0).abs() < 0.1);
    assert!((report.sigma_hat / sigma - 1.0).abs() < 0.1);
    assert!(report.final_point().ks < 0.05);
    assert!(!report.self_conditioned);
}

#[test]
fn self_conditioning_is_flagged_or_degenerate() {
    let ds = synthetic_dataset(1.0, 1.0, 1.0, 12.0, 2).unwrap();
    let grid: Vec<f64> = (0..6).map(|i| 8.0 + 0.8 * i as f64).collect();
    let fit = count_and_fit(&ds, 0, &grid).unwrap();
    match clt_report(&ds, 0, 0, Observable::Jordan, &grid, &fit) {
        Ok(r) => {
            assert!(r.self_conditioned);
            // conditioned on p <= t with exponential growth, mass piles up below t
            assert!(r.final_point().normalized_mean < 0.0);
        }
        Err(e) => assert!(matches!(e, Error::Degenerate(_)), "{e}"),
    }
}

#[test]
fn diagonal_representation_is_fully_proximal_without_defects() {
    let ds = diagonal_dataset();
    let grid = ds.t_grid(0, 0.4, 5).unwrap();
    let fit_grid = [grid[0], grid[2], grid[4]];
    let fit = count_and_fit(&ds, 0, &fit_grid).unwrap();
    let prox = proximal_fraction(&ds, 0, &grid, &fit).unwrap();
    assert!(prox.points.iter().all(|p| p.fraction == 1.0));
    let b = benoist_report(&ds, 0, 0, &grid).unwrap();
    assert!(b.points.iter().all(|p| p.max < 1e-10));
}

#[test]
fn threshold_above_every_observed_value_warns() {
    let mut ds = default_dataset().clone();
    let max_r = ds.records.iter().filter_map(|r| r.cert.as_ref()).map(|c| c.r_value).fold(0.0, f64::max);
    ds.r = max_r * 2.0;
    let grid = ds.t_grid(0, 0.4, 8).unwrap();
    let fit = count_and_fit(&ds, 0, &grid).unwrap();
    let report = proximal_fraction(&ds, 0, &grid, &fit).unwrap();
    assert_eq!(report.warnings.len(), 1);
}

#[test]
fn default_pipeline_at_length_twelve() {
    let ds = default_dataset();
    let grid = ds.t_grid(0, 0.4, 8).unwrap();
    let fit = count_and_fit(ds, 0, &grid).unwrap();
    assert!(fit.h_hat > 0.0);
    assert!(fit.counts.windows(2).all(|w| w[0] <= w[1]));
    let last = *fit.normalization.last().unwrap();
    assert!((0.5..=2.0).contains(&last), "{last}");

    let chi = ds.functional_index("chi1").unwrap();
    let b = benoist_report(ds, 0, chi, &grid).unwrap();
    assert!(b.points.last().unwrap().q99 < 0.5);

    let prox = proximal_fraction(ds, 0, &grid, &fit).unwrap();
    let (first, last) = (&prox.points[0], prox.points.last().unwrap());
    assert!(last.fraction > 0.9 && last.fraction > first.fraction);
}

#[test]
fn powers_of_a_generator_have_shrinking_defects() {
    let ds = default_dataset();
    let mut defects: Vec<(usize, f64)> = ds
        .records
        .iter()
        .filter(|r| r.word.chars().all(|c| c == 'a'))
        .map(|r| (r.length, (r.cartan_value[0] - r.jordan_period[0] + r.class_gromov[0].unwrap()).abs()))
        .collect();
    defects.sort_by_key(|d| d.0);
    assert_eq!(defects.len(), 12);
    assert!(defects.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12));
}

#[test]
fn worker_count_does_not_change_records() {
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let phis = [Functional::length(2).unwrap()];
        pool.install(|| collect(&default_lift(), &phis, &CollectOptions::new(7, CountMode::Primitive)).unwrap())
    };
    assert_eq!(run(1).records, run(3).records);
}

#[test]
fn symmetric_functionals_give_inverse_classes_equal_periods() {
    let rep = sym_power(&schottky_sl2(4.0, FRAC_PI_4).unwrap(), 2).unwrap();
    let lift = ExteriorLift::new(&rep).unwrap();
    let phi = Functional::length(3).unwrap();
    assert!(phi.is_opposition_symmetric());
    let ds = collect(&lift, &[phi], &CollectOptions::new(6, CountMode::All)).unwrap();
    let by_word: std::collections::HashMap<&str, f64> =
        ds.records.iter().map(|r| (r.word.as_str(), r.jordan_period[0])).collect();
    for r in &ds.records {
        let w = periods_core::Word::parse(rep.alphabet(), &r.word).unwrap();
        let inv = periods_core::canonical_class(&w.inverse()).unwrap().to_string();
        assert!((by_word[inv.as_str()] - r.jordan_period[0]).abs() < 1e-10);
    }
}

/// Rotations are conjugations by a prefix; the single-letter conjugator keeps
/// the unreduced product's condition number, hence its rounding, small.
#[test]
fn conjugated_representatives_give_the_same_periods() {
    let rep = sym_power(&schottky_sl2(4.0, FRAC_PI_4).unwrap(), 2).unwrap();
    let lift = ExteriorLift::new(&rep).unwrap();
    let phis = [Functional::length(3).unwrap(), Functional::chi(3, 1).unwrap()];
    let ds = collect(&lift, &phis, &CollectOptions::new(6, CountMode::All)).unwrap();
    let u = periods_core::Word::parse(rep.alphabet(), "B").unwrap();
    for r in &ds.records {
        let w = periods_core::Word::parse(rep.alphabet(), &r.word).unwrap();
        let reps = (0..w.len()).map(|k| w.rotate(k)).chain([u.mul(&w).mul(&u.inverse())]);
        for x in reps {
            let jordan = periods_core::ExteriorTower::from_word(&lift, &x).unwrap().jordan().unwrap();
            for (phi, &p) in phis.iter().zip(&r.jordan_period) {
                assert!((phi.eval(&jordan) - p).abs() < 1e-8, "{x}: {} vs {p}", phi.eval(&jordan));
            }
        }
    }
}
