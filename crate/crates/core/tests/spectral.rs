use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, DVector};
use periods_core::cocycles::busemann_weight;
use periods_core::spectral::{gromov_pair, gromov_weight_k, GAP_TOLERANCE};
use periods_core::suites::random_proximal;
use periods_core::words::{enumerate_classes, CountMode};
use periods_core::{schottky_sl2, sym_power, ExteriorLift, ExteriorTower, Functional, GroupRep, ScaledMatrix, Word};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sym2() -> GroupRep {
    sym_power(&schottky_sl2(4.0, FRAC_PI_4).unwrap(), 2).unwrap()
}

/// Random cyclically reduced word of length `n` using both generators.
fn random_word(rng: &mut ChaCha8Rng, rep: &GroupRep, n: usize) -> Word {
    loop {
        let text: String = (0..n).map(|_| ['a', 'A', 'b', 'B'][rng.random_range(0..4)]).collect();
        let w = Word::parse(rep.alphabet(), &text).unwrap();
        let s = w.to_string().to_lowercase();
        if w.len() == n && w.is_cyclically_reduced() && s.contains('a') && s.contains('b') {
            return w;
        }
    }
}

fn unit_vector() -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-1.0..1.0f64, 3)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-2)
        .prop_map(DVector::from_vec)
}

/// `(x ∧ y)` in the basis `e1∧e2, e1∧e3, e2∧e3`.
fn wedge3(x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
    DVector::from_vec(vec![x[0] * y[1] - x[1] * y[0], x[0] * y[2] - x[2] * y[0], x[1] * y[2] - x[2] * y[1]])
}

#[test]
fn jordan_is_the_limit_of_normalized_cartan() {
    let rep = sym2();
    let lift = ExteriorLift::new(&rep).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let w = random_word(&mut rng, &rep, 6);
        let g = ExteriorTower::from_word(&lift, &w).unwrap();
        let jordan = g.jordan().unwrap();
        // Richardson step removes the O(1/n) term left by the Gromov product
        let a32 = g.pow(32).unwrap().cartan().unwrap();
        let a64 = g.pow(64).unwrap().cartan().unwrap();
        for i in 0..3 {
            let extrapolated = 2.0 * a64[i] / 64.0 - a32[i] / 32.0;
            assert!((extrapolated - jordan[i]).abs() < 1e-8, "{w}: {extrapolated} vs {}", jordan[i]);
        }
    }
}

/// Palindromes in the symmetric generators are symmetric matrices, for which
/// Cartan and Jordan agree at every power; they are skipped.
#[test]
fn cartan_error_halves_with_the_power() {
    let rep = schottky_sl2(4.0, FRAC_PI_4).unwrap();
    let lift = ExteriorLift::new(&rep).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut halved = 0;
    let mut checked = 0;
    while checked < 100 {
        let n = rng.random_range(4..=10);
        let g = ExteriorTower::from_word(&lift, &random_word(&mut rng, &rep, n)).unwrap();
        if g.gromov_weight(1, GAP_TOLERANCE).unwrap().abs() < 1e-9 {
            continue;
        }
        let jordan = g.jordan().unwrap();
        let err = |p: u32| -> f64 {
            let a = g.pow(p).unwrap().cartan().unwrap();
            a.iter().zip(&jordan).map(|(x, l)| (x / p as f64 - l).abs()).fold(0.0, f64::max)
        };
        checked += 1;
        halved += usize::from(err(32) <= 0.6 * err(16));
    }
    assert_eq!(halved, checked);
}

#[test]
fn inversion_reverses_and_negates_jordan() {
    let rep = sym2();
    let lift = ExteriorLift::new(&rep).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let w = random_word(&mut rng, &rep, 7);
        let j = ExteriorTower::from_word(&lift, &w).unwrap().jordan().unwrap();
        let ji = ExteriorTower::from_word(&lift, &w.inverse()).unwrap().jordan().unwrap();
        for i in 0..3 {
            assert!((ji[i] + j[2 - i]).abs() < 1e-8);
        }
    }
}

#[test]
fn jordan_is_homogeneous_along_powers() {
    let rep = sym2();
    let lift = ExteriorLift::new(&rep).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..20 {
        let w = random_word(&mut rng, &rep, 5);
        let j = ExteriorTower::from_word(&lift, &w).unwrap().jordan().unwrap();
        for n in [2, 5, 17] {
            let jn = ExteriorTower::from_word(&lift, &w.pow(n as usize)).unwrap().jordan().unwrap();
            for i in 0..3 {
                assert!((jn[i] - n as f64 * j[i]).abs() < 1e-7 * n as f64);
            }
        }
    }
}

#[test]
fn attracting_points_are_equivariant() {
    let rep = sym2();
    let lift = ExteriorLift::new(&rep).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..30 {
        let m = random_word(&mut rng, &rep, 5);
        let g = random_word(&mut rng, &rep, 3);
        let conj = g.mul(&m).mul(&g.inverse());
        let (v, _) = ExteriorTower::from_word(&lift, &m).unwrap().attracting(1, GAP_TOLERANCE).unwrap();
        let (w, _) = ExteriorTower::from_word(&lift, &conj).unwrap().attracting(1, GAP_TOLERANCE).unwrap();
        let gv = rep.evaluate(&g).unwrap().unit() * v;
        let gv = gv.normalize();
        let sin = (&gv - &w * gv.dot(&w)).norm();
        assert!(sin < 1e-8, "{sin}");
    }
}

#[test]
fn level_two_weight_matches_explicit_wedges() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..30 {
        let (m, tower) = random_proximal(&mut rng, 3, 0.05, f64::INFINITY).unwrap();
        // level-2 fixed points of g are the wedges of its top two eigenvectors
        // and of the bottom two eigenvectors of g^T
        let eig = m.clone().complex_eigenvalues();
        assert!(eig.iter().all(|z| z.im.abs() < 1e-12), "proximal at both levels means a real spectrum");
        let mut vals: Vec<f64> = eig.iter().map(|z| z.re).collect();
        vals.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
        let kernel = |a: &DMatrix<f64>, lambda: f64| -> DVector<f64> {
            let shifted = a - DMatrix::identity(3, 3) * lambda;
            let svd = shifted.svd(false, true);
            let vt = svd.v_t.unwrap();
            let i = svd.singular_values.imin();
            vt.row(i).transpose()
        };
        let v1 = kernel(&m, vals[0]);
        let v2 = kernel(&m, vals[1]);
        let t1 = kernel(&m.transpose(), vals[0]);
        let t2 = kernel(&m.transpose(), vals[1]);
        let expected = gromov_pair(&wedge3(&t1, &t2), &wedge3(&v1, &v2)).unwrap();
        let got = tower.gromov_weight(2, GAP_TOLERANCE).unwrap();
        assert!((got - expected).abs() < 1e-8, "{got} vs {expected}");
    }
}

proptest! {
    #[test]
    fn pairing_ignores_rescaling(t in unit_vector(), v in unit_vector(), a in 0.01..100.0f64, b in -100.0..-0.01f64) {
        let Ok(base) = gromov_pair(&t, &v) else { return Ok(()) };
        let scaled = gromov_pair(&(&t * a), &(&v * b)).unwrap();
        prop_assert!((base - scaled).abs() < 1e-12);
    }

    #[test]
    fn wedge_pairing_matches_explicit_expansion(
        t1 in unit_vector(), t2 in unit_vector(), v1 in unit_vector(), v2 in unit_vector(),
    ) {
        let (tw, vw) = (wedge3(&t1, &t2), wedge3(&v1, &v2));
        prop_assume!(tw.norm() > 1e-3 && vw.norm() > 1e-3 && tw.dot(&vw).abs() > 1e-9);
        let expected = (tw.dot(&vw).abs() / (tw.norm() * vw.norm())).ln();
        let got = gromov_weight_k(&[t1, t2], &[v1, v2]).unwrap();
        prop_assert!((got - expected).abs() < 1e-9);
    }

    #[test]
    fn level_two_busemann_matches_explicit_expansion(
        g in prop::collection::vec(-2.0..2.0f64, 9), v1 in unit_vector(), v2 in unit_vector(),
    ) {
        let g = DMatrix::from_row_slice(3, 3, &g);
        prop_assume!(g.determinant().abs() > 1e-2);
        let vw = wedge3(&v1, &v2);
        prop_assume!(vw.norm() > 1e-3);
        let gw = wedge3(&(&g * &v1), &(&g * &v2));
        let expected = (gw.norm() / vw.norm()).ln();
        let got = busemann_weight(&ScaledMatrix::from_matrix(g).unwrap(), &[v1, v2], 2).unwrap();
        prop_assert!((got - expected).abs() < 1e-9);
    }
}

#[test]
fn length_periods_are_positive_on_every_class() {
    for rep in [schottky_sl2(4.0, FRAC_PI_4).unwrap(), sym2()] {
        let lift = ExteriorLift::new(&rep).unwrap();
        let phi = Functional::length(rep.dim()).unwrap();
        for cls in enumerate_classes(rep.alphabet(), 8, CountMode::All).unwrap() {
            let tower = ExteriorTower::from_word(&lift, &cls.as_word()).unwrap();
            assert!(phi.eval(&tower.jordan().unwrap()) > 0.0, "{cls}");
        }
    }
}
