use std::collections::{BTreeSet, HashMap};

use periods_core::words::{enumerate_classes, CountMode};
use periods_core::{canonical_class, cyclic_reduce, free_reduce, Alphabet, Word};
use proptest::prelude::*;

fn rank2() -> Alphabet {
    Alphabet::new(2).unwrap()
}

/// Repeatedly scans for an adjacent `x x^-1` pair and deletes it.
fn naive_reduce(letters: &[i32]) -> Vec<i32> {
    let mut v = letters.to_vec();
    loop {
        match (1..v.len()).find(|&i| v[i] == -v[i - 1]) {
            Some(i) => {
                v.drain(i - 1..=i);
            }
            None => return v,
        }
    }
}

fn signed_letter() -> impl Strategy<Value = i32> {
    prop_oneof![Just(1), Just(-1), Just(2), Just(-2)]
}

/// All freely reduced words of length exactly `n` in rank 2, as signed letters.
fn reduced_words(n: usize) -> Vec<Vec<i32>> {
    let mut out: Vec<Vec<i32>> = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                [1, -1, 2, -2].into_iter().filter_map(move |l| {
                    if w.last() == Some(&-l) {
                        None
                    } else {
                        let mut x = w.clone();
                        x.push(l);
                        Some(x)
                    }
                })
            })
            .collect();
    }
    out
}

fn cyclically_reduced(w: &[i32]) -> bool {
    w.len() <= 1 || w[0] != -w[w.len() - 1]
}

proptest! {
    #[test]
    fn reduction_matches_naive_scan(raw in prop::collection::vec(signed_letter(), 0..20)) {
        let w = free_reduce(rank2(), &raw).unwrap();
        prop_assert_eq!(w.signed(), naive_reduce(&raw));
    }

    #[test]
    fn reduction_is_idempotent_and_shortening(raw in prop::collection::vec(signed_letter(), 0..30)) {
        let w = free_reduce(rank2(), &raw).unwrap();
        let again = free_reduce(rank2(), &w.signed()).unwrap();
        prop_assert_eq!(&again, &w);
        prop_assert!(w.len() <= raw.len());
    }

    #[test]
    fn cyclic_reduction_recomposes(raw in prop::collection::vec(signed_letter(), 0..24)) {
        let w = free_reduce(rank2(), &raw).unwrap();
        let (core, conj) = cyclic_reduce(&w);
        prop_assert!(core.is_cyclically_reduced());
        prop_assert_eq!(conj.mul(&core).mul(&conj.inverse()), w);
    }

    #[test]
    fn canonical_class_ignores_rotation(raw in prop::collection::vec(signed_letter(), 1..16), k in 0usize..16) {
        let w = free_reduce(rank2(), &raw).unwrap();
        let (core, _) = cyclic_reduce(&w);
        prop_assume!(!core.is_empty());
        prop_assert_eq!(canonical_class(&core.rotate(k)).unwrap(), canonical_class(&w).unwrap());
    }

    #[test]
    fn canonical_class_ignores_conjugation(
        raw in prop::collection::vec(signed_letter(), 1..12),
        c in prop::collection::vec(signed_letter(), 0..8),
    ) {
        let w = free_reduce(rank2(), &raw).unwrap();
        prop_assume!(!w.is_empty());
        let u = free_reduce(rank2(), &c).unwrap();
        let conj = u.mul(&w).mul(&u.inverse());
        prop_assert_eq!(canonical_class(&conj).unwrap(), canonical_class(&w).unwrap());
    }
}

/// Conjugacy of all nontrivial words of length <= 4, decided by trying every
/// conjugator of length <= 8.
#[test]
fn canonical_classes_decide_conjugacy_up_to_length_four() {
    let a = rank2();
    let words: Vec<Word> =
        (1..=4).flat_map(reduced_words).map(|w| free_reduce(a, &w).unwrap()).collect();
    let index: HashMap<Vec<i32>, usize> = words.iter().enumerate().map(|(i, w)| (w.signed(), i)).collect();
    let conjugators: Vec<Word> =
        (0..=8).flat_map(reduced_words).map(|w| free_reduce(a, &w).unwrap()).collect();
    let mut conjugate = BTreeSet::new();
    for (i, w) in words.iter().enumerate() {
        for c in &conjugators {
            let x = c.mul(w).mul(&c.inverse());
            if let Some(&j) = index.get(&x.signed()) {
                conjugate.insert((i, j));
            }
        }
    }
    let classes: Vec<_> = words.iter().map(|w| canonical_class(w).unwrap()).collect();
    for i in 0..words.len() {
        for j in 0..words.len() {
            assert_eq!(
                classes[i] == classes[j],
                conjugate.contains(&(i, j)),
                "{} vs {}",
                words[i],
                words[j]
            );
        }
    }
}

#[test]
fn identity_has_no_class() {
    let w = free_reduce(rank2(), &[1, 2, -2, -1]).unwrap();
    assert!(canonical_class(&w).is_err());
}

/// Number of rotation classes of cyclically reduced words of length `n`.
fn necklace_oracle(n: usize) -> usize {
    let mut seen = BTreeSet::new();
    for w in reduced_words(n).into_iter().filter(|w| cyclically_reduced(w)) {
        let rot = (0..n)
            .map(|k| {
                let mut r = w.clone();
                r.rotate_left(k);
                r
            })
            .min()
            .unwrap();
        seen.insert(rot);
    }
    seen.len()
}

#[test]
fn per_length_counts_match_necklace_oracle() {
    let classes = enumerate_classes(rank2(), 8, CountMode::All).unwrap();
    for n in 1..=8 {
        let count = classes.iter().filter(|c| c.len() == n).count();
        assert_eq!(count, necklace_oracle(n), "length {n}");
    }
    assert_eq!(classes.iter().filter(|c| c.len() == 2).count(), 8);
    assert_eq!(enumerate_classes(rank2(), 2, CountMode::All).unwrap().len(), 12);
}

#[test]
fn enumeration_is_unique_and_length_lex_ordered() {
    let classes = enumerate_classes(rank2(), 7, CountMode::All).unwrap();
    let keys: Vec<(usize, Vec<u8>)> =
        classes.iter().map(|c| (c.len(), c.letters().iter().map(|l| l.code()).collect())).collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn primitive_classes_and_their_powers_rebuild_everything() {
    let max = 8;
    let all = enumerate_classes(rank2(), max, CountMode::All).unwrap();
    let prim = enumerate_classes(rank2(), max, CountMode::Primitive).unwrap();
    assert!(prim.iter().all(|c| c.is_primitive()));
    let mut rebuilt = BTreeSet::new();
    for p in &prim {
        for n in 1..=max / p.len() {
            rebuilt.insert(p.power(n).to_string());
        }
    }
    let all: BTreeSet<String> = all.iter().map(|c| c.to_string()).collect();
    assert_eq!(rebuilt, all);
}
