mod common;

use proptest::prelude::*;
use topicbench::metrics::{confusion, nmi, reproducibility};
use topicbench::{OverlapScore32, OverlapScore64, TokenLabeling};

use common::{all_labelings, direct_overlap, labels_from_counts, overlap_from_joint};

fn score(a: &[u32], b: &[u32]) -> OverlapScore64 {
    let cm = confusion(
        &TokenLabeling::from_labels(a.to_vec()),
        &TokenLabeling::from_labels(b.to_vec()),
    )
    .unwrap();
    nmi(&cm)
}

fn assert_matches_direct(a: &[u32], b: &[u32], tol: f64) {
    let s = score(a, b);
    let (i, h, hp, n) = direct_overlap(a, b);
    assert!((s.mutual_information - i).abs() <= tol, "I {a:?} {b:?}");
    assert!((s.entropy_planted - h).abs() <= tol);
    assert!((s.entropy_inferred - hp).abs() <= tol);
    assert!(
        (s.nmi - n).abs() <= tol,
        "nmi {a:?} {b:?}: {} vs {n}",
        s.nmi
    );
}

#[test]
fn exhaustive_small_labelings_match_direct_evaluation() {
    for n in 1..=5 {
        let labelings: Vec<Vec<u32>> = all_labelings(n, 3).collect();
        for a in &labelings {
            for b in &labelings {
                assert_matches_direct(a, b, 1e-12);
            }
        }
    }
}

#[test]
fn split_class_fixture() {
    let (a, b) = labels_from_counts(&[&[2, 0, 0], &[0, 1, 1]]);
    let s = score(&a, &b);
    assert!((s.mutual_information - 1.0).abs() < 1e-12);
    assert!((s.entropy_planted - 1.0).abs() < 1e-12);
    assert!((s.entropy_inferred - 1.5).abs() < 1e-12);
    assert!((s.nmi - 0.8).abs() < 1e-12);
    let (i, _, _, n) = overlap_from_joint(&[&[0.5, 0.0, 0.0], &[0.0, 0.25, 0.25]]);
    assert!((i - 1.0).abs() < 1e-12 && (n - 0.8).abs() < 1e-12);
}

#[test]
fn random_labelings_are_not_reproducible() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let a: Vec<u32> = (0..100_000).map(|_| rng.random_range(0..10)).collect();
    let b: Vec<u32> = (0..100_000).map(|_| rng.random_range(0..10)).collect();
    let s = reproducibility::<f64>(
        &TokenLabeling::from_labels(a),
        &TokenLabeling::from_labels(b),
    )
    .unwrap();
    assert!(s.nmi < 0.01, "{}", s.nmi);
}

#[test]
fn single_precision_tracks_double() {
    let (a, b) = labels_from_counts(&[&[30, 5, 1], &[2, 40, 9], &[0, 3, 25]]);
    let cm = confusion(
        &TokenLabeling::from_labels(a),
        &TokenLabeling::from_labels(b),
    )
    .unwrap();
    let s64: OverlapScore64 = nmi(&cm);
    let s32: OverlapScore32 = nmi(&cm);
    assert!((s64.nmi - s32.nmi as f64).abs() < 1e-5);
}

fn labeling_pair() -> impl Strategy<Value = (Vec<u32>, Vec<u32>)> {
    (1usize..200, 1u32..6, 1u32..6).prop_flat_map(|(n, ka, kb)| {
        (
            prop::collection::vec(0..ka, n),
            prop::collection::vec(0..kb, n),
        )
    })
}

fn permutation(k: u32) -> impl Strategy<Value = Vec<u32>> {
    Just((0..k).collect::<Vec<u32>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn matches_direct_evaluation((a, b) in labeling_pair()) {
        assert_matches_direct(&a, &b, 1e-12);
    }

    #[test]
    fn permutation_invariant((a, b) in labeling_pair(), pa in permutation(6), pb in permutation(6)) {
        let base = score(&a, &b);
        let a2: Vec<u32> = a.iter().map(|&x| pa[x as usize]).collect();
        let b2: Vec<u32> = b.iter().map(|&x| pb[x as usize]).collect();
        let s = score(&a2, &b2);
        prop_assert!((s.mutual_information - base.mutual_information).abs() < 1e-12);
        prop_assert!((s.entropy_planted - base.entropy_planted).abs() < 1e-12);
        prop_assert!((s.entropy_inferred - base.entropy_inferred).abs() < 1e-12);
        prop_assert!((s.nmi - base.nmi).abs() < 1e-12);
    }

    #[test]
    fn symmetric((a, b) in labeling_pair()) {
        let (ab, ba) = (score(&a, &b), score(&b, &a));
        prop_assert!((ab.nmi - ba.nmi).abs() < 1e-12);
        prop_assert!((ab.mutual_information - ba.mutual_information).abs() < 1e-12);
        prop_assert!((ab.voi - ba.voi).abs() < 1e-12);
    }

    #[test]
    fn bounded_and_voi_identity((a, b) in labeling_pair()) {
        let s = score(&a, &b);
        prop_assert!((0.0..=1.0).contains(&s.nmi));
        prop_assert!(s.mutual_information >= 0.0);
        prop_assert!(s.mutual_information <= s.entropy_planted.min(s.entropy_inferred) + 1e-12);
        prop_assert!(s.voi >= 0.0);
        prop_assert_eq!(s.voi, s.entropy_planted + s.entropy_inferred - 2.0 * s.mutual_information);
    }

    #[test]
    fn perfect_score_iff_bijective_support((a, b) in labeling_pair()) {
        let s = score(&a, &b);
        // a bijection between used labels means each side determines the other
        let mut fwd = std::collections::HashMap::new();
        let mut bwd = std::collections::HashMap::new();
        let bijective = a.iter().zip(&b).all(|(x, y)| {
            *fwd.entry(*x).or_insert(*y) == *y && *bwd.entry(*y).or_insert(*x) == *x
        });
        if bijective {
            prop_assert!((s.nmi - 1.0).abs() < 1e-12);
        } else {
            prop_assert!(s.nmi < 1.0 - 1e-9);
        }
    }

    #[test]
    fn relabeled_copy_is_perfect(a in prop::collection::vec(0u32..6, 1..300), p in permutation(6)) {
        let b: Vec<u32> = a.iter().map(|&x| p[x as usize]).collect();
        prop_assert!((score(&a, &b).nmi - 1.0).abs() < 1e-12);
    }
}
