use std::collections::BTreeMap;

use proptest::prelude::*;
use qdiag::metrics::{
    bias, diagnose, entropy, mps, threshold_average, threshold_pessimistic, to_distribution,
    StateSet, Tolerances,
};
use qdiag::sim::{outcome_label, Distribution, Histogram};
use qdiag::Verdict;

fn arb_histogram() -> impl Strategy<Value = Histogram> {
    (1usize..=4).prop_flat_map(|w| {
        prop::collection::vec(0u64..500, 1usize << w).prop_filter_map("no shots", move |counts| {
            let map: BTreeMap<String, u64> = counts
                .iter()
                .enumerate()
                .filter(|(_, c)| **c > 0)
                .map(|(i, c)| (outcome_label(i as u64, w), *c))
                .collect();
            let shots = map.values().sum();
            (shots > 0).then(|| Histogram::new(w, shots, map).unwrap())
        })
    })
}

fn all_states(width: usize) -> Vec<String> {
    (0..1u64 << width)
        .map(|i| outcome_label(i, width))
        .collect()
}

fn split(width: usize, mask: u64) -> (StateSet, StateSet) {
    let (inside, outside): (Vec<_>, Vec<_>) = all_states(width)
        .into_iter()
        .enumerate()
        .partition(|(i, _)| mask >> i & 1 == 1);
    (
        StateSet::new(inside.into_iter().map(|(_, s)| s)).unwrap(),
        StateSet::new(outside.into_iter().map(|(_, s)| s)).unwrap(),
    )
}

proptest! {
    #[test]
    fn bias_of_a_set_and_its_complement_sum_to_one(h in arb_histogram(), mask in 1u64..0xffff) {
        let w = h.num_qubits_measured();
        let full = (1u64 << (1 << w)) - 1;
        let mask = mask & full;
        prop_assume!(mask != 0 && mask != full);
        let (ds, rest) = split(w, mask);
        let d = to_distribution(&h);
        let total = bias(&d, &ds).unwrap() + bias(&d, &rest).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_is_bounded_by_width(h in arb_histogram()) {
        let s = entropy(&to_distribution(&h));
        prop_assert!(s >= 0.0);
        prop_assert!(s <= h.num_qubits_measured() as f64 + 1e-12);
    }

    #[test]
    fn mps_is_invariant_under_count_scaling(h in arb_histogram(), k in 2u64..50) {
        let d = to_distribution(&h);
        let scaled = to_distribution(&h.scaled(k).unwrap());
        prop_assert_eq!(mps(&d, 5.0), mps(&scaled, 5.0));
        prop_assert!((entropy(&d) - entropy(&scaled)).abs() < 1e-12);
    }

    #[test]
    fn mps_at_zero_is_the_argmax_set(h in arb_histogram()) {
        let max = h.counts().values().copied().max().unwrap();
        let argmax: Vec<&String> = h.counts().iter().filter(|(_, c)| **c == max).map(|(s, _)| s).collect();
        prop_assert_eq!(mps(&to_distribution(&h), 0.0), StateSet::new(argmax).unwrap());
    }

    #[test]
    fn mps_at_hundred_is_the_support(h in arb_histogram()) {
        let support = StateSet::new(h.counts().keys()).unwrap();
        prop_assert_eq!(mps(&to_distribution(&h), 100.0), support);
    }

    #[test]
    fn mps_grows_with_the_window(h in arb_histogram(), r1 in 0.0f64..100.0, r2 in 0.0f64..100.0) {
        let d = to_distribution(&h);
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        prop_assert!(mps(&d, lo).is_subset(&mps(&d, hi)));
    }

    #[test]
    fn pessimistic_threshold_never_exceeds_average(n in 1usize..8, g in 1usize..500, frac in 0.0f64..1.0) {
        let space = 1usize << n;
        let ds = ((frac * (space - 1) as f64) as usize).clamp(1, space - 1);
        let low = threshold_pessimistic(ds, g).unwrap();
        let avg = threshold_average(n, ds, g as f64).unwrap();
        prop_assert!(low <= avg + 1e-15, "{} > {}", low, avg);
    }

    #[test]
    fn noise_at_or_above_threshold_is_always_too_high(h in arb_histogram(), t in 0.0f64..1.0, extra in 0.0f64..1.0) {
        let d = to_distribution(&h);
        let ds = mps(&d, 5.0);
        let r = diagnose(&d, &ds, t + extra, t, &Tolerances::default()).unwrap();
        prop_assert_eq!(r.verdict, Verdict::NoiseTooHigh);
        prop_assert_eq!(r.recompute_verdict(), r.verdict);
    }
}

#[test]
fn point_mass_has_zero_entropy() {
    let d = Distribution::from_dense(3, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
    assert_eq!(entropy(&d), 0.0);
}

#[test]
fn uniform_over_eight_has_three_bits() {
    let d = Distribution::from_dense(3, &[0.125; 8]).unwrap();
    assert!((entropy(&d) - 3.0).abs() < 1e-12);
    for w in 1..=6 {
        let n = 1usize << w;
        let u = Distribution::from_dense(w, &vec![1.0 / n as f64; n]).unwrap();
        assert!((entropy(&u) - w as f64).abs() < 1e-12);
    }
}

#[test]
fn zero_results_are_positive_zero() {
    let d = Distribution::from_dense(1, &[1.0, 0.0]).unwrap();
    assert!(entropy(&d).is_sign_positive());
    let ds = StateSet::new(["0"]).unwrap();
    assert!(bias(&d, &ds).unwrap().is_sign_positive());
}
