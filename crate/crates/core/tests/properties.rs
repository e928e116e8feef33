//! Property suites for the arithmetic kernel and the analysis invariants.

mod support;

use entropy_core::arith::{rat, ExtRational};
use entropy_core::degree::{degree_sequence_with, DegreeOptions};
use entropy_core::diophantine::{default_seeds, diophantine_degree};
use entropy_core::express::late_confinement_polynomial;
use entropy_core::mapping::catalog;
use entropy_core::singularity::{replay, trace_singularity, ValueToken};
use proptest::prelude::*;
use support::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn projective_line_axioms(x in ext_value(), y in ext_value(), z in ext_value()) {
        check_projective(&x, &y, &z)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn reduction_is_idempotent_and_coprime(
        num in small_poly(5),
        den in small_poly(5),
        common in small_poly(3),
    ) {
        check_reduction(&num, &den, &common)?;
    }

    #[test]
    fn laurent_valuations_add(a in laurent(), b in laurent()) {
        check_laurent_valuation(&a, &b)?;
    }

    #[test]
    fn laurent_sum_keeps_the_smaller_window(a in laurent(), b in laurent()) {
        let s = a.add(&b);
        if let Ok(s) = s {
            prop_assert!(s.valuation() >= a.valuation().min(b.valuation()));
            prop_assert!(s.abs_precision() <= a.abs_precision().min(b.abs_precision()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn largest_root_isolation_is_sound(c in int_poly()) {
        check_root_isolation(&c)?;
    }

    #[test]
    fn rational_roots_are_roots(c in int_poly()) {
        check_rational_roots(&c)?;
    }

    #[test]
    fn quadratic_plus_periodic_is_never_exponential(d in quadratic_with_period()) {
        check_not_exponential(&d)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    #[test]
    fn degree_equals_preimage_count(
        ws in prop::collection::vec((-500i64..=500, 1i64..=97), 3),
    ) {
        for (n, d) in ws {
            check_preimage_count(n, d)?;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn degrees_do_not_depend_on_a_generic_seed(s1 in generic_seed(), s2 in generic_seed()) {
        let opts = DegreeOptions { single_seed: true, ..DegreeOptions::default() };
        for (name, n) in [("eq1-qrt", 12), ("eq14-hv", 7), ("eq27-dp1-add", 12)] {
            let m = catalog::get(name).unwrap();
            let a = degree_sequence_with(&m, n, &s1, &opts).unwrap();
            let b = degree_sequence_with(&m, n, &s2, &opts).unwrap();
            prop_assert_eq!(&a.degrees, &b.degrees, "{}", name);
        }
    }

    #[test]
    fn height_growth_does_not_depend_on_the_seeds(
        x0 in generic_seed(),
        x1 in generic_seed(),
    ) {
        for name in ["eq27-dp1-add-generic", "eq20-bedford-kim"] {
            let m = catalog::resolve(name).unwrap();
            let (d0, d1) = default_seeds();
            let base = diophantine_degree(&m, &d0, &d1, 20).unwrap();
            let t = diophantine_degree(&m, &x0, &x1, 20).unwrap();
            let gap = (t.lambda_last - base.lambda_last).abs() / base.lambda_last;
            prop_assert!(gap <= 0.02, "{}: {} vs {}", name, t.lambda_last, base.lambda_last);
        }
    }
}

#[test]
fn height_traces_are_reproducible() {
    let m = catalog::resolve("eq27-dp1-add-generic").unwrap();
    let (x0, x1) = default_seeds();
    let a = diophantine_degree(&m, &x0, &x1, 18).unwrap();
    let b = diophantine_degree(&m, &x0, &x1, 18).unwrap();
    assert_eq!(a, b);
}

#[test]
fn last_ratio_and_fit_agree_on_non_integrable_orbits() {
    let (x0, x1) = default_seeds();
    for (name, n) in [
        ("eq14-hv", 10),
        ("eq17-hv-k", 10),
        ("eq20-bedford-kim", 25),
        ("eq27-dp1-add-generic", 25),
    ] {
        let m = catalog::resolve(name).unwrap();
        let t = diophantine_degree(&m, &x0, &x1, n).unwrap();
        let gap = (t.lambda_last - t.lambda_fit).abs() / t.lambda_fit;
        assert!(gap <= 0.02, "{name}: {} vs {}", t.lambda_last, t.lambda_fit);
    }
}

#[test]
fn late_roots_increase_towards_the_limit() {
    let block = [
        (ValueToken::zero(), 1),
        (ValueToken::Infinity, 1),
        (ValueToken::Infinity, 1),
    ];
    let closing = [(ValueToken::zero(), 1)];
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let mut prev = 1.0;
    for ell in 2..=6 {
        let p = late_confinement_polynomial(&block, ell, &closing).unwrap();
        let (rate, root, ok) = growth_matches_root(&p, 200);
        assert!(ok, "ℓ = {ell}: simulated {rate} vs root {root}");
        assert!(root > prev && root < golden, "ℓ = {ell}: {root}");
        prev = root;
    }
}

#[test]
fn pattern_parameters_evaluate_to_their_bindings() {
    let m = catalog::get("eq1-qrt").unwrap();
    let r = trace_singularity(&m, &ValueToken::finite(1, 1), 2, 24).unwrap();
    let (values, _) = replay(&m, &r, &rat(5, 1)).unwrap();
    for (entry, replayed) in r.entries.iter().zip(&values) {
        if let ValueToken::Param(_) = entry.value {
            assert_eq!(&entry.value.resolve(&m, r.n_start).unwrap(), replayed);
        }
    }
    let a = ValueToken::Param("a".into()).resolve(&m, 2).unwrap();
    let b = ValueToken::Param("b".into()).resolve(&m, 2).unwrap();
    assert_eq!(
        (a, b),
        (ExtRational::from_integer(2), ExtRational::from_integer(3))
    );
}

#[test]
fn traces_are_seed_stable_before_confinement() {
    for (name, value) in [
        ("eq1-qrt", ValueToken::finite(1, 1)),
        ("eq12-dp1-mult", ValueToken::zero()),
        ("eq14-hv", ValueToken::zero()),
        ("eq27-dp1-add", ValueToken::zero()),
    ] {
        let m = catalog::get(name).unwrap();
        let r = trace_singularity(&m, &value, 2, 24).unwrap();
        let steps = r.steps.unwrap();
        for ev in r.evidence.iter().filter(|e| e.step < steps) {
            // poles and zeros agree in order, finite values exactly
            let key = |t: &String| match t.split_once(' ') {
                Some((_, "ε^0")) | None => t.clone(),
                Some((_, order)) => order.to_string(),
            };
            assert!(
                ev.leading.windows(2).all(|w| key(&w[0]) == key(&w[1])),
                "{name} step {}: {:?}",
                ev.step,
                ev.leading
            );
        }
    }
}
