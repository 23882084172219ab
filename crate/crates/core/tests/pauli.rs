mod common;

use common::{all_strings, dense_pauli, dense_state, expectation};
use proptest::prelude::*;
use tcps_core::pauli::{
    exact_expectation, exact_means, exact_observable_value, parse_observable, random_observable, to_text,
    validate_encodable, GeneratorMode, Observable, PauliString, PauliTerm,
};
use tcps_core::qee::{qee_estimate, qee_variance_prediction, TermSampler};
use tcps_core::rng::stream;
use tcps_core::statevector::PreparationCircuit;
use tcps_core::Error;

fn letters() -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('I'), Just('X'), Just('Y'), Just('Z')], 1..=4)
        .prop_map(|v| v.into_iter().collect())
}

#[test]
fn expectation_matches_dense_oracle_for_every_string() {
    for n in 1..=3 {
        for seed in 0..4 {
            let state = PreparationCircuit::seeded(n, 3, 100 + seed).prepare().unwrap();
            let v = dense_state(&state);
            for p in all_strings(n) {
                let dense = expectation(&dense_pauli(&p), &v);
                assert!(dense.im.abs() < 1e-12);
                assert!((exact_expectation(&state, &p).unwrap() - dense.re).abs() < 1e-12, "{p}");
            }
        }
    }
}

#[test]
fn parse_reports_line_numbers() {
    let err = parse_observable("2\n# comment\n1.0 XZ\n0.5 XQ\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 4, .. }), "{err:?}");
    assert!(matches!(parse_observable("2\n1.0 XZZ"), Err(Error::Parse { line: 2, .. })));
    assert!(matches!(parse_observable("2\nabc XZ"), Err(Error::Parse { line: 2, .. })));
    assert!(parse_observable("").is_err());
}

#[test]
fn duplicates_merge_and_cancel() {
    let obs = parse_observable("2\n1.0 XZ\n0.5 XZ\n0.25 ZZ\n-0.25 ZZ\n").unwrap();
    assert_eq!(obs.len(), 1);
    assert_eq!(obs.terms()[0].coefficient, 1.5);
    assert!(matches!(parse_observable("1\n1.0 Z\n-1.0 Z"), Err(Error::EmptyObservable)));
}

#[test]
fn equal_mean_generator_hits_target() {
    let mode = GeneratorMode::EqualMean { coefficient: 1.0, mean: 0.5, support_size: 3 };
    let inst = random_observable(9, 64, &mode, 4).unwrap();
    let state = inst.prep.prepare().unwrap();
    for m in exact_means(&state, &inst.observable).unwrap() {
        assert!((m - 0.5).abs() < 1e-12);
    }
    assert!(matches!(random_observable(4, 5, &mode, 0), Err(Error::TooManyTerms { .. })));
}

#[test]
fn uniform_generator_is_reproducible() {
    let mode = GeneratorMode::Uniform { min_magnitude: 0.1, max_magnitude: 1.0, depth: 2 };
    let a = random_observable(4, 10, &mode, 9).unwrap();
    let b = random_observable(4, 10, &mode, 9).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.observable.len(), 10);
    assert!(a.observable.coefficients().iter().all(|c| (0.1..=1.0).contains(&c.abs())));
}

#[test]
fn encodability_bound() {
    let obs = parse_observable("1\n2.0 Z\n0.5 X").unwrap();
    let r = validate_encodable(&obs, 0.0625);
    assert!(r.feasible);
    assert_eq!(r.max_feasible_epsilon, 0.0625);
    let r = validate_encodable(&obs, 0.1);
    assert_eq!(r.violations, vec![0]);
}

#[test]
fn qee_variance_matches_prediction() {
    let mode = GeneratorMode::Uniform { min_magnitude: 0.2, max_magnitude: 1.0, depth: 2 };
    let inst = random_observable(3, 6, &mode, 31).unwrap();
    let state = inst.prep.prepare().unwrap();
    let means = exact_means(&state, &inst.observable).unwrap();
    let exact = exact_observable_value(&state, &inst.observable).unwrap();
    let n_c = 50;
    let trials = 4000;
    let est: Vec<f64> = (0..trials)
        .map(|t| qee_estimate(&inst.prep, &inst.observable, n_c, &mut stream(31, t)).unwrap().estimate)
        .collect();
    let mean = est.iter().sum::<f64>() / trials as f64;
    let var = est.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
    let predicted = qee_variance_prediction(&inst.observable, &means, n_c);
    assert!((mean - exact).abs() < 5.0 * (predicted / trials as f64).sqrt());
    assert!((var / predicted - 1.0).abs() < 0.1, "{var} vs {predicted}");
}

#[test]
fn per_shot_sampler_agrees_with_binomial_shortcut() {
    let prep = PreparationCircuit::seeded(3, 2, 77);
    let sampler = TermSampler::new(&prep).unwrap();
    let p = PauliString::from_letters("YXZ").unwrap();
    let exact = exact_expectation(sampler.state(), &p).unwrap();
    let shots = 20_000;
    let m = sampler.sample_per_shot(&p, shots, &mut stream(5, 0)).unwrap();
    assert!((m - exact).abs() < 5.0 * ((1.0 - exact * exact) / shots as f64).sqrt());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expectation_is_bounded_and_matches_dense(seed in any::<u64>(), l in letters()) {
        let p = PauliString::from_letters(&l).unwrap();
        let state = PreparationCircuit::seeded(p.n_qubits(), 2, seed).prepare().unwrap();
        let e = exact_expectation(&state, &p).unwrap();
        prop_assert!(e.abs() <= 1.0 + 1e-12);
        let dense = expectation(&dense_pauli(&p), &dense_state(&state));
        prop_assert!((e - dense.re).abs() < 1e-12);
    }

    #[test]
    fn text_round_trip(
        rows in proptest::collection::vec((-10.0f64..10.0, proptest::collection::vec(0usize..4, 3)), 1..8)
    ) {
        let terms: Vec<PauliTerm> = rows
            .iter()
            .filter(|(a, _)| *a != 0.0)
            .map(|(a, code)| {
                let l: String = code.iter().map(|&k| ['I', 'X', 'Y', 'Z'][k]).collect();
                PauliTerm::new(*a, PauliString::from_letters(&l).unwrap()).unwrap()
            })
            .collect();
        prop_assume!(!terms.is_empty());
        if let Ok(obs) = Observable::new(3, terms) {
            let back = parse_observable(&to_text(&obs)).unwrap();
            prop_assert_eq!(back, obs);
        }
    }

    #[test]
    fn observable_value_is_linear(seed in any::<u64>(), scale in -3.0f64..3.0) {
        prop_assume!(scale.abs() > 1e-3);
        let mode = GeneratorMode::Uniform { min_magnitude: 0.1, max_magnitude: 2.0, depth: 2 };
        let inst = random_observable(3, 5, &mode, seed).unwrap();
        let state = inst.prep.prepare().unwrap();
        let value = exact_observable_value(&state, &inst.observable).unwrap();
        let manual: f64 = inst.observable.terms().iter()
            .map(|t| t.coefficient * exact_expectation(&state, &t.string).unwrap())
            .sum();
        prop_assert!((value - manual).abs() < 1e-12);
        let scaled = Observable::new(3, inst.observable.terms().iter()
            .map(|t| PauliTerm::new(scale * t.coefficient, t.string).unwrap())
            .collect()).unwrap();
        prop_assert!((exact_observable_value(&state, &scaled).unwrap() - scale * value).abs() < 1e-11);
    }

    #[test]
    fn permutation_leaves_value_and_prediction(seed in any::<u64>()) {
        let mode = GeneratorMode::Uniform { min_magnitude: 0.1, max_magnitude: 1.0, depth: 2 };
        let inst = random_observable(3, 6, &mode, seed).unwrap();
        let state = inst.prep.prepare().unwrap();
        let order = [5, 3, 1, 0, 2, 4];
        let perm = inst.observable.permuted(&order).unwrap();
        let v1 = exact_observable_value(&state, &inst.observable).unwrap();
        let v2 = exact_observable_value(&state, &perm).unwrap();
        prop_assert!((v1 - v2).abs() < 1e-12);
        let p1 = qee_variance_prediction(&inst.observable, &exact_means(&state, &inst.observable).unwrap(), 10);
        let p2 = qee_variance_prediction(&perm, &exact_means(&state, &perm).unwrap(), 10);
        prop_assert!((p1 - p2).abs() < 1e-12);
    }

    #[test]
    fn commutation_matches_dense(a in letters(), b in letters()) {
        prop_assume!(a.len() == b.len());
        let (p, q) = (PauliString::from_letters(&a).unwrap(), PauliString::from_letters(&b).unwrap());
        let (mp, mq) = (dense_pauli(&p), dense_pauli(&q));
        let commutator = &mp * &mq - &mq * &mp;
        prop_assert_eq!(p.commutes_with(&q), commutator.norm() < 1e-12);
    }
}
