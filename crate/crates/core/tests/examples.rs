//! Small worked cases for each layer, one test per behavior.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use common::{c, dense_pauli, dense_state, expectation};
use nalgebra::DMatrix;
use num_complex::Complex64;
use tcps_core::pauli::{
    exact_expectation, exact_means, exact_observable_value, parse_observable, random_observable, validate_encodable,
    GeneratorMode, Observable, PauliString, PauliTerm,
};
use tcps_core::qee::{qee_estimate, qee_variance_prediction, sample_pauli_mean, TermSampler};
use tcps_core::rng::stream;
use tcps_core::statevector::{hadamard, identity2, ry, GateSpec, PreparationCircuit, StateVector};
use tcps_core::tcps::boundary::{boundary_check, Classification};
use tcps_core::tcps::budget::{plan_budget, BudgetTargets, EpsilonChoice};
use tcps_core::tcps::estimate::{tcps_estimate, EncodingSetup, TcpsOptions};
use tcps_core::tcps::hadamard::{label_from_counts, sign_resolve, Label};
use tcps_core::tcps::ladder::LadderConfig;
use tcps_core::tcps::memory::{MemoryAccumulator, MemoryMode};
use tcps_core::tcps::readout::{phase_from_frequencies, readout_variance_prediction, zero_probability, Frame};
use tcps_core::tcps::rotation::{dressing_root, eigenphase_oracle, eigenstate, Direction, RotationOperator};
use tcps_core::tcps::taylor::{
    corrected_variance_prediction, optimal_epsilon, taylor_correction, taylor_invert, CorrectionMode,
};

fn plus_state() -> StateVector {
    let mut s = StateVector::zero(1).unwrap();
    s.apply(&GateSpec::single(0, hadamard())).unwrap();
    s
}

fn term(a: f64, letters: &str) -> PauliTerm {
    PauliTerm::new(a, PauliString::from_letters(letters).unwrap()).unwrap()
}

/// Single qubit rotated so that `⟨Z⟩ = mean`.
fn z_mean_prep(mean: f64) -> PreparationCircuit {
    PreparationCircuit::new(1, vec![GateSpec::single(0, ry(mean.acos()))])
}

// statevector

#[test]
fn identity_and_hadamard() {
    let s0 = PreparationCircuit::seeded(2, 2, 3).prepare().unwrap();
    let mut s = s0.clone();
    s.apply(&GateSpec::single(1, identity2())).unwrap();
    assert_eq!(s, s0);
    let p = plus_state();
    assert!((p.amplitudes()[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    assert!((p.amplitudes()[1] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
}

#[test]
fn cnot_truth_table() {
    for (input, output) in [(0b00, 0b00), (0b01, 0b11), (0b10, 0b10), (0b11, 0b01)] {
        let mut s = StateVector::basis(2, input).unwrap();
        s.apply(&GateSpec::cx(0, 1)).unwrap();
        assert_eq!(s.amplitudes()[output], c(1.0, 0.0));
    }
}

#[test]
fn plus_state_statistics() {
    let mut rng = stream(75, 0);
    let zeros = (0..100_000).filter(|_| plus_state().measure_qubit(0, &mut rng).unwrap() == 0).count();
    assert!((zeros as f64 / 1e5 - 0.5).abs() < 0.01);
    let mut rng = stream(74, 0);
    assert!((0..100).all(|_| StateVector::zero(1).unwrap().measure_qubit(0, &mut rng).unwrap() == 0));
}

#[test]
fn bell_collapse() {
    let mut rng = stream(76, 0);
    loop {
        let mut s = StateVector::zero(2).unwrap();
        s.apply(&GateSpec::single(0, hadamard())).unwrap();
        s.apply(&GateSpec::cx(0, 1)).unwrap();
        if s.measure_qubit(0, &mut rng).unwrap() == 1 {
            assert!((s.amplitudes()[3].norm_sqr() - 1.0).abs() < 1e-12);
            break;
        }
    }
}

#[test]
fn controlled_rotation_kicks_back_eigenphase() {
    let prep = PreparationCircuit::seeded(3, 2, 67);
    let op = RotationOperator::dressed(&prep, &term(0.8, "XZY"), 0.3, 1.0).unwrap();
    let phi = eigenphase_oracle(&op).unwrap().phi;
    let eig = eigenstate(&op, true).unwrap();
    let mut joint = plus_state().tensor(&eig).unwrap();
    let control = op.width();
    joint.apply_all(&op.controlled_gates(control, Direction::Forward)).unwrap();
    let kick = 2.0 * joint.coherence(control).unwrap();
    assert!((kick - Complex64::from_polar(1.0, phi)).norm() < 1e-9);
}

// pauli-observable

#[test]
fn observable_text_examples() {
    let obs = parse_observable("2\n0.5 XZ\n-0.25 IY").unwrap();
    assert_eq!((obs.n_qubits(), obs.len()), (2, 2));
    let merged = parse_observable("1\n1.0 X\n2.0 X").unwrap();
    assert_eq!(merged.terms()[0].coefficient, 3.0);
    let err = parse_observable("1\n1.0 X\n1.0 Q").unwrap_err().to_string();
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn exact_expectation_examples() {
    let s = PreparationCircuit::seeded(3, 3, 85).prepare().unwrap();
    assert!((exact_expectation(&s, &PauliString::identity(3)).unwrap() - 1.0).abs() < 1e-12);
    let one = StateVector::basis(1, 1).unwrap();
    assert_eq!(exact_expectation(&one, &PauliString::from_letters("Z").unwrap()).unwrap(), -1.0);
    let xzy = PauliString::from_letters("XZY").unwrap();
    let dense = expectation(&dense_pauli(&xzy), &dense_state(&s)).re;
    assert!((exact_expectation(&s, &xzy).unwrap() - dense).abs() < 1e-12);
}

#[test]
fn observable_value_examples() {
    let s = PreparationCircuit::seeded(2, 2, 161).prepare().unwrap();
    let id = Observable::new(2, vec![term(1.0, "II")]).unwrap();
    assert!((exact_observable_value(&s, &id).unwrap() - 1.0).abs() < 1e-12);
    let halves = parse_observable("2\n0.5 ZI\n0.5 ZI").unwrap();
    let z = exact_expectation(&s, &PauliString::from_letters("ZI").unwrap()).unwrap();
    assert!((exact_observable_value(&s, &halves).unwrap() - z).abs() < 1e-12);

    let mode = GeneratorMode::Uniform { min_magnitude: 0.1, max_magnitude: 1.0, depth: 3 };
    let inst = random_observable(4, 10, &mode, 163).unwrap();
    let state = inst.prep.prepare().unwrap();
    let mut dense = DMatrix::from_element(16, 16, c(0.0, 0.0));
    for t in inst.observable.terms() {
        dense += dense_pauli(&t.string) * c(t.coefficient, 0.0);
    }
    let oracle = expectation(&dense, &dense_state(&state)).re;
    assert!((exact_observable_value(&state, &inst.observable).unwrap() - oracle).abs() < 1e-10);
}

#[test]
fn generator_examples() {
    let mode = GeneratorMode::Uniform { min_magnitude: 0.1, max_magnitude: 1.0, depth: 2 };
    let inst = random_observable(4, 20, &mode, 171).unwrap();
    assert_eq!(inst.observable.len(), 20);
    assert!(inst.observable.terms().iter().all(|t| !t.string.is_identity()));

    let mode = GeneratorMode::EqualMean { coefficient: 1.0, mean: 0.5, support_size: 2 };
    let inst = random_observable(5, 8, &mode, 172).unwrap();
    let means = exact_means(&inst.prep.prepare().unwrap(), &inst.observable).unwrap();
    let spread = means.iter().cloned().fold(f64::MIN, f64::max) - means.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread <= 0.05);
}

#[test]
fn feasibility_examples() {
    assert!(validate_encodable(&parse_observable("1\n1.0 Z").unwrap(), 0.25).feasible);
    assert!((dressing_root(1.0, 0.25).unwrap() - 0.5).abs() < 1e-12);
    let r = validate_encodable(&parse_observable("1\n2.0 Z").unwrap(), 0.25);
    assert!(!r.feasible);
    assert_eq!(r.max_feasible_epsilon, 1.0 / 16.0);
    assert!(validate_encodable(&parse_observable("2\n0.1 ZI\n0.1 IX\n0.1 XX").unwrap(), 0.01).feasible);
}

// qee-baseline

#[test]
fn sampling_examples() {
    let mut rng = stream(226, 0);
    let prep = PreparationCircuit::seeded(3, 2, 226);
    assert_eq!(sample_pauli_mean(&prep, &PauliString::identity(3), 17, &mut rng).unwrap(), 1.0);
    let zero = PreparationCircuit::new(1, vec![]);
    assert_eq!(sample_pauli_mean(&zero, &PauliString::from_letters("Z").unwrap(), 33, &mut rng).unwrap(), 1.0);
    let p = PauliString::from_letters("YZX").unwrap();
    let exact = exact_expectation(&prep.prepare().unwrap(), &p).unwrap();
    let shots = 100_000;
    let m = sample_pauli_mean(&prep, &p, shots, &mut rng).unwrap();
    assert!((m - exact).abs() < 4.0 * ((1.0 - exact * exact) / shots as f64).sqrt());
}

#[test]
fn qee_examples() {
    let zero = PreparationCircuit::new(1, vec![]);
    let obs = parse_observable("1\n1.0 Z").unwrap();
    assert_eq!(qee_estimate(&zero, &obs, 10, &mut stream(235, 0)).unwrap().estimate, 1.0);

    // ⟨X⟩ = 0 on |0⟩
    let obs = parse_observable("1\n1.0 X").unwrap();
    let trials = 1000;
    let est: Vec<f64> = (0..trials).map(|t| qee_estimate(&zero, &obs, 50, &mut stream(236, t)).unwrap().estimate).collect();
    let mean = est.iter().sum::<f64>() / trials as f64;
    assert!(mean.abs() < 4.0 * (1.0 / (50.0 * trials as f64)).sqrt());

    let mode = GeneratorMode::Uniform { min_magnitude: 0.2, max_magnitude: 1.0, depth: 2 };
    let inst = random_observable(3, 5, &mode, 237).unwrap();
    let state = inst.prep.prepare().unwrap();
    let exact = exact_observable_value(&state, &inst.observable).unwrap();
    let n_c = 10_000;
    let r = qee_estimate(&inst.prep, &inst.observable, n_c, &mut stream(237, 0)).unwrap();
    let sigma = qee_variance_prediction(&inst.observable, &exact_means(&state, &inst.observable).unwrap(), n_c).sqrt();
    assert!((r.estimate - exact).abs() < 4.0 * sigma);
}

#[test]
fn qee_variance_examples() {
    let one = parse_observable("1\n1.0 Z").unwrap();
    assert!((qee_variance_prediction(&one, &[0.0], 100) - 0.01).abs() < 1e-15);
    assert_eq!(qee_variance_prediction(&one, &[1.0], 100), 0.0);
    assert_eq!(qee_variance_prediction(&one, &[-1.0], 100), 0.0);

    let mode = GeneratorMode::EqualMean { coefficient: 1.0, mean: 0.5, support_size: 2 };
    let inst = random_observable(7, 16, &mode, 246).unwrap();
    let means = vec![0.5; 16];
    let predicted = qee_variance_prediction(&inst.observable, &means, 1000);
    assert!((predicted - 0.012).abs() < 1e-12);
    let sampler = TermSampler::new(&inst.prep).unwrap();
    let trials = 10_000u64;
    let est: Vec<f64> = (0..trials)
        .map(|t| tcps_core::qee::qee_estimate_with(&sampler, &inst.observable, 1000, &mut stream(246, t)).unwrap().estimate)
        .collect();
    let mean = est.iter().sum::<f64>() / trials as f64;
    let var = est.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
    assert!((var / predicted - 1.0).abs() < 0.1, "{var}");
}

// rotation operator

#[test]
fn rotation_examples() {
    let prep = PreparationCircuit::seeded(2, 2, 312);
    let op = RotationOperator::undressed(&prep, PauliString::identity(2)).unwrap();
    let pair = eigenphase_oracle(&op).unwrap();
    assert!(pair.phi.abs() < 1e-9);
    assert!((pair.overlap.abs() - 1.0).abs() < 1e-9);

    // 2√ε|a⟨P⟩| = 1 and = 0
    let zero = PreparationCircuit::new(1, vec![]);
    let op = RotationOperator::dressed(&zero, &term(1.0, "Z"), 0.25, 1.0).unwrap();
    assert!(eigenphase_oracle(&op).unwrap().phi.abs() < 1e-6);
    let op = RotationOperator::dressed(&zero, &term(1.0, "X"), 0.25, 1.0).unwrap();
    assert!((eigenphase_oracle(&op).unwrap().phi - FRAC_PI_2).abs() < 1e-9);
}

// boundary check and budget

#[test]
fn boundary_examples() {
    let zero = PreparationCircuit::new(1, vec![]);
    let sampler = TermSampler::new(&zero).unwrap();
    let z = parse_observable("1\n1.0 Z").unwrap();
    let r = boundary_check(&sampler, &z, 185, 0.2, &mut stream(330, 0)).unwrap();
    assert_eq!(r[0].classification, Classification::NearExtremal);

    let x = parse_observable("1\n1.0 X").unwrap();
    let trials = 2000;
    let near_zero = (0..trials)
        .filter(|&t| {
            boundary_check(&sampler, &x, 200, 0.2, &mut stream(331, t)).unwrap()[0].classification
                == Classification::NearZero
        })
        .count();
    assert!(near_zero as f64 >= 0.95 * trials as f64);

    let half = TermSampler::new(&z_mean_prep(0.5)).unwrap();
    let encodable = (0..trials)
        .filter(|&t| {
            boundary_check(&half, &z, 185, 0.2, &mut stream(332, t)).unwrap()[0].classification
                == Classification::Encodable
        })
        .count();
    assert!(encodable as f64 >= 0.95 * trials as f64);
}

// hadamard test, sign resolution

#[test]
fn hadamard_probability_examples() {
    assert_eq!(zero_probability(Frame::X, Complex64::from_polar(1.0, 0.0)), 1.0);
    assert!((zero_probability(Frame::X, Complex64::from_polar(1.0, FRAC_PI_2)) - 0.5).abs() < 1e-15);
    assert_eq!(label_from_counts(24, 48), Label::Plus);
}

#[test]
fn sign_resolution_examples() {
    let prep = PreparationCircuit::seeded(2, 2, 357);
    let op = RotationOperator::dressed(&prep, &term(1.0, "ZX"), 0.2, 1.0).unwrap();
    let plus = eigenstate(&op, true).unwrap().extended(1).unwrap();
    let mut rng = stream(357, 0);
    let trials = 1000;
    let wrong = (0..trials)
        .filter(|_| sign_resolve(&mut plus.clone(), &op, op.width(), 49, &mut rng).unwrap().label != Label::Plus)
        .count();
    assert!(wrong as f64 <= 0.05 * trials as f64);

    // equal superposition splits evenly
    let trials = 10_000;
    let mut rng = stream(359, 0);
    let start = op.prepare(1).unwrap();
    let pluses = (0..trials)
        .filter(|_| sign_resolve(&mut start.clone(), &op, op.width(), 49, &mut rng).unwrap().label == Label::Plus)
        .count();
    let se = (0.25 / trials as f64).sqrt();
    assert!((pluses as f64 / trials as f64 - 0.5).abs() < 4.0 * se, "{pluses}");
}

// memory

#[test]
fn memory_examples() {
    // 2√ε|a⟨P⟩| = 1 leaves the memory untouched
    let zero = PreparationCircuit::new(1, vec![]);
    let op = RotationOperator::dressed(&zero, &term(1.0, "Z"), 0.25, 1.0).unwrap();
    let mut m = MemoryAccumulator::new(MemoryMode::Exact);
    m.encode_exact(&op.prepare(0).unwrap(), &op, Direction::Forward).unwrap();
    assert!((m.coherence() - c(1.0, 0.0)).norm() < 1e-6);

    // phases of three terms add, in both modes
    let prep = PreparationCircuit::seeded(3, 2, 368);
    let ops: Vec<RotationOperator> = [("XZI", 0.7), ("IYZ", -0.4), ("ZZX", 0.9)]
        .iter()
        .map(|&(l, a)| RotationOperator::dressed(&prep, &term(a, l), 0.25, 1.0).unwrap())
        .collect();
    let mut exact = MemoryAccumulator::new(MemoryMode::Exact);
    let mut fast = MemoryAccumulator::new(MemoryMode::Fast);
    let mut total = 0.0;
    for op in &ops {
        let phi = eigenphase_oracle(op).unwrap().phi;
        exact.encode_exact(&eigenstate(op, true).unwrap(), op, Direction::Forward).unwrap();
        fast.encode_sampled(phi, 1.0, Direction::Forward).unwrap();
        total += phi;
    }
    assert!((exact.coherence() - Complex64::from_polar(1.0, total)).norm() < 1e-9);
    assert!((fast.phase() - total).abs() < 1e-12);
}

#[test]
fn nothing_encoded_leaves_memory() {
    let zero = PreparationCircuit::new(2, vec![]);
    let obs = parse_observable("2\n1.0 XI\n0.5 IX").unwrap();
    let sampler = TermSampler::new(&zero).unwrap();
    let plan = plan_budget(&BudgetTargets::default(), 2, EpsilonChoice::Optimal).unwrap();
    let r = tcps_estimate(&zero, &sampler, &obs, &plan, &TcpsOptions::default(), &mut stream(375, 0)).unwrap();
    assert_eq!(r.n_encoded, 0);
    assert_eq!(r.ledger.interactions, 0);
    assert_eq!(MemoryAccumulator::new(MemoryMode::Fast).zero_probability(Frame::X), 1.0);
}

#[test]
fn two_term_exact_round_frequencies() {
    let mode = GeneratorMode::EqualMean { coefficient: 1.0, mean: 0.5, support_size: 1 };
    let inst = random_observable(2, 2, &mode, 376).unwrap();
    let state = inst.prep.prepare().unwrap();
    let encoded = [(0, 1.0), (1, 1.0)];
    let setup = EncodingSetup::new(&inst.prep, &state, &inst.observable, &encoded, 0.25, 49, MemoryMode::Exact).unwrap();
    let total: f64 = setup.terms.iter().map(|t| t.phi).sum();
    let reps = 10_000;
    let mut ledger = Default::default();
    let counts = setup.run_encoding_round(reps, &mut stream(376, 0), &mut ledger).unwrap();
    let (x0, y0) = counts.frequencies().unwrap();
    for (freq, p, m) in [(x0, 0.5 * (1.0 + total.cos()), counts.x_total), (y0, 0.5 * (1.0 - total.sin()), counts.y_total)] {
        let se = (p * (1.0 - p) / m as f64).sqrt();
        assert!((freq - p).abs() < 4.0 * se, "{freq} vs {p}");
    }
}

// readout and inversion

#[test]
fn readout_examples() {
    assert_eq!(phase_from_frequencies(1.0, 0.5).unwrap(), 0.0);
    assert_eq!(phase_from_frequencies(0.0, 0.5).unwrap(), PI);
    let (x0, y0) = (0.5 * (1.0 + FRAC_PI_4.cos()), 0.5 * (1.0 - FRAC_PI_4.sin()));
    assert!((phase_from_frequencies(x0, y0).unwrap() - FRAC_PI_4).abs() < 1e-12);
    assert!((readout_variance_prediction(0.0, 100) - 0.01).abs() < 1e-15);
    assert!((readout_variance_prediction(FRAC_PI_8, 1) - 0.5).abs() < 1e-15);
}

#[test]
fn inversion_examples() {
    let n = 5.0;
    assert!(taylor_invert(n * FRAC_PI_2, n, 0.3).abs() < 1e-15);
    let phi = 0.1f64.acos();
    assert!((phi - 1.470629).abs() < 1e-6);
    assert!((taylor_invert(phi, 1.0, 0.01) - 0.500838).abs() < 1e-6);
    // sensitivity 1/(2√ε)
    let h = 1e-6;
    let slope = (taylor_invert(phi + h, 1.0, 0.04) - taylor_invert(phi, 1.0, 0.04)) / h;
    assert!((slope + 1.0 / (2.0 * 0.2)).abs() < 1e-6);
}

#[test]
fn correction_examples() {
    assert_eq!(taylor_correction(&[(1.0, 0.0), (2.0, 0.0)], 0.1, CorrectionMode::ClosedForm).unwrap(), 0.0);
    let corr = taylor_correction(&[(1.0, 0.5)], 0.01, CorrectionMode::ClosedForm).unwrap();
    assert!((corr - 8.37e-4).abs() < 1e-6);
}

#[test]
fn variance_prediction_examples() {
    let v = corrected_variance_prediction(&[(1.0, 0.0), (0.5, 0.0)], 0.1, 200, 50).unwrap();
    assert!((v.elliptic - 1.0 / (0.1 * 200.0)).abs() < 1e-15);
    let v = corrected_variance_prediction(&[(1.0, 0.5)], 0.01, 100, 100).unwrap();
    assert!((v.elliptic / v.simplified - 1.0).abs() < 0.01);
}

#[test]
fn equal_weight_pipeline_variance() {
    let mode = GeneratorMode::EqualMean { coefficient: 1.0, mean: 0.5, support_size: 1 };
    let inst = random_observable(4, 4, &mode, 431).unwrap();
    let sampler = TermSampler::new(&inst.prep).unwrap();
    let plan = plan_budget(&BudgetTargets::default(), 4, EpsilonChoice::Optimal).unwrap();
    let trials = 1000;
    let runs: Vec<_> = (0..trials)
        .map(|t| tcps_estimate(&inst.prep, &sampler, &inst.observable, &plan, &TcpsOptions::default(), &mut stream(431, t)).unwrap())
        .collect();
    let mean = runs.iter().map(|r| r.estimate).sum::<f64>() / trials as f64;
    let var = runs.iter().map(|r| (r.estimate - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
    let predicted = runs.iter().map(|r| r.predicted_variance).sum::<f64>() / trials as f64;
    assert!((var / predicted - 1.0).abs() < 0.25, "{var} vs {predicted}");
    let covered = runs.iter().filter(|r| (r.estimate - 2.0).abs() < 4.0 * r.predicted_variance.sqrt()).count();
    assert!(covered as f64 >= 0.95 * trials as f64);
}

#[test]
fn optimal_epsilon_clamps() {
    let o = optimal_epsilon(1000, 10, &[(1.0, 0.5)], None).unwrap();
    assert!(o.clamped);
    assert_eq!(o.epsilon, 0.25);
    assert!(o.unclamped > 0.25);
}

// ladder

fn wrapped_instance() -> (PreparationCircuit, Observable) {
    let mode = GeneratorMode::EqualMean { coefficient: 1.0, mean: 0.5, support_size: 3 };
    let inst = random_observable(9, 64, &mode, 448).unwrap();
    (inst.prep, inst.observable)
}

#[test]
fn single_level_ladder_is_plain_readout() {
    let (prep, obs) = wrapped_instance();
    let sampler = TermSampler::new(&prep).unwrap();
    let plan = plan_budget(&BudgetTargets::default(), 64, EpsilonChoice::Optimal).unwrap();
    // Σ|a|·k₀ = 64/16 < π: no wrap at the only level
    let ladder = LadderConfig::new(200, 50, 0, 1.0 / 16.0).unwrap();
    let options = TcpsOptions { ladder: Some(ladder), ..Default::default() };
    let r = tcps_estimate(&prep, &sampler, &obs, &plan, &options, &mut stream(447, 0)).unwrap();
    let level = &r.ladder.unwrap().levels[0];
    let plain = level.corrected / level.scale;
    assert!((level.estimate - plain).abs() < 1e-9);
}

#[test]
fn ladder_beats_naive_readout_after_wraps() {
    let (prep, obs) = wrapped_instance();
    let sampler = TermSampler::new(&prep).unwrap();
    let plan = plan_budget(&BudgetTargets::default(), 64, EpsilonChoice::Optimal).unwrap();
    let ladder = LadderConfig::new(24, 8, 4, 1.0 / 16.0).unwrap();
    let options = TcpsOptions { ladder: Some(ladder), ..Default::default() };
    let r = tcps_estimate(&prep, &sampler, &obs, &plan, &options, &mut stream(448, 0)).unwrap();
    assert!((r.estimate - 32.0).abs() < 4.0 * r.predicted_variance.sqrt());
    let finest = r.ladder.unwrap().levels.last().unwrap().clone();
    let naive = finest.corrected / finest.scale;
    let period = 2.0 * PI / finest.scale;
    let wraps = ((32.0 - naive) / period).round();
    assert!(wraps >= 5.0);
    assert!((32.0 - naive - wraps * period).abs() < 0.1);
}

// full pipeline

#[test]
fn extremal_terms_are_exact() {
    let zero = PreparationCircuit::new(2, vec![]);
    let obs = parse_observable("2\n0.7 ZI\n-0.3 IZ\n0.2 ZZ").unwrap();
    let sampler = TermSampler::new(&zero).unwrap();
    let plan = plan_budget(&BudgetTargets::default(), 3, EpsilonChoice::Optimal).unwrap();
    let r = tcps_estimate(&zero, &sampler, &obs, &plan, &TcpsOptions::default(), &mut stream(456, 0)).unwrap();
    assert_eq!(r.n_encoded, 0);
    assert!((r.estimate - 0.6).abs() < 1e-12);
}
