//! Per-term sampling baseline.
//!
//! Each shot prepares `Ψ₀`, rotates every qubit in the string's support into
//! the Z basis (H for X, S†·H for Y) and reads the parity of the support bits.
//! Since the preparation is identical for every shot, the parity distribution
//! is computed once and shot counts are drawn from the matching binomial.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::ledger::ResourceLedger;
use crate::pauli::{Observable, PauliString};
use crate::statevector::{hadamard, GateSpec, Matrix2, PreparationCircuit, StateVector};

fn s_dagger() -> Matrix2 {
    let z = Complex64::new(0.0, 0.0);
    [[Complex64::new(1.0, 0.0), z], [z, Complex64::new(0.0, -1.0)]]
}

/// Gates mapping the string's eigenbasis onto the computational basis.
pub fn basis_rotation(string: &PauliString) -> Vec<GateSpec> {
    let mut gates = Vec::new();
    for q in 0..string.n_qubits() {
        match string.letter(q) {
            'X' => gates.push(GateSpec::single(q, hadamard())),
            'Y' => {
                gates.push(GateSpec::single(q, s_dagger()));
                gates.push(GateSpec::single(q, hadamard()));
            }
            _ => {}
        }
    }
    gates
}

/// Draw `shots` binary outcomes with `P(+1) = p_plus` and return `(n₊ − n₋)/shots`.
pub fn sample_mean_from_probability<R: Rng + ?Sized>(p_plus: f64, shots: u64, rng: &mut R) -> f64 {
    let p = p_plus.clamp(0.0, 1.0);
    let plus = Binomial::new(shots, p).expect("probability clamped to [0, 1]").sample(rng);
    (2.0 * plus as f64 - shots as f64) / shots as f64
}

/// Samples Pauli means on a fixed prepared state.
#[derive(Debug, Clone)]
pub struct TermSampler {
    state: StateVector,
}

impl TermSampler {
    pub fn new(prep: &PreparationCircuit) -> Result<Self> {
        Ok(Self { state: prep.prepare()? })
    }

    pub fn from_state(state: StateVector) -> Self {
        Self { state }
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// Born probability of the +1 eigenvalue, from the rotated register.
    pub fn probability_plus(&self, string: &PauliString) -> Result<f64> {
        if string.n_qubits() > self.state.n_qubits() {
            return Err(Error::DimensionMismatch { left: string.n_qubits(), right: self.state.n_qubits() });
        }
        let mut rotated = self.state.clone();
        rotated.apply_all(&basis_rotation(string))?;
        let support = string.support() as usize;
        Ok(rotated
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| (i & support).count_ones().is_multiple_of(2))
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            .clamp(0.0, 1.0))
    }

    pub fn sample<R: Rng + ?Sized>(&self, string: &PauliString, shots: u64, rng: &mut R) -> Result<f64> {
        if shots == 0 {
            return Err(Error::InvalidParameter("shots must be at least 1".into()));
        }
        Ok(sample_mean_from_probability(self.probability_plus(string)?, shots, rng))
    }

    /// Shot-by-shot path: measure every support qubit with collapse.
    pub fn sample_per_shot<R: Rng + ?Sized>(&self, string: &PauliString, shots: u64, rng: &mut R) -> Result<f64> {
        if shots == 0 {
            return Err(Error::InvalidParameter("shots must be at least 1".into()));
        }
        let mut rotated = self.state.clone();
        rotated.apply_all(&basis_rotation(string))?;
        let mut sum = 0i64;
        for _ in 0..shots {
            let mut s = rotated.clone();
            let mut parity = 0u8;
            for q in 0..string.n_qubits() {
                if (string.support() >> q) & 1 == 1 {
                    parity ^= s.measure_qubit(q, rng)?;
                }
            }
            sum += if parity == 0 { 1 } else { -1 };
        }
        Ok(sum as f64 / shots as f64)
    }
}

/// Mean of one string over `shots` fresh preparations.
pub fn sample_pauli_mean<R: Rng + ?Sized>(
    prep: &PreparationCircuit,
    string: &PauliString,
    shots: u64,
    rng: &mut R,
) -> Result<f64> {
    TermSampler::new(prep)?.sample(string, shots, rng)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QeeResult {
    pub estimate: f64,
    pub means: Vec<f64>,
    pub shots_per_term: u64,
    pub total_shots: u64,
    /// Plug-in prediction from the sampled means.
    pub predicted_variance: f64,
    pub ledger: ResourceLedger,
}

/// `Σ_j a_j · mean_j` with `n_c` shots per term.
pub fn qee_estimate_with<R: Rng + ?Sized>(
    sampler: &TermSampler,
    obs: &Observable,
    n_c: u64,
    rng: &mut R,
) -> Result<QeeResult> {
    if n_c == 0 {
        return Err(Error::InvalidParameter("n_c must be at least 1".into()));
    }
    let means = obs.terms().iter().map(|t| sampler.sample(&t.string, n_c, rng)).collect::<Result<Vec<_>>>()?;
    let estimate = obs.terms().iter().zip(&means).map(|(t, m)| t.coefficient * m).sum();
    let total = n_c * obs.len() as u64;
    let ledger = ResourceLedger { qee_preparations: total, measurements: total, ..Default::default() };
    Ok(QeeResult {
        estimate,
        predicted_variance: qee_variance_prediction(obs, &means, n_c),
        means,
        shots_per_term: n_c,
        total_shots: total,
        ledger,
    })
}

pub fn qee_estimate<R: Rng + ?Sized>(
    prep: &PreparationCircuit,
    obs: &Observable,
    n_c: u64,
    rng: &mut R,
) -> Result<QeeResult> {
    qee_estimate_with(&TermSampler::new(prep)?, obs, n_c, rng)
}

/// `(1/n_c) Σ_j a_j² (1 − ⟨P_j⟩²)`.
pub fn qee_variance_prediction(obs: &Observable, means: &[f64], n_c: u64) -> f64 {
    obs.terms()
        .iter()
        .zip(means)
        .map(|(t, m)| t.coefficient * t.coefficient * (1.0 - m * m).max(0.0))
        .sum::<f64>()
        / n_c as f64
}
