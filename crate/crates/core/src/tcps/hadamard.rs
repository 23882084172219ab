//! Single-ancilla Hadamard test and the eigenstate sign resolution built on it.
//!
//! One round: `H` on the ancilla, controlled rotation, optional `R_z(π/2)`,
//! `H`, measure, reset. On an eigenstate with phase `φ` the ancilla reads 0
//! with probability `(1 + cos φ)/2` in the X frame and `(1 − sin φ)/2` in the
//! Y frame. The register is not re-prepared between rounds, so measurement
//! back-action accumulates.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::Result;
use crate::statevector::{hadamard, rz, GateSpec, StateVector};
use crate::tcps::readout::Frame;
use crate::tcps::rotation::{Direction, RotationOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Plus,
    Minus,
}

/// Zeros and ones read by the ancilla.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OutcomeCounts {
    pub zeros: u64,
    pub ones: u64,
}

/// Run `repetitions` rounds on `register`, whose qubit `ancilla` must be in |0⟩.
pub fn hadamard_test<R: Rng + ?Sized>(
    register: &mut StateVector,
    op: &RotationOperator,
    ancilla: usize,
    frame: Frame,
    repetitions: u64,
    rng: &mut R,
) -> Result<OutcomeCounts> {
    let controlled = op.controlled_gates(ancilla, Direction::Forward);
    let h = GateSpec::single(ancilla, hadamard());
    let s = GateSpec::single(ancilla, rz(std::f64::consts::FRAC_PI_2));
    let mut counts = OutcomeCounts::default();
    for _ in 0..repetitions {
        register.apply(&h)?;
        register.apply_all(&controlled)?;
        if frame == Frame::Y {
            register.apply(&s)?;
        }
        register.apply(&h)?;
        let bit = register.measure_qubit(ancilla, rng)?;
        register.reset_measured(ancilla, bit)?;
        if bit == 0 {
            counts.zeros += 1;
        } else {
            counts.ones += 1;
        }
    }
    Ok(counts)
}

/// Label from the Y-frame zero count: `+` when `ν(Y=0) ≤ 1/2`, ties included.
pub fn label_from_counts(y_zeros: u64, rounds: u64) -> Label {
    if 2 * y_zeros <= rounds {
        Label::Plus
    } else {
        Label::Minus
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignOutcome {
    pub label: Label,
    pub y_zeros: u64,
    pub rounds: u64,
}

/// Resolve which eigenstate the register sits in with `rounds` Y-frame tests.
/// The register is left collapsed for the encoding step.
pub fn sign_resolve<R: Rng + ?Sized>(
    register: &mut StateVector,
    op: &RotationOperator,
    ancilla: usize,
    rounds: u64,
    rng: &mut R,
) -> Result<SignOutcome> {
    let counts = hadamard_test(register, op, ancilla, Frame::Y, rounds, rng)?;
    Ok(SignOutcome { label: label_from_counts(counts.zeros, rounds), y_zeros: counts.zeros, rounds })
}

/// Distributional shortcut for a register in the equal superposition of the
/// eigenstates `e^{±iφ}`: draws the eigenstate branch (`+1` or `−1`) and the
/// Y-frame count it produces.
pub fn sign_resolve_sampled<R: Rng + ?Sized>(phi: f64, rounds: u64, rng: &mut R) -> (SignOutcome, f64) {
    let branch = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let p0 = (0.5 * (1.0 - branch * phi.sin())).clamp(0.0, 1.0);
    let y_zeros = if rounds == 0 { 0 } else { Binomial::new(rounds, p0).expect("clamped").sample(rng) };
    (SignOutcome { label: label_from_counts(y_zeros, rounds), y_zeros, rounds }, branch)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tie_goes_to_plus() {
        assert_eq!(label_from_counts(5, 10), Label::Plus);
        assert_eq!(label_from_counts(6, 10), Label::Minus);
        assert_eq!(label_from_counts(0, 0), Label::Plus);
    }
}
