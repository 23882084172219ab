//! The memory qubit that accumulates one phase per encoded term.
//!
//! The memory starts in |+⟩. Every term couples it once, through a controlled
//! rotation, to a freshly prepared (and sign-resolved) register that is then
//! discarded. The memory's reduced state is therefore fixed by its coherence
//! `c = 2ρ₁₀`, which each coupling multiplies by `⟨r|U|r⟩` for the register
//! state `r` it met.
//!
//! * [`MemoryMode::Exact`] simulates each coupling on the joint
//!   memory-plus-register statevector and reads the factor off the memory's
//!   reduced state.
//! * [`MemoryMode::Fast`] uses the eigenstate branch drawn during sign
//!   resolution and multiplies by `e^{±iφ}` directly; it has the same outcome
//!   distribution.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::statevector::{hadamard, GateSpec, StateVector};
use crate::tcps::readout::{zero_probability, Frame};
use crate::tcps::rotation::{Direction, RotationOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MemoryMode {
    Fast,
    Exact,
}

impl MemoryMode {
    fn name(self) -> &'static str {
        match self {
            MemoryMode::Fast => "fast",
            MemoryMode::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemoryAccumulator {
    mode: MemoryMode,
    coherence: Complex64,
    phase: f64,
    encoded: usize,
}

impl MemoryAccumulator {
    /// Memory in |+⟩ with phase 0.
    pub fn new(mode: MemoryMode) -> Self {
        Self { mode, coherence: Complex64::new(1.0, 0.0), phase: 0.0, encoded: 0 }
    }

    pub fn mode(&self) -> MemoryMode {
        self.mode
    }

    /// `2ρ₁₀` of the memory qubit.
    pub fn coherence(&self) -> Complex64 {
        self.coherence
    }

    /// Sum of the phases added so far, not reduced modulo 2π.
    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn encoded(&self) -> usize {
        self.encoded
    }

    fn require(&self, want: MemoryMode) -> Result<()> {
        if self.mode != want {
            return Err(Error::MemoryMode { have: self.mode.name(), want: want.name() });
        }
        Ok(())
    }

    /// Add `branch · direction · φ` (fast mode).
    pub fn encode_sampled(&mut self, phi: f64, branch: f64, direction: Direction) -> Result<()> {
        self.require(MemoryMode::Fast)?;
        let delta = branch * direction.sign() * phi;
        self.phase += delta;
        self.coherence *= Complex64::from_polar(1.0, delta);
        self.encoded += 1;
        Ok(())
    }

    /// Couple the memory to `register` through the controlled rotation (exact mode).
    ///
    /// The register's qubits `0..op.width()` carry the operator; any extra
    /// qubits (a measured ancilla) are kept. Returns the factor `⟨r|U|r⟩`.
    pub fn encode_exact(
        &mut self,
        register: &StateVector,
        op: &RotationOperator,
        direction: Direction,
    ) -> Result<Complex64> {
        self.require(MemoryMode::Exact)?;
        let memory = register.n_qubits();
        let mut plus = StateVector::zero(1)?;
        plus.apply(&GateSpec::single(0, hadamard()))?;
        let mut joint = plus.tensor(register)?;
        joint.apply_all(&op.controlled_gates(memory, direction))?;
        let factor = 2.0 * joint.coherence(memory)?;
        self.phase += factor.arg();
        self.coherence *= factor;
        self.encoded += 1;
        Ok(factor)
    }

    /// Probability that a readout in `frame` returns 0.
    pub fn zero_probability(&self, frame: Frame) -> f64 {
        zero_probability(frame, self.coherence)
    }

    /// Read the memory in `frame`, consuming it.
    pub fn measure<R: Rng + ?Sized>(self, frame: Frame, rng: &mut R) -> u8 {
        u8::from(rng.random::<f64>() >= self.zero_probability(frame))
    }
}
