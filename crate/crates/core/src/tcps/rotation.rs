//! The reflection-product operator whose eigenphase encodes one Pauli mean.
//!
//! Undressed: `U = −V Π₀ V† P` on the system register. Its restriction to
//! `span{Ψ₀, PΨ₀}` is a rotation with `cos φ = ⟨Ψ₀|P|Ψ₀⟩`.
//!
//! Dressed: one processing ancilla `p` (index `n`, just above the system) is
//! rotated so that
//!
//! ```text
//! Ψ̃₀ = √(1−ε')|0⟩_p Ψ₀ + σ√ε'|1⟩_p PΨ₀,   √(ε'(1−ε')) = |a|√ε
//! ```
//!
//! and `Ũ = −Ṽ Π₀ Ṽ† X_p`, giving `cos φ̃ = 2σ|a|√ε⟨P⟩`. With `σ` equal to the
//! sign of `⟨P⟩` this is `2√ε|a⟨P⟩|`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{exact_expectation, PauliString, PauliTerm};
use crate::statevector::{pauli_x, ry, GateSpec, PreparationCircuit, StateVector};

/// Largest register accepted by [`eigenphase_oracle`].
pub const ORACLE_MAX_QUBITS: usize = 14;

/// Which of `U`, `U†` is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn from_sign(sign: f64) -> Self {
        if sign >= 0.0 {
            Direction::Forward
        } else {
            Direction::Backward
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dressing {
    pub coefficient: f64,
    pub epsilon: f64,
    /// ±1; the sign attached to the `PΨ₀` branch.
    pub orientation: f64,
    /// The smaller root of `ε'(1−ε') = a²ε`.
    pub epsilon_prime: f64,
}

/// Smaller root of `ε'(1−ε') = a²ε`.
pub fn dressing_root(coefficient: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("encoding strength {epsilon} outside (0, 1)")));
    }
    let v = coefficient.abs() * epsilon.sqrt();
    if v > 0.5 + 1e-12 {
        return Err(Error::InfeasibleDressing { value: v });
    }
    let disc = (1.0 - 4.0 * v * v).max(0.0);
    // 2v²/(1+√disc) avoids cancellation in (1−√disc)/2
    Ok(2.0 * v * v / (1.0 + disc.sqrt()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationOperator {
    prep: PreparationCircuit,
    string: PauliString,
    dressing: Option<Dressing>,
}

impl RotationOperator {
    /// Undressed `U = −V Π₀ V† P`.
    pub fn undressed(prep: &PreparationCircuit, string: PauliString) -> Result<Self> {
        if string.n_qubits() != prep.n_qubits {
            return Err(Error::DimensionMismatch { left: string.n_qubits(), right: prep.n_qubits });
        }
        Ok(Self { prep: prep.clone(), string, dressing: None })
    }

    /// Dressed operator for `term` at strength `epsilon`; `orientation` is ±1.
    pub fn dressed(prep: &PreparationCircuit, term: &PauliTerm, epsilon: f64, orientation: f64) -> Result<Self> {
        if term.string.n_qubits() != prep.n_qubits {
            return Err(Error::DimensionMismatch { left: term.string.n_qubits(), right: prep.n_qubits });
        }
        let epsilon_prime = dressing_root(term.coefficient, epsilon)?;
        let orientation = if orientation < 0.0 { -1.0 } else { 1.0 };
        Ok(Self {
            prep: prep.clone(),
            string: term.string,
            dressing: Some(Dressing { coefficient: term.coefficient, epsilon, orientation, epsilon_prime }),
        })
    }

    pub fn dressing(&self) -> Option<&Dressing> {
        self.dressing.as_ref()
    }

    pub fn string(&self) -> PauliString {
        self.string
    }

    pub fn n_system(&self) -> usize {
        self.prep.n_qubits
    }

    /// Qubits the operator acts on: the system, plus the processing ancilla when dressed.
    pub fn width(&self) -> usize {
        self.prep.n_qubits + usize::from(self.dressing.is_some())
    }

    fn ancilla(&self) -> usize {
        self.prep.n_qubits
    }

    /// `Ṽ` (or `V`) as a gate list on `width()` qubits.
    pub fn preparation_gates(&self) -> Vec<GateSpec> {
        let mut gates = self.prep.gates.clone();
        if let Some(d) = &self.dressing {
            let p = self.ancilla();
            let theta = 2.0 * d.epsilon_prime.sqrt().asin();
            gates.push(GateSpec::single(p, ry(d.orientation * theta)));
            if !self.string.is_identity() {
                gates.push(GateSpec::controlled(p, GateSpec::Pauli(self.string)));
            }
        }
        gates
    }

    fn kick(&self) -> GateSpec {
        match self.dressing {
            Some(_) => GateSpec::single(self.ancilla(), pauli_x()),
            None => GateSpec::Pauli(self.string),
        }
    }

    fn reflection(&self) -> GateSpec {
        GateSpec::Reflection { qubits: (0..self.width()).collect() }
    }

    /// The operator as a gate list, in application order.
    pub fn gates(&self, direction: Direction) -> Vec<GateSpec> {
        let prep = self.preparation_gates();
        let mut gates = vec![self.kick()];
        gates.extend(prep.iter().rev().map(GateSpec::adjoint));
        gates.push(self.reflection());
        gates.extend(prep);
        gates.push(GateSpec::Phase(Complex64::new(-1.0, 0.0)));
        match direction {
            Direction::Forward => gates,
            Direction::Backward => gates.iter().rev().map(GateSpec::adjoint).collect(),
        }
    }

    /// Controlled operator with only the kick, reflection and sign controlled;
    /// the `Ṽ`/`Ṽ†` sandwich cancels on the control-off branch.
    pub fn controlled_gates(&self, control: usize, direction: Direction) -> Vec<GateSpec> {
        let prep = self.preparation_gates();
        let mut gates = vec![GateSpec::controlled(control, self.kick())];
        gates.extend(prep.iter().rev().map(GateSpec::adjoint));
        gates.push(GateSpec::controlled(control, self.reflection()));
        gates.push(GateSpec::controlled(control, GateSpec::Phase(Complex64::new(-1.0, 0.0))));
        gates.extend(prep);
        match direction {
            Direction::Forward => gates,
            Direction::Backward => gates.iter().rev().map(GateSpec::adjoint).collect(),
        }
    }

    /// `Ψ̃₀` (or `Ψ₀`) on `width() + extra` qubits, extra qubits in |0⟩.
    pub fn prepare(&self, extra: usize) -> Result<StateVector> {
        let mut s = StateVector::zero(self.width() + extra)?;
        s.apply_all(&self.preparation_gates())?;
        Ok(s)
    }

    /// The cosine of the eigenphase predicted from the exact system mean.
    pub fn predicted_cosine(&self) -> Result<f64> {
        let psi = self.prep.prepare()?;
        let mean = exact_expectation(&psi, &self.string)?;
        Ok(match &self.dressing {
            None => mean,
            Some(d) => 2.0 * d.orientation * d.coefficient.abs() * d.epsilon.sqrt() * mean,
        })
    }
}

/// Eigenphases `±φ` of an operator on its invariant two-dimensional subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenphasePair {
    /// `φ ∈ [0, π]`; eigenvalues are `e^{±iφ}`.
    pub phi: f64,
    /// `⟨Ψ̃₀|U|Ψ̃₀⟩`, real for this operator family and equal to `cos φ`.
    pub overlap: f64,
}

/// Eigenphase of `op` on `span{Ψ̃₀, KΨ̃₀}`, `K` being the kick (`P` or `X_p`).
///
/// The operator is applied to an orthonormal basis of the span and the
/// resulting 2×2 block is diagonalized. The span is checked to be invariant.
pub fn eigenphase_oracle(op: &RotationOperator) -> Result<EigenphasePair> {
    if op.width() > ORACLE_MAX_QUBITS {
        return Err(Error::RegisterTooLarge { n_qubits: op.width(), max: ORACLE_MAX_QUBITS });
    }
    let gates = op.gates(Direction::Forward);
    let e1 = op.prepare(0)?;
    let mut w = e1.clone();
    w.apply(&op.kick())?;
    let proj = e1.inner_product(&w)?;
    let perp: Vec<Complex64> = w.amplitudes().iter().zip(e1.amplitudes()).map(|(b, a)| b - proj * a).collect();
    let perp_norm = perp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    let mut ue1 = e1.clone();
    ue1.apply_all(&gates)?;
    let m11 = e1.inner_product(&ue1)?;

    if perp_norm < 1e-10 {
        // Ψ̃₀ is itself an eigenvector
        let residual: f64 =
            ue1.amplitudes().iter().zip(e1.amplitudes()).map(|(u, a)| (u - m11 * a).norm_sqr()).sum::<f64>().sqrt();
        if residual > 1e-8 {
            return Err(Error::InvalidParameter(format!("span not invariant (residual {residual:.3e})")));
        }
        return Ok(EigenphasePair { phi: m11.arg().abs(), overlap: m11.re });
    }

    let e2 = StateVector::from_amplitudes(perp.iter().map(|z| z / perp_norm).collect())?;
    let mut ue2 = e2.clone();
    ue2.apply_all(&gates)?;
    let m21 = e2.inner_product(&ue1)?;
    let m12 = e1.inner_product(&ue2)?;
    let m22 = e2.inner_product(&ue2)?;

    let residual = |u: &StateVector, c1: Complex64, c2: Complex64| -> f64 {
        u.amplitudes()
            .iter()
            .zip(e1.amplitudes().iter().zip(e2.amplitudes()))
            .map(|(u, (a, b))| (u - c1 * a - c2 * b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let res = residual(&ue1, m11, m21).max(residual(&ue2, m12, m22));
    if res > 1e-8 {
        return Err(Error::InvalidParameter(format!("span not invariant (residual {res:.3e})")));
    }

    let tr = m11 + m22;
    let det = m11 * m22 - m12 * m21;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    let phi = l1.arg().abs().max(l2.arg().abs());
    Ok(EigenphasePair { phi, overlap: m11.re })
}

/// Normalized eigenvector of `op` with eigenvalue `e^{+iφ}` (`plus`) or
/// `e^{−iφ}`, built as `(U − e^{∓iφ})Ψ̃₀` on `width()` qubits.
pub fn eigenstate(op: &RotationOperator, plus: bool) -> Result<StateVector> {
    let pair = eigenphase_oracle(op)?;
    let other = Complex64::from_polar(1.0, if plus { -pair.phi } else { pair.phi });
    let psi = op.prepare(0)?;
    let mut u = psi.clone();
    u.apply_all(&op.gates(Direction::Forward))?;
    let v: Vec<Complex64> = u.amplitudes().iter().zip(psi.amplitudes()).map(|(a, b)| a - other * b).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-10 {
        return Err(Error::InvalidParameter("prepared state has no weight on the requested eigenvector".into()));
    }
    StateVector::from_amplitudes(v.into_iter().map(|z| z / norm).collect())
}
