//! Dense statevector simulation of small registers.
//!
//! Qubit 0 is the least significant bit of the amplitude index. Registers are
//! capped at [`MAX_QUBITS`] qubits.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::pauli::PauliString;

pub const MAX_QUBITS: usize = 24;

const NORM_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-12;
const MIN_BRANCH_PROBABILITY: f64 = 1e-15;

pub type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity2() -> Matrix2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn hadamard() -> Matrix2 {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

pub fn pauli_x() -> Matrix2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn pauli_y() -> Matrix2 {
    let i = Complex64::i();
    [[ZERO, -i], [i, ZERO]]
}

pub fn pauli_z() -> Matrix2 {
    [[ONE, ZERO], [ZERO, -ONE]]
}

/// `R_z(θ) = diag(e^{-iθ/2}, e^{iθ/2})`.
pub fn rz(theta: f64) -> Matrix2 {
    [
        [Complex64::from_polar(1.0, -theta / 2.0), ZERO],
        [ZERO, Complex64::from_polar(1.0, theta / 2.0)],
    ]
}

/// `R_y(θ)`, taking |0⟩ to cos(θ/2)|0⟩ + sin(θ/2)|1⟩.
pub fn ry(theta: f64) -> Matrix2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

pub fn dagger(m: &Matrix2) -> Matrix2 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

pub fn matmul2(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

fn unitarity_deviation(m: &Matrix2) -> f64 {
    let p = matmul2(&dagger(m), m);
    let id = identity2();
    p.iter()
        .flatten()
        .zip(id.iter().flatten())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Haar-random element of U(2) up to global phase, drawn as a uniform point on S³.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R) -> Matrix2 {
    let mut g = [0.0f64; 4];
    loop {
        for v in g.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 {
            g.iter_mut().for_each(|v| *v /= norm);
            break;
        }
    }
    let a = Complex64::new(g[0], g[1]);
    let b = Complex64::new(g[2], g[3]);
    [[a, -b.conj()], [b, a.conj()]]
}

/// One elementary operation on a register.
#[derive(Debug, Clone, PartialEq)]
pub enum GateSpec {
    /// A 2×2 unitary on one qubit.
    Single { target: usize, matrix: Matrix2 },
    /// Applies `gate` only on the `control = 1` subspace.
    Controlled { control: usize, gate: Box<GateSpec> },
    /// A Pauli string whose letter for qubit `k` acts on qubit `k`.
    Pauli(PauliString),
    /// `Π₀ = I − 2|0…0⟩⟨0…0|` on the listed qubits.
    Reflection { qubits: Vec<usize> },
    /// Global phase factor; becomes a relative phase once controlled.
    Phase(Complex64),
}

impl GateSpec {
    pub fn single(target: usize, matrix: Matrix2) -> Self {
        GateSpec::Single { target, matrix }
    }

    pub fn controlled(control: usize, gate: GateSpec) -> Self {
        GateSpec::Controlled { control, gate: Box::new(gate) }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::controlled(control, Self::single(target, pauli_x()))
    }

    /// The inverse operation.
    pub fn adjoint(&self) -> GateSpec {
        match self {
            GateSpec::Single { target, matrix } => GateSpec::Single { target: *target, matrix: dagger(matrix) },
            GateSpec::Controlled { control, gate } => GateSpec::controlled(*control, gate.adjoint()),
            GateSpec::Pauli(p) => GateSpec::Pauli(*p),
            GateSpec::Reflection { qubits } => GateSpec::Reflection { qubits: qubits.clone() },
            GateSpec::Phase(z) => GateSpec::Phase(z.conj()),
        }
    }

    /// Bit mask of the qubits whose amplitudes this gate mixes or rephases.
    pub fn target_mask(&self) -> u64 {
        match self {
            GateSpec::Single { target, .. } => 1 << target,
            GateSpec::Controlled { control, gate } => gate.target_mask() | (1 << control),
            GateSpec::Pauli(p) => p.support(),
            GateSpec::Reflection { qubits } => qubits.iter().fold(0, |m, q| m | (1 << q)),
            GateSpec::Phase(_) => 0,
        }
    }

    fn max_qubit(&self) -> Option<usize> {
        match self {
            GateSpec::Single { target, .. } => Some(*target),
            GateSpec::Controlled { control, gate } => Some(gate.max_qubit().map_or(*control, |m| m.max(*control))),
            GateSpec::Pauli(p) => p.n_qubits().checked_sub(1),
            GateSpec::Reflection { qubits } => qubits.iter().copied().max(),
            GateSpec::Phase(_) => None,
        }
    }
}

/// A 2ⁿ-amplitude register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::RegisterTooLarge { n_qubits, max: MAX_QUBITS });
        }
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[0] = ONE;
        Ok(Self { n_qubits, amplitudes })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(n_qubits)?;
        if index >= s.amplitudes.len() {
            return Err(Error::QubitOutOfRange { index, n_qubits });
        }
        s.amplitudes[0] = ZERO;
        s.amplitudes[index] = ONE;
        Ok(s)
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("amplitude count {len} is not a power of two")));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::RegisterTooLarge { n_qubits, max: MAX_QUBITS });
        }
        let s = Self { n_qubits, amplitudes };
        let norm_sqr = s.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.n_qubits {
            return Err(Error::QubitOutOfRange { index, n_qubits: self.n_qubits });
        }
        Ok(())
    }

    /// Apply one gate in place.
    pub fn apply(&mut self, gate: &GateSpec) -> Result<()> {
        self.apply_masked(gate, 0)
    }

    /// Apply a gate sequence in order.
    pub fn apply_all(&mut self, gates: &[GateSpec]) -> Result<()> {
        gates.iter().try_for_each(|g| self.apply(g))
    }

    /// Apply `gates` on the `control = 1` subspace only.
    pub fn apply_controlled(&mut self, control: usize, gates: &[GateSpec]) -> Result<()> {
        self.check_index(control)?;
        for g in gates {
            if g.target_mask() & (1 << control) != 0 {
                return Err(Error::ControlOverlap { control });
            }
        }
        gates.iter().try_for_each(|g| self.apply_masked(g, 1 << control))
    }

    fn apply_masked(&mut self, gate: &GateSpec, controls: u64) -> Result<()> {
        if let Some(q) = gate.max_qubit() {
            self.check_index(q)?;
        }
        match gate {
            GateSpec::Single { target, matrix } => {
                let dev = unitarity_deviation(matrix);
                if dev > UNITARY_TOL {
                    return Err(Error::NonUnitary { deviation: dev });
                }
                if controls & (1 << target) != 0 {
                    return Err(Error::ControlOverlap { control: *target });
                }
                self.apply_single(*target, matrix, controls);
            }
            GateSpec::Controlled { control, gate } => {
                if controls & (1 << control) != 0 || gate.target_mask() & (1 << control) != 0 {
                    return Err(Error::ControlOverlap { control: *control });
                }
                self.apply_masked(gate, controls | (1 << control))?;
            }
            GateSpec::Pauli(p) => {
                if p.n_qubits() > self.n_qubits {
                    return Err(Error::DimensionMismatch { left: p.n_qubits(), right: self.n_qubits });
                }
                if p.support() & controls != 0 {
                    return Err(Error::ControlOverlap { control: (p.support() & controls).trailing_zeros() as usize });
                }
                self.apply_pauli(p, controls);
            }
            GateSpec::Reflection { qubits } => {
                let mask = gate.target_mask();
                if mask & controls != 0 {
                    return Err(Error::ControlOverlap { control: (mask & controls).trailing_zeros() as usize });
                }
                let _ = qubits;
                for (i, a) in self.amplitudes.iter_mut().enumerate() {
                    let i = i as u64;
                    if i & controls == controls && i & mask == 0 {
                        *a = -*a;
                    }
                }
            }
            GateSpec::Phase(z) => {
                if (z.norm() - 1.0).abs() > UNITARY_TOL {
                    return Err(Error::NonUnitary { deviation: (z.norm() - 1.0).abs() });
                }
                for (i, a) in self.amplitudes.iter_mut().enumerate() {
                    if (i as u64) & controls == controls {
                        *a *= z;
                    }
                }
            }
        }
        Ok(())
    }

    fn apply_single(&mut self, target: usize, m: &Matrix2, controls: u64) {
        let bit = 1usize << target;
        let controls = controls as usize;
        for i in 0..self.amplitudes.len() {
            if i & bit != 0 || i & controls != controls {
                continue;
            }
            let j = i | bit;
            let (a0, a1) = (self.amplitudes[i], self.amplitudes[j]);
            self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amplitudes[j] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    fn apply_pauli(&mut self, p: &PauliString, controls: u64) {
        let x = p.x_mask() as usize;
        let controls = controls as usize;
        let len = self.amplitudes.len();
        if x == 0 {
            for i in 0..len {
                if i & controls == controls {
                    self.amplitudes[i] *= p.phase_on(i as u64);
                }
            }
            return;
        }
        // Pair each index with its partner i ^ x; visit each pair once.
        let pivot = 1usize << (usize::BITS - 1 - x.leading_zeros());
        for i in 0..len {
            if i & pivot != 0 || i & controls != controls {
                continue;
            }
            let j = i ^ x;
            let (ai, aj) = (self.amplitudes[i], self.amplitudes[j]);
            // P|i⟩ = phase(i)|i⊕x⟩
            self.amplitudes[j] = p.phase_on(i as u64) * ai;
            self.amplitudes[i] = p.phase_on(j as u64) * aj;
        }
    }

    /// ⟨self|other⟩.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: other.n_qubits });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// Born probability of reading 1 on `index`.
    pub fn probability_one(&self, index: usize) -> Result<f64> {
        self.check_index(index)?;
        let bit = 1usize << index;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Project qubit `index` onto `outcome` and renormalize. Returns the branch probability.
    pub fn project(&mut self, index: usize, outcome: u8) -> Result<f64> {
        let p1 = self.probability_one(index)?;
        let p = if outcome == 1 { p1 } else { 1.0 - p1 };
        if p < MIN_BRANCH_PROBABILITY {
            return Err(Error::ImpossibleBranch { probability: p });
        }
        let bit = 1usize << index;
        let scale = 1.0 / p.sqrt();
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if ((i & bit != 0) as u8) == outcome {
                *a *= scale;
            } else {
                *a = ZERO;
            }
        }
        Ok(p)
    }

    /// Projective Z measurement of one qubit with collapse.
    pub fn measure_qubit<R: Rng + ?Sized>(&mut self, index: usize, rng: &mut R) -> Result<u8> {
        let p1 = self.probability_one(index)?;
        let outcome = u8::from(rng.random::<f64>() < p1);
        self.project(index, outcome)?;
        Ok(outcome)
    }

    /// Reset a qubit to |0⟩ after it was measured with result `outcome`.
    pub fn reset_measured(&mut self, index: usize, outcome: u8) -> Result<()> {
        if outcome == 1 {
            self.apply(&GateSpec::single(index, pauli_x()))?;
        }
        Ok(())
    }

    /// Reduced coherence ⟨1|ρ|0⟩ of one qubit.
    pub fn coherence(&self, index: usize) -> Result<Complex64> {
        self.check_index(index)?;
        let bit = 1usize << index;
        Ok((0..self.amplitudes.len())
            .filter(|i| i & bit == 0)
            .map(|i| self.amplitudes[i | bit] * self.amplitudes[i].conj())
            .sum())
    }

    /// Tensor product `self ⊗ low`, with `low` occupying the least significant qubits.
    pub fn tensor(&self, low: &StateVector) -> Result<StateVector> {
        let n = self.n_qubits + low.n_qubits;
        if n > MAX_QUBITS {
            return Err(Error::RegisterTooLarge { n_qubits: n, max: MAX_QUBITS });
        }
        let mut amplitudes = Vec::with_capacity(1 << n);
        for hi in &self.amplitudes {
            amplitudes.extend(low.amplitudes.iter().map(|lo| hi * lo));
        }
        Ok(StateVector { n_qubits: n, amplitudes })
    }

    /// Extend with `extra` qubits in |0⟩ above the current ones.
    pub fn extended(&self, extra: usize) -> Result<StateVector> {
        StateVector::zero(extra)?.tensor(self)
    }
}

/// An invertible circuit preparing |Ψ₀⟩ = V|0…0⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparationCircuit {
    pub n_qubits: usize,
    pub gates: Vec<GateSpec>,
    pub seed: Option<u64>,
}

impl PreparationCircuit {
    pub fn new(n_qubits: usize, gates: Vec<GateSpec>) -> Self {
        Self { n_qubits, gates, seed: None }
    }

    /// Alternating layers of Haar-random single-qubit unitaries and a CX brick.
    /// Layer `d` entangles pairs `(q, q+1)` with `q ≡ d (mod 2)`; a final
    /// single-qubit layer closes the circuit.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, depth: usize, rng: &mut R) -> Self {
        let mut gates = Vec::new();
        for layer in 0..depth {
            for q in 0..n_qubits {
                gates.push(GateSpec::single(q, haar_unitary(rng)));
            }
            let mut q = layer % 2;
            while q + 1 < n_qubits {
                gates.push(GateSpec::cx(q, q + 1));
                q += 2;
            }
        }
        for q in 0..n_qubits {
            gates.push(GateSpec::single(q, haar_unitary(rng)));
        }
        Self { n_qubits, gates, seed: None }
    }

    pub fn seeded(n_qubits: usize, depth: usize, seed: u64) -> Self {
        let mut rng = crate::rng::stream(seed, 0);
        Self { seed: Some(seed), ..Self::random(n_qubits, depth, &mut rng) }
    }

    /// V†: reversed order, each gate conjugated.
    pub fn inverse(&self) -> PreparationCircuit {
        Self { n_qubits: self.n_qubits, gates: self.gates.iter().rev().map(GateSpec::adjoint).collect(), seed: self.seed }
    }

    /// V|0…0⟩.
    pub fn prepare(&self) -> Result<StateVector> {
        let mut s = StateVector::zero(self.n_qubits)?;
        s.apply_all(&self.gates)?;
        Ok(s)
    }
}
