//! The full coherent-summation pipeline.
//!
//! Per run: rough estimates classify the terms; each encoding repetition
//! prepares every encodable term once, resolves its eigenstate sign on a
//! processing ancilla and couples it to the memory qubit; the memory is read
//! in alternating frames; the phase is inverted and the arcsine correction
//! subtracted. Terms that are not encoded are added classically from their
//! rough estimates.

use rand::Rng;

use crate::error::{Error, Result};
use crate::ledger::ResourceLedger;
use crate::pauli::{exact_expectation, Observable};
use crate::qee::TermSampler;
use crate::statevector::{PreparationCircuit, StateVector};
use crate::tcps::boundary::{boundary_check, Classification, RoughEstimate};
use crate::tcps::budget::{BudgetPlan, EpsilonChoice};
use crate::tcps::hadamard::{sign_resolve, sign_resolve_sampled, Label};
use crate::tcps::ladder::{ladder_estimate, LadderConfig, LadderResult};
use crate::tcps::memory::{MemoryAccumulator, MemoryMode};
use crate::tcps::readout::{kitaev_readout, unwrap_near, Frame, FrameCounts};
use crate::tcps::rotation::{Direction, RotationOperator};
use crate::tcps::taylor::{
    optimal_epsilon, scaled_argument, taylor_correction, taylor_invert, tcps_variance_prediction, CorrectionMode,
    VarianceModel,
};

/// One term scheduled for phase encoding.
#[derive(Debug, Clone)]
pub struct EncodedTerm {
    pub term: usize,
    pub coefficient: f64,
    /// Sign attached to the dressed branch, from the rough estimate.
    pub orientation: f64,
    /// `sgn(a)·orientation`: the direction whose `+` eigenstate adds `+φ̃`.
    pub direction: Direction,
    pub op: RotationOperator,
    /// Eigenphase `φ̃ ∈ [0, π]` from the exact mean.
    pub phi: f64,
    /// `Ψ̃₀` with one extra ancilla qubit, prepared once (exact mode only).
    prepared: Option<StateVector>,
}

impl EncodedTerm {
    /// Operator direction that adds `direction.sign() · φ̃` given the resolved label.
    pub fn applied(&self, label: Label) -> Direction {
        match label {
            Label::Plus => self.direction,
            Label::Minus => self.direction.flipped(),
        }
    }
}

/// Everything needed to run encoding repetitions at one strength.
#[derive(Debug, Clone)]
pub struct EncodingSetup {
    pub terms: Vec<EncodedTerm>,
    pub epsilon: f64,
    pub sign_rounds: u64,
    pub mode: MemoryMode,
}

impl EncodingSetup {
    /// `encoded` lists `(term index, orientation)` pairs.
    pub fn new(
        prep: &PreparationCircuit,
        state: &StateVector,
        obs: &Observable,
        encoded: &[(usize, f64)],
        epsilon: f64,
        sign_rounds: u64,
        mode: MemoryMode,
    ) -> Result<Self> {
        let terms = encoded
            .iter()
            .map(|&(term, orientation)| {
                let t = &obs.terms()[term];
                let op = RotationOperator::dressed(prep, t, epsilon, orientation)?;
                let mean = exact_expectation(state, &t.string)?;
                let x = (orientation * scaled_argument(t.coefficient, mean, epsilon)).clamp(-1.0, 1.0);
                let prepared = match mode {
                    MemoryMode::Exact => Some(op.prepare(1)?),
                    MemoryMode::Fast => None,
                };
                Ok(EncodedTerm {
                    term,
                    coefficient: t.coefficient,
                    orientation,
                    direction: Direction::from_sign(t.coefficient.signum() * orientation),
                    op,
                    phi: x.acos(),
                    prepared,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { terms, epsilon, sign_rounds, mode })
    }

    /// `N_s = Σ_j τ_j`.
    pub fn n_signed(&self) -> f64 {
        self.terms.iter().map(|t| t.direction.sign()).sum()
    }

    /// Encode every term once into a fresh memory, resolving signs on the way.
    pub fn encode_all<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<MemoryAccumulator> {
        let mut memory = MemoryAccumulator::new(self.mode);
        for t in &self.terms {
            match self.mode {
                MemoryMode::Fast => {
                    let (outcome, branch) = sign_resolve_sampled(t.phi, self.sign_rounds, rng);
                    memory.encode_sampled(t.phi, branch, t.applied(outcome.label))?;
                }
                MemoryMode::Exact => {
                    let mut register = t.prepared.clone().expect("exact mode keeps a prepared register");
                    let ancilla = t.op.width();
                    let outcome = sign_resolve(&mut register, &t.op, ancilla, self.sign_rounds, rng)?;
                    memory.encode_exact(&register, &t.op, t.applied(outcome.label))?;
                }
            }
        }
        Ok(memory)
    }

    /// One repetition: encode all terms and read the memory in `frame`.
    pub fn run_repetition<R: Rng + ?Sized>(
        &self,
        frame: Frame,
        rng: &mut R,
        ledger: &mut ResourceLedger,
    ) -> Result<u8> {
        let memory = self.encode_all(rng)?;
        ledger.record_repetition(self.terms.len() as u64, self.sign_rounds);
        Ok(memory.measure(frame, rng))
    }

    /// `repetitions` repetitions alternating X and Y frames, X first.
    pub fn run_encoding_round<R: Rng + ?Sized>(
        &self,
        repetitions: u64,
        rng: &mut R,
        ledger: &mut ResourceLedger,
    ) -> Result<FrameCounts> {
        let mut counts = FrameCounts::default();
        for k in 0..repetitions {
            let frame = Frame::for_repetition(k);
            counts.record(frame, self.run_repetition(frame, rng, ledger)?);
        }
        Ok(counts)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TcpsOptions {
    pub mode: MemoryMode,
    pub correction: CorrectionMode,
    pub ladder: Option<LadderConfig>,
}

impl Default for TcpsOptions {
    fn default() -> Self {
        Self { mode: MemoryMode::Fast, correction: CorrectionMode::ClosedForm, ladder: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TcpsResult {
    pub estimate: f64,
    /// Contribution of the encoded terms after correction.
    pub encoded_part: f64,
    /// Contribution of the terms added from rough estimates.
    pub classical_part: f64,
    pub raw: f64,
    pub correction: f64,
    /// Readout phase in `(−π, π]`; `NaN` when nothing was encoded or a ladder ran.
    pub phase: f64,
    /// `Σ_j τ_j asin(x_j)` recovered from the phase.
    pub unwrapped: f64,
    pub epsilon: f64,
    pub epsilon_clamped: bool,
    pub n_encoded: usize,
    pub n_signed: f64,
    pub rough: Vec<RoughEstimate>,
    /// Correction-shot means of the encoded terms, in encoding order.
    pub correction_means: Vec<f64>,
    pub counts: FrameCounts,
    pub ladder: Option<LadderResult>,
    pub predicted_variance: f64,
    pub error_floor: f64,
    pub ledger: ResourceLedger,
}

/// `Σ_j 2|a_j mean_j|·((1−η₁)η₃ + η₁/2)`.
pub fn error_floor(obs: &Observable, rough: &[RoughEstimate], eta1: f64, eta3: f64) -> f64 {
    let rate = (1.0 - eta1) * eta3 + eta1 / 2.0;
    obs.terms().iter().zip(rough).map(|(t, r)| 2.0 * (t.coefficient * r.mean).abs() * rate).sum()
}

/// Run the whole pipeline once.
pub fn tcps_estimate<R: Rng + ?Sized>(
    prep: &PreparationCircuit,
    sampler: &TermSampler,
    obs: &Observable,
    plan: &BudgetPlan,
    options: &TcpsOptions,
    rng: &mut R,
) -> Result<TcpsResult> {
    plan.validate()?;
    let targets = &plan.targets;
    let mut ledger = ResourceLedger::default();
    let n = obs.len() as u64;

    let rough = boundary_check(sampler, obs, plan.n_1, targets.delta, rng)?;
    ledger.boundary_preparations += n * plan.n_1;
    ledger.measurements += n * plan.n_1;

    let encodable: Vec<&RoughEstimate> =
        rough.iter().filter(|r| r.classification == Classification::Encodable).collect();
    let classical: Vec<(f64, f64, u64)> = rough
        .iter()
        .filter(|r| r.classification != Classification::Encodable)
        .map(|r| (obs.terms()[r.term].coefficient, r.mean, r.shots))
        .collect();
    let classical_part: f64 = classical.iter().map(|(a, m, _)| a * m).sum();
    let floor = error_floor(obs, &rough, targets.eta1, targets.eta3);

    if encodable.is_empty() {
        let model = VarianceModel { encoded: &[], classical: &classical, epsilon: 1.0, m_x: 1, m_y: 1, n_c_cor: 1 };
        return Ok(TcpsResult {
            estimate: classical_part,
            encoded_part: 0.0,
            classical_part,
            raw: 0.0,
            correction: 0.0,
            phase: f64::NAN,
            unwrapped: 0.0,
            epsilon: f64::NAN,
            epsilon_clamped: false,
            n_encoded: 0,
            n_signed: 0.0,
            rough,
            correction_means: vec![],
            counts: FrameCounts::default(),
            ladder: None,
            predicted_variance: tcps_variance_prediction(&model)?,
            error_floor: floor,
            ledger,
        });
    }

    let rough_pairs: Vec<(f64, f64)> = encodable.iter().map(|r| (obs.terms()[r.term].coefficient, r.mean)).collect();
    let (epsilon, epsilon_clamped) = match plan.epsilon {
        EpsilonChoice::Fixed(e) => {
            for (j, (a, _)) in rough_pairs.iter().enumerate() {
                if a.abs() * e.sqrt() > 0.5 + 1e-12 {
                    return Err(Error::Feasibility { term: encodable[j].term, epsilon: e });
                }
            }
            (e, false)
        }
        EpsilonChoice::Optimal => {
            let depth = options.ladder.as_ref().map(|l| l.depth);
            let o = optimal_epsilon(plan.n_c_cor, plan.m_q, &rough_pairs, depth)?;
            (o.epsilon, o.clamped)
        }
    };

    let n_enc = encodable.len() as u64;
    let correction_means = encodable
        .iter()
        .map(|r| sampler.sample(&obs.terms()[r.term].string, plan.n_c_cor, rng))
        .collect::<Result<Vec<_>>>()?;
    ledger.correction_preparations += n_enc * plan.n_c_cor;
    ledger.measurements += n_enc * plan.n_c_cor;
    let corr_pairs: Vec<(f64, f64)> =
        rough_pairs.iter().zip(&correction_means).map(|(&(a, _), &m)| (a, m)).collect();
    let encoded: Vec<(usize, f64)> = encodable.iter().map(|r| (r.term, r.sign)).collect();

    if let Some(ladder) = &options.ladder {
        let result = ladder_estimate(
            prep,
            sampler.state(),
            obs,
            &encoded,
            &corr_pairs,
            ladder,
            plan.n_qpe,
            options.mode,
            rng,
            &mut ledger,
        )?;
        let last = result.levels.last().expect("ladder has at least one level");
        let model = VarianceModel {
            encoded: &corr_pairs,
            classical: &classical,
            epsilon: last.epsilon,
            m_x: last.repetitions_per_frame,
            m_y: last.repetitions_per_frame,
            n_c_cor: plan.n_c_cor,
        };
        let predicted_variance = tcps_variance_prediction(&model)?;
        let n_signed = encoded.iter().map(|&(j, s)| obs.terms()[j].coefficient.signum() * s).sum();
        return Ok(TcpsResult {
            estimate: result.estimate + classical_part,
            encoded_part: result.estimate,
            classical_part,
            raw: f64::NAN,
            correction: f64::NAN,
            phase: f64::NAN,
            unwrapped: result.estimate * last.scale,
            epsilon: last.epsilon,
            epsilon_clamped,
            n_encoded: encoded.len(),
            n_signed,
            rough,
            correction_means,
            counts: FrameCounts::default(),
            ladder: Some(result),
            predicted_variance,
            error_floor: floor,
            ledger,
        });
    }

    let setup = EncodingSetup::new(prep, sampler.state(), obs, &encoded, epsilon, plan.n_qpe, options.mode)?;
    let counts = setup.run_encoding_round(plan.m_q, rng, &mut ledger)?;
    let phase = kitaev_readout(&counts)?;
    let n_signed = setup.n_signed();

    let mut reference = 0.0;
    for &(a, m) in &corr_pairs {
        let y = scaled_argument(a, m, epsilon);
        if y.abs() >= 1.0 {
            return Err(Error::CorrectionDomain { x: y.abs() });
        }
        reference += a.signum() * y.asin();
    }
    let unwrapped = unwrap_near(n_signed * std::f64::consts::FRAC_PI_2 - phase, reference);
    let raw = taylor_invert(n_signed * std::f64::consts::FRAC_PI_2 - unwrapped, n_signed, epsilon);
    let correction = taylor_correction(&corr_pairs, epsilon, options.correction)?;
    let encoded_part = raw - correction;

    let model = VarianceModel {
        encoded: &corr_pairs,
        classical: &classical,
        epsilon,
        m_x: counts.x_total,
        m_y: counts.y_total,
        n_c_cor: plan.n_c_cor,
    };
    Ok(TcpsResult {
        estimate: encoded_part + classical_part,
        encoded_part,
        classical_part,
        raw,
        correction,
        phase,
        unwrapped,
        epsilon,
        epsilon_clamped,
        n_encoded: encoded.len(),
        n_signed,
        rough,
        correction_means,
        counts,
        ladder: None,
        predicted_variance: tcps_variance_prediction(&model)?,
        error_floor: floor,
        ledger,
    })
}
