//! Shot and repetition counts for one coherent-summation run.

use crate::error::{Error, Result};

/// Failure probabilities, margins and accuracy targets a plan is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetTargets {
    /// Overall target error used to size the phase ladder.
    pub eta: f64,
    /// Failure probability of each Hadamard-test frame estimate.
    pub eta0: f64,
    /// Failure probability of the boundary check.
    pub eta1: f64,
    /// Failure probability of the sign resolution.
    pub eta3: f64,
    /// Boundary margin: a term is encodable when `|mean| ∈ [δ, 1−δ]`.
    pub delta: f64,
    /// Half-width of the boundary check's confidence interval.
    pub g1: f64,
    /// Angular accuracy of the tangent readout.
    pub eps_tan: f64,
    /// Number of independent frame estimates combined in the readout.
    pub m: f64,
}

impl Default for BudgetTargets {
    fn default() -> Self {
        Self { eta: 0.05, eta0: 0.05, eta1: 0.05, eta3: 0.05, delta: 0.2, g1: 0.1, eps_tan: 1.0 / 16.0, m: 1.0 }
    }
}

/// How the encoding strength is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonChoice {
    Fixed(f64),
    /// Minimize the predicted variance using the rough means, at run time.
    Optimal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetPlan {
    pub targets: BudgetTargets,
    pub n_terms: usize,
    /// Boundary-check shots per term.
    pub n_1: u64,
    pub m_1: u64,
    /// Sign separation `1/2 − p₀max`.
    pub g3: f64,
    /// Range of `P(Y=0)` on an encodable `+` eigenstate.
    pub p_y0_interval: (f64, f64),
    /// Hadamard-test rounds per sign resolution.
    pub n_qpe: u64,
    pub m_qpe: u64,
    /// Accuracy of each frame estimate implied by `eps_tan`.
    pub test_accuracy: f64,
    pub m_k: u64,
    /// Encoding repetitions, split evenly between the two readout frames.
    pub m_q: u64,
    /// Correction shots per term.
    pub n_c_cor: u64,
    pub m_c_cor: u64,
    /// Total state preparations.
    pub m_t: u64,
    pub epsilon: EpsilonChoice,
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("{name} = {p} must lie in (0, 1)")));
    }
    Ok(())
}

fn ceil_count(x: f64) -> u64 {
    // guard against 184.99999999 style rounding of exact integers
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as u64
    } else {
        x.ceil() as u64
    }
}

/// Boundary-check shots: `ceil(ln(2/η₁)/(2g₁²))`.
pub fn boundary_shots(eta1: f64, g1: f64) -> u64 {
    ceil_count((2.0 / eta1).ln() / (2.0 * g1 * g1))
}

/// `P(Y=0)` on the `+` eigenstate at the edges of the encodable band, as `(low, high)`.
pub fn y0_interval(delta: f64) -> (f64, f64) {
    let p = |c: f64| 0.5 * (1.0 - (2.0 * c.acos()).sin());
    let (a, b) = (p(delta), p(1.0 - delta));
    (a.min(b), a.max(b))
}

/// Sign-resolution rounds `ceil(ln(2/η₃)/(2g₃²))` with `g₃ = 1/2 − p₀max(δ)`.
pub fn sign_rounds(delta: f64, eta3: f64) -> Result<(u64, f64)> {
    let g3 = 0.5 - y0_interval(delta).1;
    if g3 <= 1e-12 {
        return Err(Error::NoSignSeparation { delta, g3 });
    }
    Ok((ceil_count((2.0 / eta3).ln() / (2.0 * g3 * g3)), g3))
}

/// Frame accuracy from the tangent accuracy: `tan(ε_tan)/(2(1 + tan ε_tan))`.
pub fn test_accuracy(eps_tan: f64) -> f64 {
    let t = eps_tan.tan();
    t / (2.0 * (1.0 + t))
}

/// Hadamard-test repetitions `ceil(m·ln(2/η₀)/ε₀²)`.
pub fn readout_repetitions(m: f64, eta0: f64, accuracy: f64) -> u64 {
    ceil_count(m * (2.0 / eta0).ln() / (accuracy * accuracy))
}

/// Build a plan for `n_terms` terms with `M_q` defaulting to the readout bound.
///
/// ```
/// use tcps_core::tcps::budget::{plan_budget, BudgetTargets, EpsilonChoice};
/// let plan = plan_budget(&BudgetTargets::default(), 8, EpsilonChoice::Optimal).unwrap();
/// assert_eq!(plan.n_1, 185);
/// assert_eq!(plan.n_qpe, 49);
/// ```
pub fn plan_budget(targets: &BudgetTargets, n_terms: usize, epsilon: EpsilonChoice) -> Result<BudgetPlan> {
    for (name, p) in
        [("eta", targets.eta), ("eta0", targets.eta0), ("eta1", targets.eta1), ("eta3", targets.eta3)]
    {
        check_probability(name, p)?;
    }
    if !(targets.delta > 0.0 && targets.delta < 0.5) {
        return Err(Error::InvalidParameter(format!("delta = {} must lie in (0, 1/2)", targets.delta)));
    }
    if !(targets.g1 > 0.0 && targets.eps_tan > 0.0 && targets.eps_tan < std::f64::consts::FRAC_PI_4 && targets.m > 0.0)
    {
        return Err(Error::InvalidParameter("g1, eps_tan and m must be positive (eps_tan < π/4)".into()));
    }
    if n_terms == 0 {
        return Err(Error::EmptyObservable);
    }
    if let EpsilonChoice::Fixed(e) = epsilon {
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon = {e} must lie in (0, 1)")));
        }
    }
    let n_1 = boundary_shots(targets.eta1, targets.g1);
    let (n_qpe, g3) = sign_rounds(targets.delta, targets.eta3)?;
    let accuracy = test_accuracy(targets.eps_tan);
    let m_k = readout_repetitions(targets.m, targets.eta0, accuracy);
    let mut plan = BudgetPlan {
        targets: *targets,
        n_terms,
        n_1,
        m_1: 0,
        g3,
        p_y0_interval: y0_interval(targets.delta),
        n_qpe,
        m_qpe: 0,
        test_accuracy: accuracy,
        m_k,
        m_q: m_k,
        n_c_cor: 0,
        m_c_cor: 0,
        m_t: 0,
        epsilon,
    };
    plan.rebalance_correction();
    Ok(plan)
}

impl BudgetPlan {
    /// Set the correction shots to match the encoding cost, `M_c^cor ≈ M_q(1 + M_QPE)`,
    /// and refresh totals.
    pub fn rebalance_correction(&mut self) {
        let n = self.n_terms as u64;
        self.m_qpe = n * self.n_qpe;
        self.n_c_cor = (self.m_q * (1 + self.m_qpe)).div_ceil(n).max(1);
        self.refresh_totals();
    }

    /// Recompute the derived totals after editing a count by hand.
    pub fn refresh_totals(&mut self) {
        let n = self.n_terms as u64;
        self.m_1 = n * self.n_1;
        self.m_qpe = n * self.n_qpe;
        self.m_c_cor = n * self.n_c_cor;
        self.m_t = self.m_1 + self.m_c_cor + self.encoding_preparations();
    }

    /// Preparations spent inside encoding repetitions: one per term for the
    /// encoding itself and one per sign-resolution round.
    pub fn encoding_preparations(&self) -> u64 {
        self.m_q * self.n_terms as u64 * (1 + self.n_qpe)
    }

    /// Repetitions per readout frame, X first: `(⌈M_q/2⌉, ⌊M_q/2⌋)`.
    pub fn frame_split(&self) -> (u64, u64) {
        (self.m_q.div_ceil(2), self.m_q / 2)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v, min) in [("n_1", self.n_1, 1), ("m_q", self.m_q, 2), ("n_c_cor", self.n_c_cor, 1)] {
            if v < min {
                return Err(Error::InvalidParameter(format!("planned {name} = {v} is below {min}")));
            }
        }
        Ok(())
    }
}
