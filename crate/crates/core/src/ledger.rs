//! Resource counters, in units of state preparations.

use std::ops::AddAssign;

/// Counters accumulated during a run. All fields only ever grow.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ResourceLedger {
    pub boundary_preparations: u64,
    pub sign_preparations: u64,
    pub encoding_preparations: u64,
    pub correction_preparations: u64,
    pub qee_preparations: u64,
    pub measurements: u64,
    /// Controlled operations between a prepared register and the memory qubit.
    pub interactions: u64,
    /// Encoding repetitions completed.
    pub repetitions: u64,
    /// Longest span the memory qubit had to stay coherent, in preparations.
    pub coherence_span: u64,
}

impl ResourceLedger {
    pub fn total_preparations(&self) -> u64 {
        self.boundary_preparations
            + self.sign_preparations
            + self.encoding_preparations
            + self.correction_preparations
            + self.qee_preparations
    }

    /// Record one encoding repetition over `terms` terms with `rounds` sign rounds each.
    pub fn record_repetition(&mut self, terms: u64, rounds: u64) {
        self.encoding_preparations += terms;
        self.sign_preparations += terms * rounds;
        self.interactions += terms;
        self.measurements += terms * rounds + 1;
        self.repetitions += 1;
        self.coherence_span = self.coherence_span.max(terms * (1 + rounds));
    }
}

impl AddAssign for ResourceLedger {
    fn add_assign(&mut self, o: Self) {
        self.boundary_preparations += o.boundary_preparations;
        self.sign_preparations += o.sign_preparations;
        self.encoding_preparations += o.encoding_preparations;
        self.correction_preparations += o.correction_preparations;
        self.qee_preparations += o.qee_preparations;
        self.measurements += o.measurements;
        self.interactions += o.interactions;
        self.repetitions += o.repetitions;
        self.coherence_span = self.coherence_span.max(o.coherence_span);
    }
}

/// One row of the asymptotic resource comparison, with unit constants.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticRow {
    pub method: &'static str,
    pub state_preparations: f64,
    /// Coherence time of the processing register, in preparations.
    pub register_coherence: f64,
    /// Coherence time of the memory qubit; `None` when there is none.
    pub memory_coherence: Option<f64>,
    /// `None` where the method never couples a register to a memory qubit.
    pub interactions: Option<f64>,
    /// Whether this crate simulates the method or only tabulates it.
    pub simulated: bool,
}

/// Asymptotic preparation, coherence and interaction counts for target error `eta`.
///
/// ```
/// let rows = tcps_core::ledger::analytic_rows(16, 0.01);
/// assert_eq!(rows[0].state_preparations, 256.0 / 0.01);
/// assert_eq!(rows[1].interactions, Some(16.0));
/// ```
pub fn analytic_rows(n_terms: usize, eta: f64) -> Vec<AnalyticRow> {
    let n = n_terms as f64;
    let log_term = (n / eta.sqrt()).ln().max(1.0);
    let sublog = log_term / log_term.ln().max(1.0);
    vec![
        AnalyticRow {
            method: "qee",
            state_preparations: n * n / eta,
            register_coherence: 1.0,
            memory_coherence: None,
            interactions: None,
            simulated: true,
        },
        AnalyticRow {
            method: "tcps",
            state_preparations: n.powf(4.0 / 3.0) / eta * log_term,
            register_coherence: log_term,
            memory_coherence: Some(n * log_term),
            interactions: Some(n),
            simulated: true,
        },
        AnalyticRow {
            method: "cps",
            state_preparations: n / eta * sublog,
            register_coherence: log_term,
            memory_coherence: Some(n * sublog),
            interactions: Some(n * sublog),
            simulated: false,
        },
    ]
}
