//! Experiment runners. Each turns an [`ExperimentConfig`] into a [`Report`].
//!
//! Trials run on a rayon pool; trial `t` of an arm labelled `label` draws
//! from `stream(child_seed(seed, label), t)` and results are collected in
//! trial order, so the output does not depend on the worker count.

use rayon::prelude::*;

use tcps_core::ledger::{analytic_rows, ResourceLedger};
use tcps_core::pauli::{exact_means, parse_observable, random_observable, Observable};
use tcps_core::qee::{qee_estimate_with, qee_variance_prediction, TermSampler};
use tcps_core::rng::{child_seed, stream, ChaCha8Rng};
use tcps_core::statevector::PreparationCircuit;
use tcps_core::tcps::budget::{plan_budget, BudgetPlan, EpsilonChoice};
use tcps_core::tcps::estimate::{tcps_estimate, TcpsOptions};
use tcps_core::tcps::ladder::LadderConfig;
use tcps_core::tcps::taylor::{optimal_epsilon, tcps_variance_prediction, VarianceModel};

use crate::config::{ExperimentConfig, Mode, ObservableSource, SweepKind};
use crate::error::{HarnessError, Result};
use crate::report::{Cell, Report, Table};
use crate::stats::{fit_loglog, mean, sample_variance, Fit};

const ARM_QEE: u64 = 1;
const ARM_TCPS: u64 = 2;

/// An observable, the state it is measured on, and its exact value.
#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub observable: Observable,
    pub prep: PreparationCircuit,
    pub sampler: TermSampler,
    pub means: Vec<f64>,
    pub exact: f64,
}

impl LoadedInstance {
    pub fn new(observable: Observable, prep: PreparationCircuit) -> Result<Self> {
        let sampler = TermSampler::new(&prep)?;
        let means = exact_means(sampler.state(), &observable)?;
        let exact = observable.terms().iter().zip(&means).map(|(t, m)| t.coefficient * m).sum();
        Ok(Self { observable, prep, sampler, means, exact })
    }
}

/// Load the configured instance; `terms` overrides the generator's term count.
pub fn load_instance(cfg: &ExperimentConfig, terms: Option<usize>) -> Result<LoadedInstance> {
    match &cfg.source {
        ObservableSource::File(path) => {
            if terms.is_some() {
                return Err(HarnessError::config("generator.kind", "sweeps need a generated observable"));
            }
            let obs = parse_observable(&std::fs::read_to_string(path)?)?;
            let prep = PreparationCircuit::seeded(obs.n_qubits(), cfg.prep_depth, cfg.prep_seed);
            LoadedInstance::new(obs, prep)
        }
        ObservableSource::Generator { mode, qubits, terms: default_terms, seed } => {
            let inst = random_observable(*qubits, terms.unwrap_or(*default_terms), mode, *seed)?;
            LoadedInstance::new(inst.observable, inst.prep)
        }
    }
}

/// The budget plan for `n_terms` terms with the configured overrides applied.
pub fn plan_for(cfg: &ExperimentConfig, n_terms: usize) -> Result<BudgetPlan> {
    let mut plan = plan_budget(&cfg.targets, n_terms, cfg.epsilon)?;
    if let Some(m_q) = cfg.m_q {
        plan.m_q = m_q;
        plan.rebalance_correction();
    }
    if let Some(n_c) = cfg.n_c_cor {
        plan.n_c_cor = n_c;
        plan.refresh_totals();
    }
    plan.validate()?;
    Ok(plan)
}

/// Ladder parameters for `obs`, or `None` when the ladder is off.
///
/// The default base scale is `1/(max|a| 2^depth)`, the largest power-of-two
/// fraction keeping every finest-level dressing feasible.
pub fn ladder_for(cfg: &ExperimentConfig, obs: &Observable) -> Result<Option<LadderConfig>> {
    let Some(s) = &cfg.ladder else { return Ok(None) };
    let depth = s.depth.unwrap_or_else(|| LadderConfig::depth_for(cfg.targets.eta));
    let max_a = obs.coefficients().iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let base_scale = s.base_scale.unwrap_or(1.0 / (max_a * 2f64.powi(depth as i32)));
    Ok(Some(LadderConfig::new(s.alpha, s.gamma, depth, base_scale)?))
}

fn run_trials<T, F>(cfg: &ExperimentConfig, family: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> tcps_core::Result<T> + Sync + Send,
{
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| f(&mut stream(family, t)).map_err(HarnessError::from))
        .collect()
}

/// Aggregate of one estimator over all trials.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub method: &'static str,
    pub n_terms: usize,
    pub trials: u64,
    /// Mean estimate over trials.
    pub estimate: f64,
    pub exact: f64,
    /// Mean of the per-trial plug-in predictions.
    pub predicted_variance: f64,
    /// Sample variance of the estimates; present iff there were two or more trials.
    pub empirical_variance: Option<f64>,
    pub error_floor: f64,
    /// Planned state preparations per trial.
    pub planned_budget: u64,
    /// Counters summed over trials.
    pub ledger: ResourceLedger,
    pub epsilon: Option<f64>,
    /// Mean number of phase-encoded terms.
    pub mean_encoded: Option<f64>,
    /// `var_tcps / var_qee` on the TCPS row of a comparison.
    pub variance_ratio: Option<f64>,
}

fn aggregate(
    method: &'static str,
    inst: &LoadedInstance,
    trials: u64,
    planned_budget: u64,
    rows: &[(f64, f64, f64, ResourceLedger)],
) -> EstimateReport {
    let estimates: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let mut ledger = ResourceLedger::default();
    for r in rows {
        ledger += r.3;
    }
    EstimateReport {
        method,
        n_terms: inst.observable.len(),
        trials,
        estimate: mean(&estimates),
        exact: inst.exact,
        predicted_variance: mean(&rows.iter().map(|r| r.1).collect::<Vec<_>>()),
        empirical_variance: sample_variance(&estimates),
        error_floor: mean(&rows.iter().map(|r| r.2).collect::<Vec<_>>()),
        planned_budget,
        ledger,
        epsilon: None,
        mean_encoded: None,
        variance_ratio: None,
    }
}

/// Per-term sampling with `n_c` shots per term.
pub fn qee_arm(cfg: &ExperimentConfig, inst: &LoadedInstance, n_c: u64, family: u64) -> Result<EstimateReport> {
    let rows = run_trials(cfg, family, |rng| {
        let r = qee_estimate_with(&inst.sampler, &inst.observable, n_c, rng)?;
        Ok((r.estimate, r.predicted_variance, 0.0, r.ledger))
    })?;
    Ok(aggregate("qee", inst, cfg.trials, n_c * inst.observable.len() as u64, &rows))
}

/// The coherent pipeline under `plan`.
pub fn tcps_arm(cfg: &ExperimentConfig, inst: &LoadedInstance, plan: &BudgetPlan, family: u64) -> Result<EstimateReport> {
    let options = TcpsOptions { mode: cfg.memory, correction: cfg.correction, ladder: ladder_for(cfg, &inst.observable)? };
    let results = run_trials(cfg, family, |rng| {
        tcps_estimate(&inst.prep, &inst.sampler, &inst.observable, plan, &options, rng)
    })?;
    let rows: Vec<_> = results.iter().map(|r| (r.estimate, r.predicted_variance, r.error_floor, r.ledger)).collect();
    let mut report = aggregate("tcps", inst, cfg.trials, plan.m_t, &rows);
    let eps: Vec<f64> = results.iter().map(|r| r.epsilon).filter(|e| e.is_finite()).collect();
    report.epsilon = (!eps.is_empty()).then(|| mean(&eps));
    report.mean_encoded = Some(mean(&results.iter().map(|r| r.n_encoded as f64).collect::<Vec<_>>()));
    Ok(report)
}

/// Shots per term giving the QEE arm the same planned budget as `plan`.
pub fn matched_shots(plan: &BudgetPlan) -> u64 {
    let n = plan.n_terms as u64;
    debug_assert_eq!(plan.m_t % n, 0, "every budget component is a multiple of N");
    plan.m_t / n
}

/// Both estimators at matched planned budgets; the TCPS report carries the ratio.
pub fn compare_arms(cfg: &ExperimentConfig, inst: &LoadedInstance, family: u64) -> Result<(EstimateReport, EstimateReport)> {
    if cfg.qee_shots.is_some() {
        return Err(HarnessError::config("qee.shots", "compare derives the QEE shots from the matched budget"));
    }
    let plan = plan_for(cfg, inst.observable.len())?;
    let n_c = matched_shots(&plan);
    let qee = qee_arm(cfg, inst, n_c, child_seed(family, ARM_QEE))?;
    let mut tcps = tcps_arm(cfg, inst, &plan, child_seed(family, ARM_TCPS))?;
    if qee.planned_budget != tcps.planned_budget {
        return Err(HarnessError::Check(format!(
            "budgets differ: qee {} vs tcps {}",
            qee.planned_budget, tcps.planned_budget
        )));
    }
    tcps.variance_ratio = match (tcps.empirical_variance, qee.empirical_variance) {
        (Some(t), Some(q)) => Some(t / q),
        _ => None,
    };
    Ok((qee, tcps))
}

pub const ESTIMATE_COLUMNS: &[&str] = &[
    "method",
    "n_terms",
    "trials",
    "estimate",
    "exact",
    "predicted_variance",
    "empirical_variance",
    "error_floor",
    "variance_ratio",
    "epsilon",
    "mean_encoded",
    "planned_budget",
    "state_preparations",
    "boundary_preparations",
    "sign_preparations",
    "encoding_preparations",
    "correction_preparations",
    "qee_preparations",
    "measurements",
    "interactions",
    "repetitions",
    "coherence_span",
];

fn estimate_table(reports: &[EstimateReport]) -> Table {
    let mut t = Table::new(ESTIMATE_COLUMNS.to_vec());
    for r in reports {
        let l = &r.ledger;
        t.push(vec![
            r.method.into(),
            (r.n_terms as u64).into(),
            r.trials.into(),
            r.estimate.into(),
            r.exact.into(),
            r.predicted_variance.into(),
            Cell::opt_float(r.empirical_variance),
            r.error_floor.into(),
            Cell::opt_float(r.variance_ratio),
            Cell::opt_float(r.epsilon),
            Cell::opt_float(r.mean_encoded),
            r.planned_budget.into(),
            l.total_preparations().into(),
            l.boundary_preparations.into(),
            l.sign_preparations.into(),
            l.encoding_preparations.into(),
            l.correction_preparations.into(),
            l.qee_preparations.into(),
            l.measurements.into(),
            l.interactions.into(),
            l.repetitions.into(),
            l.coherence_span.into(),
        ]);
    }
    t
}

fn run_exact(inst: &LoadedInstance) -> Table {
    let mut t = Table::new(vec!["kind", "term", "coefficient", "string", "mean", "contribution"]);
    for (j, (term, m)) in inst.observable.terms().iter().zip(&inst.means).enumerate() {
        t.push(vec![
            "term".into(),
            (j as u64).into(),
            term.coefficient.into(),
            Cell::Text(term.string.to_string()),
            (*m).into(),
            (term.coefficient * m).into(),
        ]);
    }
    t.push(vec!["total".into(), Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, inst.exact.into()]);
    t
}

/// One point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub n_terms: usize,
    pub var_qee: f64,
    pub var_tcps: Option<f64>,
    pub ratio: Option<f64>,
    pub predicted_qee: f64,
    pub predicted_tcps: Option<f64>,
    pub epsilon: Option<f64>,
}

/// Run the sweep and fit the log-log slope of the ratio (compare) or of the
/// QEE variance (qee).
pub fn sweep_points(cfg: &ExperimentConfig) -> Result<(Vec<SweepPoint>, Fit)> {
    if cfg.sweep_terms.len() < 3 {
        return Err(HarnessError::config("sweep.terms", "a sweep needs at least 3 points"));
    }
    if cfg.trials < 2 {
        return Err(HarnessError::config("trials", "a sweep needs at least 2 trials per point"));
    }
    let mut points = Vec::new();
    for &n in &cfg.sweep_terms {
        let inst = load_instance(cfg, Some(n))?;
        let family = child_seed(cfg.seed, 1000 + n as u64);
        let point = match cfg.sweep_kind {
            SweepKind::Compare => {
                let (q, t) = compare_arms(cfg, &inst, family)?;
                SweepPoint {
                    n_terms: n,
                    var_qee: q.empirical_variance.expect("trials ≥ 2"),
                    var_tcps: t.empirical_variance,
                    ratio: t.variance_ratio,
                    predicted_qee: q.predicted_variance,
                    predicted_tcps: Some(t.predicted_variance),
                    epsilon: t.epsilon,
                }
            }
            SweepKind::Qee => {
                let n_c = cfg.sweep_budget / n as u64;
                if n_c == 0 {
                    return Err(HarnessError::config("sweep.budget", format!("budget below one shot per term at N = {n}")));
                }
                let q = qee_arm(cfg, &inst, n_c, child_seed(family, ARM_QEE))?;
                SweepPoint {
                    n_terms: n,
                    var_qee: q.empirical_variance.expect("trials ≥ 2"),
                    var_tcps: None,
                    ratio: None,
                    predicted_qee: qee_variance_prediction(&inst.observable, &inst.means, n_c),
                    predicted_tcps: None,
                    epsilon: None,
                }
            }
        };
        log::info!("sweep point N = {n} done");
        points.push(point);
    }
    let xs: Vec<f64> = points.iter().map(|p| p.n_terms as f64).collect();
    let ys: Vec<f64> = match cfg.sweep_kind {
        SweepKind::Compare => points.iter().map(|p| p.ratio.expect("trials ≥ 2")).collect(),
        SweepKind::Qee => points.iter().map(|p| p.var_qee).collect(),
    };
    Ok((points, fit_loglog(&xs, &ys)))
}

fn sweep_table(cfg: &ExperimentConfig, points: &[SweepPoint], fit: &Fit) -> Table {
    let kind = match cfg.sweep_kind {
        SweepKind::Compare => "compare",
        SweepKind::Qee => "qee",
    };
    let mut t = Table::new(vec![
        "row",
        "kind",
        "n_terms",
        "var_qee",
        "var_tcps",
        "ratio",
        "predicted_qee",
        "predicted_tcps",
        "epsilon",
        "slope",
        "slope_stderr",
        "intercept",
    ]);
    for p in points {
        t.push(vec![
            "point".into(),
            kind.into(),
            (p.n_terms as u64).into(),
            p.var_qee.into(),
            Cell::opt_float(p.var_tcps),
            Cell::opt_float(p.ratio),
            p.predicted_qee.into(),
            Cell::opt_float(p.predicted_tcps),
            Cell::opt_float(p.epsilon),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    let mut fit_row = vec![Cell::Empty; t.columns.len()];
    fit_row[0] = "fit".into();
    fit_row[1] = kind.into();
    fit_row[9] = fit.slope.into();
    fit_row[10] = fit.slope_stderr.into();
    fit_row[11] = fit.intercept.into();
    t.push(fit_row);
    t
}

fn run_resources(cfg: &ExperimentConfig, inst: &LoadedInstance) -> Result<Table> {
    let n = inst.observable.len();
    let mut t = Table::new(vec![
        "source",
        "method",
        "state_preparations",
        "measurements",
        "interactions",
        "interactions_per_repetition",
        "repetitions",
        "register_coherence",
        "memory_coherence",
        "simulated",
    ]);
    if cfg.resources_simulate {
        let single = ExperimentConfig { trials: 1, ..cfg.clone() };
        let plan = plan_for(cfg, n)?;
        let q = qee_arm(&single, inst, matched_shots(&plan), child_seed(cfg.seed, ARM_QEE))?;
        let tc = tcps_arm(&single, inst, &plan, child_seed(cfg.seed, ARM_TCPS))?;
        if q.ledger.interactions != 0 {
            return Err(HarnessError::Check(format!("qee recorded {} interactions", q.ledger.interactions)));
        }
        let encoded = tc.mean_encoded.unwrap_or(0.0) as u64;
        let expected = tc.ledger.repetitions * encoded;
        if tc.ledger.interactions != expected {
            return Err(HarnessError::Check(format!(
                "tcps recorded {} interactions, expected {} repetitions x {} encoded terms",
                tc.ledger.interactions, tc.ledger.repetitions, encoded
            )));
        }
        if cfg.ladder.is_none() && encoded > 0 && tc.ledger.interactions != encoded * plan.m_q {
            return Err(HarnessError::Check(format!(
                "tcps recorded {} interactions, expected {} x M_q = {}",
                tc.ledger.interactions,
                encoded,
                encoded * plan.m_q
            )));
        }
        for r in [&q, &tc] {
            let per_rep = Cell::Int(r.ledger.interactions.checked_div(r.ledger.repetitions).unwrap_or(0));
            t.push(vec![
                "measured".into(),
                r.method.into(),
                r.ledger.total_preparations().into(),
                r.ledger.measurements.into(),
                r.ledger.interactions.into(),
                per_rep,
                r.ledger.repetitions.into(),
                Cell::Empty,
                if r.method == "tcps" { r.ledger.coherence_span.into() } else { Cell::Empty },
                "true".into(),
            ]);
        }
    }
    for row in analytic_rows(n, cfg.resources_eta) {
        t.push(vec![
            "analytic".into(),
            row.method.into(),
            row.state_preparations.into(),
            Cell::Empty,
            Cell::opt_float(row.interactions),
            Cell::Empty,
            Cell::Empty,
            row.register_coherence.into(),
            Cell::opt_float(row.memory_coherence),
            if row.simulated { "true".into() } else { "false".into() },
        ]);
    }
    Ok(t)
}

fn run_budget(cfg: &ExperimentConfig, inst: &LoadedInstance) -> Result<Table> {
    let n = inst.observable.len();
    let plan = plan_for(cfg, n)?;
    let mut t = Table::new(vec!["quantity", "value"]);
    let mut push = |name: &str, v: Cell| t.push(vec![Cell::Text(name.to_string()), v]);
    push("n_terms", (n as u64).into());
    push("n_1", plan.n_1.into());
    push("m_1", plan.m_1.into());
    push("g3", plan.g3.into());
    push("p_y0_low", plan.p_y0_interval.0.into());
    push("p_y0_high", plan.p_y0_interval.1.into());
    push("n_qpe", plan.n_qpe.into());
    push("m_qpe", plan.m_qpe.into());
    push("test_accuracy", plan.test_accuracy.into());
    push("m_k", plan.m_k.into());
    push("m_q", plan.m_q.into());
    push("n_c_cor", plan.n_c_cor.into());
    push("m_c_cor", plan.m_c_cor.into());
    push("encoding_preparations", plan.encoding_preparations().into());
    push("m_t", plan.m_t.into());
    push("qee_matched_shots", matched_shots(&plan).into());
    let pairs: Vec<(f64, f64)> =
        inst.observable.terms().iter().zip(&inst.means).map(|(t, &m)| (t.coefficient, m.abs())).collect();
    match plan.epsilon {
        EpsilonChoice::Fixed(e) => push("epsilon", e.into()),
        EpsilonChoice::Optimal => {
            let o = optimal_epsilon(plan.n_c_cor, plan.m_q, &pairs, None)?;
            push("epsilon", o.epsilon.into());
            push("epsilon_unclamped", o.unclamped.into());
            push("epsilon_clamped", if o.clamped { "true".into() } else { "false".into() });
            let (m_x, m_y) = plan.frame_split();
            let model = VarianceModel { encoded: &pairs, classical: &[], epsilon: o.epsilon, m_x, m_y, n_c_cor: plan.n_c_cor };
            push("predicted_tcps_variance", tcps_variance_prediction(&model)?.into());
        }
    }
    push("predicted_qee_variance", qee_variance_prediction(&inst.observable, &inst.means, matched_shots(&plan)).into());
    Ok(t)
}

/// Run the configured experiment on a pool of `cfg.workers` threads.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| HarnessError::config("workers", e.to_string()))?;
    let table = pool.install(|| dispatch(cfg))?;
    Ok(Report { command: cfg.mode.as_str().to_string(), seed: cfg.seed, config: cfg.echo.clone(), table })
}

fn dispatch(cfg: &ExperimentConfig) -> Result<Table> {
    if cfg.mode == Mode::Sweep {
        let (points, fit) = sweep_points(cfg)?;
        return Ok(sweep_table(cfg, &points, &fit));
    }
    let inst = load_instance(cfg, None)?;
    log::info!("instance: {} terms on {} qubits, exact value {}", inst.observable.len(), inst.observable.n_qubits(), inst.exact);
    Ok(match cfg.mode {
        Mode::Exact => run_exact(&inst),
        Mode::Qee => {
            let n_c = match cfg.qee_shots {
                Some(s) => s,
                None => matched_shots(&plan_for(cfg, inst.observable.len())?),
            };
            estimate_table(&[qee_arm(cfg, &inst, n_c, child_seed(cfg.seed, ARM_QEE))?])
        }
        Mode::Tcps => {
            let plan = plan_for(cfg, inst.observable.len())?;
            estimate_table(&[tcps_arm(cfg, &inst, &plan, child_seed(cfg.seed, ARM_TCPS))?])
        }
        Mode::Compare => {
            let (q, t) = compare_arms(cfg, &inst, cfg.seed)?;
            estimate_table(&[q, t])
        }
        Mode::Resources => run_resources(cfg, &inst)?,
        Mode::Budget => run_budget(cfg, &inst)?,
        Mode::Sweep => unreachable!("handled above"),
    })
}
