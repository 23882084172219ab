//! Flat `key = value` configuration with dotted keys.
//!
//! ```text
//! # comment
//! generator.kind = equal-mean
//! generator.terms = 32
//! ladder.alpha = 3
//! ```
//!
//! Later assignments win; command-line flags are applied on top of the file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use tcps_core::pauli::GeneratorMode;
use tcps_core::tcps::budget::{BudgetTargets, EpsilonChoice};
use tcps_core::tcps::memory::MemoryMode;
use tcps_core::tcps::taylor::CorrectionMode;

use crate::error::{HarnessError, Result};

/// Every recognised key with its default (empty means unset) and a description.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("mode", "", "experiment: exact, qee, tcps, compare, sweep, resources or budget"),
    ("observable.file", "", "observable text file; alternative to generator.kind"),
    ("generator.kind", "", "equal-mean or uniform; alternative to observable.file"),
    ("generator.qubits", "9", "register size of generated instances"),
    ("generator.terms", "16", "number of generated terms"),
    ("generator.coefficient", "1.0", "equal-mean: common coefficient"),
    ("generator.mean", "0.5", "equal-mean: common expectation value"),
    ("generator.support", "3", "equal-mean: qubits per Z string"),
    ("generator.min", "0.1", "uniform: smallest coefficient magnitude"),
    ("generator.max", "1.0", "uniform: largest coefficient magnitude"),
    ("generator.depth", "3", "uniform: brick depth of the random state"),
    ("generator.seed", "", "instance seed; defaults to the master seed"),
    ("prep.seed", "0", "observable.file: seed of the random preparation circuit"),
    ("prep.depth", "3", "observable.file: brick depth of the preparation circuit"),
    ("budget.eta", "0.05", "target error, sets the default ladder depth"),
    ("budget.eta0", "0.05", "failure probability of each readout frame"),
    ("budget.eta1", "0.05", "failure probability of the boundary check"),
    ("budget.eta3", "0.05", "failure probability of the sign resolution"),
    ("budget.delta", "0.2", "boundary margin"),
    ("budget.g1", "0.1", "boundary-check interval half-width"),
    ("budget.eps_tan", "0.0625", "angular accuracy of the readout"),
    ("budget.m", "1", "frame estimates combined in the readout"),
    ("budget.epsilon", "optimal", "encoding strength, a number or `optimal`"),
    ("budget.m_q", "", "encoding repetitions; defaults to the readout bound"),
    ("budget.n_c_cor", "", "correction shots per term; defaults to the matched split"),
    ("qee.shots", "", "qee: shots per term; defaults to the matched budget"),
    ("ladder.enabled", "false", "use the multi-scale readout"),
    ("ladder.alpha", "3", "ladder: base repetitions per frame"),
    ("ladder.gamma", "1", "ladder: extra repetitions per remaining level"),
    ("ladder.depth", "", "ladder: finest level; defaults to ceil(log2(1/eta))"),
    ("ladder.base_scale", "", "ladder: level-0 scale; defaults to the largest feasible"),
    ("memory.mode", "fast", "fast or exact memory simulation"),
    ("correction.mode", "closed-form", "closed-form or series"),
    ("trials", "100", "independent repetitions of the experiment"),
    ("seed", "0", "master seed"),
    ("workers", "0", "worker threads, 0 for one per core"),
    ("output.path", "", "report file; standard output when empty"),
    ("output.format", "csv", "csv or json"),
    ("sweep.terms", "8,16,32,64", "term counts of a sweep"),
    ("sweep.kind", "compare", "compare (both estimators) or qee (fixed total budget)"),
    ("sweep.budget", "1000000", "qee sweep: total state preparations per estimate"),
    ("resources.eta", "0.05", "target error for the analytic resource rows"),
    ("resources.simulate", "true", "also run both estimators and report measured counters"),
];

const NOT_ECHOED: &[&str] = &["workers", "output.path", "output.format"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    Qee,
    Tcps,
    Compare,
    Sweep,
    Resources,
    Budget,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Qee => "qee",
            Mode::Tcps => "tcps",
            Mode::Compare => "compare",
            Mode::Sweep => "sweep",
            Mode::Resources => "resources",
            Mode::Budget => "budget",
        }
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "exact" => Mode::Exact,
            "qee" => Mode::Qee,
            "tcps" => Mode::Tcps,
            "compare" => Mode::Compare,
            "sweep" => Mode::Sweep,
            "resources" => Mode::Resources,
            "budget" => Mode::Budget,
            _ => return Err(format!("unknown mode `{s}`")),
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Compare,
    Qee,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObservableSource {
    File(PathBuf),
    Generator { mode: GeneratorMode, qubits: usize, terms: usize, seed: u64 },
}

/// Raw key/value pairs, before interpretation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::ConfigSyntax { line: k + 1, message: format!("expected key = value, got `{line}`") })?;
            raw.set(key.trim(), value.trim()).map_err(|e| match e {
                HarnessError::Config { message, .. } => HarnessError::ConfigSyntax { line: k + 1, message },
                other => other,
            })?;
        }
        Ok(raw)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.iter().any(|(k, _, _)| *k == key) {
            return Err(HarnessError::config(key, "unknown key"));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// `key=value` as given to `--set`.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair.split_once('=').ok_or_else(|| HarnessError::Usage(format!("--set expects key=value, got `{pair}`")))?;
        self.set(k.trim(), v.trim())
    }

    fn value(&self, key: &str) -> &str {
        if let Some(v) = self.values.get(key) {
            return v;
        }
        KEYS.iter().find(|(k, _, _)| *k == key).map(|(_, d, _)| *d).expect("key is listed")
    }

    fn is_set(&self, key: &str) -> bool {
        !self.value(key).is_empty()
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        let v = self.value(key);
        v.parse().map_err(|e: T::Err| HarnessError::config(key, format!("cannot parse `{v}`: {e}")))
    }

    fn get_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        if self.is_set(key) {
            self.get(key).map(Some)
        } else {
            Ok(None)
        }
    }

    /// Effective value of every key that can change the numbers, defaults
    /// included, in key order. Worker count and output destination are left
    /// out so that reports compare byte for byte.
    pub fn echo(&self) -> BTreeMap<String, String> {
        KEYS.iter()
            .filter(|(k, _, _)| !NOT_ECHOED.contains(k))
            .map(|(k, _, _)| (k.to_string(), self.value(k).to_string()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderSettings {
    pub alpha: u64,
    pub gamma: u64,
    pub depth: Option<u32>,
    pub base_scale: Option<f64>,
}

/// A fully interpreted experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub source: ObservableSource,
    pub prep_seed: u64,
    pub prep_depth: usize,
    pub targets: BudgetTargets,
    pub epsilon: EpsilonChoice,
    pub m_q: Option<u64>,
    pub n_c_cor: Option<u64>,
    pub qee_shots: Option<u64>,
    pub ladder: Option<LadderSettings>,
    pub memory: MemoryMode,
    pub correction: CorrectionMode,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub sweep_terms: Vec<usize>,
    pub sweep_kind: SweepKind,
    pub sweep_budget: u64,
    pub resources_eta: f64,
    pub resources_simulate: bool,
    /// Effective key/value pairs, echoed into reports.
    pub echo: BTreeMap<String, String>,
}

fn bool_value(raw: &RawConfig, key: &str) -> Result<bool> {
    match raw.value(key) {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        v => Err(HarnessError::config(key, format!("expected true or false, got `{v}`"))),
    }
}

impl ExperimentConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let mode: Mode = raw.get_opt("mode")?.ok_or_else(|| HarnessError::config("mode", "required"))?;
        let seed: u64 = raw.get("seed")?;

        let source = match (raw.is_set("observable.file"), raw.is_set("generator.kind")) {
            (true, true) => {
                return Err(HarnessError::config("observable.file", "give either observable.file or generator.kind"))
            }
            (false, false) => {
                return Err(HarnessError::config("observable.file", "an observable source is required"))
            }
            (true, false) => ObservableSource::File(PathBuf::from(raw.value("observable.file"))),
            (false, true) => {
                let mode = match raw.value("generator.kind") {
                    "equal-mean" => GeneratorMode::EqualMean {
                        coefficient: raw.get("generator.coefficient")?,
                        mean: raw.get("generator.mean")?,
                        support_size: raw.get("generator.support")?,
                    },
                    "uniform" => GeneratorMode::Uniform {
                        min_magnitude: raw.get("generator.min")?,
                        max_magnitude: raw.get("generator.max")?,
                        depth: raw.get("generator.depth")?,
                    },
                    other => return Err(HarnessError::config("generator.kind", format!("unknown generator `{other}`"))),
                };
                ObservableSource::Generator {
                    mode,
                    qubits: raw.get("generator.qubits")?,
                    terms: raw.get("generator.terms")?,
                    seed: raw.get_opt("generator.seed")?.unwrap_or(seed),
                }
            }
        };

        let targets = BudgetTargets {
            eta: raw.get("budget.eta")?,
            eta0: raw.get("budget.eta0")?,
            eta1: raw.get("budget.eta1")?,
            eta3: raw.get("budget.eta3")?,
            delta: raw.get("budget.delta")?,
            g1: raw.get("budget.g1")?,
            eps_tan: raw.get("budget.eps_tan")?,
            m: raw.get("budget.m")?,
        };
        let epsilon = match raw.value("budget.epsilon") {
            "optimal" => EpsilonChoice::Optimal,
            _ => EpsilonChoice::Fixed(raw.get("budget.epsilon")?),
        };
        let ladder = if bool_value(raw, "ladder.enabled")? {
            Some(LadderSettings {
                alpha: raw.get("ladder.alpha")?,
                gamma: raw.get("ladder.gamma")?,
                depth: raw.get_opt("ladder.depth")?,
                base_scale: raw.get_opt("ladder.base_scale")?,
            })
        } else {
            None
        };
        let memory = match raw.value("memory.mode") {
            "fast" => MemoryMode::Fast,
            "exact" => MemoryMode::Exact,
            v => return Err(HarnessError::config("memory.mode", format!("expected fast or exact, got `{v}`"))),
        };
        let correction = match raw.value("correction.mode") {
            "closed-form" => CorrectionMode::ClosedForm,
            "series" => CorrectionMode::Series,
            v => return Err(HarnessError::config("correction.mode", format!("expected closed-form or series, got `{v}`"))),
        };
        let format = match raw.value("output.format") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            v => return Err(HarnessError::config("output.format", format!("expected csv or json, got `{v}`"))),
        };
        let sweep_kind = match raw.value("sweep.kind") {
            "compare" => SweepKind::Compare,
            "qee" => SweepKind::Qee,
            v => return Err(HarnessError::config("sweep.kind", format!("expected compare or qee, got `{v}`"))),
        };
        let sweep_terms = raw
            .value("sweep.terms")
            .split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|e| HarnessError::config("sweep.terms", format!("`{s}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let trials: u64 = raw.get("trials")?;
        if trials == 0 {
            return Err(HarnessError::config("trials", "must be at least 1"));
        }

        Ok(ExperimentConfig {
            mode,
            source,
            prep_seed: raw.get("prep.seed")?,
            prep_depth: raw.get("prep.depth")?,
            targets,
            epsilon,
            m_q: raw.get_opt("budget.m_q")?,
            n_c_cor: raw.get_opt("budget.n_c_cor")?,
            qee_shots: raw.get_opt("qee.shots")?,
            ladder,
            memory,
            correction,
            trials,
            seed,
            workers: raw.get("workers")?,
            output: raw.get_opt::<String>("output.path")?.map(PathBuf::from),
            format,
            sweep_terms,
            sweep_kind,
            sweep_budget: raw.get("sweep.budget")?,
            resources_eta: raw.get("resources.eta")?,
            resources_simulate: bool_value(raw, "resources.simulate")?,
            echo: raw.echo(),
        })
    }
}
