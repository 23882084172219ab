use thiserror::Error;

/// Errors raised by the simulator and the estimators built on top of it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gate matrix is not unitary (deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("control qubit {control} overlaps the targets of the controlled operation")]
    ControlOverlap { control: usize },

    #[error("register of {n_qubits} qubits exceeds the {max}-qubit cap")]
    RegisterTooLarge { n_qubits: usize, max: usize },

    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("amplitudes are not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("measurement selected a branch of probability {probability:.3e}")]
    ImpossibleBranch { probability: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("expectation value has imaginary part {imag:.3e}")]
    NonHermitianExpectation { imag: f64 },

    #[error("{requested} terms requested but only {available} distinct strings exist")]
    TooManyTerms { requested: usize, available: usize },

    #[error("observable has no terms")]
    EmptyObservable,

    #[error("dressing infeasible: |a|·√ε = {value} exceeds 1/2")]
    InfeasibleDressing { value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sign separation vanishes for δ = {delta} (g₃ = {g3})")]
    NoSignSeparation { delta: f64, g3: f64 },

    #[error("phase is indeterminate: both sine and cosine estimates vanish")]
    IndeterminatePhase,

    #[error("arcsine argument {x} outside [0, 1)")]
    CorrectionDomain { x: f64 },

    #[error("elliptic parameter t = {t} outside [0, 1)")]
    EllipticDomain { t: f64 },

    #[error("encoding strength infeasible for term {term}: ε = {epsilon}")]
    Feasibility { term: usize, epsilon: f64 },

    #[error("all weighted means vanish, nothing to encode")]
    NothingToEncode,

    #[error("memory mode mismatch: accumulator is {have}, operation needs {want}")]
    MemoryMode { have: &'static str, want: &'static str },

    #[error("ladder level {level} inconsistent with previous level after re-sampling (residual {residual:.3})")]
    LadderWindow { level: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
