//! Pauli strings, weighted observables and their exact expectation values.
//!
//! A string is a pair of bit masks: bit `k` of `x` (resp. `z`) says whether
//! the letter on qubit `k` contains an X (resp. Z) factor, so `Y` sets both.
//! In text form the leftmost letter belongs to qubit 0.

use std::collections::HashMap;
use std::fmt;

use log::warn;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;
use crate::statevector::{ry, GateSpec, PreparationCircuit, StateVector, MAX_QUBITS};

const IMAG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn new(n_qubits: usize, x: u64, z: u64) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::RegisterTooLarge { n_qubits, max: MAX_QUBITS });
        }
        let limit = (1u64 << n_qubits) - 1;
        if (x | z) & !limit != 0 {
            let index = 63 - ((x | z) & !limit).leading_zeros() as usize;
            return Err(Error::QubitOutOfRange { index, n_qubits });
        }
        Ok(Self { n_qubits, x, z })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self { n_qubits, x: 0, z: 0 }
    }

    /// Parse letters such as `"XIZY"`; the first letter acts on qubit 0.
    pub fn from_letters(letters: &str) -> Result<Self> {
        let mut x = 0u64;
        let mut z = 0u64;
        let mut n = 0usize;
        for (k, c) in letters.chars().enumerate() {
            if k >= MAX_QUBITS {
                return Err(Error::RegisterTooLarge { n_qubits: letters.chars().count(), max: MAX_QUBITS });
            }
            match c {
                'I' => {}
                'X' => x |= 1 << k,
                'Z' => z |= 1 << k,
                'Y' => {
                    x |= 1 << k;
                    z |= 1 << k;
                }
                other => {
                    return Err(Error::Parse { line: 0, message: format!("letter {other:?} is not one of I, X, Y, Z") })
                }
            }
            n = k + 1;
        }
        Ok(Self { n_qubits: n, x, z })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.support() == 0
    }

    pub fn letter(&self, qubit: usize) -> char {
        match ((self.x >> qubit) & 1, (self.z >> qubit) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (0, 1) => 'Z',
            _ => 'Y',
        }
    }

    /// Phase picked up by basis state `|i⟩`: `P|i⟩ = phase_on(i)·|i ⊕ x⟩`.
    pub fn phase_on(&self, index: u64) -> Complex64 {
        let ys = (self.x & self.z).count_ones();
        let sign = if (index & self.z).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        let i_pow = match ys % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        i_pow * sign
    }

    /// Whether two strings commute (symplectic inner product is even).
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: f64, string: PauliString) -> Result<Self> {
        if !coefficient.is_finite() || coefficient == 0.0 {
            return Err(Error::InvalidParameter(format!("coefficient {coefficient} must be finite and nonzero")));
        }
        Ok(Self { coefficient, string })
    }
}

/// `O = Σ a_j P_j` with distinct strings.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl Observable {
    /// Build from terms, merging repeated strings and dropping terms that cancel.
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        let mut merged: Vec<PauliTerm> = Vec::with_capacity(terms.len());
        let mut position: HashMap<PauliString, usize> = HashMap::new();
        for t in terms {
            if t.string.n_qubits() != n_qubits {
                return Err(Error::DimensionMismatch { left: t.string.n_qubits(), right: n_qubits });
            }
            match position.get(&t.string) {
                Some(&k) => merged[k].coefficient += t.coefficient,
                None => {
                    position.insert(t.string, merged.len());
                    merged.push(t);
                }
            }
        }
        merged.retain(|t| {
            if t.coefficient == 0.0 {
                warn!("dropping term {} whose merged coefficient is zero", t.string);
                false
            } else {
                true
            }
        });
        if merged.is_empty() {
            return Err(Error::EmptyObservable);
        }
        Ok(Self { n_qubits, terms: merged })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Number of terms N.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.coefficient).collect()
    }

    /// The same terms in a different order.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let terms = order
            .iter()
            .map(|&k| self.terms.get(k).copied().ok_or_else(|| Error::InvalidParameter(format!("term index {k}"))))
            .collect::<Result<Vec<_>>>()?;
        Observable::new(self.n_qubits, terms)
    }
}

/// Parse the text observable format.
///
/// The first significant line holds the qubit count; each further line is
/// `<coefficient> <letters>`. Blank lines and lines starting with `#` are skipped.
///
/// ```
/// use tcps_core::pauli::parse_observable;
/// let obs = parse_observable("2\n0.5 XZ\n-0.25 IY\n").unwrap();
/// assert_eq!(obs.len(), 2);
/// assert_eq!(obs.terms()[1].string.to_string(), "IY");
/// ```
pub fn parse_observable(text: &str) -> Result<Observable> {
    let mut n_qubits: Option<usize> = None;
    let mut terms = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some(n) = n_qubits else {
            let n: usize = line
                .parse()
                .map_err(|_| Error::Parse { line: line_no, message: format!("expected qubit count, found {line:?}") })?;
            if n == 0 || n > MAX_QUBITS {
                return Err(Error::Parse { line: line_no, message: format!("qubit count {n} outside 1..={MAX_QUBITS}") });
            }
            n_qubits = Some(n);
            continue;
        };
        let mut fields = line.split_whitespace();
        let (Some(coef), Some(letters), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse { line: line_no, message: "expected `<coefficient> <letters>`".into() });
        };
        let coefficient: f64 = coef
            .parse()
            .ok()
            .filter(|c: &f64| c.is_finite())
            .ok_or_else(|| Error::Parse { line: line_no, message: format!("bad coefficient {coef:?}") })?;
        let string = PauliString::from_letters(letters).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse { line: line_no, message },
            other => Error::Parse { line: line_no, message: other.to_string() },
        })?;
        if string.n_qubits() != n {
            return Err(Error::Parse {
                line: line_no,
                message: format!("string {letters} has {} letters, expected {n}", string.n_qubits()),
            });
        }
        if coefficient == 0.0 {
            warn!("line {line_no}: zero coefficient");
        }
        terms.push(PauliTerm { coefficient, string });
    }
    let n = n_qubits.ok_or(Error::Parse { line: 0, message: "missing qubit count".into() })?;
    Observable::new(n, terms)
}

/// Serialize in the format read by [`parse_observable`].
pub fn to_text(obs: &Observable) -> String {
    let mut out = format!("{}\n", obs.n_qubits);
    for t in &obs.terms {
        // `{:?}` gives the shortest representation that parses back exactly.
        out.push_str(&format!("{:?} {}\n", t.coefficient, t.string));
    }
    out
}

/// `⟨ψ|P|ψ⟩`. The string acts on the lowest `P.n_qubits()` qubits of the register.
pub fn exact_expectation(state: &StateVector, string: &PauliString) -> Result<f64> {
    if string.n_qubits() > state.n_qubits() {
        return Err(Error::DimensionMismatch { left: string.n_qubits(), right: state.n_qubits() });
    }
    let amps = state.amplitudes();
    let x = string.x_mask() as usize;
    let value: Complex64 =
        amps.iter().enumerate().map(|(i, a)| amps[i ^ x].conj() * string.phase_on(i as u64) * a).sum();
    if value.im.abs() > IMAG_TOL {
        return Err(Error::NonHermitianExpectation { imag: value.im });
    }
    Ok(value.re.clamp(-1.0, 1.0))
}

/// `Σ_j a_j ⟨ψ|P_j|ψ⟩`.
pub fn exact_observable_value(state: &StateVector, obs: &Observable) -> Result<f64> {
    obs.terms.iter().try_fold(0.0, |acc, t| Ok(acc + t.coefficient * exact_expectation(state, &t.string)?))
}

/// Per-term exact means `⟨P_j⟩`.
pub fn exact_means(state: &StateVector, obs: &Observable) -> Result<Vec<f64>> {
    obs.terms.iter().map(|t| exact_expectation(state, &t.string)).collect()
}

/// Random instance generators.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorMode {
    /// Every term has the same coefficient and the same mean.
    ///
    /// The state is the product `⊗ R_y(θ)|0⟩` with `cos θ = mean^{1/k}` and each
    /// string is `Z` on a distinct set of `k = support_size` qubits, so every
    /// `⟨P_j⟩` equals `mean` up to rounding.
    EqualMean { coefficient: f64, mean: f64, support_size: usize },
    /// Distinct uniformly random non-identity strings with coefficients of
    /// random sign and magnitude uniform in `[min_magnitude, max_magnitude]`,
    /// measured on a random brick circuit of the given depth.
    Uniform { min_magnitude: f64, max_magnitude: f64, depth: usize },
}

/// An observable together with the circuit preparing the state it is measured on.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub observable: Observable,
    pub prep: PreparationCircuit,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Generate a reproducible instance with `n_terms` terms on `n_qubits` qubits.
pub fn random_observable(n_qubits: usize, n_terms: usize, mode: &GeneratorMode, seed: u64) -> Result<Instance> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::InvalidParameter(format!("qubit count {n_qubits} outside 1..={MAX_QUBITS}")));
    }
    if n_terms == 0 {
        return Err(Error::EmptyObservable);
    }
    let mut rng = rng::stream(seed, 0);
    match *mode {
        GeneratorMode::EqualMean { coefficient, mean, support_size } => {
            if !(mean > 0.0 && mean <= 1.0) {
                return Err(Error::InvalidParameter(format!("equal-mean generator needs mean in (0, 1], got {mean}")));
            }
            if support_size == 0 || support_size > n_qubits {
                return Err(Error::InvalidParameter(format!("support size {support_size} for {n_qubits} qubits")));
            }
            let available = binomial(n_qubits, support_size);
            if (n_terms as u128) > available {
                return Err(Error::TooManyTerms { requested: n_terms, available: available as usize });
            }
            let mut supports: Vec<u64> =
                (0..1u64 << n_qubits).filter(|m| m.count_ones() as usize == support_size).collect();
            supports.shuffle(&mut rng);
            let terms = supports[..n_terms]
                .iter()
                .map(|&z| PauliTerm::new(coefficient, PauliString { n_qubits, x: 0, z }))
                .collect::<Result<Vec<_>>>()?;
            let theta = mean.powf(1.0 / support_size as f64).acos();
            let gates = (0..n_qubits).map(|q| GateSpec::single(q, ry(theta))).collect();
            Ok(Instance {
                observable: Observable::new(n_qubits, terms)?,
                prep: PreparationCircuit { n_qubits, gates, seed: Some(seed) },
            })
        }
        GeneratorMode::Uniform { min_magnitude, max_magnitude, depth } => {
            if !(min_magnitude > 0.0 && max_magnitude >= min_magnitude && max_magnitude.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "coefficient magnitudes [{min_magnitude}, {max_magnitude}]"
                )));
            }
            let available = 4u128.pow(n_qubits as u32) - 1;
            if (n_terms as u128) > available {
                return Err(Error::TooManyTerms { requested: n_terms, available: available as usize });
            }
            let strings = distinct_strings(n_qubits, n_terms, available, &mut rng);
            let terms = strings
                .into_iter()
                .map(|s| {
                    let mag = rng.random_range(min_magnitude..=max_magnitude);
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    PauliTerm::new(sign * mag, s)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut prep = PreparationCircuit::random(n_qubits, depth, &mut rng);
            prep.seed = Some(seed);
            Ok(Instance { observable: Observable::new(n_qubits, terms)?, prep })
        }
    }
}

fn string_from_code(n_qubits: usize, code: u64) -> PauliString {
    // two bits per qubit: 00 I, 01 X, 10 Z, 11 Y
    let (mut x, mut z) = (0, 0);
    for q in 0..n_qubits {
        let c = (code >> (2 * q)) & 3;
        x |= (c & 1) << q;
        z |= ((c >> 1) & 1) << q;
    }
    PauliString { n_qubits, x, z }
}

fn distinct_strings<R: Rng + ?Sized>(n_qubits: usize, n: usize, available: u128, rng: &mut R) -> Vec<PauliString> {
    if (n as u128) * 2 > available {
        let mut all: Vec<u64> = (1..=available as u64).collect();
        all.shuffle(rng);
        return all[..n].iter().map(|&c| string_from_code(n_qubits, c)).collect();
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let code = rng.random_range(1..=available as u64);
        if seen.insert(code) {
            out.push(string_from_code(n_qubits, code));
        }
    }
    out
}

/// Outcome of [`validate_encodable`].
#[derive(Debug, Clone, PartialEq)]
pub struct EncodabilityReport {
    pub feasible: bool,
    /// Largest ε with `|a_j|√ε ≤ 1/2` for every term.
    pub max_feasible_epsilon: f64,
    /// Indices of terms violating the bound at the requested ε.
    pub violations: Vec<usize>,
}

/// Check that every dressing root exists at strength `epsilon`.
///
/// `|a|√ε ≤ 1/2` is required both for the dressing amplitude and for the
/// encoded cosine `2√ε|a⟨P⟩|` to stay in the arccos domain.
pub fn validate_encodable(obs: &Observable, epsilon: f64) -> EncodabilityReport {
    const TOL: f64 = 1e-12;
    let max_a = obs.terms.iter().map(|t| t.coefficient.abs()).fold(0.0, f64::max);
    let max_feasible_epsilon = 1.0 / (4.0 * max_a * max_a);
    let violations: Vec<usize> = obs
        .terms
        .iter()
        .enumerate()
        .filter(|(_, t)| t.coefficient.abs() * epsilon.sqrt() > 0.5 + TOL)
        .map(|(k, _)| k)
        .collect();
    EncodabilityReport { feasible: violations.is_empty() && epsilon > 0.0 && epsilon < 1.0, max_feasible_epsilon, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::{hadamard, pauli_x, pauli_y, pauli_z, identity2, Matrix2};
    use approx::assert_abs_diff_eq;

    fn letter_matrix(c: char) -> Matrix2 {
        match c {
            'X' => pauli_x(),
            'Y' => pauli_y(),
            'Z' => pauli_z(),
            _ => identity2(),
        }
    }

    #[test]
    fn bitmask_matches_kronecker_on_two_qubits() {
        let state = PreparationCircuit::seeded(2, 2, 11).prepare().unwrap();
        for a in "IXYZ".chars() {
            for b in "IXYZ".chars() {
                let letters: String = [a, b].iter().collect();
                let p = PauliString::from_letters(&letters).unwrap();
                // qubit 1 is the most significant tensor factor
                let (ma, mb) = (letter_matrix(a), letter_matrix(b));
                let dense = |r: usize, c: usize| mb[r >> 1][c >> 1] * ma[r & 1][c & 1];
                let mut applied = state.clone();
                applied.apply(&GateSpec::Pauli(p)).unwrap();
                for r in 0..4 {
                    let expect: Complex64 = (0..4).map(|c| dense(r, c) * state.amplitudes()[c]).sum();
                    assert!((expect - applied.amplitudes()[r]).norm() < 1e-12, "{letters} row {r}");
                }
            }
        }
    }

    #[test]
    fn parse_examples() {
        let obs = parse_observable("2\n0.5 XZ\n-0.25 IY").unwrap();
        assert_eq!((obs.n_qubits(), obs.len()), (2, 2));
        let merged = parse_observable("1\n1.0 X\n2.0 X").unwrap();
        assert_eq!(merged.len(), 1);
        assert_eq!(merged.terms()[0].coefficient, 3.0);
        match parse_observable("2\n# comment\n1.0 XQ\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_observable("2\n1.0 XZY"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_observable("1\n1.0 X\n-1.0 X"), Err(Error::EmptyObservable)));
    }

    #[test]
    fn text_round_trip() {
        let obs = parse_observable("3\n0.1 XYZ\n-1e-3 IIZ\n0.3333333333333333 YYI\n").unwrap();
        assert_eq!(parse_observable(&to_text(&obs)).unwrap(), obs);
    }

    #[test]
    fn simple_expectations() {
        let one = StateVector::basis(1, 1).unwrap();
        assert_eq!(exact_expectation(&one, &PauliString::from_letters("Z").unwrap()).unwrap(), -1.0);
        let s = PreparationCircuit::seeded(3, 2, 5).prepare().unwrap();
        assert_abs_diff_eq!(exact_expectation(&s, &PauliString::identity(3)).unwrap(), 1.0, epsilon = 1e-12);
        let mut plus = StateVector::zero(1).unwrap();
        plus.apply(&GateSpec::single(0, hadamard())).unwrap();
        assert_abs_diff_eq!(exact_expectation(&plus, &PauliString::from_letters("X").unwrap()).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn observable_linearity() {
        let s = PreparationCircuit::seeded(2, 2, 9).prepare().unwrap();
        let z = exact_expectation(&s, &PauliString::from_letters("ZI").unwrap()).unwrap();
        let obs = parse_observable("2\n0.5 ZI\n0.5 ZI").unwrap();
        assert_abs_diff_eq!(exact_observable_value(&s, &obs).unwrap(), z, epsilon = 1e-14);
        let id = parse_observable("2\n1.0 II").unwrap();
        assert_abs_diff_eq!(exact_observable_value(&s, &id).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn generators() {
        let mode = GeneratorMode::Uniform { min_magnitude: 0.1, max_magnitude: 1.0, depth: 2 };
        let a = random_observable(4, 20, &mode, 3).unwrap();
        assert_eq!(a, random_observable(4, 20, &mode, 3).unwrap());
        assert_eq!(a.observable.len(), 20);
        assert!(a.observable.terms().iter().all(|t| !t.string.is_identity()));
        assert!(matches!(random_observable(1, 4, &mode, 0), Err(Error::TooManyTerms { .. })));
        // every non-identity string of one qubit
        assert_eq!(random_observable(1, 3, &mode, 0).unwrap().observable.len(), 3);

        let eq = GeneratorMode::EqualMean { coefficient: 1.0, mean: 0.5, support_size: 3 };
        let inst = random_observable(6, 8, &eq, 1).unwrap();
        let state = inst.prep.prepare().unwrap();
        let means = exact_means(&state, &inst.observable).unwrap();
        let spread = means.iter().cloned().fold(f64::MIN, f64::max) - means.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread <= 0.05);
        assert_abs_diff_eq!(means[0], 0.5, epsilon = 1e-12);
        assert!(matches!(random_observable(4, 5, &eq, 1), Err(Error::TooManyTerms { .. })));
    }

    #[test]
    fn encodability() {
        let one = parse_observable("1\n1.0 Z").unwrap();
        assert!(validate_encodable(&one, 0.25).feasible);
        let two = parse_observable("1\n2.0 Z").unwrap();
        let r = validate_encodable(&two, 0.25);
        assert!(!r.feasible);
        assert_abs_diff_eq!(r.max_feasible_epsilon, 1.0 / 16.0);
        let small = parse_observable("2\n0.1 ZI\n0.1 IZ").unwrap();
        assert!(validate_encodable(&small, 0.01).feasible);
    }
}
