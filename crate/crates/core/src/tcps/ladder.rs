//! Multi-scale readout for sums whose phase wraps several times.
//!
//! Level `l` encodes at scale `k_l = 2^l·k₀` (strength `ε_l = (k_l/2)²`), so
//! its corrected phase `ψ_l ≈ k_l·S` for the weighted sum `S`. Level 0 is
//! unwrapped around the sampled reference; each later level only has to
//! resolve `S` inside a window of half-width `π/k_l` around the previous
//! level's value, and halves the uncertainty of the one before.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use crate::error::{Error, Result};
use crate::ledger::ResourceLedger;
use crate::pauli::Observable;
use crate::statevector::{PreparationCircuit, StateVector};
use crate::tcps::estimate::EncodingSetup;
use crate::tcps::memory::MemoryMode;
use crate::tcps::readout::{kitaev_readout, wrap_centered};

#[derive(Debug, Clone, PartialEq)]
pub struct LadderConfig {
    pub alpha: u64,
    pub gamma: u64,
    /// Finest level index `d_L`; levels run `0..=depth`.
    pub depth: u32,
    /// Scale `k₀` of level 0, so that level `l` encodes with `2√ε_l = 2^l k₀`.
    pub base_scale: f64,
}

impl LadderConfig {
    pub fn new(alpha: u64, gamma: u64, depth: u32, base_scale: f64) -> Result<Self> {
        if alpha < 3 || gamma < 1 {
            return Err(Error::InvalidParameter(format!("ladder needs alpha ≥ 3 and gamma ≥ 1, got {alpha}, {gamma}")));
        }
        if base_scale.is_nan() || base_scale <= 0.0 {
            return Err(Error::InvalidParameter(format!("ladder base scale {base_scale} must be positive")));
        }
        Ok(Self { alpha, gamma, depth, base_scale })
    }

    /// `ceil(log₂(1/η))`.
    pub fn depth_for(eta: f64) -> u32 {
        (1.0 / eta).log2().ceil().max(0.0) as u32
    }

    pub fn scale(&self, level: u32) -> f64 {
        self.base_scale * 2f64.powi(level as i32)
    }

    pub fn epsilon(&self, level: u32) -> f64 {
        let k = self.scale(level);
        k * k / 4.0
    }

    /// `M_l = α + γ(d_L + 1 − l)` repetitions per readout frame.
    pub fn repetitions_per_frame(&self, level: u32) -> u64 {
        self.alpha + self.gamma * (self.depth + 1 - level) as u64
    }

    pub fn total_repetitions(&self) -> u64 {
        (0..=self.depth).map(|l| 2 * self.repetitions_per_frame(l)).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecord {
    pub level: u32,
    pub scale: f64,
    pub epsilon: f64,
    pub repetitions_per_frame: u64,
    pub phase: f64,
    /// Corrected phase modulo 2π.
    pub corrected: f64,
    /// Wrapped offset from the previous level's prediction.
    pub residual: f64,
    /// Estimate of the weighted sum after this level.
    pub estimate: f64,
    pub resampled: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderResult {
    pub estimate: f64,
    pub levels: Vec<LevelRecord>,
}

/// Largest residual accepted without re-sampling a level.
pub const WINDOW_TOLERANCE: f64 = FRAC_PI_2;

/// Run all levels. `encoded` lists `(term, orientation)`; `corr` holds the
/// `(a_j, mean_j)` correction estimates of the same terms.
#[allow(clippy::too_many_arguments)]
pub fn ladder_estimate<R: Rng + ?Sized>(
    prep: &PreparationCircuit,
    state: &StateVector,
    obs: &Observable,
    encoded: &[(usize, f64)],
    corr: &[(f64, f64)],
    config: &LadderConfig,
    sign_rounds: u64,
    mode: MemoryMode,
    rng: &mut R,
    ledger: &mut ResourceLedger,
) -> Result<LadderResult> {
    let abs_sum: f64 = corr.iter().map(|(a, _)| a.abs()).sum();
    if config.base_scale * abs_sum >= 2.0 * PI {
        return Err(Error::InvalidParameter(format!(
            "ladder base scale {} times Σ|a| = {abs_sum} reaches 2π",
            config.base_scale
        )));
    }
    let max_a = corr.iter().map(|(a, _)| a.abs()).fold(0.0, f64::max);
    if config.scale(config.depth) * max_a > 1.0 + 1e-12 {
        return Err(Error::Feasibility { term: 0, epsilon: config.epsilon(config.depth) });
    }
    let reference: f64 = corr.iter().map(|(a, m)| a * m).sum();

    let mut levels = Vec::with_capacity(config.depth as usize + 1);
    let mut previous = reference;
    for level in 0..=config.depth {
        let k = config.scale(level);
        let epsilon = config.epsilon(level);
        let reps = config.repetitions_per_frame(level);
        let setup = EncodingSetup::new(prep, state, obs, encoded, epsilon, sign_rounds, mode)?;
        let n_signed = setup.n_signed();
        // (asin y − y) summed with the coefficient signs, at this level's scale
        let mut offset = 0.0;
        for &(a, m) in corr {
            let y = k * a.abs() * m;
            if y.abs() >= 1.0 {
                return Err(Error::CorrectionDomain { x: y.abs() });
            }
            offset += a.signum() * (y.asin() - y);
        }

        let attempt = |rng: &mut R, ledger: &mut ResourceLedger| -> Result<Option<(f64, f64, f64)>> {
            let counts = setup.run_encoding_round(2 * reps, rng, ledger)?;
            let phase = match kitaev_readout(&counts) {
                Ok(p) => p,
                Err(Error::IndeterminatePhase) => return Ok(None),
                Err(e) => return Err(e),
            };
            let corrected = n_signed * FRAC_PI_2 - phase - offset;
            let residual = wrap_centered(corrected - k * previous);
            Ok(Some((phase, corrected, residual)))
        };

        let mut resampled = false;
        let mut outcome = attempt(rng, ledger)?;
        if outcome.is_none_or(|(_, _, r)| r.abs() > WINDOW_TOLERANCE) {
            resampled = true;
            outcome = attempt(rng, ledger)?;
        }
        let (phase, corrected, residual) = match outcome {
            Some(o) if o.2.abs() <= WINDOW_TOLERANCE => o,
            other => return Err(Error::LadderWindow { level: level as usize, residual: other.map_or(f64::NAN, |o| o.2) }),
        };
        let estimate = previous + residual / k;
        levels.push(LevelRecord {
            level,
            scale: k,
            epsilon,
            repetitions_per_frame: reps,
            phase,
            corrected: corrected.rem_euclid(2.0 * PI),
            residual,
            estimate,
            resampled,
        });
        previous = estimate;
    }
    Ok(LadderResult { estimate: previous, levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule() {
        let c = LadderConfig::new(3, 1, 3, 0.125).unwrap();
        assert_eq!(c.repetitions_per_frame(0), 7);
        assert_eq!(c.repetitions_per_frame(3), 4);
        assert_eq!(c.scale(3), 1.0);
        assert_eq!(c.epsilon(3), 0.25);
        assert_eq!(LadderConfig::depth_for(0.125), 3);
        assert_eq!(LadderConfig::depth_for(0.1), 4);
        assert!(LadderConfig::new(2, 1, 3, 0.1).is_err());
    }
}
