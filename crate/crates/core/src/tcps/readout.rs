//! Two-frame phase readout of the memory qubit.
//!
//! With memory coherence `c = e^{iΦ}`, an X-frame shot reads 0 with
//! probability `(1 + cos Φ)/2` and a Y-frame shot (phase gate `R_z(π/2)`
//! before the final Hadamard) reads 0 with probability `(1 − sin Φ)/2`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Sign tying the Y-frame statistic to `sin Φ`, fixed by the simulated circuit.
pub const Y_FRAME_SIGN: f64 = 1.0;

const INDETERMINATE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frame {
    /// No phase gate before the final Hadamard.
    X,
    /// `R_z(π/2)` before the final Hadamard.
    Y,
}

impl Frame {
    /// Frame used by repetition `k`: even repetitions read X, odd read Y.
    pub fn for_repetition(k: u64) -> Self {
        if k.is_multiple_of(2) {
            Frame::X
        } else {
            Frame::Y
        }
    }
}

/// Outcome tallies for both frames.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FrameCounts {
    pub x_zeros: u64,
    pub x_total: u64,
    pub y_zeros: u64,
    pub y_total: u64,
}

impl FrameCounts {
    pub fn record(&mut self, frame: Frame, outcome: u8) {
        match frame {
            Frame::X => {
                self.x_total += 1;
                self.x_zeros += u64::from(outcome == 0);
            }
            Frame::Y => {
                self.y_total += 1;
                self.y_zeros += u64::from(outcome == 0);
            }
        }
    }

    pub fn frequencies(&self) -> Option<(f64, f64)> {
        if self.x_total == 0 || self.y_total == 0 {
            return None;
        }
        Some((self.x_zeros as f64 / self.x_total as f64, self.y_zeros as f64 / self.y_total as f64))
    }
}

/// Probability of reading 0 in `frame` given memory coherence `c = 2ρ₁₀`.
pub fn zero_probability(frame: Frame, coherence: num_complex::Complex64) -> f64 {
    match frame {
        Frame::X => 0.5 * (1.0 + coherence.re),
        Frame::Y => 0.5 * (1.0 - Y_FRAME_SIGN * coherence.im),
    }
}

/// Phase from the zero-frequencies of the two frames, in `(−π, π]`.
///
/// ```
/// use tcps_core::tcps::readout::phase_from_frequencies;
/// let phi = std::f64::consts::FRAC_PI_4;
/// let x0 = 0.5 * (1.0 + phi.cos());
/// let y0 = 0.5 * (1.0 - phi.sin());
/// assert!((phase_from_frequencies(x0, y0).unwrap() - phi).abs() < 1e-12);
/// ```
pub fn phase_from_frequencies(x0: f64, y0: f64) -> Result<f64> {
    let c = 2.0 * x0 - 1.0;
    let s = Y_FRAME_SIGN * (1.0 - 2.0 * y0);
    if c.abs() < INDETERMINATE && s.abs() < INDETERMINATE {
        return Err(Error::IndeterminatePhase);
    }
    let phi = s.atan2(c);
    Ok(if phi <= -PI { PI } else { phi })
}

/// Phase estimate from frame counts.
pub fn kitaev_readout(counts: &FrameCounts) -> Result<f64> {
    let (x0, y0) = counts
        .frequencies()
        .ok_or_else(|| Error::InvalidParameter("both readout frames need at least one shot".into()))?;
    phase_from_frequencies(x0, y0)
}

/// `(3 + cos 8Φ)/(4M_q)`.
pub fn readout_variance_prediction(phase: f64, m_q: u64) -> f64 {
    (3.0 + (8.0 * phase).cos()) / (4.0 * m_q as f64)
}

/// First-order variance of the readout with `m_x`, `m_y` shots per frame:
/// `cos⁴Φ/m_y + sin⁴Φ/m_x`. Equals `(3 + cos 4Φ)/(4M)` when both frames get `M`.
pub fn frame_variance(phase: f64, m_x: u64, m_y: u64) -> f64 {
    let (s, c) = phase.sin_cos();
    c.powi(4) / m_y as f64 + s.powi(4) / m_x as f64
}

/// Wrap into `[−π, π)`.
pub fn wrap_centered(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y >= PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// The representative of `angle` modulo 2π closest to `reference`.
pub fn unwrap_near(angle: f64, reference: f64) -> f64 {
    reference + wrap_centered(angle - reference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn corner_cases() {
        assert_eq!(phase_from_frequencies(1.0, 0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(phase_from_frequencies(0.0, 0.5).unwrap(), PI);
        assert!(matches!(phase_from_frequencies(0.5, 0.5), Err(Error::IndeterminatePhase)));
    }

    #[test]
    fn variance_forms() {
        assert_abs_diff_eq!(readout_variance_prediction(0.0, 100), 0.01);
        assert_abs_diff_eq!(readout_variance_prediction(PI / 8.0, 1), 0.5, epsilon = 1e-15);
        for phi in [0.1, 0.7, 2.0] {
            assert_abs_diff_eq!(frame_variance(phi, 10, 10), (3.0 + (4.0 * phi).cos()) / 40.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn unwrapping() {
        assert_abs_diff_eq!(unwrap_near(0.1, 4.0 * PI), 4.0 * PI + 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(unwrap_near(-3.0, 3.5), 2.0 * PI - 3.0, epsilon = 1e-12);
        assert!(wrap_centered(PI) < PI);
    }
}
