//! Inverting the accumulated phase, the arcsine correction, and the variance
//! model used to choose the encoding strength.
//!
//! Term `j` contributes `τ_j φ̃_j` to the memory phase with `cos φ̃_j = x_j`.
//! Because `arccos x = π/2 − asin x`,
//!
//! ```text
//! N_s π/2 − Φ̃ = Σ_j τ_j asin(x_j) ≈ 2√ε Σ_j a_j⟨P_j⟩,   N_s = Σ_j τ_j
//! ```
//!
//! so the raw inversion `(N_s π − 2Φ̃)/(4√ε)` overshoots by the odd
//! higher-order part of `asin`, which is estimated from separately sampled
//! means and subtracted.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2};

use crate::error::{Error, Result};
use crate::tcps::elliptic::elliptic_k;
use crate::tcps::readout::frame_variance;

/// Series terms are dropped once they contribute less than this, relative to the sum.
pub const SERIES_RELATIVE_CUTOFF: f64 = 1e-14;
pub const SERIES_MAX_ORDER: u32 = 60;

/// `(N_s·π − 2Φ)/(4√ε)`.
///
/// ```
/// use tcps_core::tcps::taylor::taylor_invert;
/// let raw = taylor_invert(0.1f64.acos(), 1.0, 0.01);
/// assert!((raw - 0.500837).abs() < 1e-6);
/// ```
pub fn taylor_invert(phase: f64, n_signed: f64, epsilon: f64) -> f64 {
    (n_signed * std::f64::consts::PI - 2.0 * phase) / (4.0 * epsilon.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectionMode {
    Series,
    ClosedForm,
}

/// Scaled argument `y_j = 2√ε |a_j| mean_j`; the encoded cosine up to orientation.
pub fn scaled_argument(coefficient: f64, mean: f64, epsilon: f64) -> f64 {
    2.0 * epsilon.sqrt() * coefficient.abs() * mean
}

/// `Σ_j sgn(a_j)·(asin y_j − y_j)/(2√ε)`: the amount the raw inversion overshoots.
///
/// Each pair is `(a_j, mean_j)`. For positive products this is
/// `(1/(2√ε)) Σ_j (asin x_j − x_j)` with `x_j = 2√ε|a_j mean_j|`.
pub fn taylor_correction(terms: &[(f64, f64)], epsilon: f64, mode: CorrectionMode) -> Result<f64> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be positive")));
    }
    let ys: Vec<(f64, f64)> = terms
        .iter()
        .map(|&(a, m)| {
            let y = scaled_argument(a, m, epsilon);
            if y.abs() >= 1.0 {
                Err(Error::CorrectionDomain { x: y.abs() })
            } else {
                Ok((a.signum(), y))
            }
        })
        .collect::<Result<_>>()?;
    let scale = 1.0 / (2.0 * epsilon.sqrt());
    match mode {
        CorrectionMode::ClosedForm => Ok(scale * ys.iter().map(|(s, y)| s * (y.asin() - y)).sum::<f64>()),
        CorrectionMode::Series => {
            // asin y − y = Σ_{n≥1} (2n)!/(4ⁿ (n!)² (2n+1)) y^{2n+1}
            let mut total = 0.0;
            let mut c = 1.0; // (2n)!/(4ⁿ (n!)²)
            for n in 1..=SERIES_MAX_ORDER {
                c *= (2 * n - 1) as f64 / (2 * n) as f64;
                let order = 2 * n as i32 + 1;
                let sum: f64 = ys.iter().map(|(s, y)| s * y.powi(order)).sum();
                let contribution = c / order as f64 * sum;
                total += contribution;
                let bound: f64 = ys.iter().map(|(_, y)| y.abs().powi(order)).sum::<f64>() * c / order as f64;
                if bound <= SERIES_RELATIVE_CUTOFF * total.abs() || bound == 0.0 {
                    break;
                }
            }
            Ok(scale * total)
        }
    }
}

/// Elliptic and simplified variance forms for the corrected estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectedVariance {
    /// `1/(εM_q) + (1/n_c) Σ_j [(2/π)K(16ε²a_j⁴p_j⁴) − 1]·a_j²(1−p_j²)`.
    pub elliptic: f64,
    /// `1/(εM_q) + (ε²/n_c) Σ_j a_j⁶ p_j⁴ (1−p_j²)`.
    pub simplified: f64,
}

pub fn corrected_variance_prediction(
    terms: &[(f64, f64)],
    epsilon: f64,
    m_q: u64,
    n_c_cor: u64,
) -> Result<CorrectedVariance> {
    let readout = 1.0 / (epsilon * m_q as f64);
    let mut elliptic = 0.0;
    let mut simplified = 0.0;
    for (j, &(a, p)) in terms.iter().enumerate() {
        let t = 16.0 * epsilon * epsilon * a.powi(4) * p.powi(4);
        if t >= 1.0 {
            return Err(Error::Feasibility { term: j, epsilon });
        }
        let spread = a * a * (1.0 - p * p);
        elliptic += (FRAC_2_PI * elliptic_k(t)? - 1.0) * spread;
        simplified += a.powi(6) * p.powi(4) * (1.0 - p * p);
    }
    let n = n_c_cor as f64;
    Ok(CorrectedVariance { elliptic: readout + elliptic / n, simplified: readout + epsilon * epsilon * simplified / n })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalEpsilon {
    pub epsilon: f64,
    /// The cube-root value before clamping.
    pub unclamped: f64,
    pub clamped: bool,
}

/// `ε = (n_c/(M_q Σ_j a_j⁶ p_j⁴ (1−p_j²)))^{1/3}`, clamped so that every
/// dressing stays feasible (`|a_j|√ε ≤ 1/2`) and `ε < 1`.
///
/// With `ladder_depth = Some(d)` the denominator is multiplied by `2^{2(d+1)}`.
pub fn optimal_epsilon(
    n_c_cor: u64,
    m_q: u64,
    terms: &[(f64, f64)],
    ladder_depth: Option<u32>,
) -> Result<OptimalEpsilon> {
    if n_c_cor == 0 || m_q == 0 {
        return Err(Error::InvalidParameter("shot counts must be positive".into()));
    }
    let s: f64 = terms.iter().map(|&(a, p)| a.powi(6) * p.powi(4) * (1.0 - p * p)).sum();
    if s.is_nan() || s <= 0.0 {
        return Err(Error::NothingToEncode);
    }
    let ladder = ladder_depth.map_or(1.0, |d| 4f64.powi(d as i32 + 1));
    let unclamped = (n_c_cor as f64 / (m_q as f64 * s * ladder)).cbrt();
    let bound = feasibility_bound(terms);
    let clamped = unclamped > bound;
    Ok(OptimalEpsilon { epsilon: unclamped.min(bound), unclamped, clamped })
}

/// Largest usable strength: `min(1/(4 max a²), 1 − 1e-9)`.
pub fn feasibility_bound(terms: &[(f64, f64)]) -> f64 {
    let max_a = terms.iter().map(|(a, _)| a.abs()).fold(0.0, f64::max);
    (1.0 / (4.0 * max_a * max_a)).min(1.0 - 1e-9)
}

/// Inputs to [`tcps_variance_prediction`].
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceModel<'a> {
    /// `(a_j, ⟨P_j⟩)` of encoded terms.
    pub encoded: &'a [(f64, f64)],
    /// `(a_j, ⟨P_j⟩, shots)` of terms added classically.
    pub classical: &'a [(f64, f64, u64)],
    pub epsilon: f64,
    /// Readout shots per frame.
    pub m_x: u64,
    pub m_y: u64,
    pub n_c_cor: u64,
}

/// The memory phase `Σ_j τ_j arccos(x_j)` with orientations taken from the means.
pub fn accumulated_phase(encoded: &[(f64, f64)], epsilon: f64) -> f64 {
    encoded
        .iter()
        .map(|&(a, p)| {
            let tau = if a * p >= 0.0 { 1.0 } else { -1.0 };
            let x = scaled_argument(a, p, epsilon).abs();
            tau * (FRAC_PI_2 - x.asin())
        })
        .sum()
}

/// First-order variance of the full estimate: readout noise scaled by
/// `1/(4ε)`, noise of the sampled correction, and the classically added terms.
pub fn tcps_variance_prediction(model: &VarianceModel<'_>) -> Result<f64> {
    let phase = accumulated_phase(model.encoded, model.epsilon);
    let readout = if model.encoded.is_empty() {
        0.0
    } else {
        frame_variance(phase, model.m_x, model.m_y) / (4.0 * model.epsilon)
    };
    let mut correction = 0.0;
    for &(a, p) in model.encoded {
        let y = scaled_argument(a, p, model.epsilon);
        if y.abs() >= 1.0 {
            return Err(Error::CorrectionDomain { x: y.abs() });
        }
        let slope = 1.0 / (1.0 - y * y).sqrt() - 1.0;
        correction += a * a * (1.0 - p * p) * slope * slope;
    }
    let classical: f64 = model.classical.iter().map(|&(a, p, n)| a * a * (1.0 - p * p).max(0.0) / n as f64).sum();
    Ok(readout + correction / model.n_c_cor as f64 + classical)
}
