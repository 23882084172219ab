//! Rough per-term estimates that decide which terms get encoded.

use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::Observable;
use crate::qee::TermSampler;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    /// `|mean| ∈ [δ, 1−δ]`.
    Encodable,
    /// `|mean| < δ`.
    NearZero,
    /// `|mean| > 1−δ`.
    NearExtremal,
}

impl Classification {
    pub fn of(mean: f64, delta: f64) -> Self {
        let m = mean.abs();
        if m < delta {
            Classification::NearZero
        } else if m > 1.0 - delta {
            Classification::NearExtremal
        } else {
            Classification::Encodable
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Encodable => "encodable",
            Classification::NearZero => "near-zero",
            Classification::NearExtremal => "near-extremal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoughEstimate {
    pub term: usize,
    pub mean: f64,
    pub shots: u64,
    pub classification: Classification,
    /// Sign of the mean, `+1` for a zero mean.
    pub sign: f64,
}

/// Sample every term `n_1` times and classify against `[δ, 1−δ]`.
pub fn boundary_check<R: Rng + ?Sized>(
    sampler: &TermSampler,
    obs: &Observable,
    n_1: u64,
    delta: f64,
    rng: &mut R,
) -> Result<Vec<RoughEstimate>> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must lie in (0, 1/2)")));
    }
    if n_1 == 0 {
        return Err(Error::InvalidParameter("n_1 must be at least 1".into()));
    }
    obs.terms()
        .iter()
        .enumerate()
        .map(|(term, t)| {
            let mean = sampler.sample(&t.string, n_1, rng)?;
            Ok(RoughEstimate {
                term,
                mean,
                shots: n_1,
                classification: Classification::of(mean, delta),
                sign: if mean < 0.0 { -1.0 } else { 1.0 },
            })
        })
        .collect()
}
