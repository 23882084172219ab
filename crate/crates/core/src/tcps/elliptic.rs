//! Complete elliptic integral of the first kind, parameter convention `K(t)`
//! with `t = k²`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `K(t) = ∫₀^{π/2} dθ / √(1 − t sin²θ)` through the arithmetic-geometric mean.
///
/// ```
/// use tcps_core::tcps::elliptic::elliptic_k;
/// assert!((elliptic_k(0.0).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
/// ```
pub fn elliptic_k(t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::EllipticDomain { t });
    }
    let mut a = 1.0f64;
    let mut b = (1.0 - t).sqrt();
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    Ok(PI / (2.0 * a))
}

/// `Σ_{n≥1} ((2n)!)² tⁿ / (2^{4n} (n!)⁴)`, which equals `(2/π)K(t) − 1`.
pub fn elliptic_series(t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::EllipticDomain { t });
    }
    // ratio of consecutive coefficients: ((2n−1)/(2n))²
    let mut coeff = 1.0f64;
    let mut power = 1.0f64;
    let mut sum = 0.0;
    for n in 1..=10_000u32 {
        let r = (2 * n - 1) as f64 / (2 * n) as f64;
        coeff *= r * r;
        power *= t;
        let term = coeff * power;
        sum += term;
        if term < 1e-17 * sum.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(sum)
}

/// Two-term expansion `π/2 + (π/8)·t/(1−t) − (π/16)·t²/(1−t)`.
pub fn elliptic_k_asymptotic(t: f64) -> f64 {
    PI / 2.0 + PI / 8.0 * t / (1.0 - t) - PI / 16.0 * t * t / (1.0 - t)
}
