//! Exponentially scaled modified Bessel functions of the first kind and
//! log-factorials.

use crate::error::{Error, Result};

/// Largest order accepted by [`bessel_ie_scaled`].
pub const MAX_BESSEL_ORDER: usize = 20_000;

/// `[e^{-τ} I_0(τ), …, e^{-τ} I_{k_max}(τ)]` for `τ ≥ 0`.
///
/// All entries lie in `[0, 1]`, so large arguments do not overflow. Orders far
/// beyond `τ` underflow to zero.
///
/// For `τ < 1` every order is summed from its power series. Otherwise Miller's
/// backward recurrence `I_{k-1} = (2k/τ) I_k + I_{k+1}` produces the whole
/// vector in one pass, normalized with `I_0 + 2 Σ_{k≥1} I_k = e^τ`.
pub fn bessel_ie_scaled(k_max: usize, tau: f64) -> Result<Vec<f64>> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::NegativeScale(tau));
    }
    if k_max > MAX_BESSEL_ORDER {
        return Err(Error::OrderCap {
            order: k_max,
            cap: MAX_BESSEL_ORDER,
        });
    }
    if tau == 0.0 {
        let mut out = vec![0.0; k_max + 1];
        out[0] = 1.0;
        return Ok(out);
    }
    if tau < 1.0 {
        return Ok((0..=k_max).map(|k| series_scaled(k, tau)).collect());
    }
    Ok(miller_scaled(k_max, tau))
}

/// Backward-recurrence start order.
fn miller_start(k_max: usize, tau: f64) -> usize {
    let base = k_max + (10.0 + 2.0 * ((k_max as f64) + tau).sqrt()).ceil() as usize;
    // The normalization sum needs every order that still carries weight
    // relative to I_0, which for large τ reaches ~ several √τ past k_max = 0.
    let norm = (14.0 * tau.sqrt() + 30.0).ceil() as usize;
    base.max(norm)
}

fn miller_scaled(k_max: usize, tau: f64) -> Vec<f64> {
    const RESCALE_AT: f64 = 1e250;
    const RESCALE_BY: f64 = 1e-250;

    let start = miller_start(k_max, tau);
    let two_over_tau = 2.0 / tau;
    let mut out = vec![0.0; k_max + 1];

    let mut above = 0.0; // f_{k+1}
    let mut current = 1e-280; // f_k at k = start
                              // 2 Σ_{k≥1} f_k, accumulated from the top
    let mut tail = 0.0;
    let mut k = start;
    while k > 0 {
        if k <= k_max {
            out[k] = current;
        }
        tail += 2.0 * current;
        let below = (k as f64) * two_over_tau * current + above;
        above = current;
        current = below;
        k -= 1;
        if current > RESCALE_AT {
            current *= RESCALE_BY;
            above *= RESCALE_BY;
            tail *= RESCALE_BY;
            for v in out.iter_mut().skip(k + 1) {
                *v *= RESCALE_BY;
            }
        }
    }
    out[0] = current;
    let norm = current + tail;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// `e^{-τ} Σ_i (τ/2)^{k+2i} / (i! (k+i)!)`, summed until the terms stop
/// contributing.
fn series_scaled(k: usize, tau: f64) -> f64 {
    let half = 0.5 * tau;
    let lead = ((k as f64) * half.ln() - log_factorial(k) - tau).exp();
    if lead == 0.0 {
        return 0.0;
    }
    let q = half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut i = 0usize;
    loop {
        i += 1;
        term *= q / ((i as f64) * ((k + i) as f64));
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    lead * sum
}

/// `ln(k!)`; exact integer factorial up to `k = 20`, Stirling series above.
pub fn log_factorial(k: usize) -> f64 {
    if k <= 20 {
        let f: u64 = (1..=k as u64).product();
        return (f as f64).ln();
    }
    let n = k as f64;
    let inv = 1.0 / n;
    let inv2 = inv * inv;
    // 1/(12n) - 1/(360n³) + 1/(1260n⁵) - 1/(1680n⁷)
    let correction =
        inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    n * n.ln() - n + 0.5 * (2.0 * std::f64::consts::PI * n).ln() + correction
}
