//! A priori truncation-error bounds and minimum-order search.
//!
//! All quantities are relative squared errors of `p_K(L') x` against
//! `exp(-τ'L') x` with `L'` scaled to spectrum `[0, 2]`:
//!
//! * `ε_K(x) = ‖exp(-τL)x - p_K(L)x‖² / ‖x‖²`
//! * `η_K(x) = ‖exp(-τL)x - p_K(L)x‖² / ‖exp(-τL)x‖²`
//!
//! Two bound families are provided. The "new" family is built on
//! `g(K, τ) = 2 e^{(τ/2)²/(K+2) - τ} (τ/2)^{K+1} / (K! (K + 1 - τ/2))`, a
//! uniform bound on the truncation error valid for `K > τ/2 - 1`. The
//! baseline family uses an older piecewise truncation estimate `E(K)`.
//! Each comes in a generic form (any signal, factor `e^{4τ}`) and a
//! signal-specific form (factor `n‖x‖² / a₁²`, requires `a₁ = Σ xᵢ ≠ 0`).
//!
//! Everything is evaluated in the log domain; `K` reaches several thousand
//! for large scales.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::oracle::DenseSpectrum;
use crate::sparse::{GraphSignal, SparseSymMatrix};
use crate::special::{bessel_ie_scaled, log_factorial, MAX_BESSEL_ORDER};

/// Hard cap on searched orders.
pub const MAX_ORDER: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// `η_K ≤ g²(K, τ) e^{4τ}`
    NewGeneric,
    /// `η_K ≤ g²(K, τ) n‖x‖² / a₁²`
    NewSpecific,
    /// `η_K ≤ 4 E(K)² e^{4τ}`
    BaselineGeneric,
    /// `η_K ≤ 4 E(K)² n‖x‖² / a₁²`
    BaselineSpecific,
}

impl BoundKind {
    pub const ALL: [BoundKind; 4] = [
        BoundKind::NewGeneric,
        BoundKind::NewSpecific,
        BoundKind::BaselineGeneric,
        BoundKind::BaselineSpecific,
    ];

    pub fn is_specific(self) -> bool {
        matches!(self, BoundKind::NewSpecific | BoundKind::BaselineSpecific)
    }

    pub fn is_new(self) -> bool {
        matches!(self, BoundKind::NewGeneric | BoundKind::NewSpecific)
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::NewGeneric => "new-generic",
            BoundKind::NewSpecific => "new-specific",
            BoundKind::BaselineGeneric => "base-generic",
            BoundKind::BaselineSpecific => "base-specific",
        }
    }

    /// First order the search may start from.
    fn first_order(self, tau: f64) -> usize {
        if self.is_new() {
            (tau / 2.0).floor() as usize + 1
        } else {
            0
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown bound kind `{s}`")))
    }
}

/// Either a fixed bound or automatic choice among the new bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundPolicy {
    #[default]
    Auto,
    Fixed(BoundKind),
}

impl FromStr for BoundPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            Ok(BoundPolicy::Auto)
        } else {
            s.parse().map(BoundPolicy::Fixed)
        }
    }
}

impl fmt::Display for BoundPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundPolicy::Auto => f.write_str("auto"),
            BoundPolicy::Fixed(k) => k.fmt(f),
        }
    }
}

/// Node count, energy and component sum of an input signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalStats {
    n: usize,
    norm_sq: f64,
    a1: f64,
}

impl SignalStats {
    pub fn new(n: usize, norm_sq: f64, a1: f64) -> Result<Self> {
        if !(norm_sq > 0.0) || !norm_sq.is_finite() || !a1.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "signal energy must be positive and finite, got {norm_sq}"
            )));
        }
        Ok(SignalStats { n, norm_sq, a1 })
    }

    pub fn from_signal(x: &GraphSignal) -> Result<Self> {
        Self::new(x.len(), x.norm_sq(), x.sum())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    /// `n‖x‖² / a₁²`, absent when `a₁ = 0`.
    pub fn energy_ratio(&self) -> Option<f64> {
        (self.a1 != 0.0).then(|| self.n as f64 * self.norm_sq / (self.a1 * self.a1))
    }

    fn ln_energy_ratio(&self, kind: BoundKind) -> Result<f64> {
        if self.a1 == 0.0 {
            return Err(Error::ZeroComponentSum(kind.name()));
        }
        Ok((self.n as f64).ln() + self.norm_sq.ln() - 2.0 * self.a1.abs().ln())
    }
}

fn check_new_order(order: usize, tau: f64) -> Result<()> {
    if !(tau >= 0.0) {
        return Err(Error::NegativeScale(tau));
    }
    if (order as f64) <= tau / 2.0 - 1.0 {
        return Err(Error::OrderTooSmall { order, tau });
    }
    Ok(())
}

/// `ln g(K, τ)`; `-∞` at `τ = 0`.
pub fn ln_g_bound(order: usize, tau: f64) -> Result<f64> {
    check_new_order(order, tau)?;
    if tau == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let half = 0.5 * tau;
    let k = order as f64;
    Ok(
        std::f64::consts::LN_2 + half * half / (k + 2.0) - tau + (k + 1.0) * half.ln()
            - log_factorial(order)
            - (k + 1.0 - half).ln(),
    )
}

/// Uniform bound `‖h_τ - p_K‖_∞ ≤ g(K, τ)` on `[0, 2]`, for `K > τ/2 - 1`.
pub fn g_bound(order: usize, tau: f64) -> Result<f64> {
    ln_g_bound(order, tau).map(f64::exp)
}

/// `b = 2 / (1 + √5)`
pub fn baseline_b() -> f64 {
    2.0 / (1.0 + 5f64.sqrt())
}

/// `d = e^b / (2 + √5)`
pub fn baseline_d() -> f64 {
    baseline_b().exp() / (2.0 + 5f64.sqrt())
}

/// `ln E(K)`; first branch for `K ≤ 2τ` (inclusive), geometric tail above.
pub fn ln_baseline_e(order: usize, tau: f64) -> f64 {
    let b = baseline_b();
    let d = baseline_d();
    let k = order as f64;
    let ln_tail = -(1.0 - d).ln();
    if k > 2.0 * tau {
        return k * d.ln() + ln_tail;
    }
    let gauss = if tau == 0.0 {
        f64::NEG_INFINITY
    } else {
        -b * (k + 1.0) * (k + 1.0) / (2.0 * tau)
            + (1.0 + (std::f64::consts::PI * tau / 2.0 / b).sqrt()).ln()
    };
    let geom = 2.0 * tau * d.ln() + ln_tail;
    log_add_exp(gauss, geom)
}

pub fn baseline_e(order: usize, tau: f64) -> f64 {
    ln_baseline_e(order, tau).exp()
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln` of the bound on `η_K(x)` for the given kind.
pub fn ln_bound_value(
    kind: BoundKind,
    order: usize,
    tau: f64,
    stats: Option<&SignalStats>,
) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::NegativeScale(tau));
    }
    let factor = if kind.is_specific() {
        stats
            .ok_or(Error::MissingStats(kind.name()))?
            .ln_energy_ratio(kind)?
    } else {
        4.0 * tau
    };
    let core = if kind.is_new() {
        2.0 * ln_g_bound(order, tau)?
    } else {
        4f64.ln() + 2.0 * ln_baseline_e(order, tau)
    };
    Ok(core + factor)
}

/// Bound on `η_K(x)` at effective scale `tau`. Never NaN; may be `+∞` or `0`
/// outside the floating-point range.
pub fn bound_value(
    kind: BoundKind,
    order: usize,
    tau: f64,
    stats: Option<&SignalStats>,
) -> Result<f64> {
    ln_bound_value(kind, order, tau, stats).map(f64::exp)
}

/// Bound on `ε_K(x)`: `g²(K, τ)`.
pub fn input_energy_bound(order: usize, tau: f64) -> Result<f64> {
    ln_g_bound(order, tau).map(|l| (2.0 * l).exp())
}

/// Picks the sharper new bound: specific when `a₁ ≠ 0` and
/// `τ ≥ ¼ ln(n‖x‖² / a₁²)` (ties go to specific), generic otherwise.
pub fn select_bound(tau_eff: f64, stats: &SignalStats) -> BoundKind {
    match stats.energy_ratio() {
        Some(ratio) if tau_eff >= 0.25 * ratio.ln() => BoundKind::NewSpecific,
        _ => BoundKind::NewGeneric,
    }
}

/// Resolves a policy to a concrete kind. `Auto` without stats is generic.
pub fn resolve_policy(policy: BoundPolicy, tau_eff: f64, stats: Option<&SignalStats>) -> BoundKind {
    match (policy, stats) {
        (BoundPolicy::Fixed(kind), _) => kind,
        (BoundPolicy::Auto, Some(s)) => select_bound(tau_eff, s),
        (BoundPolicy::Auto, None) => BoundKind::NewGeneric,
    }
}

/// Smallest `K` whose bound is `≤ tol`, by linear scan from the first admissible
/// order (`⌊τ/2⌋ + 1` for new bounds, `0` for the baseline). `τ = 0` needs no
/// terms beyond the constant and returns `0` for every kind.
pub fn min_order(
    kind: BoundKind,
    tau_eff: f64,
    tol: f64,
    stats: Option<&SignalStats>,
) -> Result<usize> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if !(tau_eff >= 0.0) || !tau_eff.is_finite() {
        return Err(Error::NegativeScale(tau_eff));
    }
    if tau_eff == 0.0 {
        if kind.is_specific() {
            stats
                .ok_or(Error::MissingStats(kind.name()))?
                .ln_energy_ratio(kind)?;
        }
        return Ok(0);
    }
    let ln_tol = tol.ln();
    let start = kind.first_order(tau_eff);
    for order in start..=MAX_ORDER {
        if ln_bound_value(kind, order, tau_eff, stats)? <= ln_tol {
            return Ok(order);
        }
    }
    Err(Error::ToleranceUnreachable {
        tol,
        tau: tau_eff,
        cap: MAX_ORDER,
    })
}

/// Smallest `K` whose measured `η_K(x)` is `≤ tol`, from a dense
/// eigendecomposition of `l` (`n ≤` [`crate::oracle::DENSE_LIMIT`]).
///
/// The polynomial is applied to `L' = 2L / lambda_max` at `τ' = lambda_max τ / 2`,
/// exactly as the diffusion routines do.
pub fn true_min_order(
    l: &SparseSymMatrix,
    x: &GraphSignal,
    tau: f64,
    tol: f64,
    lambda_max: f64,
) -> Result<usize> {
    let spectrum = DenseSpectrum::of(l)?;
    true_min_order_with_spectrum(&spectrum, x, tau, tol, lambda_max)
}

/// [`true_min_order`] with a precomputed spectrum.
pub fn true_min_order_with_spectrum(
    spectrum: &DenseSpectrum,
    x: &GraphSignal,
    tau: f64,
    tol: f64,
    lambda_max: f64,
) -> Result<usize> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if !(tau >= 0.0) {
        return Err(Error::NegativeScale(tau));
    }
    if tau == 0.0 || lambda_max == 0.0 {
        return Ok(0);
    }
    let z = spectrum.project(x.values())?;
    let tau_eff = lambda_max * tau / 2.0;
    let scaled: Vec<f64> = spectrum
        .eigenvalues()
        .iter()
        .map(|&l| 2.0 * l / lambda_max)
        .collect();
    let exact: Vec<f64> = scaled
        .iter()
        .zip(&z)
        .map(|(&l, &zi)| (-tau_eff * l).exp() * zi)
        .collect();
    let out_energy: f64 = exact.iter().map(|w| w * w).sum();
    if out_energy == 0.0 {
        return Ok(0);
    }

    let eta = |partial: &[f64]| -> f64 {
        partial
            .iter()
            .zip(&exact)
            .map(|(p, w)| (w - p) * (w - p))
            .sum::<f64>()
            / out_energy
    };

    let mut coeff_cap =
        ((2.0 * tau_eff + 20.0 * tau_eff.sqrt()).ceil() as usize + 64).min(MAX_ORDER);
    let mut coeffs = signed_coefficients(coeff_cap, tau_eff)?;

    // per-eigenvalue recurrence state: T_{k-1}(t), T_k(t), running p_k
    let ts: Vec<f64> = scaled.iter().map(|l| l - 1.0).collect();
    let mut prev = vec![1.0; ts.len()];
    let mut curr = ts.clone();
    let mut partial: Vec<f64> = z.iter().map(|zi| 0.5 * coeffs[0] * zi).collect();
    if eta(&partial) <= tol {
        return Ok(0);
    }
    for order in 1..=MAX_ORDER {
        if order > coeff_cap {
            coeff_cap = (2 * coeff_cap).min(MAX_ORDER);
            coeffs = signed_coefficients(coeff_cap, tau_eff)?;
        }
        if order >= 2 {
            for ((p, c), t) in prev.iter_mut().zip(curr.iter_mut()).zip(&ts) {
                let next = 2.0 * t * *c - *p;
                *p = *c;
                *c = next;
            }
        }
        let ck = coeffs[order];
        for ((s, c), zi) in partial.iter_mut().zip(&curr).zip(&z) {
            *s += ck * c * zi;
        }
        if eta(&partial) <= tol {
            return Ok(order);
        }
    }
    Err(Error::ToleranceUnreachable {
        tol,
        tau: tau_eff,
        cap: MAX_ORDER,
    })
}

fn signed_coefficients(order: usize, tau: f64) -> Result<Vec<f64>> {
    let ie = bessel_ie_scaled(order.min(MAX_BESSEL_ORDER), tau)?;
    Ok(ie
        .iter()
        .enumerate()
        .map(|(k, v)| if k % 2 == 0 { 2.0 * v } else { -2.0 * v })
        .collect())
}
