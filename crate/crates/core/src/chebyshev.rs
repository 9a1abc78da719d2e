//! Chebyshev expansion of `λ ↦ exp(-τλ)` on `[0, 2]`.
//!
//! With `t = λ - 1` the expansion reads `½c_0 + Σ_{k≥1} c_k T_k(t)` where
//! `c_k(τ) = 2 (-1)^k e^{-τ} I_k(τ)`. For a PSD operator `L'` with spectrum in
//! `[0, 2]` the basis vectors `T_k(L' - I) x` follow the three-term recurrence
//! and a truncated sum of them approximates `exp(-τL') x`.

use crate::error::{Error, Result};
use crate::sparse::{GraphSignal, SparseSymMatrix};
use crate::special::bessel_ie_scaled;

/// Coefficients `c_0(τ) … c_K(τ)`. `c_0` is stored unhalved.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    tau_eff: f64,
    coeffs: Vec<f64>,
}

impl CoefficientSet {
    pub fn tau_eff(&self) -> f64 {
        self.tau_eff
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    /// `p_K(λ)` by the scalar recurrence on `t = λ - 1`; no domain check.
    pub fn eval(&self, lambda: f64) -> f64 {
        let t = lambda - 1.0;
        let c = &self.coeffs;
        let mut acc = 0.5 * c[0];
        if c.len() == 1 {
            return acc;
        }
        let (mut prev, mut curr) = (1.0, t);
        acc += c[1] * curr;
        for &ck in &c[2..] {
            let next = 2.0 * t * curr - prev;
            prev = curr;
            curr = next;
            acc += ck * curr;
        }
        acc
    }
}

/// `c_k(τ) = 2 (-1)^k e^{-τ} I_k(τ)` for `k = 0..=order`.
pub fn cheb_coefficients(tau_eff: f64, order: usize) -> Result<CoefficientSet> {
    let ie = bessel_ie_scaled(order, tau_eff)?;
    let coeffs = ie
        .iter()
        .enumerate()
        .map(|(k, v)| if k % 2 == 0 { 2.0 * v } else { -2.0 * v })
        .collect();
    Ok(CoefficientSet { tau_eff, coeffs })
}

/// `p_K(λ)` for the expansion of `exp(-τλ)` truncated at `order`.
pub fn eval_scalar(tau_eff: f64, order: usize, lambda: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!(
            "λ = {lambda} lies outside [0, 2]"
        )));
    }
    Ok(cheb_coefficients(tau_eff, order)?.eval(lambda))
}

/// `T_0(t) … T_{k_max}(t)` by the three-term recurrence.
pub fn chebyshev_t(k_max: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(1.0);
    if k_max >= 1 {
        out.push(t);
    }
    for k in 2..=k_max {
        out.push(2.0 * t * out[k - 1] - out[k - 2]);
    }
    out
}

/// Produces `T_0(L'-I)x, T_1(L'-I)x, …` one vector at a time, keeping only
/// the last two.
pub(crate) struct BasisStream<'a> {
    op: &'a SparseSymMatrix,
    prev: Vec<f64>,
    curr: Vec<f64>,
    scratch: Vec<f64>,
    k: usize,
    matvecs: usize,
}

impl<'a> BasisStream<'a> {
    pub(crate) fn new(op: &'a SparseSymMatrix, x: &[f64]) -> Result<Self> {
        if x.len() != op.n() {
            return Err(Error::DimensionMismatch {
                expected: op.n(),
                found: x.len(),
            });
        }
        Ok(BasisStream {
            op,
            prev: Vec::new(),
            curr: x.to_vec(),
            scratch: vec![0.0; x.len()],
            k: 0,
            matvecs: 0,
        })
    }

    pub(crate) fn current(&self) -> &[f64] {
        &self.curr
    }

    pub(crate) fn matvecs(&self) -> usize {
        self.matvecs
    }

    /// Advances to the next order; exactly one matrix-vector product.
    pub(crate) fn advance(&mut self) -> Result<()> {
        self.op.matvec_into(&self.curr, &mut self.scratch)?;
        self.matvecs += 1;
        if self.k == 0 {
            // T_1 = (L' - I) x
            for (s, c) in self.scratch.iter_mut().zip(&self.curr) {
                *s -= c;
            }
        } else {
            // T_{k+1} = 2 (L' - I) T_k - T_{k-1}
            for ((s, c), p) in self.scratch.iter_mut().zip(&self.curr).zip(&self.prev) {
                *s = 2.0 * (*s - c) - p;
            }
        }
        std::mem::swap(&mut self.prev, &mut self.curr);
        std::mem::swap(&mut self.curr, &mut self.scratch);
        if self.scratch.len() != self.curr.len() {
            self.scratch = vec![0.0; self.curr.len()];
        }
        self.k += 1;
        Ok(())
    }
}

/// All basis vectors `T̃_k(L') x` for `k = 0..=K`, reusable across scales.
#[derive(Debug, Clone)]
pub struct ChebBasisCache {
    vectors: Vec<Vec<f64>>,
    operator_fingerprint: u64,
    signal_fingerprint: u64,
    matvecs: usize,
}

impl ChebBasisCache {
    pub fn order(&self) -> usize {
        self.vectors.len() - 1
    }

    pub fn n(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Matrix-vector products spent building the cache.
    pub fn matvecs(&self) -> usize {
        self.matvecs
    }

    pub fn operator_fingerprint(&self) -> u64 {
        self.operator_fingerprint
    }

    pub fn signal_fingerprint(&self) -> u64 {
        self.signal_fingerprint
    }
}

/// Runs the recurrence on `l_prime` (spectrum assumed in `[0, 2]`) up to
/// `order`, spending exactly `order` matrix-vector products.
pub fn build_basis(
    l_prime: &SparseSymMatrix,
    x: &GraphSignal,
    order: usize,
) -> Result<ChebBasisCache> {
    let mut stream = BasisStream::new(l_prime, x.values())?;
    let mut vectors = Vec::with_capacity(order + 1);
    vectors.push(stream.current().to_vec());
    for _ in 0..order {
        stream.advance()?;
        vectors.push(stream.current().to_vec());
    }
    Ok(ChebBasisCache {
        vectors,
        operator_fingerprint: l_prime.fingerprint(),
        signal_fingerprint: x.fingerprint(),
        matvecs: stream.matvecs(),
    })
}

/// Accumulation strategy for [`combine_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Summation {
    #[default]
    Plain,
    /// Kahan–Babuška (Neumaier) compensated sums per component.
    Compensated,
}

/// `½c_0 v_0 + Σ_{k=1}^{K} c_k v_k` with ascending `k` and plain summation.
pub fn combine(cache: &ChebBasisCache, coeffs: &CoefficientSet) -> Result<Vec<f64>> {
    combine_with(cache, coeffs, Summation::Plain)
}

pub fn combine_with(
    cache: &ChebBasisCache,
    coeffs: &CoefficientSet,
    summation: Summation,
) -> Result<Vec<f64>> {
    if cache.order() < coeffs.order() {
        return Err(Error::OrderMismatch {
            have: cache.order(),
            need: coeffs.order(),
        });
    }
    let c = coeffs.as_slice();
    let mut y: Vec<f64> = cache.vectors[0].iter().map(|v| 0.5 * c[0] * v).collect();
    match summation {
        Summation::Plain => {
            for (ck, vk) in c.iter().zip(&cache.vectors).skip(1) {
                accumulate(&mut y, *ck, vk);
            }
        }
        Summation::Compensated => {
            let mut comp = vec![0.0; y.len()];
            for (ck, vk) in c.iter().zip(&cache.vectors).skip(1) {
                for ((yi, ci), vi) in y.iter_mut().zip(comp.iter_mut()).zip(vk) {
                    let term = ck * vi;
                    let t = *yi + term;
                    if yi.abs() >= term.abs() {
                        *ci += (*yi - t) + term;
                    } else {
                        *ci += (term - t) + *yi;
                    }
                    *yi = t;
                }
            }
            for (yi, ci) in y.iter_mut().zip(&comp) {
                *yi += ci;
            }
        }
    }
    Ok(y)
}

#[inline]
pub(crate) fn accumulate(y: &mut [f64], ck: f64, vk: &[f64]) {
    for (yi, vi) in y.iter_mut().zip(vk) {
        *yi += ck * vi;
    }
}
