//! Heat diffusion `exp(-τL) x` at one or many scales.
//!
//! The operator is rescaled to `L' = 2L / λ_max` so its spectrum lies in
//! `[0, 2]`, which turns scale `τ` into the effective scale
//! `τ' = λ_max τ / 2`. The truncation order comes from [`crate::bounds`]
//! before any matrix-vector product is spent.
//!
//! A single scale streams the recurrence with three work vectors. Several
//! scales share one order (picked at the largest `τ'`) and one basis, so the
//! matrix-vector count is `K` no matter how many scales are requested.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::bounds::{bound_value, min_order, resolve_policy, BoundKind, BoundPolicy, SignalStats};
use crate::chebyshev::{
    accumulate, build_basis, cheb_coefficients, combine, BasisStream, ChebBasisCache,
};
use crate::error::{Error, Result};
use crate::oracle::{exact_diffusion_with, DenseSpectrum};
use crate::sparse::{GraphSignal, SparseSymMatrix};

/// Safety factor applied to the power-iteration estimate of `λ_max`.
pub const LAMBDA_INFLATION: f64 = 1.01;
pub const POWER_MAX_ITERS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionOptions {
    /// Target on `η_K(x)`.
    pub tol: f64,
    pub policy: BoundPolicy,
    /// Skips estimation when set.
    pub lambda_max: Option<f64>,
    /// Power-iteration stopping rule: relative Rayleigh-quotient change and
    /// relative residual must both fall below it.
    pub lambda_rel_tol: f64,
    /// Seed of the power-iteration start vector.
    pub seed: u64,
}

impl Default for DiffusionOptions {
    fn default() -> Self {
        DiffusionOptions {
            tol: 1e-5,
            policy: BoundPolicy::Auto,
            lambda_max: None,
            lambda_rel_tol: 1e-4,
            seed: 0,
        }
    }
}

impl DiffusionOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_policy(mut self, policy: BoundPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_lambda_max(mut self, lambda_max: f64) -> Self {
        self.lambda_max = Some(lambda_max);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Largest eigenvalue of a PSD matrix by power iteration, inflated by
/// [`LAMBDA_INFLATION`]. Returns `0` for the zero matrix.
pub fn estimate_lambda_max(l: &SparseSymMatrix, rel_tol: f64, seed: u64) -> Result<f64> {
    if !(rel_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "relative tolerance must be positive, got {rel_tol}"
        )));
    }
    if l.max_abs_row_sum() == 0.0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..l.n())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    normalize(&mut v);
    let mut w = vec![0.0; l.n()];
    let mut previous = f64::NAN;
    for _ in 0..POWER_MAX_ITERS {
        l.matvec_into(&v, &mut w)?;
        let rq: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        // ‖Lv - ρv‖ for unit v
        let residual = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - rq * b) * (a - rq * b))
            .sum::<f64>()
            .sqrt();
        let norm = normalize(&mut w);
        if norm == 0.0 {
            return Ok(0.0);
        }
        // A small Rayleigh-quotient change alone is not enough when the top
        // gap is small: the quotient creeps up slowly while still well below
        // λ_max. The underestimate is about residual²/gap, so a relative
        // residual below rel_tol caps it near rel_tol.
        if ((rq - previous) / rq).abs() < rel_tol && residual <= rel_tol * rq {
            return Ok(rq * LAMBDA_INFLATION);
        }
        previous = rq;
        std::mem::swap(&mut v, &mut w);
    }
    Err(Error::NoConvergence(POWER_MAX_ITERS))
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

/// What one diffusion (or one scale of a multiscale run) did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionReport {
    pub tau: f64,
    pub tau_eff: f64,
    pub order: usize,
    pub lambda_max: f64,
    pub bound_kind: BoundKind,
    /// Bound on `η_K(x)` at this scale for the chosen order.
    pub bound_value: f64,
    /// Matrix-vector products spent (shared across scales in multiscale mode).
    pub matvecs: usize,
}

/// Everything decided before the first matrix-vector product.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionPlan {
    pub lambda_max: f64,
    pub scales: Vec<f64>,
    pub tau_eff: Vec<f64>,
    pub order: usize,
    pub bound_kind: BoundKind,
    /// Bound at the largest effective scale.
    pub bound_value: f64,
    pub tol: f64,
    stats: Option<SignalStats>,
}

impl DiffusionPlan {
    /// Resolves `λ_max`, effective scales, bound kind and the shared order.
    pub fn new(
        l: &SparseSymMatrix,
        x: &GraphSignal,
        scales: &[f64],
        opts: &DiffusionOptions,
    ) -> Result<Self> {
        if scales.is_empty() {
            return Err(Error::InvalidArgument("no scales given".into()));
        }
        if let Some(&bad) = scales.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
            return Err(Error::NegativeScale(bad));
        }
        if !(opts.tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {}",
                opts.tol
            )));
        }
        if x.len() != l.n() {
            return Err(Error::DimensionMismatch {
                expected: l.n(),
                found: x.len(),
            });
        }
        let lambda_max = match opts.lambda_max {
            Some(lm) if lm >= 0.0 && lm.is_finite() => lm,
            Some(lm) => {
                return Err(Error::InvalidArgument(format!(
                    "lambda_max override must be non-negative, got {lm}"
                )))
            }
            None => estimate_lambda_max(l, opts.lambda_rel_tol, opts.seed)?,
        };
        let tau_eff: Vec<f64> = scales.iter().map(|t| lambda_max * t / 2.0).collect();
        let tau_top = tau_eff.iter().copied().fold(0.0, f64::max);
        let stats = SignalStats::from_signal(x).ok();
        let bound_kind = resolve_policy(opts.policy, tau_top, stats.as_ref());

        let (order, bound) = if stats.is_none() {
            // zero signal: nothing to approximate
            (0, 0.0)
        } else {
            let order = min_order(bound_kind, tau_top, opts.tol, stats.as_ref())?;
            let bound = if tau_top == 0.0 {
                0.0
            } else {
                bound_value(bound_kind, order, tau_top, stats.as_ref())?
            };
            (order, bound)
        };
        Ok(DiffusionPlan {
            lambda_max,
            scales: scales.to_vec(),
            tau_eff,
            order,
            bound_kind,
            bound_value: bound,
            tol: opts.tol,
            stats,
        })
    }

    /// `L' = 2L / λ_max`, or `None` when `λ_max = 0` (diffusion is the identity).
    pub fn rescaled_operator(&self, l: &SparseSymMatrix) -> Option<SparseSymMatrix> {
        (self.lambda_max > 0.0).then(|| l.scaled(2.0 / self.lambda_max))
    }

    /// Basis vectors up to the planned order; `order` matrix-vector products.
    pub fn build_basis(&self, l: &SparseSymMatrix, x: &GraphSignal) -> Result<ChebBasisCache> {
        match self.rescaled_operator(l) {
            Some(lp) => build_basis(&lp, x, self.order),
            None => build_basis(&SparseSymMatrix::zeros(l.n()), x, 0),
        }
    }

    /// Output for scale `i` from a basis built by [`DiffusionPlan::build_basis`].
    pub fn diffuse(&self, cache: &ChebBasisCache, i: usize) -> Result<Vec<f64>> {
        let coeffs = cheb_coefficients(self.tau_eff[i], cache.order().min(self.order))?;
        combine(cache, &coeffs)
    }

    /// Report for scale `i`, given the matrix-vector products actually spent.
    pub fn report(&self, i: usize, matvecs: usize) -> Result<DiffusionReport> {
        let tau_eff = self.tau_eff[i];
        let bound = if tau_eff == 0.0 || self.stats.is_none() {
            0.0
        } else {
            bound_value(self.bound_kind, self.order, tau_eff, self.stats.as_ref())?
        };
        Ok(DiffusionReport {
            tau: self.scales[i],
            tau_eff,
            order: self.order,
            lambda_max: self.lambda_max,
            bound_kind: self.bound_kind,
            bound_value: bound,
            matvecs,
        })
    }
}

/// `p_K(L') x` with `L' = 2L / λ_max` at `τ' = λ_max τ / 2`, streaming three
/// vectors. Bit-identical to combining a cached basis of the same order.
pub fn expm_multiply_with_order(
    l: &SparseSymMatrix,
    x: &[f64],
    tau: f64,
    order: usize,
    lambda_max: f64,
) -> Result<(Vec<f64>, usize)> {
    if !(tau >= 0.0) {
        return Err(Error::NegativeScale(tau));
    }
    if lambda_max == 0.0 {
        return Ok((x.to_vec(), 0));
    }
    let lp = l.scaled(2.0 / lambda_max);
    let coeffs = cheb_coefficients(lambda_max * tau / 2.0, order)?;
    let c = coeffs.as_slice();
    let mut stream = BasisStream::new(&lp, x)?;
    let mut y: Vec<f64> = stream.current().iter().map(|v| 0.5 * c[0] * v).collect();
    for &ck in &c[1..] {
        stream.advance()?;
        accumulate(&mut y, ck, stream.current());
    }
    Ok((y, stream.matvecs()))
}

/// `exp(-τL) x` to within `η_K(x) ≤ tol` as certified by the chosen bound.
pub fn expm_multiply(
    l: &SparseSymMatrix,
    x: &GraphSignal,
    tau: f64,
    opts: &DiffusionOptions,
) -> Result<(Vec<f64>, DiffusionReport)> {
    let plan = DiffusionPlan::new(l, x, &[tau], opts)?;
    let (y, matvecs) = expm_multiply_with_order(l, x.values(), tau, plan.order, plan.lambda_max)?;
    Ok((y, plan.report(0, matvecs)?))
}

#[derive(Debug, Clone)]
pub struct MultiscaleResult {
    /// One output per requested scale, in request order.
    pub outputs: Vec<Vec<f64>>,
    pub reports: Vec<DiffusionReport>,
    pub order: usize,
    pub lambda_max: f64,
    pub bound_kind: BoundKind,
    pub bound_value: f64,
    /// Total matrix-vector products (equals `order`).
    pub matvecs: usize,
}

/// Diffusion at every scale from one shared basis.
pub fn expm_multiscale(
    l: &SparseSymMatrix,
    x: &GraphSignal,
    scales: &[f64],
    opts: &DiffusionOptions,
) -> Result<MultiscaleResult> {
    let plan = DiffusionPlan::new(l, x, scales, opts)?;
    let cache = plan.build_basis(l, x)?;
    let outputs = (0..scales.len())
        .into_par_iter()
        .map(|i| plan.diffuse(&cache, i))
        .collect::<Result<Vec<_>>>()?;
    let reports = (0..scales.len())
        .map(|i| plan.report(i, cache.matvecs()))
        .collect::<Result<Vec<_>>>()?;
    Ok(MultiscaleResult {
        outputs,
        reports,
        order: plan.order,
        lambda_max: plan.lambda_max,
        bound_kind: plan.bound_kind,
        bound_value: plan.bound_value,
        matvecs: cache.matvecs(),
    })
}

/// `(ε_K(x), η_K(x))` of the order-`K` approximation against the dense oracle.
pub fn measure_errors(
    l: &SparseSymMatrix,
    x: &GraphSignal,
    tau: f64,
    order: usize,
    lambda_max: f64,
) -> Result<(f64, f64)> {
    let spectrum = DenseSpectrum::of(l)?;
    measure_errors_with(&spectrum, l, x, tau, order, lambda_max)
}

/// [`measure_errors`] with a precomputed spectrum of `l`.
pub fn measure_errors_with(
    spectrum: &DenseSpectrum,
    l: &SparseSymMatrix,
    x: &GraphSignal,
    tau: f64,
    order: usize,
    lambda_max: f64,
) -> Result<(f64, f64)> {
    let exact = exact_diffusion_with(spectrum, x.values(), tau)?;
    let (approx, _) = expm_multiply_with_order(l, x.values(), tau, order, lambda_max)?;
    let err: f64 = exact
        .iter()
        .zip(&approx)
        .map(|(w, y)| (w - y) * (w - y))
        .sum();
    let out: f64 = exact.iter().map(|w| w * w).sum();
    let eps = if x.norm_sq() > 0.0 {
        err / x.norm_sq()
    } else {
        0.0
    };
    let eta = if out > 0.0 { err / out } else { 0.0 };
    Ok((eps, eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::exact_diffusion;
    use crate::sparse::{build_laplacian, erdos_renyi, LaplacianKind};

    fn p2() -> SparseSymMatrix {
        build_laplacian(&[(0, 1, 1.0)], 2, LaplacianKind::Combinatorial).unwrap()
    }

    fn k3() -> SparseSymMatrix {
        build_laplacian(
            &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)],
            3,
            LaplacianKind::Combinatorial,
        )
        .unwrap()
    }

    #[test]
    fn lambda_max_small_graphs() {
        let est = estimate_lambda_max(&p2(), 1e-4, 0).unwrap();
        assert!((est - 2.0 * LAMBDA_INFLATION).abs() <= 2.0 * 1e-4);
        let est = estimate_lambda_max(&k3(), 1e-4, 0).unwrap();
        assert!((est - 3.0 * LAMBDA_INFLATION).abs() <= 3.0 * 1e-3);
        assert_eq!(
            estimate_lambda_max(&SparseSymMatrix::zeros(4), 1e-4, 0).unwrap(),
            0.0
        );
    }

    #[test]
    fn lambda_max_upper_bounds_spectrum() {
        for seed in 0..40 {
            let (n, p) = [(120, 0.06), (200, 0.05), (50, 0.1), (300, 0.02)][seed as usize % 4];
            let edges = erdos_renyi(n, p, seed).unwrap();
            let l = build_laplacian(&edges, n, LaplacianKind::Combinatorial).unwrap();
            let truth = DenseSpectrum::of(&l).unwrap().lambda_max();
            let est = estimate_lambda_max(&l, 1e-4, seed).unwrap();
            assert!(est >= truth, "seed {seed}: {est} < {truth}");
            assert!(est <= truth * 1.02);
        }
    }

    #[test]
    fn zero_scale_is_identity() {
        let x = GraphSignal::new(vec![0.4, -1.0]);
        let (y, rep) = expm_multiply(&p2(), &x, 0.0, &DiffusionOptions::default()).unwrap();
        assert_eq!(y, x.values());
        assert_eq!(rep.order, 0);
        assert_eq!(rep.matvecs, 0);
    }

    #[test]
    fn p2_single_scale() {
        let x = GraphSignal::new(vec![1.0, 0.0]);
        let opts = DiffusionOptions::default().with_tol(1e-10);
        let (y, rep) = expm_multiply(&p2(), &x, 1.0, &opts).unwrap();
        let e2 = (-2.0f64).exp();
        assert!((y[0] - 0.5 * (1.0 + e2)).abs() < 1e-5);
        assert!((y[1] - 0.5 * (1.0 - e2)).abs() < 1e-5);
        assert_eq!(rep.matvecs, rep.order);
        assert!(rep.bound_value <= 1e-10);
    }

    #[test]
    fn k3_long_time_limit() {
        let x = GraphSignal::new(vec![1.0, 0.0, 0.0]);
        let tol = 1e-5;
        let opts = DiffusionOptions::default().with_tol(tol);
        let (y, _) = expm_multiply(&k3(), &x, 50.0, &opts).unwrap();
        let exact = exact_diffusion(&k3(), x.values(), 50.0).unwrap();
        let out_norm = exact.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (yi, wi) in y.iter().zip(&exact) {
            assert!((yi - 1.0 / 3.0).abs() <= tol.sqrt() * out_norm + (-150.0f64).exp());
            assert!((wi - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_override_skips_estimation() {
        let l = build_laplacian(
            &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0)],
            4,
            LaplacianKind::Normalized,
        )
        .unwrap();
        let x = GraphSignal::dirac(4, 0).unwrap();
        let opts = DiffusionOptions::default().with_lambda_max(2.0);
        let (_, rep) = expm_multiply(&l, &x, 1.5, &opts).unwrap();
        assert_eq!(rep.lambda_max, 2.0);
        assert_eq!(rep.tau_eff, 1.5);
    }

    #[test]
    fn explicit_specific_with_zero_sum_fails() {
        let x = GraphSignal::new(vec![1.0, -1.0]);
        let opts =
            DiffusionOptions::default().with_policy(BoundPolicy::Fixed(BoundKind::NewSpecific));
        assert!(matches!(
            expm_multiply(&p2(), &x, 1.0, &opts),
            Err(Error::ZeroComponentSum(_))
        ));
        // Auto falls back to the generic bound
        assert!(expm_multiply(&p2(), &x, 1.0, &DiffusionOptions::default()).is_ok());
    }

    #[test]
    fn zero_signal() {
        let x = GraphSignal::new(vec![0.0; 3]);
        let (y, rep) = expm_multiply(&k3(), &x, 2.0, &DiffusionOptions::default()).unwrap();
        assert_eq!(y, vec![0.0; 3]);
        assert_eq!(rep.order, 0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let x = GraphSignal::new(vec![1.0, 0.0]);
        let opts = DiffusionOptions::default();
        assert!(matches!(
            expm_multiply(&p2(), &x, -1.0, &opts),
            Err(Error::NegativeScale(_))
        ));
        assert!(expm_multiply(&p2(), &x, 1.0, &opts.with_tol(0.0)).is_err());
        assert!(expm_multiscale(&p2(), &x, &[], &opts).is_err());
        let x3 = GraphSignal::new(vec![1.0; 3]);
        assert!(matches!(
            expm_multiply(&p2(), &x3, 1.0, &opts),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn multiscale_small_cases() {
        let x = GraphSignal::new(vec![1.0, 0.0, 2.0]);
        let opts = DiffusionOptions::default();
        let r = expm_multiscale(&k3(), &x, &[0.0], &opts).unwrap();
        assert_eq!(r.outputs, vec![x.values().to_vec()]);

        let r = expm_multiscale(&k3(), &x, &[0.7, 0.7], &opts).unwrap();
        assert_eq!(r.outputs[0], r.outputs[1]);
        assert_eq!(r.matvecs, r.order);
    }

    #[test]
    fn multiscale_equals_single_scale_at_same_order() {
        let edges = erdos_renyi(80, 0.08, 5).unwrap();
        let l = build_laplacian(&edges, 80, LaplacianKind::Combinatorial).unwrap();
        let x = GraphSignal::standard_normal(80, 5);
        let scales = [0.01, 0.3, 2.0, 4.0];
        let r = expm_multiscale(&l, &x, &scales, &DiffusionOptions::default()).unwrap();
        for (i, &tau) in scales.iter().enumerate() {
            let (y, mv) =
                expm_multiply_with_order(&l, x.values(), tau, r.order, r.lambda_max).unwrap();
            assert_eq!(mv, r.order);
            assert_eq!(y, r.outputs[i]);
        }
    }

    #[test]
    fn measure_errors_examples() {
        let x = GraphSignal::new(vec![1.0, 0.0]);
        assert_eq!(measure_errors(&p2(), &x, 0.0, 0, 2.0).unwrap(), (0.0, 0.0));
        let (eps, eta) = measure_errors(&p2(), &x, 1.0, 40, 2.0).unwrap();
        assert!(eps <= 1e-14 && eta <= 1e-14);
    }
}
