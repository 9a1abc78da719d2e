//! Slow, independent ground truth: dense eigendecomposition, exact heat
//! diffusion, quadrature for the expansion coefficients and coefficient tails.
//!
//! Nothing here shares code with the fast path except the Bessel values used
//! by [`tail_sum`].

use crate::error::{Error, Result};
use crate::sparse::SparseSymMatrix;
use crate::special::bessel_ie_scaled;

/// Largest matrix the dense routines accept.
pub const DENSE_LIMIT: usize = 500;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Full eigendecomposition `L = U Λ Uᵀ` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct DenseSpectrum {
    eigenvalues: Vec<f64>,
    /// `eigenvectors[i]` pairs with `eigenvalues[i]`
    eigenvectors: Vec<Vec<f64>>,
}

impl DenseSpectrum {
    pub fn of(l: &SparseSymMatrix) -> Result<Self> {
        if l.n() > DENSE_LIMIT {
            return Err(Error::TooLarge {
                n: l.n(),
                limit: DENSE_LIMIT,
            });
        }
        Ok(Self::from_dense(l.to_dense()))
    }

    /// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops to
    /// `1e-12 · max(1, ‖A‖_F)`. `a` must be symmetric.
    #[allow(clippy::needless_range_loop)]
    pub fn from_dense(mut a: Vec<Vec<f64>>) -> Self {
        let n = a.len();
        let mut v: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let frob: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        let target = 1e-12 * frob.max(1.0);

        for _ in 0..JACOBI_MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i][j] * a[i][j])
                .sum::<f64>()
                .sqrt();
            if off <= target {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p][q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                    let t = if theta.abs() > 1e150 {
                        0.5 / theta
                    } else {
                        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    let tau = s / (1.0 + c);

                    a[p][p] -= t * apq;
                    a[q][q] += t * apq;
                    a[p][q] = 0.0;
                    a[q][p] = 0.0;
                    for r in 0..n {
                        if r == p || r == q {
                            continue;
                        }
                        let g = a[r][p];
                        let h = a[r][q];
                        let gp = g - s * (h + g * tau);
                        let hq = h + s * (g - h * tau);
                        a[r][p] = gp;
                        a[p][r] = gp;
                        a[r][q] = hq;
                        a[q][r] = hq;
                    }
                    // V is stored transposed: v[p] is column p
                    let (lo, hi) = v.split_at_mut(q);
                    for (g, h) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                        let (g0, h0) = (*g, *h);
                        *g = g0 - s * (h0 + g0 * tau);
                        *h = h0 + s * (g0 - h0 * tau);
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
        DenseSpectrum {
            eigenvalues: order.iter().map(|&i| a[i][i]).collect(),
            eigenvectors: order.iter().map(|&i| v[i].clone()).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, i: usize) -> &[f64] {
        &self.eigenvectors[i]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Coordinates `Uᵀ x`.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: x.len(),
            });
        }
        Ok(self
            .eigenvectors
            .iter()
            .map(|u| u.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `U diag(f(λᵢ)) Uᵀ x`.
    pub fn apply<F: Fn(f64) -> f64>(&self, x: &[f64], f: F) -> Result<Vec<f64>> {
        let z = self.project(x)?;
        let mut y = vec![0.0; self.n()];
        for ((u, &lam), zi) in self.eigenvectors.iter().zip(&self.eigenvalues).zip(&z) {
            let w = f(lam) * zi;
            for (yj, uj) in y.iter_mut().zip(u) {
                *yj += w * uj;
            }
        }
        Ok(y)
    }

    /// `max |(U Λ Uᵀ - A)_{ij}|`.
    #[allow(clippy::needless_range_loop)]
    pub fn reconstruction_error(&self, a: &[Vec<f64>]) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n)
                    .map(|k| {
                        self.eigenvectors[k][i] * self.eigenvalues[k] * self.eigenvectors[k][j]
                    })
                    .sum();
                worst = worst.max((s - a[i][j]).abs());
            }
        }
        worst
    }

    /// `max |(Uᵀ U - I)_{ij}|`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let d: f64 = self.eigenvectors[i]
                    .iter()
                    .zip(&self.eigenvectors[j])
                    .map(|(a, b)| a * b)
                    .sum();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((d - want).abs());
            }
        }
        worst
    }
}

/// `exp(-τL) x` through a full eigendecomposition.
pub fn exact_diffusion(l: &SparseSymMatrix, x: &[f64], tau: f64) -> Result<Vec<f64>> {
    let spectrum = DenseSpectrum::of(l)?;
    exact_diffusion_with(&spectrum, x, tau)
}

pub fn exact_diffusion_with(spectrum: &DenseSpectrum, x: &[f64], tau: f64) -> Result<Vec<f64>> {
    if !(tau >= 0.0) {
        return Err(Error::NegativeScale(tau));
    }
    spectrum.apply(x, |lam| (-tau * lam).exp())
}

/// `(2/π) ∫₀^π cos(kθ) exp(-τ(cos θ + 1)) dθ` by composite Simpson with
/// 20000 panels.
pub fn coeff_integral(k: usize, tau: f64) -> f64 {
    const PANELS: usize = 20_000;
    let h = std::f64::consts::PI / PANELS as f64;
    let f = |theta: f64| (k as f64 * theta).cos() * (-tau * (theta.cos() + 1.0)).exp();
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..PANELS {
        let v = f(i as f64 * h);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    let integral = h / 3.0 * (f(0.0) + 4.0 * odd + 2.0 * even + f(std::f64::consts::PI));
    2.0 / std::f64::consts::PI * integral
}

/// `Σ_{k=K+1}^{K+2000} |c_k(τ)|`, the coefficient mass dropped by truncating at `K`.
pub fn tail_sum(order: usize, tau: f64) -> Result<f64> {
    const EXTRA: usize = 2000;
    if !(tau >= 0.0) {
        return Err(Error::NegativeScale(tau));
    }
    if (order as f64) <= tau / 2.0 - 1.0 {
        return Err(Error::OrderTooSmall { order, tau });
    }
    if tau == 0.0 {
        return Ok(0.0);
    }
    let ie = bessel_ie_scaled(order + EXTRA, tau)?;
    // smallest first
    Ok(ie[order + 1..].iter().rev().map(|v| 2.0 * v).sum())
}
