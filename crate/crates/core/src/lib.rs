//! # heatcheb
//!
//! Graph heat diffusion `exp(-τL) x` through truncated Chebyshev expansions.
//!
//! The truncation order is chosen before any matrix-vector product is spent,
//! from closed-form bounds on the approximation error, and the Chebyshev basis
//! vectors `T_k(L' - I) x` are shared by every diffusion scale.
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`sparse`] | CSR Laplacians, Erdős–Rényi graphs, graph and signal files |
//! | [`special`] | scaled modified Bessel functions, log-factorial |
//! | [`chebyshev`] | expansion coefficients, basis recurrence, combination |
//! | [`bounds`] | truncation-error bounds and minimum-order search |
//! | [`diffusion`] | λ_max estimation, single-scale and multiscale diffusion |
//! | [`oracle`] | dense ground truth used for validation |
//! | [`cli`] | commands behind the `heatcheb` binary |
//!
//! ```
//! use heatcheb::prelude::*;
//!
//! let edges = erdos_renyi(100, 0.05, 1).unwrap();
//! let lap = build_laplacian(&edges, 100, LaplacianKind::Combinatorial).unwrap();
//! let x = GraphSignal::dirac(100, 0).unwrap();
//!
//! let opts = DiffusionOptions::default();
//! let out = expm_multiscale(&lap, &x, &[0.1, 1.0, 5.0], &opts).unwrap();
//! assert_eq!(out.matvecs, out.order);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod chebyshev;
pub mod cli;
pub mod diffusion;
mod error;
pub mod oracle;
pub mod sparse;
pub mod special;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::bounds::{
        bound_value, min_order, select_bound, BoundKind, BoundPolicy, SignalStats,
    };
    pub use crate::chebyshev::{
        build_basis, cheb_coefficients, combine, ChebBasisCache, CoefficientSet,
    };
    pub use crate::diffusion::{
        estimate_lambda_max, expm_multiply, expm_multiscale, DiffusionOptions, DiffusionReport,
        MultiscaleResult,
    };
    pub use crate::sparse::{
        build_laplacian, erdos_renyi, GraphSignal, LaplacianKind, SparseSymMatrix,
    };
    pub use crate::{Error, Result};
}
