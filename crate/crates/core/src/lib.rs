//! Simulation and numerical verification for locally stationary,
//! time-inhomogeneous Markov chains.
//!
//! A triangular array `X_{n,k}`, `k ≤ n`, is driven by kernels `Q_{k/n}` taken
//! from a family `{Q_u : u ∈ [0,1]}` (with `Q_u = Q_0` for `u < 0`). The crate
//! computes exact laws and contraction coefficients on finite or truncated
//! state spaces, simulates the arrays with index-addressed common random
//! numbers, and provides the kernel estimators of the time-varying quantities.
//!
//! Modules:
//! - [`chain_models`]: kernel families, exact laws, Dobrushin and drift certificates.
//! - [`metrics`]: total variation, Wasserstein on the line, V-norms, a transport oracle.
//! - [`simulate`]: finite chains, tv-INAR, affine iterations, random walks.
//! - [`estimate`]: kernel weights, local estimators and asymptotic covariances.
//! - [`mixing`]: exact β-mixing and Monte-Carlo τ-mixing upper estimates.

pub mod chain_models;
pub mod coef;
pub mod error;
pub mod estimate;
pub mod metrics;
pub mod mixing;
pub mod simulate;
pub mod stats;

pub use chain_models::{
    CountableKernelFamily, DriftSpec, FiniteKernelFamily, JointLaw, KernelFamily, StochasticMatrix,
};
pub use coef::{CoefFn, UFn};
pub use error::{Error, Result};
pub use metrics::{CostMatrix, Coupling, DiscreteMeasure};
pub use simulate::{NoiseReservoir, PathSample};
