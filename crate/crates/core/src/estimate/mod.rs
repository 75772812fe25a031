//! Kernel-weighted local estimators of time-varying quantities and the
//! closed-form asymptotic covariances of `π̂_u` and `Q̂_u`.

mod covariance;
mod kernel;
mod local;
mod regression;

pub use covariance::{sigma1, sigma2, DEFAULT_TAIL_TOL};
pub use kernel::{KernelKind, SmoothingSpec};
pub use local::{
    estimate_functional, estimate_pi, estimate_pi2, estimate_q, estimate_walk_pq, kernel_weights,
    kernel_weights_range, write_estimates_csv, KernelWeights, LocalEstimate, WalkEstimate,
};
pub use regression::{lls_inar, LlsEstimate, MAX_CONDITION};
