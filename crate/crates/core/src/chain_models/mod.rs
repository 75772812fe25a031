//! Kernel families `{Q_u}` on finite or truncated-countable spaces, their exact
//! laws, and contraction certificates.

pub mod bounds;
pub mod contraction;
pub mod drift;
pub mod family;
pub mod laws;
pub mod matrix;

pub use bounds::ApproxConstants;
pub use contraction::{
    dobrushin_tv, dobrushin_vnorm_values, doeblin_certificate, max_dobrushin_power, search_doeblin,
    DoeblinCertificate, VnormPairs,
};
pub use drift::{
    dobrushin_vnorm, f1_table, mouli_certificate, verify_f1, DriftSpec, F1Report, MouliCertificate,
};
pub use family::{
    CountableKernelFamily, EntryFn, FiniteKernelFamily, KernelFamily, TruncationReport,
};
pub use laws::{
    ergodicity_power, finite_dim_law, finite_dim_law_inhom, inhomogeneous_product, marginal_law,
    marginal_laws, stationary_at, stationary_distribution, JointLaw, DIRECT_SOLVE_MAX,
    STATIONARY_TOL,
};
pub use matrix::StochasticMatrix;
