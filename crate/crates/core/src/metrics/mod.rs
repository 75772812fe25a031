//! Distances between discrete laws: total variation, `V`-norms, Wasserstein
//! on the real line, and a small exact transport solver used as an oracle.

mod distance;
mod measure;
mod transport;

pub use distance::{
    quantile_coupling, tv_dense, tv_distance, vnorm_dense, vnorm_distance,
    wasserstein_power_metric, wasserstein_power_paths, wasserstein_real, PowerMetricPaths,
};
pub use measure::{DiscreteMeasure, MASS_TOL};
pub use transport::{transport_oracle, CostMatrix, Coupling, ORACLE_CAP};
