use super::kernel::SmoothingSpec;
use super::local::kernel_weights_range;
use crate::error::{Error, Result};
use crate::simulate::PathSample;

/// Largest accepted condition number of the weighted design matrix.
pub const MAX_CONDITION: f64 = 1e10;

/// Localized least-squares estimate of `a(u) = (α(u), λ(u))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LlsEstimate {
    pub alpha: f64,
    pub lambda: f64,
    pub condition: f64,
    pub boundary: bool,
}

impl LlsEstimate {
    /// Euclidean distance to `(α, λ)`.
    pub fn error(&self, alpha: f64, lambda: f64) -> f64 {
        (self.alpha - alpha).hypot(self.lambda - lambda)
    }
}

/// Minimizes `Σ_{i=2}^n e_i(u) (X_{n,i} − λ − α X_{n,i−1})²`.
pub fn lls_inar(path: &PathSample<u64>, u: f64, spec: &SmoothingSpec) -> Result<LlsEstimate> {
    let x = path.observed();
    if x.len() < 3 {
        return Err(Error::InvalidArgument(
            "path too short for regression".into(),
        ));
    }
    let w = kernel_weights_range(u, x.len(), 2, x.len(), spec)?;
    let (mut s1, mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, e) in w.iter() {
        let prev = x[i - 2] as f64;
        let cur = x[i - 1] as f64;
        s1 += e;
        sx += e * prev;
        sxx += e * prev * prev;
        sy += e * cur;
        sxy += e * cur * prev;
    }
    // Eigenvalues of [[s1, sx], [sx, sxx]].
    let tr = s1 + sxx;
    let det = s1 * sxx - sx * sx;
    let disc = ((s1 - sxx).powi(2) + 4.0 * sx * sx).sqrt();
    let (lmax, lmin) = (0.5 * (tr + disc), 0.5 * (tr - disc));
    let condition = if lmin > 0.0 {
        lmax / lmin
    } else {
        f64::INFINITY
    };
    if !(condition < MAX_CONDITION) || det <= 0.0 {
        return Err(Error::RegressionDegenerate(format!(
            "design condition number {condition:.3e} at u={u}"
        )));
    }
    let lambda = (sxx * sy - sx * sxy) / det;
    let alpha = (s1 * sxy - sx * sy) / det;
    Ok(LlsEstimate {
        alpha,
        lambda,
        condition,
        boundary: w.boundary,
    })
}
