use super::measure::{align, DiscreteMeasure};
use super::transport::{transport_oracle, CostMatrix, Coupling};
use crate::error::{Error, Result};

/// `½ Σ |μ(x) - ν(x)|` over the merged support.
pub fn tv_distance(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let (_, a, b) = align(mu, nu);
    tv_dense(&a, &b)
}

/// Total variation between two dense vectors on the same index set.
pub fn tv_dense(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    (0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()).min(1.0)
}

/// `Σ V(x) |μ(x) - ν(x)|`.
pub fn vnorm_distance<V: Fn(f64) -> f64>(mu: &DiscreteMeasure, nu: &DiscreteMeasure, v: V) -> f64 {
    let (pts, a, b) = align(mu, nu);
    pts.iter()
        .zip(a.iter().zip(&b))
        .map(|(x, (p, q))| v(*x) * (p - q).abs())
        .sum()
}

/// V-norm of a dense difference with per-index weights.
pub fn vnorm_dense(a: &[f64], b: &[f64], v: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(v)
        .map(|((p, q), w)| w * (p - q).abs())
        .sum()
}

const MASS_EPS: f64 = 1e-15;

/// Walks the two quantile functions together, calling `f(i, j, mass)` for each
/// interval of `t` where `F_μ^{-1}(t) = x_i` and `F_ν^{-1}(t) = y_j`.
fn quantile_walk<F: FnMut(usize, usize, f64)>(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    mut f: F,
) {
    let (wa, wb) = (mu.weights(), nu.weights());
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (wa[0], wb[0]);
    loop {
        while ra <= MASS_EPS && i + 1 < wa.len() {
            i += 1;
            ra += wa[i];
        }
        while rb <= MASS_EPS && j + 1 < wb.len() {
            j += 1;
            rb += wb[j];
        }
        if ra <= MASS_EPS || rb <= MASS_EPS {
            break;
        }
        let m = ra.min(rb);
        f(i, j, m);
        ra -= m;
        rb -= m;
    }
}

/// Exact `W_p` on the real line via the quantile coupling.
pub fn wasserstein_real(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "p = {p} must be at least 1"
        )));
    }
    let (xs, ys) = (mu.support(), nu.support());
    let mut total = 0.0;
    quantile_walk(mu, nu, |i, j, m| total += m * (xs[i] - ys[j]).abs().powf(p));
    Ok(total.powf(1.0 / p))
}

/// The quantile (monotone) coupling as an explicit plan.
pub fn quantile_coupling(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Coupling {
    let mut plan = Coupling::zeros(mu.support().to_vec(), nu.support().to_vec());
    quantile_walk(mu, nu, |i, j, m| plan.add(i, j, m));
    plan
}

/// Both computation paths of the snowflake transport cost `inf E|X-Y|^s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerMetricPaths {
    pub oracle: f64,
    pub monotone: f64,
}

impl PowerMetricPaths {
    pub fn agree(&self, tol: f64) -> bool {
        (self.oracle - self.monotone).abs() <= tol
    }
}

pub fn wasserstein_power_paths(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    s: f64,
) -> Result<PowerMetricPaths> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidArgument(format!("s = {s} not in (0,1)")));
    }
    let cost = CostMatrix::from_fn(mu.support(), nu.support(), |x, y| (x - y).abs().powf(s))?;
    let (oracle, _) = transport_oracle(mu, nu, &cost)?;
    let (xs, ys) = (mu.support(), nu.support());
    let mut monotone = 0.0;
    quantile_walk(mu, nu, |i, j, m| {
        monotone += m * (xs[i] - ys[j]).abs().powf(s)
    });
    Ok(PowerMetricPaths { oracle, monotone })
}

/// `W_1` under `d(x,y) = |x-y|^s`. Errors with a diagnostic when the exact
/// solver and the monotone coupling disagree.
pub fn wasserstein_power_metric(mu: &DiscreteMeasure, nu: &DiscreteMeasure, s: f64) -> Result<f64> {
    let paths = wasserstein_power_paths(mu, nu, s)?;
    if !paths.agree(1e-9) {
        return Err(Error::Diagnostic(format!(
            "transport oracle gives {:.12}, monotone coupling gives {:.12}",
            paths.oracle, paths.monotone
        )));
    }
    Ok(paths.oracle)
}
