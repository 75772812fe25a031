use super::path::PathSample;
use super::reservoir::{NoiseReservoir, VariateRow, SPINE};
use crate::coef::{uniform_grid, UFn, DEFAULT_GRID_POINTS};
use crate::error::{Error, Result};

/// tv-INAR(q): `X_{n,k} = Σ_j α_j(k/n) ∘ X_{n,k-j} + η_k`, `η_k ~ Poisson(λ(k/n))`.
///
/// Thinning of lag `j` at time `k` reads `U^{(k)}_{j,i}` from reservoir row
/// `(channel j, k)`; the innovation reads `V_k` from the spine.
#[derive(Clone)]
pub struct InarModel {
    alpha: Vec<UFn>,
    lambda: UFn,
    label: String,
}

impl std::fmt::Debug for InarModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InarModel")
            .field("q", &self.alpha.len())
            .field("label", &self.label)
            .finish()
    }
}

/// Left-continuous Poisson quantile `min {x : F_λ(x) ≥ u}`.
pub fn poisson_inverse(lambda: f64, u: f64) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    let cap = (lambda + 60.0 * lambda.sqrt() + 200.0) as u64;
    let mut p = (-lambda).exp();
    let mut cdf = p;
    let mut x = 0u64;
    while cdf < u && x < cap {
        x += 1;
        p *= lambda / x as f64;
        cdf += p;
    }
    x
}

/// Number of `i < count` with `U_i > 1 − α` along a reservoir row.
#[inline]
pub(crate) fn thin(row: &mut VariateRow, count: u64, alpha: f64) -> u64 {
    let cut = 1.0 - alpha;
    let mut s = 0;
    for _ in 0..count {
        if row.next_uniform() > cut {
            s += 1;
        }
    }
    s
}

impl InarModel {
    /// Checks `α_j ∈ [0,1]`, `λ ≥ 0` and `Σ_j α_j(u) < 1` on the default grid.
    pub fn new(alpha: Vec<UFn>, lambda: UFn, label: impl Into<String>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::ModelInvalid("INAR needs at least one lag".into()));
        }
        for u in uniform_grid(DEFAULT_GRID_POINTS) {
            let mut total = 0.0;
            for (j, a) in alpha.iter().enumerate() {
                let v = a(u);
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::ModelInvalid(format!(
                        "alpha_{}({u}) = {v} outside [0,1]",
                        j + 1
                    )));
                }
                total += v;
            }
            if total >= 1.0 {
                return Err(Error::ModelInvalid(format!(
                    "sum of thinning coefficients is {total} >= 1 at u={u}"
                )));
            }
            let l = lambda(u);
            if !(l.is_finite() && l >= 0.0) {
                return Err(Error::ModelInvalid(format!(
                    "lambda({u}) = {l} is not a valid Poisson mean"
                )));
            }
        }
        Ok(InarModel {
            alpha,
            lambda,
            label: label.into(),
        })
    }

    pub fn order(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self, j: usize, u: f64) -> f64 {
        (self.alpha[j])(u)
    }

    pub fn lambda(&self, u: f64) -> f64 {
        (self.lambda)(u)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn alpha_sum(&self, u: f64) -> f64 {
        self.alpha.iter().map(|a| a(u)).sum()
    }

    /// `10·⌈1/(1 − Σ_j α_j(0))⌉`.
    pub fn default_burn_in(&self) -> usize {
        10 * (1.0 / (1.0 - self.alpha_sum(0.0))).ceil() as usize
    }

    /// Bound on `|E X_0 − E X_0^{stat}|` left by starting the burn-in at 0.
    pub fn burn_in_bias_bound(&self, burn_in: usize) -> f64 {
        let rho = self.alpha_sum(0.0);
        rho.powi(burn_in as i32) * self.lambda(0.0) / (1.0 - rho)
    }

    /// Runs the triangular recursion from the lag window `lags` (oldest first,
    /// last entry at time `k_start`) to `k_end`, on the reservoir's indices.
    /// Returns the values at `k_start+1..=k_end`.
    pub(crate) fn advance_from(
        &self,
        lags: &[u64],
        n: usize,
        k_start: i64,
        k_end: i64,
        reservoir: &NoiseReservoir,
    ) -> Vec<u64> {
        let q = self.order();
        let mut hist: Vec<u64> = lags.to_vec();
        let mut spine = reservoir.spine(SPINE, k_start + 1);
        for k in k_start + 1..=k_end {
            let u = k.max(0) as f64 / n as f64;
            let len = hist.len();
            let mut x = 0;
            for j in 1..=q.min(len) {
                let prev = hist[len - j];
                if prev > 0 {
                    let mut row = reservoir.row(j as u64, k);
                    x += thin(&mut row, prev, self.alpha(j - 1, u));
                }
            }
            x += poisson_inverse(self.lambda(u), spine.next_uniform());
            hist.push(x);
        }
        hist.split_off(lags.len())
    }

    fn run<U: Fn(i64) -> f64>(
        &self,
        u_of: U,
        n: usize,
        k_end: i64,
        reservoir: &NoiseReservoir,
        burn_in: usize,
    ) -> PathSample<u64> {
        let q = self.order();
        let k_min = -(burn_in as i64);
        let len = (k_end - k_min + 1) as usize;
        let mut values: Vec<u64> = Vec::with_capacity(len);
        values.push(0);
        let mut spine = reservoir.spine(SPINE, k_min + 1);
        for k in k_min + 1..=k_end {
            let u = u_of(k);
            let idx = (k - k_min) as usize;
            let mut x = 0;
            for j in 1..=q {
                let prev = if idx >= j { values[idx - j] } else { 0 };
                if prev > 0 {
                    let mut row = reservoir.row(j as u64, k);
                    x += thin(&mut row, prev, self.alpha(j - 1, u));
                }
            }
            x += poisson_inverse(self.lambda(u), spine.next_uniform());
            values.push(x);
        }
        PathSample {
            n,
            k_min,
            values,
            label: self.label.clone(),
            seed: reservoir.seed,
            stream_id: reservoir.stream,
            burn_in,
        }
    }
}

/// Triangular array `X_{n,k}`, `k ≤ n`; times `k ≤ 0` use `u = 0` and start
/// from the zero state `burn_in` steps back (default [`InarModel::default_burn_in`]).
pub fn simulate_inar(
    model: &InarModel,
    n: usize,
    reservoir: &NoiseReservoir,
    burn_in: Option<usize>,
) -> PathSample<u64> {
    let b = burn_in.unwrap_or_else(|| model.default_burn_in());
    let nf = n as f64;
    model.run(|k| k.max(0) as f64 / nf, n, n as i64, reservoir, b)
}

/// Frozen-`u` chain `X_k(u)` on the same reservoir indices, `k ≤ length`.
pub fn simulate_stationary_inar(
    model: &InarModel,
    u: f64,
    length: usize,
    reservoir: &NoiseReservoir,
    burn_in: Option<usize>,
) -> Result<PathSample<u64>> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidArgument(format!("u={u} outside [0,1]")));
    }
    let b = burn_in.unwrap_or_else(|| model.default_burn_in());
    Ok(model.run(|_| u, length, length as i64, reservoir, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coef::{constant, ufn};
    use statrs::distribution::{Discrete, Poisson};

    #[test]
    fn poisson_inverse_matches_cdf() {
        let p = Poisson::new(2.5).unwrap();
        let mut acc = 0.0;
        for x in 0..15u64 {
            let lo = acc;
            acc += p.pmf(x);
            let mid = 0.5 * (lo + acc);
            assert_eq!(poisson_inverse(2.5, mid), x);
        }
        assert_eq!(poisson_inverse(0.0, 0.99), 0);
    }

    #[test]
    fn rejects_explosive_thinning() {
        let r = InarModel::new(vec![ufn(|u| 0.6 + 0.5 * u)], constant(1.0), "bad");
        assert!(matches!(r, Err(Error::ModelInvalid(_))));
    }

    #[test]
    fn zero_thinning_gives_poisson_innovations() {
        let m = InarModel::new(vec![constant(0.0)], ufn(|u| 1.0 + u), "iid").unwrap();
        let res = NoiseReservoir::new(3, 0);
        let p = simulate_inar(&m, 50, &res, None);
        let mut spine = res.spine(SPINE, 1);
        for k in 1..=50 {
            let v = poisson_inverse(1.0 + k as f64 / 50.0, spine.next_uniform());
            assert_eq!(p.get(k), v);
        }
    }

    #[test]
    fn constant_family_paths_coincide() {
        let m = InarModel::new(vec![constant(0.4), constant(0.2)], constant(1.5), "c").unwrap();
        let res = NoiseReservoir::new(9, 4);
        let a = simulate_inar(&m, 300, &res, None);
        let b = simulate_stationary_inar(&m, 0.37, 300, &res, None).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn endpoint_matches_homogeneous_chain() {
        let tv = InarModel::new(vec![ufn(|u| 0.3 + 0.2 * u)], ufn(|u| 1.0 + u), "tv").unwrap();
        let hom = InarModel::new(vec![constant(0.3)], constant(1.0), "hom").unwrap();
        let res = NoiseReservoir::new(1, 1);
        let a = simulate_stationary_inar(&tv, 0.0, 200, &res, Some(20)).unwrap();
        let b = simulate_stationary_inar(&hom, 0.0, 200, &res, Some(20)).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn burn_in_default_and_bias() {
        let m = InarModel::new(vec![constant(0.5)], constant(1.0), "c").unwrap();
        assert_eq!(m.default_burn_in(), 20);
        assert!(m.burn_in_bias_bound(20) < 2e-6);
    }
}
