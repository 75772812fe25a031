use super::path::PathSample;
use super::reservoir::{NoiseReservoir, SPINE};
use crate::coef::{uniform_grid, UFn, DEFAULT_GRID_POINTS};
use crate::error::{Error, Result};

/// Reflected random walk on ℕ with time-varying `(p, q, r)`.
#[derive(Clone)]
pub struct WalkModel {
    p: UFn,
    q: UFn,
    r: UFn,
}

impl std::fmt::Debug for WalkModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WalkModel")
            .field("p0", &(self.p)(0.0))
            .field("q0", &(self.q)(0.0))
            .finish()
    }
}

impl WalkModel {
    /// Checks the simplex constraint and `p/q < 1` on the default grid.
    pub fn new(p: UFn, q: UFn, r: UFn) -> Result<Self> {
        for u in uniform_grid(DEFAULT_GRID_POINTS) {
            let (pu, qu, ru) = (p(u), q(u), r(u));
            if pu < 0.0 || qu < 0.0 || ru < 0.0 || (pu + qu + ru - 1.0).abs() > 1e-9 {
                return Err(Error::ModelInvalid(format!(
                    "(p,q,r)({u}) = ({pu},{qu},{ru}) is not a probability vector"
                )));
            }
            if !(pu < qu) {
                return Err(Error::ModelInvalid(format!("p/q >= 1 at u={u}")));
            }
        }
        Ok(WalkModel { p, q, r })
    }

    pub fn params(&self, u: f64) -> (f64, f64, f64) {
        ((self.p)(u), (self.q)(u), (self.r)(u))
    }

    /// Stationary law of the frozen walk: geometric with ratio `p(u)/q(u)`.
    pub fn stationary_ratio(&self, u: f64) -> f64 {
        (self.p)(u) / (self.q)(u)
    }
}

#[inline]
fn step(x: u64, p: f64, q: f64, r: f64, v: f64) -> u64 {
    if x == 0 {
        if v <= 1.0 - p {
            0
        } else {
            1
        }
    } else if v <= q {
        x - 1
    } else if v <= q + r {
        x
    } else {
        x + 1
    }
}

/// `X_{n,0}` drawn exactly from the geometric `π_0`, then increments by inverse CDF.
pub fn simulate_random_walk(
    model: &WalkModel,
    n: usize,
    reservoir: &NoiseReservoir,
) -> PathSample<u64> {
    let mut spine = reservoir.spine(SPINE, 0);
    let rho = model.stationary_ratio(0.0);
    let v0 = spine.next_uniform();
    let mut x = if rho > 0.0 {
        (v0.ln() / rho.ln()).floor() as u64
    } else {
        0
    };
    let mut values = Vec::with_capacity(n + 1);
    values.push(x);
    for k in 1..=n {
        let (p, q, r) = model.params(k as f64 / n as f64);
        x = step(x, p, q, r, spine.next_uniform());
        values.push(x);
    }
    PathSample {
        n,
        k_min: 0,
        values,
        label: "random-walk".into(),
        seed: reservoir.seed,
        stream_id: reservoir.stream,
        burn_in: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coef::{constant, ufn};

    #[test]
    fn no_up_moves_gets_absorbed() {
        let m = WalkModel::new(constant(0.0), constant(0.5), constant(0.5)).unwrap();
        let p = simulate_random_walk(&m, 200, &NoiseReservoir::new(1, 0));
        assert_eq!(p.get(0), 0);
        assert!(p.values.iter().all(|&x| x == 0));
    }

    #[test]
    fn absorbed_after_start_above_zero() {
        let m = WalkModel::new(
            ufn(|u| if u == 0.0 { 0.3 } else { 0.0 }),
            constant(0.5),
            ufn(|u| if u == 0.0 { 0.2 } else { 0.5 }),
        )
        .unwrap();
        for s in 0..20 {
            let p = simulate_random_walk(&m, 400, &NoiseReservoir::new(3, s));
            let x0 = p.get(0);
            let mut downs = 0;
            for k in 1..=400 {
                assert!(p.get(k) <= p.get(k - 1));
                downs += (p.get(k) < p.get(k - 1)) as u64;
            }
            assert!(downs <= x0);
        }
    }

    #[test]
    fn rejects_drift_violation() {
        assert!(WalkModel::new(constant(0.5), constant(0.4), constant(0.1)).is_err());
        assert!(WalkModel::new(constant(0.2), constant(0.5), constant(0.2)).is_err());
    }
}
