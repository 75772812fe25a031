use std::sync::Arc;

use statrs::distribution::{ContinuousCDF, Normal};

use super::path::PathSample;
use super::reservoir::{NoiseReservoir, SPINE};
use crate::coef::{uniform_grid, UFn};
use crate::error::{Error, Result};

/// Maps `(u, ξ)` with `ξ ~ N(0,1)` to the pair `(A(u), B(u))`.
pub type AffineDraw = Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>;

/// Scalar random affine iteration `X_{n,i} = A_i(i/n) X_{n,i-1} + B_i(i/n)`
/// driven by one Gaussian variate per step.
#[derive(Clone)]
pub struct AffineModel {
    draw: AffineDraw,
    label: String,
}

impl std::fmt::Debug for AffineModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AffineModel")
            .field("label", &self.label)
            .finish()
    }
}

impl AffineModel {
    pub fn new(draw: AffineDraw, label: impl Into<String>) -> Self {
        AffineModel {
            draw,
            label: label.into(),
        }
    }

    /// `X_i = a(i/n) X_{i-1} + σ(i/n) ξ_i`.
    pub fn tv_ar1(a: UFn, sigma: UFn) -> Self {
        Self::new(Arc::new(move |u, xi| (a(u), sigma(u) * xi)), "tv-ar1")
    }

    /// Squared tv-ARCH(1): `A_i = ξ_i² a_1(i/n)`, `B_i = ξ_i² a_0(i/n)`.
    pub fn tv_arch1_squared(a0: UFn, a1: UFn) -> Self {
        Self::new(
            Arc::new(move |u, xi| {
                let z = xi * xi;
                (z * a1(u), z * a0(u))
            }),
            "tv-arch1-squared",
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn draw(&self, u: f64, xi: f64) -> (f64, f64) {
        (self.draw)(u, xi)
    }
}

/// Monte-Carlo moment check `E|A_m(u)⋯A_1(u)|^s < 1` on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionCheck {
    pub m: usize,
    pub s: f64,
    pub grid_points: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for ContractionCheck {
    fn default() -> Self {
        ContractionCheck {
            m: 1,
            s: 1.0,
            grid_points: 21,
            samples: 10_000,
            seed: 0x00c0_ffee,
        }
    }
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

/// Largest estimated moment over the grid, and the `u` where it occurs.
pub fn contraction_moment(model: &AffineModel, check: &ContractionCheck) -> Result<(f64, f64)> {
    if check.m == 0 || !(check.s > 0.0 && check.s <= 1.0) || check.samples == 0 {
        return Err(Error::InvalidArgument(
            "contraction check needs m >= 1, s in (0,1], samples >= 1".into(),
        ));
    }
    let normal = std_normal();
    let res = NoiseReservoir::new(check.seed, u64::MAX);
    let mut worst = (0.0, 0.0);
    for (g, u) in uniform_grid(check.grid_points.max(2))
        .into_iter()
        .enumerate()
    {
        let mut row = res.row(SPINE, g as i64);
        let mut acc = 0.0;
        for _ in 0..check.samples {
            let mut prod = 1.0;
            for _ in 0..check.m {
                prod *= model.draw(u, normal.inverse_cdf(row.next_uniform())).0;
            }
            acc += prod.abs().powf(check.s);
        }
        let est = acc / check.samples as f64;
        if est > worst.0 {
            worst = (est, u);
        }
    }
    Ok(worst)
}

/// Simulator for a contraction-checked affine model.
#[derive(Debug, Clone)]
pub struct AffineSimulator {
    model: AffineModel,
    n: usize,
    moment: f64,
    burn_in: usize,
}

impl AffineSimulator {
    /// Runs the contraction check once; fails with `ModelInvalid` if the
    /// estimated moment reaches 1 anywhere on the grid.
    pub fn new(model: AffineModel, n: usize, check: &ContractionCheck) -> Result<Self> {
        let (moment, u) = contraction_moment(&model, check)?;
        if !(moment < 1.0) {
            return Err(Error::ModelInvalid(format!(
                "estimated E|A_{m}..A_1|^{s} = {moment:.4} >= 1 at u={u}",
                m = check.m,
                s = check.s
            )));
        }
        let per_step = moment.powf(1.0 / check.m as f64);
        let burn_in = 10 * (1.0 / (1.0 - per_step)).ceil() as usize;
        Ok(AffineSimulator {
            model,
            n,
            moment,
            burn_in,
        })
    }

    pub fn moment(&self) -> f64 {
        self.moment
    }

    pub fn default_burn_in(&self) -> usize {
        self.burn_in
    }

    /// Runs the triangular recursion from `x0` at time `k_start` to `k_end`;
    /// returns the values at `k_start+1..=k_end`.
    pub(crate) fn advance_from(
        &self,
        x0: f64,
        k_start: i64,
        k_end: i64,
        reservoir: &NoiseReservoir,
    ) -> Vec<f64> {
        let normal = std_normal();
        let mut spine = reservoir.spine(SPINE, k_start + 1);
        let mut x = x0;
        let mut out = Vec::with_capacity((k_end - k_start).max(0) as usize);
        for k in k_start + 1..=k_end {
            let xi = normal.inverse_cdf(spine.next_uniform());
            let (a, b) = self.model.draw(k.max(0) as f64 / self.n as f64, xi);
            x = a * x + b;
            out.push(x);
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> &AffineModel {
        &self.model
    }

    fn run<U: Fn(i64) -> f64>(
        &self,
        u_of: U,
        reservoir: &NoiseReservoir,
        burn_in: usize,
    ) -> PathSample<f64> {
        let normal = std_normal();
        let k_min = -(burn_in as i64);
        let mut values = Vec::with_capacity(self.n + burn_in + 1);
        values.push(0.0);
        let mut spine = reservoir.spine(SPINE, k_min + 1);
        let mut x = 0.0;
        for k in k_min + 1..=self.n as i64 {
            let xi = normal.inverse_cdf(spine.next_uniform());
            let (a, b) = self.model.draw(u_of(k), xi);
            x = a * x + b;
            values.push(x);
        }
        PathSample {
            n: self.n,
            k_min,
            values,
            label: self.model.label.clone(),
            seed: reservoir.seed,
            stream_id: reservoir.stream,
            burn_in,
        }
    }

    /// Triangular array with `u = max(k,0)/n`.
    pub fn simulate(&self, reservoir: &NoiseReservoir, burn_in: Option<usize>) -> PathSample<f64> {
        let nf = self.n as f64;
        self.run(
            |k| k.max(0) as f64 / nf,
            reservoir,
            burn_in.unwrap_or(self.burn_in),
        )
    }

    /// Frozen-`u` companion on the same spine.
    pub fn simulate_stationary(
        &self,
        u: f64,
        reservoir: &NoiseReservoir,
        burn_in: Option<usize>,
    ) -> PathSample<f64> {
        self.run(|_| u, reservoir, burn_in.unwrap_or(self.burn_in))
    }
}

/// One path of an affine model.
pub fn simulate_affine(
    model: AffineModel,
    n: usize,
    reservoir: &NoiseReservoir,
    check: &ContractionCheck,
) -> Result<PathSample<f64>> {
    Ok(AffineSimulator::new(model, n, check)?.simulate(reservoir, None))
}
