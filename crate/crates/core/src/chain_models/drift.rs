//! Foster-Lyapunov drift certificates and `V`-norm contraction.
//!
//! A [`DriftSpec`] carries a drift function `V ≥ 1` and the constants of the
//! drift/minoration condition: for `|u_i - u| ≤ ε`,
//!
//! ```text
//! Q_u V ≤ K V,   Q_{u_1}⋯Q_{u_m} V ≤ λ V + b,   δ_x Q_{u_1}⋯Q_{u_m} ≥ η ν  on {V ≤ R},
//! ```
//!
//! with `R > 2b/(1-λ)`. [`verify_f1`] checks these on a grid of `u` and a
//! set of window schedules; [`mouli_certificate`] then searches a `δ` for which
//! the `V_δ = 1-δ+δV` Dobrushin coefficient of every sampled `m`-fold product
//! stays below some `γ < 1`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::contraction::VnormPairs;
use super::family::KernelFamily;
use super::matrix::StochasticMatrix;
use crate::coef::UFn;
use crate::error::{Error, Result};
use crate::metrics::DiscreteMeasure;

pub type DriftFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct DriftSpec {
    v: DriftFn,
    pub m: usize,
    pub lambda: f64,
    pub b: f64,
    pub k_const: f64,
    pub eta: f64,
    /// Level `R` of the small set `{V ≤ R}`.
    pub r_level: f64,
    pub epsilon_window: f64,
    /// Minoration measure on the states.
    pub minoration_nu: DiscreteMeasure,
}

impl fmt::Debug for DriftSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DriftSpec")
            .field("m", &self.m)
            .field("lambda", &self.lambda)
            .field("b", &self.b)
            .field("k_const", &self.k_const)
            .field("eta", &self.eta)
            .field("r_level", &self.r_level)
            .field("epsilon_window", &self.epsilon_window)
            .finish()
    }
}

impl DriftSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        v: DriftFn,
        m: usize,
        lambda: f64,
        b: f64,
        k_const: f64,
        eta: f64,
        r_level: f64,
        epsilon_window: f64,
        minoration_nu: DiscreteMeasure,
    ) -> Result<Self> {
        let d = DriftSpec {
            v,
            m,
            lambda,
            b,
            k_const,
            eta,
            r_level,
            epsilon_window,
            minoration_nu,
        };
        d.check()?;
        Ok(d)
    }

    fn check(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "lambda = {} not in (0,1)",
                self.lambda
            )));
        }
        if !(self.b > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "b = {} must be positive",
                self.b
            )));
        }
        if !(self.k_const >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "K = {} must be ≥ 1",
                self.k_const
            )));
        }
        if !(self.epsilon_window > 0.0) {
            return Err(Error::InvalidArgument(
                "epsilon_window must be positive".into(),
            ));
        }
        let need = 2.0 * self.b / (1.0 - self.lambda);
        if !(self.r_level > need) {
            return Err(Error::InvalidArgument(format!(
                "R = {} must exceed 2b/(1-λ) = {need}",
                self.r_level
            )));
        }
        Ok(())
    }

    pub fn v(&self, x: usize) -> f64 {
        (self.v)(x)
    }

    /// `V` on `{0..s-1}`; errors if any value is below 1.
    pub fn v_values(&self, s: usize) -> Result<Vec<f64>> {
        let v: Vec<f64> = (0..s).map(|x| (self.v)(x)).collect();
        if let Some(x) = v.iter().position(|a| !(*a >= 1.0)) {
            return Err(Error::InvalidArgument(format!("V({x}) = {} < 1", v[x])));
        }
        Ok(v)
    }

    pub fn drift_fn(&self) -> DriftFn {
        self.v.clone()
    }

    /// Constants for the reflected walk with `V(x) = z^x`.
    ///
    /// `γ = max_u (r + pz + q/z)`, `c = p̄(z-1) + 1`, `b = c/(1-γ)`, `m` the first
    /// integer with `2c / ((1-γ)(1-γ^m) z^m) < 1`, `λ = γ^m`, `R = z^m`,
    /// `η = min_u min(q, 1-p)^m`, `ν = δ_0`, `K = c`.
    pub fn random_walk(
        p: &UFn,
        q: &UFn,
        r: &UFn,
        z: f64,
        grid: &[f64],
        epsilon_window: f64,
    ) -> Result<Self> {
        if !(z > 1.0) {
            return Err(Error::InvalidArgument(format!("z = {z} must exceed 1")));
        }
        let mut gamma: f64 = 0.0;
        let mut pbar: f64 = 0.0;
        let mut floor = f64::INFINITY;
        for &u in grid {
            let (pu, qu, ru) = (p(u), q(u), r(u));
            gamma = gamma.max(ru + pu * z + qu / z);
            pbar = pbar.max(pu);
            floor = floor.min(qu.min(1.0 - pu));
        }
        if !(gamma < 1.0) {
            return Err(Error::CertificateNotFound(format!(
                "γ = {gamma} ≥ 1; z must lie in (1, min q/p)"
            )));
        }
        let c = pbar * (z - 1.0) + 1.0;
        let b = c / (1.0 - gamma);
        let mut m = 1;
        while 2.0 * c / ((1.0 - gamma) * (1.0 - gamma.powi(m as i32)) * z.powi(m as i32)) >= 1.0 {
            m += 1;
            if m > 10_000 {
                return Err(Error::CertificateNotFound(
                    "no drift horizon m ≤ 10000".into(),
                ));
            }
        }
        let v: DriftFn = Arc::new(move |x| z.powi(x as i32));
        DriftSpec::new(
            v,
            m,
            gamma.powi(m as i32),
            b,
            c,
            floor.powi(m as i32),
            z.powi(m as i32),
            epsilon_window,
            DiscreteMeasure::dirac(0.0),
        )
    }
}

/// Window schedules `(u_1..u_m)` with `u_i ∈ [u-ε, u+ε] ∩ [0,1]`.
///
/// Constant corners, alternating and half/half corner patterns, both linear
/// ramps, and four fixed pseudo-random corner patterns.
pub fn window_schedules(u: f64, eps: f64, m: usize) -> Vec<Vec<f64>> {
    let lo = (u - eps).max(0.0);
    let hi = (u + eps).min(1.0);
    let corners = [lo, u, hi];
    let mut out = vec![vec![lo; m], vec![u; m], vec![hi; m]];
    if m > 1 {
        out.push((0..m).map(|i| if i % 2 == 0 { lo } else { hi }).collect());
        out.push((0..m).map(|i| if i % 2 == 0 { hi } else { lo }).collect());
        out.push((0..m).map(|i| if i < m / 2 { lo } else { hi }).collect());
        out.push((0..m).map(|i| if i < m / 2 { hi } else { lo }).collect());
        let ramp = |a: f64, b: f64| -> Vec<f64> {
            (0..m)
                .map(|i| a + (b - a) * i as f64 / (m - 1) as f64)
                .collect()
        };
        out.push(ramp(lo, hi));
        out.push(ramp(hi, lo));
        for seed in 0..4u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + seed);
            out.push(
                (0..m)
                    .map(|_| corners[(rng.next_u32() % 3) as usize])
                    .collect(),
            );
        }
    }
    out
}

struct KernelCache<'a, F: KernelFamily + ?Sized> {
    family: &'a F,
    cache: HashMap<u64, StochasticMatrix>,
}

impl<'a, F: KernelFamily + ?Sized> KernelCache<'a, F> {
    fn new(family: &'a F) -> Self {
        KernelCache {
            family,
            cache: HashMap::new(),
        }
    }

    fn get(&mut self, u: f64) -> Result<&StochasticMatrix> {
        let key = u.to_bits();
        if !self.cache.contains_key(&key) {
            let q = self.family.transition_matrix(u)?;
            self.cache.insert(key, q);
        }
        Ok(&self.cache[&key])
    }

    fn product(&mut self, schedule: &[f64]) -> Result<StochasticMatrix> {
        let mut acc = self.get(schedule[0])?.clone();
        for &u in &schedule[1..] {
            let q = self.get(u)?.clone();
            acc = acc.mul(&q);
        }
        Ok(acc)
    }
}

/// One row of the drift verification table.
#[derive(Debug, Clone, Serialize)]
pub struct F1Row {
    pub u: f64,
    /// `max_x (Q_u V)(x) / V(x)`; must not exceed `K`.
    pub kv_ratio: f64,
    /// `max (P V)(x) - λ V(x) - b` over windows and states; must be ≤ 0.
    pub drift_slack: f64,
    /// `min P(x,y) / ν(y)` over windows, `x` in the small set, `y` in supp ν; must be ≥ η.
    pub minoration: f64,
    pub windows: usize,
    pub small_set: usize,
    pub kv_state: usize,
    pub drift_state: usize,
    pub minoration_state: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct F1Report {
    pub rows: Vec<F1Row>,
    pub passed: bool,
}

const F1_TOL: f64 = 1e-12;

fn f1_row<F: KernelFamily + ?Sized>(
    cache: &mut KernelCache<'_, F>,
    drift: &DriftSpec,
    v: &[f64],
    u: f64,
    products: &[StochasticMatrix],
) -> Result<F1Row> {
    let q = cache.get(u)?;
    let qv = q.apply(v);
    let (mut kv_ratio, mut kv_state) = (0.0f64, 0);
    for x in 0..v.len() {
        if qv[x] / v[x] > kv_ratio {
            kv_ratio = qv[x] / v[x];
            kv_state = x;
        }
    }
    let small: Vec<usize> = (0..v.len()).filter(|&x| v[x] <= drift.r_level).collect();
    let nu = &drift.minoration_nu;
    let (mut drift_slack, mut drift_state) = (f64::NEG_INFINITY, 0);
    let (mut minoration, mut minoration_state) = (f64::INFINITY, 0);
    for p in products {
        let pv = p.apply(v);
        for x in 0..v.len() {
            let slack = pv[x] - drift.lambda * v[x] - drift.b;
            if slack > drift_slack {
                drift_slack = slack;
                drift_state = x;
            }
        }
        for &x in &small {
            for (y, w) in nu.support().iter().zip(nu.weights()) {
                if *w > 0.0 {
                    let yi = *y as usize;
                    let pxy = if yi < v.len() { p.get(x, yi) } else { 0.0 };
                    if pxy / w < minoration {
                        minoration = pxy / w;
                        minoration_state = x;
                    }
                }
            }
        }
    }
    Ok(F1Row {
        u,
        kv_ratio,
        drift_slack,
        minoration,
        windows: products.len(),
        small_set: small.len(),
        kv_state,
        drift_state,
        minoration_state,
    })
}

fn row_violation(drift: &DriftSpec, row: &F1Row) -> Option<(&'static str, usize)> {
    if row.kv_ratio > drift.k_const * (1.0 + F1_TOL) {
        return Some(("Q_u V ≤ K V", row.kv_state));
    }
    if row.drift_slack > F1_TOL * drift.b.max(1.0) {
        return Some(("Q_{u_1}⋯Q_{u_m} V ≤ λV + b", row.drift_state));
    }
    if row.minoration < drift.eta * (1.0 - F1_TOL) {
        return Some(("δ_x Q_{u_1}⋯Q_{u_m} ≥ η ν on {V ≤ R}", row.minoration_state));
    }
    None
}

fn window_products<F: KernelFamily + ?Sized>(
    cache: &mut KernelCache<'_, F>,
    drift: &DriftSpec,
    u: f64,
) -> Result<Vec<StochasticMatrix>> {
    window_schedules(u, drift.epsilon_window, drift.m)
        .iter()
        .map(|s| cache.product(s))
        .collect()
}

/// Drift/minoration table over a grid; never errors on a violated inequality.
pub fn f1_table<F: KernelFamily + ?Sized>(
    family: &F,
    drift: &DriftSpec,
    grid: &[f64],
) -> Result<F1Report> {
    let v = drift.v_values(family.state_count())?;
    let mut rows = Vec::with_capacity(grid.len());
    for &u in grid {
        // Per-u cache: ramps create many distinct kernels across the grid.
        let mut cache = KernelCache::new(family);
        let prods = window_products(&mut cache, drift, u)?;
        rows.push(f1_row(&mut cache, drift, &v, u, &prods)?);
    }
    let passed = rows.iter().all(|r| row_violation(drift, r).is_none());
    Ok(F1Report { rows, passed })
}

fn first_violation(drift: &DriftSpec, report: &F1Report) -> Option<Error> {
    for row in &report.rows {
        if let Some((inequality, state)) = row_violation(drift, row) {
            return Some(Error::F1Violation {
                inequality,
                u: row.u,
                state,
            });
        }
    }
    None
}

/// Verifies the drift and minoration inequalities on the grid.
pub fn verify_f1<F: KernelFamily + ?Sized>(
    family: &F,
    drift: &DriftSpec,
    grid: &[f64],
) -> Result<F1Report> {
    if !(drift.eta > 0.0) {
        return Err(Error::Precondition(format!(
            "minoration constant η = {} must be positive",
            drift.eta
        )));
    }
    let report = f1_table(family, drift, grid)?;
    match first_violation(drift, &report) {
        Some(e) => Err(e),
        None => Ok(report),
    }
}

/// `Δ_{V_δ}(P)` with `V` from the drift specification.
pub fn dobrushin_vnorm(p: &StochasticMatrix, drift: &DriftSpec, delta: f64) -> Result<f64> {
    super::contraction::dobrushin_vnorm_values(p, &drift.v_values(p.size())?, delta)
}

/// Result of the `(γ, δ)` search.
#[derive(Debug, Clone, Serialize)]
pub struct MouliCertificate {
    pub gamma: f64,
    pub delta: f64,
    /// Worst-case coefficient for every scanned `δ`.
    pub scan: Vec<(f64, f64)>,
    pub f1: F1Report,
}

/// `δ` grid: 50 log-uniform points on `[1e-3, 1]`.
pub fn delta_grid() -> Vec<f64> {
    (0..50)
        .map(|i| 10f64.powf(-3.0 + 3.0 * i as f64 / 49.0))
        .collect()
}

/// Finds `(γ, δ)` with `Δ_{V_δ}(Q_{u_1}⋯Q_{u_m}) ≤ γ < 1` on all sampled windows.
pub fn mouli_certificate<F: KernelFamily + ?Sized>(
    family: &F,
    drift: &DriftSpec,
    grid: &[f64],
) -> Result<MouliCertificate> {
    if !(drift.eta > 0.0) {
        return Err(Error::Precondition(format!(
            "minoration constant η = {} must be positive",
            drift.eta
        )));
    }
    let v = drift.v_values(family.state_count())?;
    let deltas = delta_grid();
    let mut worst = vec![0.0f64; deltas.len()];
    let mut rows = Vec::with_capacity(grid.len());
    for &u in grid {
        // Per-u cache: ramps create many distinct kernels across the grid.
        let mut cache = KernelCache::new(family);
        let prods = window_products(&mut cache, drift, u)?;
        rows.push(f1_row(&mut cache, drift, &v, u, &prods)?);
        for p in &prods {
            let pairs = VnormPairs::new(p, &v);
            for (w, &d) in worst.iter_mut().zip(&deltas) {
                *w = w.max(pairs.coefficient(d));
            }
        }
    }
    let passed = rows.iter().all(|r| row_violation(drift, r).is_none());
    let f1 = F1Report { rows, passed };
    if let Some(e) = first_violation(drift, &f1) {
        return Err(e);
    }
    let (best, gamma) =
        worst.iter().enumerate().fold(
            (0, f64::INFINITY),
            |acc, (i, &g)| if g < acc.1 { (i, g) } else { acc },
        );
    let scan: Vec<(f64, f64)> = deltas.iter().copied().zip(worst.iter().copied()).collect();
    if !(gamma < 1.0) {
        return Err(Error::CertificateNotFound(format!(
            "best worst-case V_δ coefficient is {gamma:.6} at δ = {:.3e}",
            deltas[best]
        )));
    }
    Ok(MouliCertificate {
        gamma,
        delta: deltas[best],
        scan,
        f1,
    })
}
