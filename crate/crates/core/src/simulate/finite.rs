use super::path::PathSample;
use super::reservoir::{NoiseReservoir, SPINE};
use crate::chain_models::{stationary_at, KernelFamily};
use crate::error::Result;

/// Left-continuous inverse of a discrete CDF: `min {y : F(y) ≥ u}`.
#[inline]
pub(crate) fn inverse_cdf(cdf: &[f64], u: f64) -> usize {
    let y = cdf.partition_point(|&c| c < u);
    y.min(cdf.len() - 1)
}

fn cumulative(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    p.iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

/// Simulator for a finite (or truncated) chain with precomputed row CDFs.
///
/// `X_{n,0} ~ π_0` exactly, `X_{n,k} | X_{n,k-1} = x ~ Q_{k/n}(x, ·)`, both by
/// inverse CDF from the spine variate of time `k`.
#[derive(Debug, Clone)]
pub struct FiniteSimulator {
    n: usize,
    s: usize,
    label: String,
    init_cdf: Vec<f64>,
    // rows[(k-1)*s*s + x*s ..]: CDF of Q_{k/n}(x, ·)
    rows: Vec<f64>,
}

impl FiniteSimulator {
    pub fn new<F: KernelFamily + ?Sized>(family: &F, n: usize) -> Result<Self> {
        let s = family.state_count();
        let pi0 = stationary_at(family, 0.0)?;
        let mut rows = Vec::with_capacity(n * s * s);
        for k in 1..=n {
            let q = family.transition_matrix(k as f64 / n as f64)?;
            for x in 0..s {
                rows.extend(cumulative(q.row(x)));
            }
        }
        Ok(FiniteSimulator {
            n,
            s,
            label: family.label().to_string(),
            init_cdf: cumulative(&pi0),
            rows,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn simulate(&self, reservoir: &NoiseReservoir) -> PathSample<usize> {
        let mut spine = reservoir.spine(SPINE, 0);
        let mut values = Vec::with_capacity(self.n + 1);
        let mut x = inverse_cdf(&self.init_cdf, spine.next_uniform());
        values.push(x);
        let ss = self.s * self.s;
        for k in 1..=self.n {
            let base = (k - 1) * ss + x * self.s;
            x = inverse_cdf(&self.rows[base..base + self.s], spine.next_uniform());
            values.push(x);
        }
        PathSample {
            n: self.n,
            k_min: 0,
            values,
            label: self.label.clone(),
            seed: reservoir.seed,
            stream_id: reservoir.stream,
            burn_in: 0,
        }
    }
}

/// One path of a finite family; see [`FiniteSimulator`] for repeated use.
pub fn simulate_finite<F: KernelFamily + ?Sized>(
    family: &F,
    n: usize,
    reservoir: &NoiseReservoir,
) -> Result<PathSample<usize>> {
    Ok(FiniteSimulator::new(family, n)?.simulate(reservoir))
}
