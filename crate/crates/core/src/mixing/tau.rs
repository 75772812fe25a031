use rayon::prelude::*;

use crate::simulate::{simulate_inar, AffineSimulator, InarModel, NoiseReservoir};
use crate::stats::mean_se;

/// Real-valued models with a contraction coupling.
#[derive(Debug, Clone)]
pub enum TauModel {
    Affine(AffineSimulator),
    Inar { model: InarModel, n: usize },
}

// Independent restarts read streams far away from the replicate streams.
const RESTART_STREAM: u64 = 1 << 62;

impl TauModel {
    pub fn n(&self) -> usize {
        match self {
            TauModel::Affine(s) => s.n(),
            TauModel::Inar { n, .. } => *n,
        }
    }

    pub fn label(&self) -> &str {
        match self {
            TauModel::Affine(s) => s.model().label(),
            TauModel::Inar { model, .. } => model.label(),
        }
    }

    fn path(&self, res: &NoiseReservoir) -> (i64, Vec<f64>) {
        match self {
            TauModel::Affine(s) => {
                let p = s.simulate(res, None);
                (p.k_min, p.values)
            }
            TauModel::Inar { model, n } => {
                let p = simulate_inar(model, *n, res, None);
                (p.k_min, p.values.iter().map(|v| *v as f64).collect())
            }
        }
    }

    /// Values at `i+1..=i+len` of the chain restarted at time `i` from the
    /// state (and lag window) of `other` at `i`, driven by `res`.
    fn restart(
        &self,
        other: &[f64],
        k_min: i64,
        i: i64,
        len: usize,
        res: &NoiseReservoir,
    ) -> Vec<f64> {
        let at = (i - k_min) as usize;
        match self {
            TauModel::Affine(s) => s.advance_from(other[at], i, i + len as i64, res),
            TauModel::Inar { model, n } => {
                let q = model.order();
                let lo = (at + 1).saturating_sub(q);
                let lags: Vec<u64> = other[lo..=at].iter().map(|v| *v as u64).collect();
                model
                    .advance_from(&lags, *n, i, i + len as i64, res)
                    .into_iter()
                    .map(|v| v as f64)
                    .collect()
            }
        }
    }
}

/// Monte-Carlo upper estimate of `τ_n(j)` with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauEstimate {
    pub value: f64,
    pub se: f64,
    /// Start index attaining the supremum.
    pub start: i64,
}

/// Evenly spaced restart times in `[0, n − jmax]`.
pub fn default_starts(n: usize, jmax: usize, count: usize) -> Vec<i64> {
    let top = n.saturating_sub(jmax) as i64;
    let c = count.max(2) as i64;
    let mut v: Vec<i64> = (0..c).map(|t| t * top / (c - 1)).collect();
    v.dedup();
    v
}

/// `sup_i E|X_{n,i+j} − X̃_{n,i+j}|` for `j = 0..=jmax`, where `X̃` restarts at
/// time `i` from an independent draw of the time-`i` law and then shares the
/// noise of `X`. The supremum runs over `starts`; replicate `r` uses stream `r`.
pub fn tau_curve_mc(
    model: &TauModel,
    jmax: usize,
    replicates: usize,
    seed: u64,
    starts: &[i64],
) -> Vec<TauEstimate> {
    let per_rep: Vec<Vec<Vec<f64>>> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let res = NoiseReservoir::new(seed, r);
            let (k_min, x) = model.path(&res);
            let (k_min2, y) = model.path(&res.with_stream(RESTART_STREAM + r));
            debug_assert_eq!(k_min, k_min2);
            starts
                .iter()
                .map(|&i| {
                    let at = (i - k_min) as usize;
                    let tilde = model.restart(&y, k_min, i, jmax, &res);
                    let mut gaps = Vec::with_capacity(jmax + 1);
                    gaps.push((x[at] - y[at]).abs());
                    for (t, v) in tilde.iter().enumerate() {
                        gaps.push((x[at + t + 1] - v).abs());
                    }
                    gaps
                })
                .collect()
        })
        .collect();
    (0..=jmax)
        .map(|j| {
            let mut best = TauEstimate {
                value: -1.0,
                se: 0.0,
                start: 0,
            };
            for (si, &i) in starts.iter().enumerate() {
                let col: Vec<f64> = per_rep.iter().map(|rep| rep[si][j]).collect();
                let (m, se) = mean_se(&col);
                if m > best.value {
                    best = TauEstimate {
                        value: m,
                        se,
                        start: i,
                    };
                }
            }
            best
        })
        .collect()
}

/// Single-lag version of [`tau_curve_mc`] with the default eleven start times.
pub fn tau_upper_mc(model: &TauModel, j: usize, replicates: usize, seed: u64) -> TauEstimate {
    let starts = default_starts(model.n(), j, 11);
    tau_curve_mc(model, j, replicates, seed, &starts)[j]
}
