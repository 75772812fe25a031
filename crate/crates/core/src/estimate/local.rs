use std::io::{self, Write};

use super::kernel::SmoothingSpec;
use crate::error::{Error, Result};
use crate::simulate::PathSample;

/// Normalized weights `e_i(u) ∝ K((u − i/n)/b)` on the indices `lo..lo+len`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelWeights {
    pub first: usize,
    pub values: Vec<f64>,
    /// The window `[u−b, u+b]` sticks out of `[0,1]`.
    pub boundary: bool,
}

impl KernelWeights {
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(t, w)| (self.first + t, *w))
    }

    pub fn sum_sq(&self) -> f64 {
        self.values.iter().map(|w| w * w).sum()
    }

    /// `1 / Σ e_i²`.
    pub fn effective_sample(&self) -> f64 {
        1.0 / self.sum_sq()
    }

    pub fn last(&self) -> usize {
        self.first + self.values.len() - 1
    }
}

/// Weights restricted to the index range `lo..=hi`.
pub fn kernel_weights_range(
    u: f64,
    n: usize,
    lo: usize,
    hi: usize,
    spec: &SmoothingSpec,
) -> Result<KernelWeights> {
    let b = spec.bandwidth;
    let nf = n as f64;
    let start = ((u - b) * nf).ceil().max(lo as f64) as usize;
    let end = (((u + b) * nf).floor().min(hi as f64)).max(0.0) as usize;
    let mut raw = Vec::new();
    let mut first = None;
    let mut total = 0.0;
    if start <= end {
        for i in start..=end {
            let w = spec.kernel.eval((u - i as f64 / nf) / b);
            if w > 0.0 && first.is_none() {
                first = Some(i);
            }
            if first.is_some() {
                raw.push(w);
                total += w;
            }
        }
    }
    let Some(first) = first else {
        return Err(Error::BandwidthTooSmall { u });
    };
    while raw.last() == Some(&0.0) {
        raw.pop();
    }
    let values = raw.into_iter().map(|w| w / total).collect();
    Ok(KernelWeights {
        first,
        values,
        boundary: u - b < 0.0 || u + b > 1.0,
    })
}

/// `e_ℓ(u), …, e_n(u)`.
pub fn kernel_weights(u: f64, n: usize, spec: &SmoothingSpec) -> Result<KernelWeights> {
    kernel_weights_range(u, n, spec.lower_index, n, spec)
}

/// A local estimate with its smoothing metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalEstimate<V> {
    pub u: f64,
    pub value: V,
    pub effective_sample: f64,
    pub bandwidth: f64,
    pub boundary: bool,
}

impl<V> LocalEstimate<V> {
    fn from_weights(u: f64, value: V, w: &KernelWeights, spec: &SmoothingSpec) -> Self {
        LocalEstimate {
            u,
            value,
            effective_sample: w.effective_sample(),
            bandwidth: spec.bandwidth,
            boundary: w.boundary,
        }
    }
}

/// CSV with columns `u,entry,value,flag`; `flag` is `boundary`, `undefined` or empty.
pub fn write_estimates_csv<W: Write>(
    mut w: W,
    rows: &[(f64, String, Option<f64>, bool)],
) -> io::Result<()> {
    writeln!(w, "u,entry,value,flag")?;
    for (u, entry, value, boundary) in rows {
        match value {
            Some(v) => writeln!(
                w,
                "{u},{entry},{v},{}",
                if *boundary { "boundary" } else { "" }
            )?,
            None => writeln!(w, "{u},{entry},,undefined")?,
        }
    }
    Ok(())
}

/// `ĥ_u = Σ_{i=ℓ}^n e_i(u) f(X_{n,i−ℓ+1}, …, X_{n,i})`.
pub fn estimate_functional<T: Copy, F: Fn(&[T]) -> f64>(
    path: &PathSample<T>,
    f: F,
    u: f64,
    spec: &SmoothingSpec,
) -> Result<LocalEstimate<f64>> {
    let x = path.observed();
    let l = spec.lower_index;
    if x.len() < l {
        return Err(Error::InvalidArgument(format!(
            "path of length {} shorter than ℓ={l}",
            x.len()
        )));
    }
    let w = kernel_weights(u, x.len(), spec)?;
    let value = w.iter().map(|(i, e)| e * f(&x[i - l..i])).sum();
    Ok(LocalEstimate::from_weights(u, value, &w, spec))
}

fn pair_weights(u: f64, n: usize, spec: &SmoothingSpec) -> Result<KernelWeights> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "need at least two observations".into(),
        ));
    }
    kernel_weights_range(u, n, 1, n - 1, spec)
}

fn check_states(x: &[usize], states: usize) -> Result<()> {
    match x.iter().find(|&&v| v >= states) {
        Some(v) => Err(Error::InvalidArgument(format!(
            "state {v} outside 0..{states}"
        ))),
        None => Ok(()),
    }
}

/// `π̂_u(x) = Σ_{i=1}^{n−1} e_i(u) 1{X_{n,i} = x}` (the first marginal of `π̂_{u,2}`).
pub fn estimate_pi(
    path: &PathSample<usize>,
    u: f64,
    spec: &SmoothingSpec,
    states: usize,
) -> Result<LocalEstimate<Vec<f64>>> {
    let x = path.observed();
    check_states(x, states)?;
    let w = pair_weights(u, x.len(), spec)?;
    let mut pi = vec![0.0; states];
    for (i, e) in w.iter() {
        pi[x[i - 1]] += e;
    }
    Ok(LocalEstimate::from_weights(u, pi, &w, spec))
}

/// `π̂_{u,2}(x,y) = Σ_{i=1}^{n−1} e_i(u) 1{X_{n,i} = x, X_{n,i+1} = y}`, row-major.
pub fn estimate_pi2(
    path: &PathSample<usize>,
    u: f64,
    spec: &SmoothingSpec,
    states: usize,
) -> Result<LocalEstimate<Vec<f64>>> {
    let x = path.observed();
    check_states(x, states)?;
    let w = pair_weights(u, x.len(), spec)?;
    let mut pi2 = vec![0.0; states * states];
    for (i, e) in w.iter() {
        pi2[x[i - 1] * states + x[i]] += e;
    }
    Ok(LocalEstimate::from_weights(u, pi2, &w, spec))
}

/// `Q̂_u(x,·) = π̂_{u,2}(x,·)/π̂_u(x)`; rows with `π̂_u(x) = 0` are `None`.
pub fn estimate_q(
    path: &PathSample<usize>,
    u: f64,
    spec: &SmoothingSpec,
    states: usize,
) -> Result<LocalEstimate<Vec<Option<Vec<f64>>>>> {
    let pi2 = estimate_pi2(path, u, spec, states)?;
    let rows = (0..states)
        .map(|x| {
            let row = &pi2.value[x * states..(x + 1) * states];
            let m: f64 = row.iter().sum();
            (m > 0.0).then(|| row.iter().map(|v| v / m).collect())
        })
        .collect();
    Ok(LocalEstimate {
        u,
        value: rows,
        effective_sample: pi2.effective_sample,
        bandwidth: pi2.bandwidth,
        boundary: pi2.boundary,
    })
}

/// Up-step frequency and down-step frequency off state 0 for a reflected walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkEstimate {
    pub p: f64,
    /// `None` when the window never visits a state ≥ 1.
    pub q: Option<f64>,
    pub effective_sample: f64,
    pub boundary: bool,
}

/// `p̂(u) = Σ_{i=1}^{n−1} e_i(u) 1{X_{n,i+1} − X_{n,i} = 1}`; `q̂` conditions on `X_{n,i} ≥ 1`.
pub fn estimate_walk_pq(
    path: &PathSample<u64>,
    u: f64,
    spec: &SmoothingSpec,
) -> Result<WalkEstimate> {
    let x = path.observed();
    let w = pair_weights(u, x.len(), spec)?;
    let (mut p, mut down, mut off_zero) = (0.0, 0.0, 0.0);
    for (i, e) in w.iter() {
        let (a, b) = (x[i - 1], x[i]);
        if b == a + 1 {
            p += e;
        }
        if a >= 1 {
            off_zero += e;
            if b + 1 == a {
                down += e;
            }
        }
    }
    Ok(WalkEstimate {
        p,
        q: (off_zero > 0.0).then(|| down / off_zero),
        effective_sample: w.effective_sample(),
        boundary: w.boundary,
    })
}
