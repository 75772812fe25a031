use nalgebra::{DMatrix, DVector};

use super::contraction::dobrushin_tv;
use super::family::KernelFamily;
use super::matrix::StochasticMatrix;
use crate::error::{Error, Result};
use crate::metrics::DiscreteMeasure;

/// Default residual tolerance for [`stationary_distribution`].
pub const STATIONARY_TOL: f64 = 1e-12;

/// Above this size the invariant law is found by power iteration.
pub const DIRECT_SOLVE_MAX: usize = 2000;

const ERGODIC_MARGIN: f64 = 1e-9;

/// Smallest power of two `m ≤ S²` (or the first beyond it) with `c(P^m) < 1 - 1e-9`.
///
/// `c(P^m)` is nonincreasing in `m`, so doubling finds a certificate whenever one
/// exists at some `m ≤ S²`.
pub fn ergodicity_power(p: &StochasticMatrix) -> Result<usize> {
    let s = p.size();
    let cap = s * s;
    let mut m = 1;
    let mut pm = p.clone();
    loop {
        if dobrushin_tv(&pm) < 1.0 - ERGODIC_MARGIN {
            return Ok(m);
        }
        if m >= cap {
            return Err(Error::NonErgodic { max_power: cap });
        }
        pm = pm.mul(&pm);
        m *= 2;
    }
}

fn residual(p: &StochasticMatrix, pi: &[f64]) -> f64 {
    p.left_mul(pi)
        .iter()
        .zip(pi)
        .map(|(a, b)| (a - b).abs())
        .sum()
}

/// Unique invariant law of `P`, with `‖πP - π‖₁ < tol`.
pub fn stationary_distribution(p: &StochasticMatrix, tol: f64) -> Result<DiscreteMeasure> {
    ergodicity_power(p)?;
    let s = p.size();
    let mut pi = if s <= DIRECT_SOLVE_MAX {
        // (Pᵀ - I) π = 0 with the last equation replaced by Σπ = 1.
        let mut a = DMatrix::<f64>::zeros(s, s);
        for x in 0..s {
            for y in 0..s {
                a[(y, x)] = p.get(x, y);
            }
            a[(x, x)] -= 1.0;
        }
        for x in 0..s {
            a[(s - 1, x)] = 1.0;
        }
        let mut rhs = DVector::<f64>::zeros(s);
        rhs[s - 1] = 1.0;
        let sol = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Diagnostic("singular stationary system".into()))?;
        sol.iter().map(|v| v.max(0.0)).collect::<Vec<f64>>()
    } else {
        vec![1.0 / s as f64; s]
    };
    normalize(&mut pi);
    let mut iters = 0;
    while residual(p, &pi) >= tol {
        if iters >= 1_000_000 {
            return Err(Error::Diagnostic(format!(
                "stationary residual {:.3e} above {tol:.1e}",
                residual(p, &pi)
            )));
        }
        pi = p.left_mul(&pi);
        normalize(&mut pi);
        iters += 1;
    }
    DiscreteMeasure::on_states(pi)
}

fn normalize(v: &mut [f64]) {
    let t: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= t;
    }
}

/// `π_u` for a family.
pub fn stationary_at<F: KernelFamily + ?Sized>(family: &F, u: f64) -> Result<Vec<f64>> {
    let p = family.transition_matrix(u)?;
    Ok(stationary_distribution(&p, STATIONARY_TOL)?
        .weights()
        .to_vec())
}

/// Ordered product `Q_{k_from/n} ⋯ Q_{k_to/n}`; indices `≤ 0` use `Q_0`.
/// `k_from = k_to + 1` gives the identity.
pub fn inhomogeneous_product<F: KernelFamily + ?Sized>(
    family: &F,
    n: usize,
    k_from: i64,
    k_to: i64,
) -> Result<StochasticMatrix> {
    if k_to > n as i64 || k_from > k_to + 1 {
        return Err(Error::InvalidArgument(format!(
            "need k_from ≤ k_to ≤ n, got {k_from}, {k_to}, n={n}"
        )));
    }
    let mut acc = StochasticMatrix::identity(family.state_count());
    if k_from > k_to {
        return Ok(acc);
    }
    let nonpos = (k_to.min(0) - k_from + 1).max(0) as usize;
    if nonpos > 0 {
        acc = family.transition_matrix(0.0)?.pow(nonpos);
    }
    for k in k_from.max(1)..=k_to {
        acc = acc.mul(&family.transition_matrix(k as f64 / n as f64)?);
    }
    Ok(acc)
}

/// All marginals `π^(n)_k`, `k = 0..=n`, as dense vectors (index `k`).
pub fn marginal_laws<F: KernelFamily + ?Sized>(family: &F, n: usize) -> Result<Vec<Vec<f64>>> {
    let mut laws = Vec::with_capacity(n + 1);
    let mut cur = stationary_at(family, 0.0)?;
    laws.push(cur.clone());
    for k in 1..=n {
        cur = family
            .transition_matrix(k as f64 / n as f64)?
            .left_mul(&cur);
        laws.push(cur.clone());
    }
    Ok(laws)
}

/// `π^(n)_k`; equals `π_0` for `k ≤ 0`.
pub fn marginal_law<F: KernelFamily + ?Sized>(
    family: &F,
    n: usize,
    k: i64,
) -> Result<DiscreteMeasure> {
    if k > n as i64 {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
    }
    let mut cur = stationary_at(family, 0.0)?;
    for i in 1..=k.max(0) {
        cur = family
            .transition_matrix(i as f64 / n as f64)?
            .left_mul(&cur);
    }
    DiscreteMeasure::on_states(cur)
}

/// Joint law of `j` consecutive states, weights indexed lexicographically
/// (first coordinate most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct JointLaw {
    dimension: usize,
    state_count: usize,
    weights: Vec<f64>,
}

impl JointLaw {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, tuple: &[usize]) -> f64 {
        assert_eq!(tuple.len(), self.dimension);
        let idx = tuple.iter().fold(0, |acc, &x| acc * self.state_count + x);
        self.weights[idx]
    }

    /// Law of the first `j - 1` coordinates.
    pub fn marginalize_last(&self) -> Result<JointLaw> {
        if self.dimension < 2 {
            return Err(Error::InvalidArgument(
                "cannot marginalize a 1-dimensional law".into(),
            ));
        }
        let s = self.state_count;
        let weights = self.weights.chunks(s).map(|c| c.iter().sum()).collect();
        Ok(JointLaw {
            dimension: self.dimension - 1,
            state_count: s,
            weights,
        })
    }

    /// `½ Σ |p - q|` over tuples.
    pub fn tv_distance(&self, other: &JointLaw) -> f64 {
        assert_eq!(self.weights.len(), other.weights.len());
        0.5 * self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    fn chain(start: Vec<f64>, kernels: &[StochasticMatrix]) -> JointLaw {
        let s = start.len();
        let mut w = start;
        for q in kernels {
            let mut next = Vec::with_capacity(w.len() * s);
            for (idx, &p) in w.iter().enumerate() {
                let last = idx % s;
                next.extend(q.row(last).iter().map(|v| p * v));
            }
            w = next;
        }
        JointLaw {
            dimension: kernels.len() + 1,
            state_count: s,
            weights: w,
        }
    }
}

/// `π_{u,j}(x₁..x_j) = π_u(x₁) Q_u(x₁,x₂) ⋯ Q_u(x_{j-1},x_j)`.
pub fn finite_dim_law<F: KernelFamily + ?Sized>(family: &F, u: f64, j: usize) -> Result<JointLaw> {
    if j == 0 {
        return Err(Error::InvalidArgument("j must be at least 1".into()));
    }
    let q = family.transition_matrix(u)?;
    let pi = stationary_distribution(&q, STATIONARY_TOL)?
        .weights()
        .to_vec();
    let kernels = vec![q; j - 1];
    Ok(JointLaw::chain(pi, &kernels))
}

/// `π^(n)_{k,j}`: law of `(X_{n,k}, …, X_{n,k+j-1})`.
pub fn finite_dim_law_inhom<F: KernelFamily + ?Sized>(
    family: &F,
    n: usize,
    k: i64,
    j: usize,
) -> Result<JointLaw> {
    if j == 0 || k + j as i64 - 1 > n as i64 {
        return Err(Error::InvalidArgument(format!(
            "need j ≥ 1 and k + j - 1 ≤ n, got k={k}, j={j}, n={n}"
        )));
    }
    let start = marginal_law(family, n, k)?.weights().to_vec();
    joint_from_marginal(family, n, k, j, start)
}

/// Chains a given law of `X_{n,k}` with `Q_{(k+1)/n}, …, Q_{(k+j-1)/n}`.
pub fn joint_from_marginal<F: KernelFamily + ?Sized>(
    family: &F,
    n: usize,
    k: i64,
    j: usize,
    start: Vec<f64>,
) -> Result<JointLaw> {
    let kernels = (1..j as i64)
        .map(|t| family.transition_matrix((k + t) as f64 / n as f64))
        .collect::<Result<Vec<_>>>()?;
    Ok(JointLaw::chain(start, &kernels))
}
