use crate::chain_models::{marginal_laws, DoeblinCertificate, KernelFamily, StochasticMatrix};
use crate::error::{Error, Result};
use crate::metrics::{tv_dense, vnorm_dense};

/// Sweeps every start index `i ∈ {−J, …, n−1}` once, extending the product
/// `Q_{(i+1)/n}⋯Q_{(i+j)/n}` one factor at a time, and records
/// `Σ_x π^{(n)}_i(x) d(row_x, π^{(n)}_{i+j})` for each `j ≤ J` with `i+j ≤ n`.
///
/// Start indices below `−J` repeat the homogeneous pre-history and are skipped.
fn sweep<F, D>(family: &F, n: usize, jmax: usize, dist: D) -> Result<Vec<f64>>
where
    F: KernelFamily + ?Sized,
    D: Fn(&[f64], &[f64]) -> f64,
{
    if jmax == 0 {
        return Err(Error::InvalidArgument("lag must be at least 1".into()));
    }
    let laws = marginal_laws(family, n)?;
    let law = |k: i64| &laws[k.max(0) as usize];
    let mut kernels: Vec<StochasticMatrix> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        kernels.push(family.transition_matrix(k as f64 / n as f64)?);
    }
    let kernel = |k: i64| &kernels[k.max(0) as usize];
    let s = family.state_count();
    let mut best = vec![0.0f64; jmax];
    for i in -(jmax as i64)..n as i64 {
        let start = law(i);
        let mut prod = kernel(i + 1).clone();
        for j in 1..=jmax {
            let end = i + j as i64;
            if end > n as i64 {
                break;
            }
            if j > 1 {
                prod = prod.mul(kernel(end));
            }
            let target = law(end);
            let mut v = 0.0;
            for x in 0..s {
                if start[x] > 0.0 {
                    v += start[x] * dist(prod.row(x), target);
                }
            }
            best[j - 1] = best[j - 1].max(v);
        }
    }
    Ok(best)
}

/// `β_n(j)` for `j = 1..=jmax`: `max_i Σ_x π^{(n)}_i(x) ‖δ_x P_{i→i+j} − π^{(n)}_{i+j}‖_TV`.
///
/// Lags reaching past `n` contribute nothing (the array is constant there).
pub fn beta_curve<F: KernelFamily + ?Sized>(family: &F, n: usize, jmax: usize) -> Result<Vec<f64>> {
    sweep(family, n, jmax, tv_dense)
}

pub fn beta_exact<F: KernelFamily + ?Sized>(family: &F, n: usize, j: usize) -> Result<f64> {
    Ok(*beta_curve(family, n, j)?.last().expect("j >= 1"))
}

/// `β^{(V)}_n(j)` for `j = 1..=jmax`, with `‖·‖_V = Σ V|·|`.
pub fn beta_v_curve<F: KernelFamily + ?Sized>(
    family: &F,
    v: &[f64],
    n: usize,
    jmax: usize,
) -> Result<Vec<f64>> {
    if v.len() != family.state_count() || v.iter().any(|x| !(*x >= 1.0)) {
        return Err(Error::InvalidArgument(
            "V must have one value >= 1 per state".into(),
        ));
    }
    sweep(family, n, jmax, |a, b| vnorm_dense(a, b, v))
}

pub fn beta_v_exact<F: KernelFamily + ?Sized>(
    family: &F,
    v: &[f64],
    n: usize,
    j: usize,
) -> Result<f64> {
    Ok(*beta_v_curve(family, v, n, j)?.last().expect("j >= 1"))
}

/// Constants of the geometric β-mixing bound `C ρ^{⌊j/m⌋}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaBound {
    pub c: f64,
    pub rho: f64,
    pub m: usize,
}

impl BetaBound {
    /// With `ε* = ((1−r)/(4mL))^{1/κ}`: if `n ≥ m/ε*`, windows of `m` kernels
    /// stay `m/n`-close, so `ρ = r + 2mL(m/n)^κ` and `C = 1`; otherwise
    /// `ρ = (1+r)/2` and `C = ρ^{−1/ε*−1}`.
    pub fn from_certificate(cert: &DoeblinCertificate, l_tv: f64, kappa: f64, n: usize) -> Self {
        let m = cert.m as f64;
        let r = cert.r_bound;
        if l_tv == 0.0 {
            return BetaBound {
                c: 1.0,
                rho: r,
                m: cert.m,
            };
        }
        let eps = ((1.0 - r) / (4.0 * m * l_tv)).powf(1.0 / kappa);
        if n as f64 >= m / eps {
            BetaBound {
                c: 1.0,
                rho: r + 2.0 * m * l_tv * (m / n as f64).powf(kappa),
                m: cert.m,
            }
        } else {
            let rho = 0.5 * (1.0 + r);
            BetaBound {
                c: rho.powf(-1.0 / eps - 1.0),
                rho,
                m: cert.m,
            }
        }
    }

    pub fn at(&self, j: usize) -> f64 {
        self.c * self.rho.powi((j / self.m) as i32)
    }
}

/// `2δ^{-1} sup_k π_k V · K^s γ^g` with `j = mg + s`.
pub fn mixsuf_bound(
    sup_pi_v: f64,
    delta: f64,
    gamma: f64,
    k_const: f64,
    m: usize,
    j: usize,
) -> f64 {
    let (g, s) = (j / m, j % m);
    2.0 / delta * sup_pi_v * k_const.powi(s as i32) * gamma.powi(g as i32)
}
