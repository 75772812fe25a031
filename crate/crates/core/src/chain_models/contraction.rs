use super::family::{FiniteKernelFamily, KernelFamily};
use super::matrix::StochasticMatrix;
use crate::error::{Error, Result};

/// `½ Σ |a - b|`.
pub(crate) fn tv_rows(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Dobrushin coefficient `c(P) = max_{x,y} ‖δ_x P - δ_y P‖_TV`.
pub fn dobrushin_tv(p: &StochasticMatrix) -> f64 {
    let s = p.size();
    let mut c: f64 = 0.0;
    for x in 0..s {
        for y in (x + 1)..s {
            c = c.max(tv_rows(p.row(x), p.row(y)));
        }
    }
    c.min(1.0)
}

/// Doeblin constants for one power `m` over a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoeblinCertificate {
    pub m: usize,
    /// `S · min_{u,x,y} Q_u^m(x,y)`.
    pub epsilon: f64,
    /// `1 - epsilon`, an upper bound on `sup_u c(Q_u^m)`.
    pub r_bound: f64,
}

/// `ε = S · min over grid u and (x,y) of Q_u^m(x,y)`, `r = 1 - ε`.
pub fn doeblin_certificate<F: KernelFamily + ?Sized>(
    family: &F,
    m: usize,
    grid: &[f64],
) -> Result<DoeblinCertificate> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let s = family.state_count() as f64;
    let mut min = f64::INFINITY;
    for &u in grid {
        min = min.min(family.transition_matrix(u)?.pow(m).min_entry());
    }
    let epsilon = (s * min).min(1.0);
    if !(epsilon > 0.0) {
        return Err(Error::CertificateNotFound(format!(
            "Q_u^{m} has a zero entry on the grid"
        )));
    }
    Ok(DoeblinCertificate {
        m,
        epsilon,
        r_bound: 1.0 - epsilon,
    })
}

/// First `m ≤ m_cap` with a positive Doeblin constant.
pub fn search_doeblin<F: KernelFamily + ?Sized>(
    family: &F,
    grid: &[f64],
    m_cap: usize,
) -> Result<DoeblinCertificate> {
    let mats = grid
        .iter()
        .map(|&u| family.transition_matrix(u))
        .collect::<Result<Vec<_>>>()?;
    let s = family.state_count() as f64;
    let mut powers = mats.clone();
    for m in 1..=m_cap {
        if m > 1 {
            for (pw, q) in powers.iter_mut().zip(&mats) {
                *pw = pw.mul(q);
            }
        }
        let min = powers
            .iter()
            .map(|p| p.min_entry())
            .fold(f64::INFINITY, f64::min);
        if min > 0.0 {
            let epsilon = (s * min).min(1.0);
            return Ok(DoeblinCertificate {
                m,
                epsilon,
                r_bound: 1.0 - epsilon,
            });
        }
    }
    Err(Error::CertificateNotFound(format!(
        "no m ≤ {m_cap} gives a strictly positive Q_u^m on the grid"
    )))
}

/// `sup_u c(Q_u^m)` on a grid: the sharpest `r` for the given `m`.
pub fn max_dobrushin_power(family: &FiniteKernelFamily, m: usize, grid: &[f64]) -> Result<f64> {
    let mut r: f64 = 0.0;
    for &u in grid {
        r = r.max(dobrushin_tv(&family.transition_matrix(u)?.pow(m)));
    }
    Ok(r)
}

/// Pairwise sums `A_xy = Σ_z |P(x,z) - P(y,z)|` and `B_xy = Σ_z V(z)|P(x,z) - P(y,z)|`
/// for a fixed matrix, so that the `V_δ` coefficient is cheap for many `δ`.
#[derive(Debug, Clone)]
pub struct VnormPairs {
    v: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
    pairs: Vec<(usize, usize)>,
}

impl VnormPairs {
    pub fn new(p: &StochasticMatrix, v: &[f64]) -> Self {
        let s = p.size();
        assert_eq!(v.len(), s);
        let mut a = Vec::with_capacity(s * (s - 1) / 2);
        let mut b = Vec::with_capacity(s * (s - 1) / 2);
        let mut pairs = Vec::with_capacity(s * (s - 1) / 2);
        for x in 0..s {
            let rx = p.row(x);
            for y in (x + 1)..s {
                let ry = p.row(y);
                let (mut sa, mut sb) = (0.0, 0.0);
                for z in 0..s {
                    let d = (rx[z] - ry[z]).abs();
                    sa += d;
                    sb += v[z] * d;
                }
                a.push(sa);
                b.push(sb);
                pairs.push((x, y));
            }
        }
        VnormPairs {
            v: v.to_vec(),
            a,
            b,
            pairs,
        }
    }

    /// `Δ_{V_δ}(P) = sup_{x≠y} ‖δ_x P - δ_y P‖_{V_δ} / (V_δ(x) + V_δ(y))`, `V_δ = 1-δ+δV`.
    pub fn coefficient(&self, delta: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, &(x, y)) in self.pairs.iter().enumerate() {
            let num = (1.0 - delta) * self.a[k] + delta * self.b[k];
            let den = 2.0 * (1.0 - delta) + delta * (self.v[x] + self.v[y]);
            worst = worst.max(num / den);
        }
        worst
    }
}

/// `Δ_{V_δ}(P)` for drift values `v` (one per state).
pub fn dobrushin_vnorm_values(p: &StochasticMatrix, v: &[f64], delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "delta = {delta} not in (0,1]"
        )));
    }
    if v.len() != p.size() || v.iter().any(|x| !(*x >= 1.0)) {
        return Err(Error::InvalidArgument(
            "V must be ≥ 1 on every state".into(),
        ));
    }
    Ok(VnormPairs::new(p, v).coefficient(delta))
}
