use serde::Serialize;

use super::contraction::search_doeblin;
use super::family::FiniteKernelFamily;
use crate::error::Result;

/// Constants `(L, m, r, κ)` of the total-variation approximation bound.
///
/// `L` is the row-TV Hölder constant, `(m, r)` a Doeblin certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxConstants {
    pub l: f64,
    pub m: usize,
    pub r: f64,
    pub kappa: f64,
}

impl ApproxConstants {
    /// `L` from the family, `(m, r)` from the first Doeblin power on the grid.
    pub fn certify(family: &FiniteKernelFamily, grid: &[f64], m_cap: usize) -> Result<Self> {
        let cert = search_doeblin(family, grid, m_cap)?;
        Ok(ApproxConstants {
            l: family.tv_holder_l(),
            m: cert.m,
            r: cert.r_bound,
            kappa: family.holder_kappa(),
        })
    }

    /// `mL/(1-r)`: Hölder constant of `u ↦ π_u` in total variation.
    pub fn continuity_constant(&self) -> f64 {
        self.m as f64 * self.l / (1.0 - self.r)
    }

    /// `C = L · max(m/(1-r), m^{1+κ} Σ_ℓ r^ℓ (ℓ+1)^κ)`.
    ///
    /// Splitting `|u - s/n|^κ ≤ |u - k/n|^κ + |k - s|^κ n^{-κ}` in the geometric
    /// chain bound gives both terms.
    pub fn constant(&self) -> f64 {
        let m = self.m as f64;
        let mut series = 0.0;
        let mut rl = 1.0;
        let mut l = 0usize;
        loop {
            let t = rl * ((l + 1) as f64).powf(self.kappa);
            series += t;
            if t < 1e-17 * series || l > 100_000 {
                break;
            }
            rl *= self.r;
            l += 1;
        }
        self.l * (m / (1.0 - self.r)).max(m.powf(1.0 + self.kappa) * series)
    }

    /// `C [Σ_{s=k}^{k+j-1} |u - s/n|^κ + n^{-κ}]`.
    pub fn bound(&self, n: usize, k: i64, j: usize, u: f64) -> f64 {
        let nf = n as f64;
        let s: f64 = (0..j as i64)
            .map(|t| (u - (k + t) as f64 / nf).abs().powf(self.kappa))
            .sum();
        self.constant() * (s + nf.powf(-self.kappa))
    }

    /// The sharper chain bound before constants are collected:
    /// `L Σ_ℓ r^ℓ Σ_{s=k-(ℓ+1)m+1}^{k-ℓm} |u - s⁺/n|^κ + L Σ_{s=k+1}^{k+j-1} |u - s/n|^κ`.
    pub fn chain_bound(&self, n: usize, k: i64, j: usize, u: f64) -> f64 {
        let nf = n as f64;
        let m = self.m as i64;
        let term = |s: i64| (u - s.max(0) as f64 / nf).abs().powf(self.kappa);
        let mut total = 0.0;
        let mut rl = 1.0;
        let mut l = 0i64;
        loop {
            let hi = k - l * m;
            let lo = hi - m + 1;
            if hi <= 0 {
                // Every remaining block sits in the homogeneous past.
                total += rl * m as f64 * term(0) / (1.0 - self.r);
                break;
            }
            total += rl * (lo..=hi).map(term).sum::<f64>();
            rl *= self.r;
            l += 1;
            if rl < 1e-300 {
                break;
            }
        }
        let extra: f64 = (k + 1..k + j as i64)
            .map(|s| (u - s as f64 / nf).abs().powf(self.kappa))
            .sum();
        self.l * (total + extra)
    }
}
