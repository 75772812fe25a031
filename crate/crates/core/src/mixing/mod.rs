//! Mixing coefficients of the triangular arrays: exact β and `V`-weighted β on
//! finite or truncated spaces, and coupling upper estimates of τ.

mod beta;
mod tau;

use std::io::{self, Write};

pub use beta::{beta_curve, beta_exact, beta_v_curve, beta_v_exact, mixsuf_bound, BetaBound};
pub use tau::{default_starts, tau_curve_mc, tau_upper_mc, TauEstimate, TauModel};

/// Mixing coefficients per lag next to their theoretical bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingCurve {
    pub lags: Vec<usize>,
    pub values: Vec<f64>,
    pub bounds: Vec<Option<f64>>,
    pub se: Vec<Option<f64>>,
    pub n: usize,
    pub model_label: String,
}

impl MixingCurve {
    /// Lags where a bound is present and falls below the value by more than `tol`.
    pub fn violations(&self, tol: f64) -> Vec<usize> {
        self.lags
            .iter()
            .zip(&self.values)
            .zip(&self.bounds)
            .filter_map(|((j, v), b)| match b {
                Some(b) if *v > b + tol => Some(*j),
                _ => None,
            })
            .collect()
    }

    /// CSV with columns `j,value,bound,se` (missing entries left empty).
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "j,value,bound,se")?;
        for i in 0..self.lags.len() {
            let opt = |o: Option<f64>| o.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{}",
                self.lags[i],
                self.values[i],
                opt(self.bounds[i]),
                opt(self.se[i])
            )?;
        }
        Ok(())
    }
}
