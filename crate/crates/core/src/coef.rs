//! Coefficient functions of the rescaled time `u ∈ [0,1]`.
//!
//! Models take their time-varying parameters as shared closures ([`UFn`]).
//! [`CoefFn`] is the declarative form used by scenario files: a polynomial or a
//! trigonometric series in `u`, which converts into a [`UFn`].

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// A shared real function of `u`.
pub type UFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Wraps a closure into a [`UFn`].
pub fn ufn<F>(f: F) -> UFn
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    Arc::new(f)
}

/// Constant function.
pub fn constant(c: f64) -> UFn {
    Arc::new(move |_| c)
}

/// Declarative coefficient function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefFn {
    /// `c` for all `u`.
    Constant(f64),
    /// `Σ_k coeffs[k] u^k`.
    Polynomial { poly: Vec<f64> },
    /// `a0 + Σ_k cos[k-1] cos(2πku) + sin[k-1] sin(2πku)`.
    Trig {
        a0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
}

impl CoefFn {
    pub fn poly(coeffs: &[f64]) -> Self {
        CoefFn::Polynomial {
            poly: coeffs.to_vec(),
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            CoefFn::Constant(c) => *c,
            CoefFn::Polynomial { poly } => poly.iter().rev().fold(0.0, |acc, c| acc * u + c),
            CoefFn::Trig { a0, cos, sin } => {
                let mut v = *a0;
                for (k, c) in cos.iter().enumerate() {
                    v += c * (2.0 * PI * (k + 1) as f64 * u).cos();
                }
                for (k, s) in sin.iter().enumerate() {
                    v += s * (2.0 * PI * (k + 1) as f64 * u).sin();
                }
                v
            }
        }
    }

    /// Upper bound on the Lipschitz constant over `[0,1]` (sup of |f'|).
    pub fn lipschitz_bound(&self) -> f64 {
        match self {
            CoefFn::Constant(_) => 0.0,
            CoefFn::Polynomial { poly } => poly
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c.abs())
                .sum(),
            CoefFn::Trig { cos, sin, .. } => {
                let c: f64 = cos
                    .iter()
                    .enumerate()
                    .map(|(k, a)| 2.0 * PI * (k + 1) as f64 * a.abs())
                    .sum();
                let s: f64 = sin
                    .iter()
                    .enumerate()
                    .map(|(k, a)| 2.0 * PI * (k + 1) as f64 * a.abs())
                    .sum();
                c + s
            }
        }
    }

    pub fn to_ufn(&self) -> UFn {
        let f = self.clone();
        Arc::new(move |u| f.eval(u))
    }
}

/// Uniform grid of `points` values on `[0,1]` (endpoints included).
pub fn uniform_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points)
            .map(|i| i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// Default evaluation grid size for "for all u" checks.
pub const DEFAULT_GRID_POINTS: usize = 201;
