use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kernels supported on `[-1, 1]` with unit mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// `0.75 (1 − x²)`
    Epanechnikov,
    /// `1 − |x|`
    Triangular,
}

// Points this close to the window edge get zero weight, so `|u − i/n| = b`
// is excluded regardless of rounding.
const EDGE: f64 = 1.0 - 1e-12;

impl KernelKind {
    #[inline]
    pub fn eval(self, x: f64) -> f64 {
        if !(x.abs() < EDGE) {
            return 0.0;
        }
        match self {
            KernelKind::Epanechnikov => 0.75 * (1.0 - x * x),
            KernelKind::Triangular => 1.0 - x.abs(),
        }
    }

    /// `∫K²`.
    pub fn k2(self) -> f64 {
        match self {
            KernelKind::Epanechnikov => 0.6,
            KernelKind::Triangular => 2.0 / 3.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Epanechnikov => "epanechnikov",
            KernelKind::Triangular => "triangular",
        }
    }
}

/// Composite Simpson rule on `[-1, 1]`.
fn simpson<F: Fn(f64) -> f64>(f: F, intervals: usize) -> f64 {
    let h = 2.0 / intervals as f64;
    let mut s = f(-1.0) + f(1.0);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(-1.0 + i as f64 * h);
    }
    s * h / 3.0
}

/// Kernel, bandwidth `b ∈ (0,1)` and first usable index `ℓ ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingSpec {
    pub kernel: KernelKind,
    pub bandwidth: f64,
    pub lower_index: usize,
}

impl SmoothingSpec {
    /// Validates the bandwidth and checks `∫K = 1` and `∫K² = k2` by quadrature.
    pub fn new(kernel: KernelKind, bandwidth: f64, lower_index: usize) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "bandwidth {bandwidth} outside (0,1)"
            )));
        }
        if lower_index == 0 {
            return Err(Error::InvalidArgument(
                "lower index must be at least 1".into(),
            ));
        }
        let mass = simpson(|x| kernel.eval(x), 2000);
        let sq = simpson(|x| kernel.eval(x).powi(2), 2000);
        if (mass - 1.0).abs() > 1e-6 || (sq - kernel.k2()).abs() > 1e-6 {
            return Err(Error::Diagnostic(format!(
                "{} kernel quadrature gives mass {mass}, square {sq}",
                kernel.name()
            )));
        }
        Ok(SmoothingSpec {
            kernel,
            bandwidth,
            lower_index,
        })
    }

    /// `b = c · n^{-exponent}`.
    pub fn from_rule(
        kernel: KernelKind,
        c: f64,
        exponent: f64,
        n: usize,
        lower_index: usize,
    ) -> Result<Self> {
        Self::new(kernel, c * (n as f64).powf(-exponent), lower_index)
    }

    pub fn k2(&self) -> f64 {
        self.kernel.k2()
    }

    pub fn with_lower_index(mut self, l: usize) -> Self {
        self.lower_index = l.max(1);
        self
    }
}
