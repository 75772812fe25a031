use crate::error::{Error, Result};

/// Dense row-stochastic matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    size: usize,
    data: Vec<f64>,
}

/// Tolerance on row sums and negativity when validating a kernel.
pub const ROW_SUM_TOL: f64 = 1e-12;

impl StochasticMatrix {
    /// Builds and validates a matrix from row-major data.
    pub fn new(size: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != size * size {
            return Err(Error::InvalidKernel(format!(
                "expected {} entries, got {}",
                size * size,
                data.len()
            )));
        }
        let m = StochasticMatrix { size, data };
        m.validate()?;
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        let mut data = Vec::with_capacity(size * size);
        for (x, r) in rows.iter().enumerate() {
            if r.len() != size {
                return Err(Error::InvalidKernel(format!(
                    "row {x} has length {}, expected {size}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(size, data)
    }

    /// Skips validation. Callers guarantee stochasticity.
    pub(crate) fn from_raw(size: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), size * size);
        StochasticMatrix { size, data }
    }

    pub fn identity(size: usize) -> Self {
        let mut data = vec![0.0; size * size];
        for i in 0..size {
            data[i * size + i] = 1.0;
        }
        StochasticMatrix { size, data }
    }

    fn validate(&self) -> Result<()> {
        for x in 0..self.size {
            let row = self.row(x);
            if let Some(y) = row.iter().position(|&p| !p.is_finite() || p < -ROW_SUM_TOL) {
                return Err(Error::InvalidKernel(format!(
                    "entry ({x},{y}) = {} is not a probability",
                    row[y]
                )));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidKernel(format!("row {x} sums to {s}")));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.size + y]
    }

    #[inline]
    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.size..(x + 1) * self.size]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &StochasticMatrix) -> StochasticMatrix {
        assert_eq!(self.size, other.size);
        let s = self.size;
        // Banded kernels (walks, truncated chains) are mostly zeros.
        let nz: Vec<Vec<(usize, f64)>> = (0..s)
            .map(|k| {
                other
                    .row(k)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(j, v)| (j, *v))
                    .collect()
            })
            .collect();
        let mut out = vec![0.0; s * s];
        for i in 0..s {
            let orow = &mut out[i * s..(i + 1) * s];
            for (k, brow) in nz.iter().enumerate() {
                let a = self.data[i * s + k];
                if a == 0.0 {
                    continue;
                }
                for &(j, b) in brow {
                    orow[j] += a * b;
                }
            }
        }
        StochasticMatrix::from_raw(s, out)
    }

    /// `self^m` by binary exponentiation; `m = 0` gives the identity.
    pub fn pow(&self, mut m: usize) -> StochasticMatrix {
        let mut result = StochasticMatrix::identity(self.size);
        let mut base = self.clone();
        while m > 0 {
            if m & 1 == 1 {
                result = result.mul(&base);
            }
            m >>= 1;
            if m > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Row vector times matrix: `μ P`.
    pub fn left_mul(&self, mu: &[f64]) -> Vec<f64> {
        assert_eq!(mu.len(), self.size);
        let s = self.size;
        let mut out = vec![0.0; s];
        for (x, &w) in mu.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, p) in out.iter_mut().zip(self.row(x)) {
                *o += w * p;
            }
        }
        out
    }

    /// Matrix times column vector: `P f`.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.size);
        (0..self.size)
            .map(|x| self.row(x).iter().zip(f).map(|(p, v)| p * v).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, other: &StochasticMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
