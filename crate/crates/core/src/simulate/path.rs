use std::fmt::Display;
use std::io::{self, Write};

/// One simulated trajectory `(X_{n,k})_{k_min ≤ k ≤ n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample<T> {
    pub n: usize,
    pub k_min: i64,
    pub values: Vec<T>,
    pub label: String,
    pub seed: u64,
    pub stream_id: u64,
    /// Number of pre-history steps run from an arbitrary start (0 for exact starts).
    pub burn_in: usize,
}

impl<T: Copy> PathSample<T> {
    pub fn get(&self, k: i64) -> T {
        self.values[(k - self.k_min) as usize]
    }

    /// Values for `k = 1..=n`.
    pub fn observed(&self) -> &[T] {
        let start = (1 - self.k_min) as usize;
        &self.values[start..]
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.values.len() as i64 - 1
    }
}

impl<T: Display> PathSample<T> {
    /// CSV with columns `k,u,value`, `u = k/n`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "k,u,value")?;
        for (idx, v) in self.values.iter().enumerate() {
            let k = self.k_min + idx as i64;
            writeln!(w, "{k},{},{v}", k as f64 / self.n as f64)?;
        }
        Ok(())
    }
}
