use std::fmt;
use std::sync::Arc;

use statrs::distribution::{Binomial, Discrete, Poisson};

use super::matrix::{StochasticMatrix, ROW_SUM_TOL};
use crate::coef::{uniform_grid, UFn};
use crate::error::{Error, Result};

/// Entry function `(u, x, y) ↦ Q_u(x, y)`.
pub type EntryFn = Arc<dyn Fn(f64, usize, usize) -> f64 + Send + Sync>;

/// Anything that maps `u` to a stochastic matrix on `{0..S-1}`.
pub trait KernelFamily: Send + Sync {
    fn state_count(&self) -> usize;

    /// `Q_u`, with `Q_u = Q_0` for `u < 0`.
    fn transition_matrix(&self, u: f64) -> Result<StochasticMatrix>;

    fn label(&self) -> &str;
}

fn clamp_u(u: f64) -> Result<f64> {
    if u.is_nan() || u > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "u = {u} lies outside (-inf, 1]"
        )));
    }
    Ok(u.clamp(0.0, 1.0))
}

/// Family of kernels on a finite space with declared Hölder regularity:
/// `|Q_u(x,y) - Q_v(x,y)| ≤ L |u-v|^κ`.
#[derive(Clone)]
pub struct FiniteKernelFamily {
    state_count: usize,
    entry: EntryFn,
    holder_l: f64,
    holder_kappa: f64,
    tv_holder_l: f64,
    label: String,
}

impl fmt::Debug for FiniteKernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteKernelFamily")
            .field("label", &self.label)
            .field("state_count", &self.state_count)
            .field("holder_l", &self.holder_l)
            .field("holder_kappa", &self.holder_kappa)
            .finish()
    }
}

impl FiniteKernelFamily {
    pub fn new(
        state_count: usize,
        entry: EntryFn,
        holder_l: f64,
        holder_kappa: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        if state_count < 2 {
            return Err(Error::InvalidKernel(format!(
                "state_count must be at least 2, got {state_count}"
            )));
        }
        if !(holder_l >= 0.0 && holder_l.is_finite()) {
            return Err(Error::InvalidKernel(format!("holder_l = {holder_l}")));
        }
        if !(holder_kappa > 0.0 && holder_kappa <= 1.0) {
            return Err(Error::InvalidKernel(format!(
                "holder_kappa = {holder_kappa} not in (0,1]"
            )));
        }
        Ok(FiniteKernelFamily {
            state_count,
            entry,
            holder_l,
            holder_kappa,
            tv_holder_l: 0.5 * state_count as f64 * holder_l,
            label: label.into(),
        })
    }

    /// Homogeneous family `Q_u = P`.
    pub fn constant(p: &StochasticMatrix, label: impl Into<String>) -> Result<Self> {
        let s = p.size();
        let data = p.data().to_vec();
        let entry: EntryFn = Arc::new(move |_, x, y| data[x * s + y]);
        Self::new(s, entry, 0.0, 1.0, label)
    }

    /// `Q_u = (1-u) A + u B`. The Hölder constants are exact (κ = 1).
    pub fn affine(
        a: &StochasticMatrix,
        b: &StochasticMatrix,
        label: impl Into<String>,
    ) -> Result<Self> {
        let s = a.size();
        if b.size() != s {
            return Err(Error::InvalidKernel(
                "endpoint matrices differ in size".into(),
            ));
        }
        let l = a.max_abs_diff(b);
        let tv = (0..s)
            .map(|x| {
                0.5 * a
                    .row(x)
                    .iter()
                    .zip(b.row(x))
                    .map(|(p, q)| (p - q).abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        let (ad, bd) = (a.data().to_vec(), b.data().to_vec());
        let entry: EntryFn = Arc::new(move |u, x, y| (1.0 - u) * ad[x * s + y] + u * bd[x * s + y]);
        let mut fam = Self::new(s, entry, l, 1.0, label)?;
        fam.tv_holder_l = tv;
        Ok(fam)
    }

    /// Overrides the row-TV Hölder constant `sup_x ‖Q_u(x,·) - Q_v(x,·)‖_TV / |u-v|^κ`.
    /// Defaults to `S·L/2`, which always holds.
    pub fn with_tv_holder_l(mut self, l: f64) -> Self {
        self.tv_holder_l = l;
        self
    }

    pub fn holder_l(&self) -> f64 {
        self.holder_l
    }

    pub fn holder_kappa(&self) -> f64 {
        self.holder_kappa
    }

    /// Row-wise total-variation Hölder constant; the `L` of the contraction bounds.
    pub fn tv_holder_l(&self) -> f64 {
        self.tv_holder_l
    }

    pub fn entry(&self, u: f64, x: usize, y: usize) -> f64 {
        (self.entry)(u.max(0.0), x, y)
    }

    /// Checks stochasticity and the declared Hölder bound on a uniform grid.
    pub fn validate_on_grid(&self, points: usize) -> Result<()> {
        let grid = uniform_grid(points);
        let mats = grid
            .iter()
            .map(|&u| self.transition_matrix(u))
            .collect::<Result<Vec<_>>>()?;
        let s = self.state_count;
        for i in 0..grid.len() {
            for j in (i + 1)..grid.len() {
                let h = (grid[j] - grid[i]).abs().powf(self.holder_kappa);
                let lim = self.holder_l * h + 1e-12;
                let tv_lim = self.tv_holder_l * h + 1e-12;
                for x in 0..s {
                    let (ri, rj) = (mats[i].row(x), mats[j].row(x));
                    let mut tv = 0.0;
                    for y in 0..s {
                        let d = (ri[y] - rj[y]).abs();
                        if d > lim {
                            return Err(Error::InvalidKernel(format!(
                                "Hölder bound fails at u={}, v={}, entry ({x},{y}): {d:.3e} > {lim:.3e}",
                                grid[i], grid[j]
                            )));
                        }
                        tv += d;
                    }
                    if 0.5 * tv > tv_lim {
                        return Err(Error::InvalidKernel(format!(
                            "row TV Hölder bound fails at u={}, v={}, row {x}",
                            grid[i], grid[j]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

impl KernelFamily for FiniteKernelFamily {
    fn state_count(&self) -> usize {
        self.state_count
    }

    fn transition_matrix(&self, u: f64) -> Result<StochasticMatrix> {
        let u = clamp_u(u)?;
        let s = self.state_count;
        let mut data = Vec::with_capacity(s * s);
        for x in 0..s {
            for y in 0..s {
                data.push((self.entry)(u, x, y));
            }
        }
        StochasticMatrix::new(s, data)
            .map_err(|e| Error::InvalidKernel(format!("{} at u={u}: {e}", self.label)))
    }

    fn label(&self) -> &str {
        &self.label
    }
}

/// Kernel family on ℕ, truncated to `{0..N}` with renormalized rows.
///
/// Rows whose lost mass exceeds `tail_tolerance` raise a truncation error,
/// except the top `boundary_width` rows, where leakage past `N` is structural
/// (a walk at `N` steps up to `N+1`). Those rows are renormalized silently.
#[derive(Clone)]
pub struct CountableKernelFamily {
    truncation_n: usize,
    entry: EntryFn,
    tail_tolerance: f64,
    boundary_width: usize,
    label: String,
}

impl fmt::Debug for CountableKernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CountableKernelFamily")
            .field("label", &self.label)
            .field("truncation_n", &self.truncation_n)
            .field("tail_tolerance", &self.tail_tolerance)
            .field("boundary_width", &self.boundary_width)
            .finish()
    }
}

/// Worst truncation loss over the checked rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationReport {
    pub worst_deficit: f64,
    pub row: usize,
    pub u: f64,
}

pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;

impl CountableKernelFamily {
    pub fn new(truncation_n: usize, entry: EntryFn, label: impl Into<String>) -> Self {
        CountableKernelFamily {
            truncation_n,
            entry,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
            boundary_width: 0,
            label: label.into(),
        }
    }

    pub fn with_tail_tolerance(mut self, tol: f64) -> Self {
        self.tail_tolerance = tol;
        self
    }

    pub fn with_boundary_width(mut self, w: usize) -> Self {
        self.boundary_width = w;
        self
    }

    pub fn truncation_n(&self) -> usize {
        self.truncation_n
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    /// Reflected random walk: from `x ≥ 1`, down with `q(u)`, hold with `r(u)`,
    /// up with `p(u)`; from 0, up with `p(u)` and hold otherwise.
    pub fn random_walk(p: UFn, q: UFn, r: UFn, truncation_n: usize) -> Self {
        let entry: EntryFn = Arc::new(move |u, x, y| {
            let (pu, qu, ru) = (p(u), q(u), r(u));
            if x == 0 {
                match y {
                    0 => 1.0 - pu,
                    1 => pu,
                    _ => 0.0,
                }
            } else if y + 1 == x {
                qu
            } else if y == x {
                ru
            } else if y == x + 1 {
                pu
            } else {
                0.0
            }
        });
        CountableKernelFamily::new(truncation_n, entry, "random-walk").with_boundary_width(1)
    }

    /// tv-INAR(1): `Q_u(x,·) = Binomial(x, α(u)) * Poisson(λ(u))`.
    ///
    /// Rows above `truncation_n / 2` are treated as boundary rows.
    pub fn inar1(alpha: UFn, lambda: UFn, truncation_n: usize) -> Self {
        let entry: EntryFn = Arc::new(move |u, x, y| {
            let (a, l) = (alpha(u), lambda(u));
            let pois = Poisson::new(l).ok();
            let bin = Binomial::new(a, x as u64).ok();
            let mut s = 0.0;
            for t in 0..=x.min(y) {
                let pb = match &bin {
                    Some(b) => b.pmf(t as u64),
                    None => (t == 0) as u8 as f64,
                };
                let pp = match &pois {
                    Some(p) => p.pmf((y - t) as u64),
                    None => (y == t) as u8 as f64,
                };
                s += pb * pp;
            }
            s
        });
        CountableKernelFamily::new(truncation_n, entry, "inar1")
            .with_boundary_width(truncation_n / 2)
    }

    fn raw_rows(&self, u: f64) -> (Vec<f64>, Vec<f64>) {
        let s = self.truncation_n + 1;
        let mut data = Vec::with_capacity(s * s);
        let mut sums = Vec::with_capacity(s);
        for x in 0..s {
            let mut t = 0.0;
            for y in 0..s {
                let p = (self.entry)(u, x, y);
                t += p;
                data.push(p);
            }
            sums.push(t);
        }
        (data, sums)
    }

    /// Worst row deficit on a grid, over the non-boundary rows.
    pub fn truncation_report(&self, grid: &[f64]) -> Result<TruncationReport> {
        let mut rep = TruncationReport {
            worst_deficit: 0.0,
            row: 0,
            u: 0.0,
        };
        let checked = (self.truncation_n + 1).saturating_sub(self.boundary_width);
        for &u in grid {
            let u = clamp_u(u)?;
            let (_, sums) = self.raw_rows(u);
            for (x, s) in sums.iter().enumerate().take(checked) {
                let d = 1.0 - s;
                if d > rep.worst_deficit {
                    rep = TruncationReport {
                        worst_deficit: d,
                        row: x,
                        u,
                    };
                }
            }
        }
        Ok(rep)
    }
}

impl KernelFamily for CountableKernelFamily {
    fn state_count(&self) -> usize {
        self.truncation_n + 1
    }

    fn transition_matrix(&self, u: f64) -> Result<StochasticMatrix> {
        let u = clamp_u(u)?;
        let s = self.truncation_n + 1;
        let (mut data, sums) = self.raw_rows(u);
        let checked = s.saturating_sub(self.boundary_width);
        for x in 0..s {
            let deficit = 1.0 - sums[x];
            if x < checked && deficit > self.tail_tolerance {
                return Err(Error::Truncation { row: x, u, deficit });
            }
            if sums[x] <= 0.0 {
                return Err(Error::InvalidKernel(format!(
                    "row {x} has no mass at u={u}"
                )));
            }
            for p in &mut data[x * s..(x + 1) * s] {
                if *p < -ROW_SUM_TOL {
                    return Err(Error::InvalidKernel(format!(
                        "negative entry in row {x} at u={u}"
                    )));
                }
                *p = p.max(0.0) / sums[x];
            }
        }
        StochasticMatrix::new(s, data)
    }

    fn label(&self) -> &str {
        &self.label
    }
}
