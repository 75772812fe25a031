use crate::error::{Error, Result};

/// Tolerance on the total mass of a [`DiscreteMeasure`].
pub const MASS_TOL: f64 = 1e-12;

/// Finite probability distribution on strictly increasing real support points.
///
/// State-indexed laws use the support `0, 1, …, S-1` (see [`DiscreteMeasure::on_states`]).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    support: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(support: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if support.len() != weights.len() || support.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "support has {} points, weights has {}",
                support.len(),
                weights.len()
            )));
        }
        if support.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument("non-finite support point".into()));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "support points must be strictly increasing".into(),
            ));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidArgument("negative or NaN weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidArgument(format!("weights sum to {total}")));
        }
        Ok(DiscreteMeasure { support, weights })
    }

    /// Law on the integer states `0..weights.len()`.
    pub fn on_states(weights: Vec<f64>) -> Result<Self> {
        let support = (0..weights.len()).map(|x| x as f64).collect();
        Self::new(support, weights)
    }

    /// Builds a measure from possibly unsorted, repeated atoms; drops zero weights.
    pub fn from_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        let mut a: Vec<(f64, f64)> = atoms.iter().copied().filter(|(_, w)| *w != 0.0).collect();
        if a.iter().any(|(x, _)| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite support point".into()));
        }
        a.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut support: Vec<f64> = Vec::with_capacity(a.len());
        let mut weights: Vec<f64> = Vec::with_capacity(a.len());
        for (x, w) in a {
            if support.last() == Some(&x) {
                *weights.last_mut().unwrap() += w;
            } else {
                support.push(x);
                weights.push(w);
            }
        }
        Self::new(support, weights)
    }

    pub fn dirac(x: f64) -> Self {
        DiscreteMeasure {
            support: vec![x],
            weights: vec![1.0],
        }
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Weight at a support point, zero if absent.
    pub fn mass_at(&self, x: f64) -> f64 {
        match self.support.binary_search_by(|s| s.total_cmp(&x)) {
            Ok(i) => self.weights[i],
            Err(_) => 0.0,
        }
    }

    pub fn mean(&self) -> f64 {
        self.support
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| x * w)
            .sum()
    }

    /// Integral of `f` against the measure.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.support
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}

/// Merges two supports into one sorted list with aligned weights.
pub(crate) fn align(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let (a, b) = (mu.support(), nu.support());
    let (mut i, mut j) = (0, 0);
    let mut pts = Vec::with_capacity(a.len() + b.len());
    let mut wa = Vec::with_capacity(a.len() + b.len());
    let mut wb = Vec::with_capacity(a.len() + b.len());
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i] <= b[j]);
        let take_b = i >= a.len() || (j < b.len() && b[j] <= a[i]);
        let x = if take_a { a[i] } else { b[j] };
        pts.push(x);
        wa.push(if take_a { mu.weights()[i] } else { 0.0 });
        wb.push(if take_b { nu.weights()[j] } else { 0.0 });
        if take_a {
            i += 1;
        }
        if take_b {
            j += 1;
        }
    }
    (pts, wa, wb)
}
