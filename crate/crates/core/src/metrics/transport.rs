use super::measure::DiscreteMeasure;
use crate::error::{Error, Result};

/// Largest support the exact solver accepts on either side.
pub const ORACLE_CAP: usize = 64;

/// Nonnegative transport costs `c(x_i, y_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "cost matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::InvalidArgument(
                "costs must be finite and nonnegative".into(),
            ));
        }
        Ok(CostMatrix { rows, cols, data })
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(xs: &[f64], ys: &[f64], f: F) -> Result<Self> {
        let data = xs
            .iter()
            .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(xs.len(), ys.len(), data)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }
}

/// Joint weights on a product of two supports.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    rows: Vec<f64>,
    cols: Vec<f64>,
    weights: Vec<f64>,
}

impl Coupling {
    pub fn zeros(rows: Vec<f64>, cols: Vec<f64>) -> Self {
        let n = rows.len() * cols.len();
        Coupling {
            rows,
            cols,
            weights: vec![0.0; n],
        }
    }

    pub(crate) fn add(&mut self, i: usize, j: usize, w: f64) {
        let c = self.cols.len();
        self.weights[i * c + j] += w;
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.cols.len() + j]
    }

    pub fn row_support(&self) -> &[f64] {
        &self.rows
    }

    pub fn col_support(&self) -> &[f64] {
        &self.cols
    }

    pub fn cost(&self, c: &CostMatrix) -> f64 {
        let nc = self.cols.len();
        self.weights
            .iter()
            .enumerate()
            .map(|(k, w)| w * c.get(k / nc, k % nc))
            .sum()
    }

    /// Errors unless the plan is nonnegative with marginals `μ` and `ν` within `tol`.
    pub fn check_marginals(
        &self,
        mu: &DiscreteMeasure,
        nu: &DiscreteMeasure,
        tol: f64,
    ) -> Result<()> {
        let (nr, nc) = (self.rows.len(), self.cols.len());
        if self.weights.iter().any(|w| *w < -tol) {
            return Err(Error::Diagnostic("negative coupling weight".into()));
        }
        for i in 0..nr {
            let s: f64 = (0..nc).map(|j| self.weight(i, j)).sum();
            if (s - mu.weights()[i]).abs() > tol {
                return Err(Error::Diagnostic(format!(
                    "row marginal {i} off by {:.3e}",
                    s - mu.weights()[i]
                )));
            }
        }
        for j in 0..nc {
            let s: f64 = (0..nr).map(|i| self.weight(i, j)).sum();
            if (s - nu.weights()[j]).abs() > tol {
                return Err(Error::Diagnostic(format!(
                    "column marginal {j} off by {:.3e}",
                    s - nu.weights()[j]
                )));
            }
        }
        Ok(())
    }
}

struct Edge {
    to: usize,
    cap: f64,
    cost: f64,
}

const FLOW_EPS: f64 = 1e-15;

/// Exact minimum-cost coupling by successive shortest paths (Bellman-Ford on
/// the residual network of source → μ atoms → ν atoms → sink).
///
/// Deliberately unrelated to the quantile construction so that the two can
/// serve as oracles for each other.
pub fn transport_oracle(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cost: &CostMatrix,
) -> Result<(f64, Coupling)> {
    let (n, m) = (mu.len(), nu.len());
    if n > ORACLE_CAP || m > ORACLE_CAP {
        return Err(Error::SizeCap {
            size: n.max(m),
            cap: ORACLE_CAP,
        });
    }
    if cost.rows() != n || cost.cols() != m {
        return Err(Error::InvalidArgument(
            "cost matrix does not match the supports".into(),
        ));
    }
    let nodes = n + m + 2;
    let (src, snk) = (n + m, n + m + 1);
    let mut edges: Vec<Edge> = Vec::with_capacity(2 * (n * m + n + m));
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    let add_edge =
        |edges: &mut Vec<Edge>, adj: &mut Vec<Vec<usize>>, a: usize, b: usize, cap: f64, c: f64| {
            adj[a].push(edges.len());
            edges.push(Edge {
                to: b,
                cap,
                cost: c,
            });
            adj[b].push(edges.len());
            edges.push(Edge {
                to: a,
                cap: 0.0,
                cost: -c,
            });
        };
    for i in 0..n {
        add_edge(&mut edges, &mut adj, src, i, mu.weights()[i], 0.0);
    }
    let mut pair_edge = vec![0usize; n * m];
    for i in 0..n {
        for j in 0..m {
            pair_edge[i * m + j] = edges.len();
            add_edge(
                &mut edges,
                &mut adj,
                i,
                n + j,
                f64::INFINITY,
                cost.get(i, j),
            );
        }
    }
    for j in 0..m {
        add_edge(&mut edges, &mut adj, n + j, snk, nu.weights()[j], 0.0);
    }

    // Relaxations must beat rounding in the residual costs, or a spurious
    // negative cycle can appear.
    let scale = (0..n * m)
        .map(|t| cost.get(t / m, t % m).abs())
        .fold(0.0, f64::max);
    let relax_tol = 1e-15 + 1e-13 * scale;
    let mut shipped = 0.0;
    loop {
        let mut dist = vec![f64::INFINITY; nodes];
        let mut via = vec![usize::MAX; nodes];
        dist[src] = 0.0;
        for _ in 0..nodes {
            let mut changed = false;
            for a in 0..nodes {
                if dist[a] == f64::INFINITY {
                    continue;
                }
                for &e in &adj[a] {
                    let ed = &edges[e];
                    if ed.cap > FLOW_EPS && dist[a] + ed.cost < dist[ed.to] - relax_tol {
                        dist[ed.to] = dist[a] + ed.cost;
                        via[ed.to] = e;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist[snk] == f64::INFINITY {
            break;
        }
        let mut bottleneck = f64::INFINITY;
        let mut v = snk;
        let mut hops = 0;
        while v != src {
            hops += 1;
            if hops > nodes {
                return Err(Error::Diagnostic(
                    "residual network has a negative cycle".into(),
                ));
            }
            let e = via[v];
            bottleneck = bottleneck.min(edges[e].cap);
            v = edges[e ^ 1].to;
        }
        let mut v = snk;
        while v != src {
            let e = via[v];
            edges[e].cap -= bottleneck;
            edges[e ^ 1].cap += bottleneck;
            v = edges[e ^ 1].to;
        }
        shipped += bottleneck;
    }
    if (shipped - 1.0).abs() > 1e-10 {
        return Err(Error::Diagnostic(format!(
            "transport shipped {shipped} instead of 1"
        )));
    }
    let mut plan = Coupling::zeros(mu.support().to_vec(), nu.support().to_vec());
    for i in 0..n {
        for j in 0..m {
            let flow = edges[pair_edge[i * m + j] ^ 1].cap;
            if flow > 0.0 {
                plan.add(i, j, flow);
            }
        }
    }
    Ok((plan.cost(cost), plan))
}
