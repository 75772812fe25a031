//! Scenario files: a TOML tree naming a model preset, the sample sizes, the
//! smoothing rule and the experiment to run.

use std::fmt;
use std::path::{Path, PathBuf};

use locstat::coef::{uniform_grid, CoefFn};
use locstat::estimate::KernelKind;
use locstat::StochasticMatrix;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Bounds,
    Rates,
    Clt,
    Mixing,
    Certify,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Bounds => "bounds",
            Experiment::Rates => "rates",
            Experiment::Clt => "clt",
            Experiment::Mixing => "mixing",
            Experiment::Certify => "certify",
        }
    }
}

/// `b = c · n^{-exponent}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandwidthRule {
    pub c: f64,
    pub exponent: f64,
    #[serde(default = "default_kernel")]
    pub kernel: KernelKind,
}

fn default_kernel() -> KernelKind {
    KernelKind::Epanechnikov
}

impl Default for BandwidthRule {
    fn default() -> Self {
        BandwidthRule {
            c: 1.0,
            exponent: 0.2,
            kernel: default_kernel(),
        }
    }
}

impl BandwidthRule {
    pub fn bandwidth(&self, n: usize) -> f64 {
        self.c * (n as f64).powf(-self.exponent)
    }
}

/// Model presets. Every coefficient is a function of `u` given as a constant,
/// `{ poly = [...] }` or `{ a0 = .., cos = [...], sin = [...] }`. `holder`, when
/// present, is the declared Lipschitz constant the coefficients must respect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    /// `Q_u = (1-u) A + u B`.
    FiniteAffine {
        a: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
        holder: Option<f64>,
    },
    /// Reflected walk on ℕ, truncated at `truncation` for exact computations,
    /// with drift function `V(x) = z^x`.
    RandomWalk {
        p: CoefFn,
        q: CoefFn,
        r: CoefFn,
        #[serde(default = "default_walk_truncation")]
        truncation: usize,
        #[serde(default = "default_z")]
        z: f64,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        holder: Option<f64>,
    },
    /// tv-INAR(q) with thinning coefficients `alpha[j]` and Poisson rate `lambda`.
    Inar1 {
        alpha: Vec<CoefFn>,
        lambda: CoefFn,
        #[serde(default = "default_inar_truncation")]
        truncation: usize,
        holder: Option<f64>,
    },
    /// `X_i = a(i/n) X_{i-1} + sigma(i/n) ξ_i`.
    TvAr1 {
        a: CoefFn,
        sigma: CoefFn,
        holder: Option<f64>,
    },
    /// `X_i = ξ_i² (a0(i/n) + a1(i/n) X_{i-1})`.
    TvArch1Squared {
        a0: CoefFn,
        a1: CoefFn,
        holder: Option<f64>,
    },
}

fn default_walk_truncation() -> usize {
    80
}
fn default_inar_truncation() -> usize {
    60
}
fn default_z() -> f64 {
    1.3
}
fn default_epsilon() -> f64 {
    0.05
}

impl ModelConfig {
    pub fn preset(&self) -> &'static str {
        match self {
            ModelConfig::FiniteAffine { .. } => "finite-affine",
            ModelConfig::RandomWalk { .. } => "random-walk",
            ModelConfig::Inar1 { .. } => "inar1",
            ModelConfig::TvAr1 { .. } => "tv-ar1",
            ModelConfig::TvArch1Squared { .. } => "tv-arch1-squared",
        }
    }

    pub fn truncation(&self) -> Option<usize> {
        match self {
            ModelConfig::RandomWalk { truncation, .. } | ModelConfig::Inar1 { truncation, .. } => {
                Some(*truncation)
            }
            _ => None,
        }
    }

    fn holder(&self) -> Option<f64> {
        match self {
            ModelConfig::FiniteAffine { holder, .. }
            | ModelConfig::RandomWalk { holder, .. }
            | ModelConfig::Inar1 { holder, .. }
            | ModelConfig::TvAr1 { holder, .. }
            | ModelConfig::TvArch1Squared { holder, .. } => *holder,
        }
    }

    /// Named coefficient functions, with their config paths.
    fn coefficients(&self) -> Vec<(String, &CoefFn)> {
        match self {
            ModelConfig::FiniteAffine { .. } => Vec::new(),
            ModelConfig::RandomWalk { p, q, r, .. } => vec![
                ("model.p".into(), p),
                ("model.q".into(), q),
                ("model.r".into(), r),
            ],
            ModelConfig::Inar1 { alpha, lambda, .. } => alpha
                .iter()
                .enumerate()
                .map(|(j, a)| (format!("model.alpha[{j}]"), a))
                .chain(std::iter::once(("model.lambda".to_string(), lambda)))
                .collect(),
            ModelConfig::TvAr1 { a, sigma, .. } => {
                vec![("model.a".into(), a), ("model.sigma".into(), sigma)]
            }
            ModelConfig::TvArch1Squared { a0, a1, .. } => {
                vec![("model.a0".into(), a0), ("model.a1".into(), a1)]
            }
        }
    }

    pub fn supports(&self, experiment: Experiment) -> bool {
        use Experiment::*;
        match self {
            ModelConfig::FiniteAffine { .. } | ModelConfig::RandomWalk { .. } => {
                experiment != Clt || matches!(self, ModelConfig::FiniteAffine { .. })
            }
            ModelConfig::Inar1 { .. } => experiment != Clt,
            ModelConfig::TvAr1 { .. } | ModelConfig::TvArch1Squared { .. } => {
                matches!(experiment, Bounds | Mixing | Certify)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    pub experiment: Experiment,
    pub model: ModelConfig,
    pub n_list: Vec<usize>,
    #[serde(default)]
    pub bandwidth_rule: BandwidthRule,
    #[serde(default = "default_u_grid")]
    pub u_grid: Vec<f64>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Largest lag of the mixing curves.
    #[serde(default = "default_jmax")]
    pub jmax: usize,
    /// Points of the uniform grid used for "for all u" checks and certificates.
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

fn default_version() -> u32 {
    SCHEMA_VERSION
}
fn default_u_grid() -> Vec<f64> {
    vec![0.25, 0.5, 0.75]
}
fn default_replicates() -> usize {
    1
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("locstat-out")
}
fn default_jmax() -> usize {
    30
}
fn default_grid_points() -> usize {
    201
}

/// One violated invariant, located by its path in the config tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn diag(path: impl Into<String>, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        path: path.into(),
        message: message.into(),
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, Diagnostic> {
        toml::from_str(text).map_err(|e| diag("config", e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, Diagnostic> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| diag("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn grid(&self) -> Vec<f64> {
        uniform_grid(self.grid_points)
    }

    /// Every violated invariant; empty when the config can run.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.version != SCHEMA_VERSION {
            out.push(diag(
                "version",
                format!(
                    "unsupported schema version {} (expected {SCHEMA_VERSION})",
                    self.version
                ),
            ));
        }
        if self.n_list.is_empty() {
            out.push(diag("n_list", "must not be empty"));
        } else if self.n_list.len() < 2
            && matches!(self.experiment, Experiment::Bounds | Experiment::Rates)
        {
            out.push(diag(
                "n_list",
                "rates are fitted across sample sizes; give at least two",
            ));
        }
        for (i, &n) in self.n_list.iter().enumerate() {
            if n < 10 {
                out.push(diag(
                    format!("n_list[{i}]"),
                    format!("{n} is below the minimum of 10"),
                ));
            }
            if i > 0 && n <= self.n_list[i - 1] {
                out.push(diag(
                    format!("n_list[{i}]"),
                    format!("{n} does not increase on {}", self.n_list[i - 1]),
                ));
            }
        }
        if self.u_grid.is_empty() {
            out.push(diag("u_grid", "must not be empty"));
        }
        for (i, &u) in self.u_grid.iter().enumerate() {
            if !(0.0..=1.0).contains(&u) {
                out.push(diag(
                    format!("u_grid[{i}]"),
                    format!("{u} is outside [0,1]"),
                ));
            }
        }
        if self.replicates < 1 {
            out.push(diag("replicates", "must be at least 1"));
        }
        if self.experiment == Experiment::Clt && self.replicates < 2 {
            out.push(diag("replicates", "clt needs at least 2 replicates"));
        }
        if self.grid_points < 2 {
            out.push(diag("grid_points", "must be at least 2"));
        }
        if self.jmax < 1 {
            out.push(diag("jmax", "must be at least 1"));
        }
        let rule = &self.bandwidth_rule;
        if !(rule.c > 0.0 && rule.exponent > 0.0 && rule.exponent < 1.0) {
            out.push(diag(
                "bandwidth_rule",
                format!(
                    "need c > 0 and exponent in (0,1), got c={}, exponent={}",
                    rule.c, rule.exponent
                ),
            ));
        } else {
            for (i, &n) in self.n_list.iter().enumerate() {
                let b = rule.bandwidth(n);
                if !(b > 0.0 && b < 1.0) {
                    out.push(diag(
                        format!("bandwidth_rule (n_list[{i}])"),
                        format!("bandwidth {b} for n={n} is outside (0,1)"),
                    ));
                }
            }
        }
        if self.output_dir.as_os_str().is_empty() {
            out.push(diag("output_dir", "must not be empty"));
        }
        if !self.model.supports(self.experiment) {
            out.push(diag(
                "experiment",
                format!(
                    "{} is not available for preset {}",
                    self.experiment.name(),
                    self.model.preset()
                ),
            ));
        }
        self.validate_model(&mut out);
        out
    }

    fn validate_model(&self, out: &mut Vec<Diagnostic>) {
        let grid = self.grid();
        if let Some(h) = self.model.holder() {
            if !(h >= 0.0 && h.is_finite()) {
                out.push(diag(
                    "model.holder",
                    format!("{h} is not a finite nonnegative constant"),
                ));
            }
            for (path, f) in self.model.coefficients() {
                let slope = grid
                    .windows(2)
                    .map(|w| (f.eval(w[1]) - f.eval(w[0])).abs() / (w[1] - w[0]))
                    .fold(0.0, f64::max);
                if slope > h + 1e-9 {
                    out.push(diag(
                        path,
                        format!("grid Lipschitz estimate {slope:.6} exceeds the declared holder constant {h}"),
                    ));
                }
            }
        }
        match &self.model {
            ModelConfig::FiniteAffine { a, b, holder } => {
                let ma = matrix(a, "model.a", out);
                let mb = matrix(b, "model.b", out);
                if let (Some(ma), Some(mb)) = (ma, mb) {
                    if ma.size() != mb.size() {
                        out.push(diag("model.b", "must have the same size as model.a"));
                    } else if let Some(h) = holder {
                        let l = ma.max_abs_diff(&mb);
                        if l > h + 1e-12 {
                            out.push(diag(
                                "model.holder",
                                format!(
                                    "entrywise Lipschitz constant {l} exceeds the declared {h}"
                                ),
                            ));
                        }
                    }
                }
            }
            ModelConfig::RandomWalk {
                p,
                q,
                r,
                truncation,
                z,
                epsilon,
                ..
            } => {
                if let Some(u) = grid.iter().copied().find(|&u| {
                    let (pu, qu, ru) = (p.eval(u), q.eval(u), r.eval(u));
                    pu < 0.0 || qu < 0.0 || ru < 0.0 || (pu + qu + ru - 1.0).abs() > 1e-9
                }) {
                    out.push(diag(
                        "model",
                        format!("(p,q,r)({u}) is not a probability vector"),
                    ));
                }
                if let Some(u) = grid.iter().copied().find(|&u| !(p.eval(u) < q.eval(u))) {
                    out.push(diag("model.p", format!("p(u) < q(u) fails at u={u}")));
                }
                if *truncation < 2 {
                    out.push(diag("model.truncation", "must be at least 2"));
                }
                if !(*z > 1.0) {
                    out.push(diag("model.z", format!("{z} must exceed 1")));
                }
                if !(*epsilon > 0.0) {
                    out.push(diag("model.epsilon", format!("{epsilon} must be positive")));
                }
            }
            ModelConfig::Inar1 {
                alpha,
                lambda,
                truncation,
                ..
            } => {
                if alpha.is_empty() {
                    out.push(diag("model.alpha", "needs at least one coefficient"));
                }
                for (j, a) in alpha.iter().enumerate() {
                    if let Some(u) = grid.iter().copied().find(|&u| a.eval(u) < 0.0) {
                        out.push(diag(
                            format!("model.alpha[{j}]"),
                            format!("negative at u={u}"),
                        ));
                    }
                }
                let (worst, at) = grid
                    .iter()
                    .map(|&u| (alpha.iter().map(|a| a.eval(u)).sum::<f64>(), u))
                    .fold(
                        (f64::NEG_INFINITY, 0.0),
                        |acc, x| if x.0 > acc.0 { x } else { acc },
                    );
                if !(worst < 1.0) {
                    out.push(diag(
                        "model.alpha",
                        format!(
                            "precondition sup_{{u∈[0,1]}} Σα_j(u) < 1 violated: Σα_j({at}) = {worst}"
                        ),
                    ));
                }
                if let Some(u) = grid.iter().copied().find(|&u| !(lambda.eval(u) > 0.0)) {
                    out.push(diag(
                        "model.lambda",
                        format!("must be positive, fails at u={u}"),
                    ));
                }
                if *truncation < 2 {
                    out.push(diag("model.truncation", "must be at least 2"));
                }
                let order_one = matches!(
                    self.experiment,
                    Experiment::Bounds | Experiment::Rates | Experiment::Certify
                );
                if order_one && alpha.len() != 1 {
                    out.push(diag(
                        "model.alpha",
                        format!("{} needs an order-1 model", self.experiment.name()),
                    ));
                }
            }
            ModelConfig::TvAr1 { sigma, .. } => {
                if let Some(u) = grid.iter().copied().find(|&u| sigma.eval(u) < 0.0) {
                    out.push(diag("model.sigma", format!("negative at u={u}")));
                }
            }
            ModelConfig::TvArch1Squared { a0, a1, .. } => {
                for (path, f) in [("model.a0", a0), ("model.a1", a1)] {
                    if let Some(u) = grid.iter().copied().find(|&u| f.eval(u) < 0.0) {
                        out.push(diag(path, format!("negative at u={u}")));
                    }
                }
            }
        }
    }
}

fn matrix(rows: &[Vec<f64>], path: &str, out: &mut Vec<Diagnostic>) -> Option<StochasticMatrix> {
    for (i, row) in rows.iter().enumerate() {
        if row.len() != rows.len() {
            out.push(diag(format!("{path}[{i}]"), "matrix must be square"));
            return None;
        }
    }
    match StochasticMatrix::from_rows(rows) {
        Ok(m) => Some(m),
        Err(e) => {
            out.push(diag(path, e.to_string()));
            None
        }
    }
}
