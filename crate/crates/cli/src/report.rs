use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

use crate::config::{BandwidthRule, ScenarioConfig};

/// Inclusive range, upper or lower limit for a check statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Threshold {
    Range { lo: f64, hi: f64 },
    AtMost { value: f64 },
    Below { value: f64 },
    AtLeast { value: f64 },
}

impl Threshold {
    pub fn holds(self, x: f64) -> bool {
        match self {
            Threshold::Range { lo, hi } => x >= lo && x <= hi,
            Threshold::AtMost { value } => x <= value,
            Threshold::Below { value } => x < value,
            Threshold::AtLeast { value } => x >= value,
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Range { lo, hi } => write!(f, "[{lo}, {hi}]"),
            Threshold::AtMost { value } => write!(f, "<= {value}"),
            Threshold::Below { value } => write!(f, "< {value}"),
            Threshold::AtLeast { value } => write!(f, ">= {value}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub statistic: f64,
    pub threshold: Threshold,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(id: impl Into<String>, statistic: f64, threshold: Threshold) -> Self {
        CheckRecord {
            id: id.into(),
            statistic,
            pass: threshold.holds(statistic),
            threshold,
        }
    }
}

/// A CSV artifact with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Table {
            name: name.into(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        let row: Vec<String> = row.into_iter().collect();
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write(&self, dir: &Path) -> io::Result<()> {
        let mut w = csv::Writer::from_path(dir.join(format!("{}.csv", self.name)))?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()
    }
}

/// Formats a float for CSV; `NaN` becomes an empty cell.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        x.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fingerprint {
    pub seed: u64,
    pub n_list: Vec<usize>,
    pub u_grid: Vec<f64>,
    pub replicates: usize,
    pub grid_points: usize,
    pub jmax: usize,
    pub truncation: Option<usize>,
    pub bandwidth_rule: BandwidthRule,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub experiment: &'static str,
    pub preset: &'static str,
    pub fingerprint: Fingerprint,
    pub checks: Vec<CheckRecord>,
    pub artifacts: Vec<String>,
    pub passed: bool,
}

impl RunReport {
    pub fn new(config: &ScenarioConfig, checks: Vec<CheckRecord>, tables: &[Table]) -> Self {
        RunReport {
            schema_version: config.version,
            tool_version: env!("CARGO_PKG_VERSION"),
            experiment: config.experiment.name(),
            preset: config.model.preset(),
            fingerprint: Fingerprint {
                seed: config.seed,
                n_list: config.n_list.clone(),
                u_grid: config.u_grid.clone(),
                replicates: config.replicates,
                grid_points: config.grid_points,
                jmax: config.jmax,
                truncation: config.model.truncation(),
                bandwidth_rule: config.bandwidth_rule,
            },
            passed: checks.iter().all(|c| c.pass),
            checks,
            artifacts: tables
                .iter()
                .map(|t| format!("data/{}.csv", t.name))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// Writes `data/*.csv`, `report.json` and `timings.json` under `dir`.
///
/// Wall-clock times live in their own file so that `report.json` depends on
/// the config alone.
pub fn write_outputs(
    dir: &Path,
    report: &RunReport,
    tables: &[Table],
    timings: &[StageTiming],
) -> io::Result<()> {
    let data = dir.join("data");
    fs::create_dir_all(&data)?;
    for t in tables {
        t.write(&data)?;
    }
    let mut json = serde_json::to_string_pretty(report).map_err(io::Error::other)?;
    json.push('\n');
    fs::write(dir.join("report.json"), json)?;
    let mut json = serde_json::to_string_pretty(timings).map_err(io::Error::other)?;
    json.push('\n');
    fs::write(dir.join("timings.json"), json)
}
