//! The five experiments. Each returns check records and CSV tables; all
//! randomness comes from streams `0..replicates` of the configured seed, so
//! the outputs are a function of the config.

mod bounds;
mod certify;
mod clt;
mod mixing;
mod rates;

use std::time::Instant;

use locstat::estimate::SmoothingSpec;
use locstat::stats::loglog_slope;
use locstat::Result;

use crate::config::{Experiment, ScenarioConfig};
use crate::model::Model;
use crate::report::{CheckRecord, StageTiming, Table, Threshold};

#[derive(Default)]
pub struct Outcome {
    pub checks: Vec<CheckRecord>,
    pub tables: Vec<Table>,
    pub timings: Vec<StageTiming>,
}

impl Outcome {
    fn check(&mut self, id: impl Into<String>, statistic: f64, threshold: Threshold) {
        self.checks.push(CheckRecord::new(id, statistic, threshold));
    }

    /// Runs `f` and records its wall-clock time under `stage`.
    fn timed<T>(&mut self, stage: impl Into<String>, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.timings.push(StageTiming {
            stage: stage.into(),
            seconds: t.elapsed().as_secs_f64(),
        });
        out
    }

    /// Log-log slope check, skipped when fewer than two sample sizes were run.
    fn slope_check(&mut self, id: &str, x: &[f64], y: &[f64], lo: f64, hi: f64) {
        if x.len() >= 2 {
            self.check(id, loglog_slope(x, y), Threshold::Range { lo, hi });
        }
    }
}

pub fn run(config: &ScenarioConfig) -> Result<Outcome> {
    let model = Model::build(&config.model)?;
    let mut out = Outcome::default();
    match config.experiment {
        Experiment::Bounds => bounds::run(config, &model, &mut out)?,
        Experiment::Rates => rates::run(config, &model, &mut out)?,
        Experiment::Clt => clt::run(config, &model, &mut out)?,
        Experiment::Mixing => mixing::run(config, &model, &mut out)?,
        Experiment::Certify => certify::run(config, &model, &mut out)?,
    }
    Ok(out)
}

fn smoothing(config: &ScenarioConfig, n: usize, lower_index: usize) -> Result<SmoothingSpec> {
    let rule = &config.bandwidth_rule;
    SmoothingSpec::from_rule(rule.kernel, rule.c, rule.exponent, n, lower_index)
}

fn as_f64(ns: &[usize]) -> Vec<f64> {
    ns.iter().map(|&n| n as f64).collect()
}
