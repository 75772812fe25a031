//! Distance between the array marginals and the frozen stationary laws.
//!
//! Finite and truncated-countable models: exact `sup_k ‖π^(n)_k − π_{k/n}‖`
//! (TV, or the `V`-norm for the walk). Affine models: coupled Monte-Carlo
//! gap `E|X_{n,k} − X_k(k/n)|` at `k = n/2`.

use locstat::chain_models::{
    marginal_laws, stationary_at, ApproxConstants, CountableKernelFamily, KernelFamily,
};
use locstat::metrics::{tv_dense, vnorm_dense};
use locstat::simulate::{AffineModel, AffineSimulator, ContractionCheck};
use locstat::stats::mean_se;
use locstat::{NoiseReservoir, Result};
use rayon::prelude::*;

use super::{as_f64, Outcome};
use crate::config::ScenarioConfig;
use crate::model::Model;
use crate::report::{num, Table, Threshold};

const DOEBLIN_M_CAP: usize = 50;
const BOUND_SLACK: f64 = 1e-12;

pub fn run(config: &ScenarioConfig, model: &Model, out: &mut Outcome) -> Result<()> {
    match model {
        Model::Finite(fam) => finite(config, fam, out),
        Model::Walk(w) => {
            let v: Vec<f64> = (0..w.family.state_count())
                .map(|x| w.z.powi(x as i32))
                .collect();
            countable(config, &w.family, Some(&v), out)
        }
        Model::Inar(parts) => {
            let fam = parts.family.as_ref().expect("validated as order 1");
            countable(config, fam, None, out)
        }
        Model::Affine(m) => affine(config, m, out),
    }
}

fn finite(
    config: &ScenarioConfig,
    fam: &locstat::FiniteKernelFamily,
    out: &mut Outcome,
) -> Result<()> {
    let consts = ApproxConstants::certify(fam, &config.grid(), DOEBLIN_M_CAP)?;
    let mut table = Table::new(
        "bounds",
        &["n", "sup_tv", "max_ratio_to_bound", "violations"],
    );
    let mut sups = Vec::new();
    let mut violations = 0usize;
    for &n in &config.n_list {
        let (sup, ratio, bad) = out.timed(format!("bounds n={n}"), || -> Result<_> {
            let laws = marginal_laws(fam, n)?;
            let (mut sup, mut ratio, mut bad) = (0.0f64, 0.0f64, 0usize);
            for (k, law) in laws.iter().enumerate().skip(1) {
                let u = k as f64 / n as f64;
                let d = tv_dense(law, &stationary_at(fam, u)?);
                let b = consts.bound(n, k as i64, 1, u);
                if d > b + BOUND_SLACK {
                    bad += 1;
                }
                sup = sup.max(d);
                ratio = ratio.max(d / b);
            }
            Ok((sup, ratio, bad))
        })?;
        table.push([n.to_string(), num(sup), num(ratio), bad.to_string()]);
        sups.push(sup);
        violations += bad;
    }
    out.check(
        "bounds.domination",
        violations as f64,
        Threshold::AtMost { value: 0.0 },
    );
    out.slope_check("bounds.slope", &as_f64(&config.n_list), &sups, -1.2, -0.8);
    out.tables.push(table);
    Ok(())
}

fn countable(
    config: &ScenarioConfig,
    fam: &CountableKernelFamily,
    v: Option<&[f64]>,
    out: &mut Outcome,
) -> Result<()> {
    let trunc = fam.truncation_report(&config.grid())?;
    out.check(
        "bounds.truncation",
        trunc.worst_deficit,
        Threshold::AtMost {
            value: fam.tail_tolerance(),
        },
    );
    let norm = if v.is_some() { "vnorm" } else { "tv" };
    let mut table = Table::new("bounds", &["n", "norm", "sup_distance"]);
    let mut sups = Vec::new();
    for &n in &config.n_list {
        let sup = out.timed(format!("bounds n={n}"), || -> Result<f64> {
            let laws = marginal_laws(fam, n)?;
            let mut sup = 0.0f64;
            for (k, law) in laws.iter().enumerate().skip(1) {
                let pi = stationary_at(fam, k as f64 / n as f64)?;
                let d = match v {
                    Some(v) => vnorm_dense(law, &pi, v),
                    None => tv_dense(law, &pi),
                };
                sup = sup.max(d);
            }
            Ok(sup)
        })?;
        table.push([n.to_string(), norm.to_string(), num(sup)]);
        sups.push(sup);
    }
    out.slope_check("bounds.slope", &as_f64(&config.n_list), &sups, -1.2, -0.8);
    out.tables.push(table);
    Ok(())
}

fn affine(config: &ScenarioConfig, model: &AffineModel, out: &mut Outcome) -> Result<()> {
    let mut table = Table::new("bounds", &["n", "k", "coupled_gap", "se"]);
    let mut gaps = Vec::new();
    for &n in &config.n_list {
        let sim = AffineSimulator::new(model.clone(), n, &ContractionCheck::default())?;
        let k = (n / 2) as i64;
        let u = k as f64 / n as f64;
        let draws: Vec<f64> = out.timed(format!("bounds n={n}"), || {
            (0..config.replicates as u64)
                .into_par_iter()
                .map(|r| {
                    let res = NoiseReservoir::new(config.seed, r);
                    (sim.simulate(&res, None).get(k)
                        - sim.simulate_stationary(u, &res, None).get(k))
                    .abs()
                })
                .collect()
        });
        let (mean, se) = mean_se(&draws);
        table.push([n.to_string(), k.to_string(), num(mean), num(se)]);
        gaps.push(mean);
    }
    out.slope_check(
        "bounds.gap_slope",
        &as_f64(&config.n_list),
        &gaps,
        -1.25,
        -0.75,
    );
    out.tables.push(table);
    Ok(())
}
