//! Model certificates: Doeblin constants and continuity of `u ↦ π_u`
//! (finite), drift/minoration table and `(γ, δ)` (walk), coefficient and
//! contraction preconditions (INAR, affine).

use locstat::chain_models::{
    f1_table, mouli_certificate, search_doeblin, stationary_at, ApproxConstants, DriftSpec,
};
use locstat::metrics::tv_dense;
use locstat::simulate::{contraction_moment, ContractionCheck};
use locstat::{FiniteKernelFamily, Result};

use super::Outcome;
use crate::config::ScenarioConfig;
use crate::model::{InarParts, Model, WalkParts};
use crate::report::{num, Table, Threshold};

const DOEBLIN_M_CAP: usize = 50;
/// Points of the configured grid used for the pairwise continuity check.
const CONTINUITY_POINTS: usize = 21;

fn certificate_table() -> Table {
    Table::new("certificate", &["key", "value"])
}

pub fn run(config: &ScenarioConfig, model: &Model, out: &mut Outcome) -> Result<()> {
    match model {
        Model::Finite(fam) => finite(config, fam, out),
        Model::Walk(w) => walk(config, w, out),
        Model::Inar(parts) => inar(config, parts, out),
        Model::Affine(m) => {
            let (moment, u) = out.timed("certify contraction", || {
                contraction_moment(m, &ContractionCheck::default())
            })?;
            let mut t = certificate_table();
            t.push(["contraction_moment".into(), num(moment)]);
            t.push(["worst_u".into(), num(u)]);
            out.check(
                "certify.contraction",
                moment,
                Threshold::Below { value: 1.0 },
            );
            out.tables.push(t);
            Ok(())
        }
    }
}

fn finite(config: &ScenarioConfig, fam: &FiniteKernelFamily, out: &mut Outcome) -> Result<()> {
    let grid = config.grid();
    let cert = out.timed("certify doeblin", || {
        search_doeblin(fam, &grid, DOEBLIN_M_CAP)
    })?;
    let consts = ApproxConstants::certify(fam, &grid, DOEBLIN_M_CAP)?;
    let mut t = certificate_table();
    for (key, value) in [
        ("m", cert.m as f64),
        ("epsilon", cert.epsilon),
        ("r_bound", cert.r_bound),
        ("holder_l", consts.l),
        ("holder_kappa", consts.kappa),
        ("continuity_constant", consts.continuity_constant()),
        ("approx_constant", consts.constant()),
    ] {
        t.push([key.to_string(), num(value)]);
    }
    out.check(
        "certify.doeblin",
        cert.r_bound,
        Threshold::Below { value: 1.0 },
    );

    let step = (grid.len() / CONTINUITY_POINTS).max(1);
    let coarse: Vec<f64> = grid.iter().copied().step_by(step).collect();
    let worst = out.timed("certify continuity", || -> Result<f64> {
        let laws = coarse
            .iter()
            .map(|&u| stationary_at(fam, u))
            .collect::<Result<Vec<_>>>()?;
        let mut worst = 0.0f64;
        for a in 0..coarse.len() {
            for b in a + 1..coarse.len() {
                let allowed =
                    consts.continuity_constant() * (coarse[b] - coarse[a]).abs().powf(consts.kappa);
                worst = worst.max(tv_dense(&laws[a], &laws[b]) / allowed);
            }
        }
        Ok(worst)
    })?;
    t.push(["continuity_max_ratio".into(), num(worst)]);
    out.check(
        "certify.continuity",
        worst,
        Threshold::AtMost { value: 1.0 },
    );
    out.tables.push(t);
    Ok(())
}

fn walk(config: &ScenarioConfig, w: &WalkParts, out: &mut Outcome) -> Result<()> {
    let grid = config.grid();
    let drift = DriftSpec::random_walk(&w.p, &w.q, &w.r, w.z, &grid, w.epsilon)?;
    let report = out.timed("certify f1", || f1_table(&w.family, &drift, &grid))?;
    let mut f1 = Table::new(
        "f1",
        &[
            "u",
            "kv_ratio",
            "drift_slack",
            "minoration",
            "windows",
            "small_set",
        ],
    );
    for r in &report.rows {
        f1.push([
            num(r.u),
            num(r.kv_ratio),
            num(r.drift_slack),
            num(r.minoration),
            r.windows.to_string(),
            r.small_set.to_string(),
        ]);
    }
    out.check(
        "certify.f1",
        f64::from(u8::from(report.passed)),
        Threshold::AtLeast { value: 1.0 },
    );

    let trunc = w.family.truncation_report(&grid)?;
    out.check(
        "certify.truncation",
        trunc.worst_deficit,
        Threshold::AtMost {
            value: w.family.tail_tolerance(),
        },
    );

    let mut t = certificate_table();
    for (key, value) in [
        ("m", drift.m as f64),
        ("lambda", drift.lambda),
        ("b", drift.b),
        ("k_const", drift.k_const),
        ("eta", drift.eta),
        ("r_level", drift.r_level),
        ("epsilon_window", drift.epsilon_window),
        ("truncation_deficit", trunc.worst_deficit),
    ] {
        t.push([key.to_string(), num(value)]);
    }
    // The (γ, δ) search presupposes the drift and minoration inequalities.
    if report.passed {
        let cert = out.timed("certify gamma", || {
            mouli_certificate(&w.family, &drift, &grid)
        })?;
        t.push(["gamma".into(), num(cert.gamma)]);
        t.push(["delta".into(), num(cert.delta)]);
        out.check("certify.gamma", cert.gamma, Threshold::Below { value: 1.0 });
        let mut scan = Table::new("delta_scan", &["delta", "coefficient"]);
        for (d, c) in &cert.scan {
            scan.push([num(*d), num(*c)]);
        }
        out.tables.push(scan);
    }
    out.tables.push(t);
    out.tables.push(f1);
    Ok(())
}

fn inar(config: &ScenarioConfig, parts: &InarParts, out: &mut Outcome) -> Result<()> {
    let grid = config.grid();
    let sum = grid
        .iter()
        .map(|&u| parts.alpha.iter().map(|a| a.eval(u)).sum::<f64>())
        .fold(0.0, f64::max);
    let mut t = certificate_table();
    t.push(["sup_alpha_sum".into(), num(sum)]);
    out.check("certify.alpha_sum", sum, Threshold::Below { value: 1.0 });
    if let Some(fam) = &parts.family {
        let trunc = fam.truncation_report(&grid)?;
        t.push(["truncation_deficit".into(), num(trunc.worst_deficit)]);
        out.check(
            "certify.truncation",
            trunc.worst_deficit,
            Threshold::AtMost {
                value: fam.tail_tolerance(),
            },
        );
    }
    out.tables.push(t);
    Ok(())
}
