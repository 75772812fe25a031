//! Mixing curves: exact β (finite), exact `V`-weighted β against the drift
//! bound (walk), Monte-Carlo τ upper estimates (affine and INAR).

use locstat::chain_models::{
    marginal_laws, mouli_certificate, search_doeblin, DriftSpec, KernelFamily,
};
use locstat::mixing::{
    beta_curve, beta_v_curve, default_starts, mixsuf_bound, tau_curve_mc, BetaBound, TauModel,
};
use locstat::simulate::{AffineSimulator, ContractionCheck};
use locstat::stats::ols_slope;
use locstat::Result;

use super::Outcome;
use crate::config::ScenarioConfig;
use crate::model::{InarParts, Model, WalkParts};
use crate::report::{num, Table, Threshold};

const DOEBLIN_M_CAP: usize = 50;
const BOUND_SLACK: f64 = 1e-12;
/// β values below this are rounding noise and left out of the rate fit.
const FIT_FLOOR: f64 = 1e-13;
const TAU_SLOPE_TOL: f64 = 0.3;
const TAU_STARTS: usize = 11;

fn table() -> Table {
    Table::new("mixing", &["n", "j", "value", "bound", "se"])
}

/// OLS slope of `log v_j` on `j`, over lags with `v_j > floor`.
fn fitted_log_slope(values: &[f64], floor: f64) -> f64 {
    let (js, logs): (Vec<f64>, Vec<f64>) = values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > floor)
        .map(|(i, v)| ((i + 1) as f64, v.ln()))
        .unzip();
    if js.len() < 2 {
        return f64::NAN;
    }
    ols_slope(&js, &logs)
}

pub fn run(config: &ScenarioConfig, model: &Model, out: &mut Outcome) -> Result<()> {
    match model {
        Model::Finite(fam) => finite(config, fam, out),
        Model::Walk(w) => walk(config, w, out),
        Model::Inar(parts) => tau(config, Tau::Inar(parts), out),
        Model::Affine(m) => tau(config, Tau::Affine(m), out),
    }
}

fn finite(
    config: &ScenarioConfig,
    fam: &locstat::FiniteKernelFamily,
    out: &mut Outcome,
) -> Result<()> {
    let cert = search_doeblin(fam, &config.grid(), DOEBLIN_M_CAP)?;
    let mut t = table();
    let mut violations = 0usize;
    let mut last = Vec::new();
    for &n in &config.n_list {
        let bound = BetaBound::from_certificate(&cert, fam.tv_holder_l(), fam.holder_kappa(), n);
        let beta = out.timed(format!("mixing n={n}"), || beta_curve(fam, n, config.jmax))?;
        for (idx, b) in beta.iter().enumerate() {
            let j = idx + 1;
            if *b > bound.at(j) + BOUND_SLACK {
                violations += 1;
            }
            t.push([
                n.to_string(),
                j.to_string(),
                num(*b),
                num(bound.at(j)),
                String::new(),
            ]);
        }
        last = beta;
    }
    out.check(
        "mixing.domination",
        violations as f64,
        Threshold::AtMost { value: 0.0 },
    );
    let rate = fitted_log_slope(&last, FIT_FLOOR).exp();
    out.check(
        "mixing.rate",
        rate,
        Threshold::AtMost {
            value: cert.r_bound.powf(1.0 / cert.m as f64) + 0.05,
        },
    );
    out.tables.push(t);
    Ok(())
}

fn walk(config: &ScenarioConfig, w: &WalkParts, out: &mut Outcome) -> Result<()> {
    let grid = config.grid();
    let drift = DriftSpec::random_walk(&w.p, &w.q, &w.r, w.z, &grid, w.epsilon)?;
    let cert = out.timed("mixing certificate", || {
        mouli_certificate(&w.family, &drift, &grid)
    })?;
    out.check("mixing.gamma", cert.gamma, Threshold::Below { value: 1.0 });
    let v = drift.v_values(w.family.state_count())?;
    let mut t = table();
    let mut violations = 0usize;
    for &n in &config.n_list {
        // Windows of m kernels only stay within the certified width once m/n ≤ ε.
        let certified = drift.m as f64 / n as f64 <= drift.epsilon_window;
        let (bv, sup_pi_v) = out.timed(format!("mixing n={n}"), || -> Result<_> {
            let laws = marginal_laws(&w.family, n)?;
            let sup_pi_v = laws
                .iter()
                .map(|l| l.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>())
                .fold(0.0, f64::max);
            Ok((beta_v_curve(&w.family, &v, n, config.jmax)?, sup_pi_v))
        })?;
        for (idx, b) in bv.iter().enumerate() {
            let j = idx + 1;
            let bound = certified
                .then(|| mixsuf_bound(sup_pi_v, cert.delta, cert.gamma, drift.k_const, drift.m, j));
            if bound.is_some_and(|bd| *b > bd + BOUND_SLACK) {
                violations += 1;
            }
            t.push([
                n.to_string(),
                j.to_string(),
                num(*b),
                bound.map(num).unwrap_or_default(),
                String::new(),
            ]);
        }
    }
    out.check(
        "mixing.domination",
        violations as f64,
        Threshold::AtMost { value: 0.0 },
    );
    out.tables.push(t);
    Ok(())
}

enum Tau<'a> {
    Affine(&'a locstat::simulate::AffineModel),
    Inar(&'a InarParts),
}

fn tau(config: &ScenarioConfig, which: Tau<'_>, out: &mut Outcome) -> Result<()> {
    let grid = config.grid();
    let mut t = table();
    for &n in &config.n_list {
        let (model, rho) = match &which {
            Tau::Affine(m) => {
                let sim = AffineSimulator::new((*m).clone(), n, &ContractionCheck::default())?;
                let rho = sim.moment();
                (TauModel::Affine(sim), rho)
            }
            Tau::Inar(p) => {
                let rho = grid
                    .iter()
                    .map(|&u| p.alpha.iter().map(|a| a.eval(u)).sum::<f64>())
                    .fold(0.0, f64::max);
                (
                    TauModel::Inar {
                        model: p.model.clone(),
                        n,
                    },
                    rho,
                )
            }
        };
        let starts = default_starts(n, config.jmax, TAU_STARTS);
        let curve = out.timed(format!("mixing n={n}"), || {
            tau_curve_mc(&model, config.jmax, config.replicates, config.seed, &starts)
        });
        for (j, est) in curve.iter().enumerate() {
            t.push([
                n.to_string(),
                j.to_string(),
                num(est.value),
                String::new(),
                num(est.se),
            ]);
        }
        let values: Vec<f64> = curve[1..].iter().map(|e| e.value).collect();
        let slope = fitted_log_slope(&values, 0.0);
        out.check(
            format!("mixing.tau_slope@n={n}"),
            slope - rho.ln(),
            Threshold::Range {
                lo: -TAU_SLOPE_TOL,
                hi: TAU_SLOPE_TOL,
            },
        );
    }
    out.tables.push(t);
    Ok(())
}
