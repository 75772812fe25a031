//! Uniform deviation of the local estimators over `u_grid`: median over
//! replicates of `sup_u |ĥ_u − E ĥ_u|`, against the `√(log n/(nb))` curve.

use locstat::chain_models::{marginal_laws, KernelFamily};
use locstat::estimate::{estimate_pi, estimate_walk_pq, kernel_weights_range, lls_inar};
use locstat::simulate::{simulate_finite, simulate_inar, simulate_random_walk};
use locstat::stats::{loglog_slope, median};
use locstat::{NoiseReservoir, Result};
use rayon::prelude::*;

use super::{smoothing, Outcome};
use crate::config::ScenarioConfig;
use crate::model::Model;
use crate::report::{num, Table, Threshold};

pub fn run(config: &ScenarioConfig, model: &Model, out: &mut Outcome) -> Result<()> {
    let mut table = Table::new(
        "rates",
        &["n", "bandwidth", "median_sup_error", "theory_curve"],
    );
    let mut meds = Vec::new();
    let mut theory = Vec::new();
    let reps = config.replicates as u64;
    for &n in &config.n_list {
        let lower = if matches!(model, Model::Inar(_)) {
            2
        } else {
            1
        };
        let spec = smoothing(config, n, lower)?;
        let nf = n as f64;
        let sups: Vec<f64> = out.timed(format!("rates n={n}"), || -> Result<Vec<f64>> {
            match model {
                Model::Finite(fam) => {
                    let s = fam.state_count();
                    let laws = marginal_laws(fam, n)?;
                    let means = config
                        .u_grid
                        .iter()
                        .map(|&u| {
                            let w = kernel_weights_range(u, n, 1, n - 1, &spec)?;
                            Ok((0..s)
                                .map(|x| w.iter().map(|(i, e)| e * laws[i][x]).sum())
                                .collect::<Vec<f64>>())
                        })
                        .collect::<Result<Vec<_>>>()?;
                    (0..reps)
                        .into_par_iter()
                        .map(|r| {
                            let path =
                                simulate_finite(fam, n, &NoiseReservoir::new(config.seed, r))?;
                            let mut sup = 0.0f64;
                            for (&u, mean) in config.u_grid.iter().zip(&means) {
                                let pi = estimate_pi(&path, u, &spec, s)?.value;
                                for (a, b) in pi.iter().zip(mean) {
                                    sup = sup.max((a - b).abs());
                                }
                            }
                            Ok(sup)
                        })
                        .collect()
                }
                Model::Walk(w) => {
                    // The up-step probability does not depend on the state, so
                    // E p̂(u) = Σ e_i p((i+1)/n).
                    let means = config
                        .u_grid
                        .iter()
                        .map(|&u| {
                            let wts = kernel_weights_range(u, n, 1, n - 1, &spec)?;
                            Ok(wts
                                .iter()
                                .map(|(i, e)| e * (w.p)((i + 1) as f64 / nf))
                                .sum())
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    (0..reps)
                        .into_par_iter()
                        .map(|r| {
                            let path = simulate_random_walk(
                                &w.model,
                                n,
                                &NoiseReservoir::new(config.seed, r),
                            );
                            let mut sup = 0.0f64;
                            for (&u, mean) in config.u_grid.iter().zip(&means) {
                                sup = sup.max((estimate_walk_pq(&path, u, &spec)?.p - mean).abs());
                            }
                            Ok(sup)
                        })
                        .collect()
                }
                Model::Inar(parts) => (0..reps)
                    .into_par_iter()
                    .map(|r| {
                        let path = simulate_inar(
                            &parts.model,
                            n,
                            &NoiseReservoir::new(config.seed, r),
                            None,
                        );
                        let mut sup = 0.0f64;
                        for &u in &config.u_grid {
                            let est = lls_inar(&path, u, &spec)?;
                            sup =
                                sup.max(est.error(parts.model.alpha(0, u), parts.model.lambda(u)));
                        }
                        Ok(sup)
                    })
                    .collect(),
                Model::Affine(_) => unreachable!("rejected by validation"),
            }
        })?;
        let med = median(&sups);
        let curve = (nf.ln() / (nf * spec.bandwidth)).sqrt();
        table.push([n.to_string(), num(spec.bandwidth), num(med), num(curve)]);
        meds.push(med);
        theory.push(curve);
    }
    match model {
        // The regression error includes the smoothing bias, so only a decrease is checked.
        Model::Inar(_) => {
            if meds.len() >= 2 {
                let ratio = meds[0] / meds[meds.len() - 1];
                out.check("rates.decrease", ratio, Threshold::AtLeast { value: 1.0 });
            }
        }
        // The walk's up-step probability is estimated from every visited state,
        // so its error may beat the envelope; only the slower side is checked.
        Model::Walk(_) => out.check(
            "rates.slope",
            loglog_slope(&theory, &meds),
            Threshold::AtLeast { value: 0.8 },
        ),
        _ => out.slope_check("rates.slope", &theory, &meds, 0.8, 1.2),
    }
    out.tables.push(table);
    Ok(())
}
