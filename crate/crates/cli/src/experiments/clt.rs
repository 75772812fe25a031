//! Empirical covariance of `√(nb)(π̂_u − E π̂_u)` and of the `Q̂_u` pivot
//! against the closed-form `Σ^(1)_u` and `Σ^(2)_u`, at the largest `n`.

use locstat::chain_models::{marginal_laws, KernelFamily};
use locstat::estimate::{
    estimate_pi, estimate_q, kernel_weights_range, sigma1, sigma2, DEFAULT_TAIL_TOL,
};
use locstat::simulate::simulate_finite;
use locstat::{NoiseReservoir, Result};
use rayon::prelude::*;

use super::{smoothing, Outcome};
use crate::config::ScenarioConfig;
use crate::model::Model;
use crate::report::{num, Table, Threshold};

/// Entries smaller than this in absolute value are reported but not scored.
const MIN_ENTRY: f64 = 0.05;
const MAX_REL_ERROR: f64 = 0.15;

type Draw = Vec<(Vec<f64>, Vec<Option<Vec<f64>>>)>;

pub fn run(config: &ScenarioConfig, model: &Model, out: &mut Outcome) -> Result<()> {
    let Model::Finite(fam) = model else {
        unreachable!("rejected by validation")
    };
    let n = *config.n_list.last().expect("validated non-empty");
    let s = fam.state_count();
    let spec = smoothing(config, n, 1)?;
    let scale2 = n as f64 * spec.bandwidth;
    let laws = marginal_laws(fam, n)?;
    let kernels = (0..=n)
        .map(|i| fam.transition_matrix(i as f64 / n as f64))
        .collect::<Result<Vec<_>>>()?;
    let draws: Vec<Draw> = out.timed(format!("clt n={n}"), || {
        (0..config.replicates as u64)
            .into_par_iter()
            .map(|r| {
                let path = simulate_finite(fam, n, &NoiseReservoir::new(config.seed, r))?;
                config
                    .u_grid
                    .iter()
                    .map(|&u| {
                        Ok((
                            estimate_pi(&path, u, &spec, s)?.value,
                            estimate_q(&path, u, &spec, s)?.value,
                        ))
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut table = Table::new(
        "clt",
        &[
            "u",
            "matrix",
            "row",
            "col",
            "empirical",
            "theoretical",
            "scored",
        ],
    );
    for (g, &u) in config.u_grid.iter().enumerate() {
        let w = kernel_weights_range(u, n, 1, n - 1, &spec)?;
        let mut epi = vec![0.0; s];
        let mut epi2 = vec![0.0; s * s];
        for (i, e) in w.iter() {
            for x in 0..s {
                epi[x] += e * laws[i][x];
                for y in 0..s {
                    epi2[x * s + y] += e * laws[i][x] * kernels[i + 1].get(x, y);
                }
            }
        }
        let s1 = sigma1(fam, u, &spec, DEFAULT_TAIL_TOL)?;
        let reps = draws.len() as f64;
        let mut worst1 = 0.0f64;
        for a in 0..s {
            for b in 0..s {
                let emp = draws
                    .iter()
                    .map(|d| scale2 * (d[g].0[a] - epi[a]) * (d[g].0[b] - epi[b]))
                    .sum::<f64>()
                    / reps;
                let scored = s1[a][b].abs() >= MIN_ENTRY;
                if scored {
                    worst1 = worst1.max((emp - s1[a][b]).abs() / s1[a][b].abs());
                }
                table.push([
                    num(u),
                    "sigma1".into(),
                    a.to_string(),
                    b.to_string(),
                    num(emp),
                    num(s1[a][b]),
                    scored.to_string(),
                ]);
            }
        }
        let s2 = sigma2(fam, u, &spec)?;
        let mut worst2 = 0.0f64;
        for x in 0..s {
            for y in 0..s {
                let center = epi2[x * s + y] / epi[x];
                let pivots: Vec<f64> = draws
                    .iter()
                    .filter_map(|d| {
                        d[g].1[x]
                            .as_ref()
                            .map(|row| scale2 * (row[y] - center).powi(2))
                    })
                    .collect();
                let emp = pivots.iter().sum::<f64>() / pivots.len() as f64;
                let truth = s2[x * s + y][x * s + y];
                let scored = truth.abs() >= MIN_ENTRY;
                if scored {
                    worst2 = worst2.max((emp - truth).abs() / truth.abs());
                }
                let label = format!("{x}{y}");
                table.push([
                    num(u),
                    "sigma2".into(),
                    label.clone(),
                    label,
                    num(emp),
                    num(truth),
                    scored.to_string(),
                ]);
            }
        }
        out.check(
            format!("clt.sigma1@u={u}"),
            worst1,
            Threshold::Below {
                value: MAX_REL_ERROR,
            },
        );
        out.check(
            format!("clt.sigma2@u={u}"),
            worst2,
            Threshold::Below {
                value: MAX_REL_ERROR,
            },
        );
    }
    out.tables.push(table);
    Ok(())
}
