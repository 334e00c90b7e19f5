//! `simulate`: jump-process trajectories with batch-means error bars,
//! replicas fanned out over the worker pool.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use treesurgeon_core::sim::{estimate_currents, replica_seed, simulate};

use crate::config::RunConfig;
use crate::report::{object, write_report, Envelope};
use crate::CliError;

use super::{load_graph, pair_label, with_any};

pub fn run(
    cfg: &RunConfig,
    graph_path: &Path,
    horizon: f64,
    burn_in: Option<f64>,
    replicas: usize,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(CliError::usage("horizon must be positive and finite"));
    }
    if replicas == 0 {
        return Err(CliError::usage("need at least one replica"));
    }
    let burn_in = burn_in.unwrap_or(0.05 * horizon);
    if !(0.0..horizon).contains(&burn_in) {
        return Err(CliError::usage(
            "burn-in must lie in [0, horizon)",
        ));
    }
    let (any, stamp) = load_graph(graph_path)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::internal(e.to_string()))?;
    let payload = with_any!(&any, |g| {
        let runs: Vec<Result<Value, CliError>> = pool.install(|| {
            use rayon::prelude::*;
            (0..replicas as u64)
                .into_par_iter()
                .map(|r| {
                    let seed = replica_seed(cfg.seed, r);
                    let stats = simulate(g, horizon, burn_in, seed)
                        .map_err(|e| CliError::usage(e.to_string()))?;
                    let estimates = estimate_currents(&stats)
                        .map_err(|e| CliError::usage(e.to_string()))?;
                    let fractions = stats.occupation_fractions();
                    Ok(json!({
                        "replica": r,
                        "seed": seed,
                        "jumps": stats.jumps,
                        "window": stats.total_time,
                        "currents": g.pair_ids().map(|p| json!({
                            "pair": pair_label(g, p),
                            "value": estimates[p.0].value,
                            "std_error": estimates[p.0].std_error,
                        })).collect::<Vec<_>>(),
                        "occupation": g.vertices().map(|v| json!({
                            "vertex": g.label(v),
                            "fraction": fractions[v.0],
                        })).collect::<Vec<_>>(),
                    }))
                })
                .collect()
        });
        let mut rows = Vec::with_capacity(replicas);
        for r in runs {
            rows.push(r?);
        }
        // Aggregate per pair: mean of replica estimates and the spread of
        // that mean across replicas.
        let aggregate: Vec<Value> = g
            .pair_ids()
            .map(|p| {
                let values: Vec<f64> = rows
                    .iter()
                    .map(|row| row["currents"][p.0]["value"].as_f64().unwrap())
                    .collect();
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                let spread = if values.len() > 1 {
                    let var = values
                        .iter()
                        .map(|v| (v - mean) * (v - mean))
                        .sum::<f64>()
                        / (values.len() - 1) as f64;
                    Some((var / values.len() as f64).sqrt())
                } else {
                    None
                };
                json!({
                    "pair": pair_label(g, p),
                    "mean": mean,
                    "std_error_of_mean": spread,
                })
            })
            .collect();
        object(vec![
            ("horizon", json!(horizon)),
            ("burn_in", json!(burn_in)),
            ("replicas", Value::Array(rows)),
            ("aggregate", Value::Array(aggregate)),
        ])
    });
    let envelope =
        Envelope::new("simulate", stamp.arithmetic, payload).with_graph(&stamp);
    write_report(&envelope, cfg, out.as_deref())
}
