//! `stationary`, `currents`, and `linearity`: exact stationary laws and
//! the affine dependence of every current on one or two input currents.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use treesurgeon_core::graph::{PairId, WeightedDigraph};
use treesurgeon_core::markov::{
    currents, lambda_coefficients, mu_coefficients, stationary, stationary_kernel,
    verify_linearity, verify_mu_linearity, vertex_balance, ResidualReport,
};
use treesurgeon_core::poly::{Backend, PinnedSet};
use treesurgeon_core::rng::SplitMix64;
use treesurgeon_core::Scalar;

use crate::config::RunConfig;
use crate::report::{object, scalar_json, write_report, Envelope};
use crate::{BackendArg, CliError};

use super::planes::certificate_json;
use super::{load_graph, pair_label, resolve_pins, scalars_agree, with_any};

pub fn run_stationary(
    cfg: &RunConfig,
    graph_path: &Path,
    backend: BackendArg,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let (any, stamp) = load_graph(graph_path)?;
    let payload = with_any!(&any, |g| {
        let single = backend.single().unwrap_or(Backend::Determinant);
        let p = stationary(g, single);
        if backend.single().is_none() {
            let q = stationary(g, Backend::Enumeration);
            if !p
                .probabilities
                .iter()
                .zip(&q.probabilities)
                .all(|(a, b)| scalars_agree(a, b))
            {
                return Err(CliError::verification(
                    "backends disagree on the stationary distribution",
                ));
            }
        }
        // Independent route: kernel of the rate matrix. Disagreement is a
        // verification failure, not a usage problem.
        let kernel = stationary_kernel(g).map_err(|e| CliError::usage(e.to_string()))?;
        let kernel_match = p
            .probabilities
            .iter()
            .zip(&kernel)
            .all(|(a, b)| scalars_agree(a, b));
        let probabilities: Vec<Value> = g
            .vertices()
            .map(|v| {
                json!({
                    "vertex": g.label(v),
                    "value": scalar_json(&p.probabilities[v.0]),
                })
            })
            .collect();
        let payload = object(vec![
            ("probabilities", Value::Array(probabilities)),
            ("total_tree_weight", scalar_json(&p.total_weight)),
            ("kernel_match", json!(kernel_match)),
            ("backend", json!(backend.name())),
        ]);
        if !kernel_match {
            return Err(CliError::verification(
                "tree-weight stationary law disagrees with the kernel solve",
            ));
        }
        Ok::<_, CliError>(payload)
    })?;
    let envelope =
        Envelope::new("stationary", stamp.arithmetic, payload).with_graph(&stamp);
    write_report(&envelope, cfg, out.as_deref())
}

pub fn run_currents(
    cfg: &RunConfig,
    graph_path: &Path,
    backend: BackendArg,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let (any, stamp) = load_graph(graph_path)?;
    let payload = with_any!(&any, |g| {
        let single = backend.single().unwrap_or(Backend::Determinant);
        let cur = currents(g, single);
        if backend.single().is_none() {
            let cur2 = currents(g, Backend::Enumeration);
            if !cur
                .per_pair
                .iter()
                .zip(&cur2.per_pair)
                .all(|(a, b)| scalars_agree(a, b))
            {
                return Err(CliError::verification("backends disagree on currents"));
            }
        }
        let balance = vertex_balance(g, &cur);
        let worst = balance
            .iter()
            .map(|r| r.to_f64().abs())
            .fold(0.0_f64, f64::max);
        let rows: Vec<Value> = g
            .pair_ids()
            .map(|p| {
                json!({
                    "pair": pair_label(g, p),
                    "value": scalar_json(&cur.per_pair[p.0]),
                })
            })
            .collect();
        object(vec![
            ("currents", Value::Array(rows)),
            ("vertex_balance_max_abs", json!(worst)),
            ("backend", json!(backend.name())),
        ])
    });
    let envelope =
        Envelope::new("currents", stamp.arithmetic, payload).with_graph(&stamp);
    write_report(&envelope, cfg, out.as_deref())
}

fn residuals_json<S: Scalar>(report: &ResidualReport<S>, exact: bool) -> (Value, bool) {
    let holds = if exact {
        report.all_zero_exact()
    } else {
        report.within_float_tolerance(1.0)
    };
    let rows: Vec<Value> = report
        .residuals
        .iter()
        .map(|row| Value::Array(row.iter().map(scalar_json).collect()))
        .collect();
    (
        json!({
            "samples": report.residuals.len(),
            "rows": rows,
            "max_abs": report.max_abs,
            "mean_abs": report.mean_abs,
            "all_zero": holds,
        }),
        holds,
    )
}

fn sample_rate<S: Scalar>(rng: &mut SplitMix64) -> S {
    S::from_ratio(1 + rng.next_range(24) as i64, 1 + rng.next_range(6))
}

fn single_input_payload<S: Scalar>(
    g: &WeightedDigraph<S>,
    input: PairId,
    samples: usize,
    seed: u64,
    arg: BackendArg,
) -> Result<(Value, bool), CliError> {
    let backend = arg.single().unwrap_or(Backend::Determinant);
    if arg.single().is_none() {
        let by_enum = lambda_coefficients(g, input, Backend::Enumeration)
            .map_err(|e| CliError::usage(e.to_string()))?;
        let by_det = lambda_coefficients(g, input, Backend::Determinant)
            .map_err(|e| CliError::usage(e.to_string()))?;
        let same = by_enum.per_pair.iter().zip(&by_det.per_pair).all(|(a, b)| {
            scalars_agree(&a.0, &b.0) && scalars_agree(&a.1, &b.1)
        });
        if !same {
            return Err(CliError::verification(
                "backends disagree on the lambda coefficients",
            ));
        }
    }
    let mut rng = SplitMix64::stream(seed, 0x6c616d62);
    let points: Vec<(S, S)> = (0..samples)
        .map(|_| (sample_rate(&mut rng), sample_rate(&mut rng)))
        .collect();
    let (lambda, residuals) = verify_linearity(g, input, &points, backend)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let pinned =
        PinnedSet::new(g, vec![input]).map_err(|e| CliError::usage(e.to_string()))?;
    let (cert, _) = treesurgeon_core::coplanarity::rank_certificate(g, &pinned, backend)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let coefficients: Vec<Value> = g
        .pair_ids()
        .map(|p| {
            let (l0, l1) = &lambda.per_pair[p.0];
            json!({
                "pair": pair_label(g, p),
                "lambda0": scalar_json(l0),
                "lambda1": scalar_json(l1),
            })
        })
        .collect();
    let dets_zero = lambda.coplanarity_dets.iter().all(|d| d.is_zero());
    let (residual_block, holds) = residuals_json(&residuals, S::EXACT);
    let payload = object(vec![
        ("input_pairs", json!([pair_label(g, input)])),
        ("coefficients", Value::Array(coefficients)),
        ("rank_certificates", json!([certificate_json(g, &cert)])),
        ("coplanarity_dets_zero", json!(dets_zero)),
        ("residuals", residual_block),
        (
            "arithmetic",
            json!(if S::EXACT { "exact" } else { "float" }),
        ),
    ]);
    Ok((payload, holds && (dets_zero || !S::EXACT)))
}

fn two_input_payload<S: Scalar>(
    g: &WeightedDigraph<S>,
    inputs: [PairId; 2],
    samples: usize,
    seed: u64,
    arg: BackendArg,
) -> Result<(Value, bool), CliError> {
    let backend = arg.single().unwrap_or(Backend::Determinant);
    if arg.single().is_none() {
        let by_enum = mu_coefficients(g, inputs[0], inputs[1], Backend::Enumeration)
            .map_err(|e| CliError::usage(e.to_string()))?;
        let by_det = mu_coefficients(g, inputs[0], inputs[1], Backend::Determinant)
            .map_err(|e| CliError::usage(e.to_string()))?;
        let same = by_enum.per_pair.iter().zip(&by_det.per_pair).all(|(a, b)| {
            a.iter().zip(b.iter()).all(|(x, y)| scalars_agree(x, y))
        });
        if !same {
            return Err(CliError::verification(
                "backends disagree on the mu coefficients",
            ));
        }
    }
    let mut rng = SplitMix64::stream(seed, 0x00006d75);
    let points: Vec<[S; 4]> = (0..samples)
        .map(|_| {
            [
                sample_rate(&mut rng),
                sample_rate(&mut rng),
                sample_rate(&mut rng),
                sample_rate(&mut rng),
            ]
        })
        .collect();
    let (mu, residuals) = verify_mu_linearity(g, inputs[0], inputs[1], &points, backend)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let coefficients: Vec<Value> = g
        .pair_ids()
        .map(|p| {
            let m = &mu.per_pair[p.0];
            json!({
                "pair": pair_label(g, p),
                "mu0": scalar_json(&m[0]),
                "mu1": scalar_json(&m[1]),
                "mu2": scalar_json(&m[2]),
            })
        })
        .collect();
    let (residual_block, holds) = residuals_json(&residuals, S::EXACT);
    let payload = object(vec![
        (
            "input_pairs",
            json!([pair_label(g, inputs[0]), pair_label(g, inputs[1])]),
        ),
        ("coefficients", Value::Array(coefficients)),
        (
            "rank_certificates",
            json!([certificate_json(g, &mu.base_certificate)]),
        ),
        ("residuals", residual_block),
        (
            "arithmetic",
            json!(if S::EXACT { "exact" } else { "float" }),
        ),
    ]);
    Ok((payload, holds))
}

pub fn run_linearity(
    cfg: &RunConfig,
    graph_path: &Path,
    inputs: &[String],
    samples: usize,
    backend: BackendArg,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let (any, stamp) = load_graph(graph_path)?;
    let (payload, holds) = with_any!(&any, |g| {
        let pins = resolve_pins(g, inputs)?;
        match pins.as_slice() {
            [input] => single_input_payload(g, *input, samples, cfg.seed, backend)?,
            [a, b] => two_input_payload(g, [*a, *b], samples, cfg.seed, backend)?,
            _ => {
                return Err(CliError::usage(
                    "linearity takes one or two --input pairs",
                ))
            }
        }
    });
    let envelope =
        Envelope::new("linearity", stamp.arithmetic, payload).with_graph(&stamp);
    write_report(&envelope, cfg, out.as_deref())?;
    if holds {
        Ok(())
    } else {
        Err(CliError::verification(
            "mutual-linearity residuals are not zero",
        ))
    }
}
