//! `coplanarity` and `conjecture`: rank certificates for pinned
//! tree-vector families, plane data for external plotting, and batch rank
//! surveys over random graphs.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};

use treesurgeon_core::coplanarity::{
    conjecture_test, rank_certificate, sigma_vector, ArithmeticMode, RankCertificate,
};
use treesurgeon_core::graph::{random_graph, AnyGraph, PairId, RateLaw, WeightedDigraph};
use treesurgeon_core::poly::{statuses, Backend, EdgeStatus, PinnedSet, TreeVector};
use treesurgeon_core::rng::SplitMix64;
use treesurgeon_core::trees::TreeConstraint;
use treesurgeon_core::{ExactGraph, Scalar};

use crate::config::RunConfig;
use crate::report::{object, scalar_json, write_batch_report, write_report, Envelope};
use crate::{BackendArg, CliError, ModeArg};

use super::{load_graph, pair_label, resolve_pins, scalars_agree, with_any};

pub fn certificate_json<S: Scalar>(
    g: &WeightedDigraph<S>,
    cert: &RankCertificate,
) -> Value {
    let arithmetic = match &cert.arithmetic {
        ArithmeticMode::Exact => json!({ "mode": "exact" }),
        ArithmeticMode::Float {
            tolerance,
            singular_values,
        } => json!({
            "mode": "float",
            "tolerance": tolerance,
            "singular_values": singular_values,
        }),
    };
    json!({
        "pinned": cert.pinned.iter().map(|&p| pair_label(g, p)).collect::<Vec<_>>(),
        "vector_dim": cert.vector_dim,
        "rank": cert.rank,
        "basis_roots": cert
            .basis_roots
            .iter()
            .map(|&v| g.label(v).to_string())
            .collect::<Vec<_>>(),
        "arithmetic": arithmetic,
    })
}

/// Slot index of a one-pin status pattern in the canonical layout.
fn one_pin_slot(pattern: EdgeStatus) -> usize {
    statuses(1)
        .iter()
        .position(|s| s[0] == pattern)
        .expect("single-pin layout holds all three statuses")
}

/// Plane CSV: one row of conditioned polynomial values per root, then the
/// plane normal. Only defined for a single pinned pair.
fn plane_csv<S: Scalar>(
    g: &WeightedDigraph<S>,
    pin: PairId,
    vectors: &[TreeVector<S>],
    backend: Backend,
    path: &Path,
) -> Result<(), CliError> {
    let sigma = sigma_vector(g, pin, &TreeConstraint::none(), backend)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let slots = [
        one_pin_slot(EdgeStatus::Absent),
        one_pin_slot(EdgeStatus::Forward),
        one_pin_slot(EdgeStatus::Backward),
    ];
    let mut text = String::from("root,tau_empty,tau_plus,tau_minus\n");
    for (v, tv) in vectors.iter().enumerate() {
        let row: Vec<String> = slots.iter().map(|&i| tv.values[i].to_string()).collect();
        text.push_str(&format!(
            "{},{}\n",
            g.label(treesurgeon_core::graph::VertexId(v)),
            row.join(",")
        ));
    }
    let normal = sigma.slot_entries();
    let row: Vec<String> = slots.iter().map(|&i| normal[i].to_string()).collect();
    text.push_str(&format!("sigma,{}\n", row.join(",")));
    std::fs::write(path, text)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

pub fn run_coplanarity(
    cfg: &RunConfig,
    graph_path: &Path,
    pins: &[String],
    mode: Option<ModeArg>,
    backend: BackendArg,
    out: Option<PathBuf>,
    plane_csv_path: Option<PathBuf>,
) -> Result<(), CliError> {
    let (parsed, stamp) = load_graph(graph_path)?;
    let any = match (mode, parsed) {
        (Some(ModeArg::Exact), AnyGraph::Float(_)) => {
            return Err(CliError::usage(
                "float rates cannot be promoted to exact arithmetic",
            ));
        }
        (Some(ModeArg::Float), g) => AnyGraph::Float(g.to_float()),
        (_, g) => g,
    };
    let arithmetic = any.arithmetic_name();
    let payload = with_any!(&any, |g| {
        let pin_ids = resolve_pins(g, pins)?;
        if plane_csv_path.is_some() && pin_ids.len() != 1 {
            return Err(CliError::usage(format!(
                "wrong arity: plane data needs exactly 1 pinned pair, got {}",
                pin_ids.len()
            )));
        }
        let pinned =
            PinnedSet::new(g, pin_ids.clone()).map_err(|e| CliError::usage(e.to_string()))?;
        let single = backend.single().unwrap_or(Backend::Determinant);
        let (cert, vectors) = rank_certificate(g, &pinned, single)
            .map_err(|e| CliError::usage(e.to_string()))?;
        if backend.single().is_none() {
            let (cert2, vectors2) = rank_certificate(g, &pinned, Backend::Enumeration)
                .map_err(|e| CliError::usage(e.to_string()))?;
            let same = cert.rank == cert2.rank
                && vectors
                    .iter()
                    .zip(&vectors2)
                    .all(|(a, b)| {
                        a.values.iter().zip(&b.values).all(|(x, y)| scalars_agree(x, y))
                    });
            if !same {
                return Err(CliError::verification(
                    "backends disagree on the rank certificate",
                ));
            }
        }
        if let Some(csv) = &plane_csv_path {
            plane_csv(g, pin_ids[0], &vectors, single, csv)?;
        }
        let points: Vec<Value> = vectors
            .iter()
            .enumerate()
            .map(|(v, tv)| {
                json!({
                    "root": g.label(treesurgeon_core::graph::VertexId(v)),
                    "vector": tv.values.iter().map(scalar_json).collect::<Vec<_>>(),
                })
            })
            .collect();
        Ok::<_, CliError>(object(vec![
            ("certificate", certificate_json(g, &cert)),
            ("points", Value::Array(points)),
            ("backend", json!(backend.name())),
        ]))
    })?;
    let envelope =
        Envelope::new("coplanarity", arithmetic, payload).with_graph(&stamp);
    write_report(&envelope, cfg, out.as_deref())
}

/// Vertex-disjoint pinned pairs whose joint removal keeps the graph
/// strongly connected, chosen greedily.
fn disjoint_pins(g: &ExactGraph, want: usize) -> Option<Vec<PairId>> {
    let mut chosen: Vec<PairId> = Vec::new();
    let mut used = std::collections::HashSet::new();
    for p in g.pair_ids() {
        if chosen.len() == want {
            break;
        }
        let pair = g.pair(p);
        if used.contains(&pair.u) || used.contains(&pair.v) {
            continue;
        }
        let mut attempt = chosen.clone();
        attempt.push(p);
        if g.stays_connected_without(&attempt).unwrap_or(false) {
            used.insert(pair.u);
            used.insert(pair.v);
            chosen = attempt;
        }
    }
    (chosen.len() == want).then_some(chosen)
}

fn conjecture_trial(
    index: u64,
    master_seed: u64,
    n: usize,
    vertices: usize,
    density: f64,
) -> Result<Value, CliError> {
    let mut seeder = SplitMix64::stream(master_seed, index);
    loop {
        let graph_seed = seeder.next_u64();
        let g: ExactGraph = random_graph(
            vertices,
            density,
            RateLaw::RationalUniform {
                max_num: 20,
                max_den: 7,
            },
            graph_seed,
        )
        .map_err(|e| CliError::usage(e.to_string()))?;
        let Some(pins) = disjoint_pins(&g, n) else {
            continue;
        };
        let pinned = PinnedSet::new(&g, pins).map_err(|e| CliError::usage(e.to_string()))?;
        let started = Instant::now();
        let report = conjecture_test(&g, &pinned, Backend::Determinant)
            .map_err(|e| CliError::usage(e.to_string()))?;
        return Ok(json!({
            "seed": graph_seed,
            "rank": report.certificate.rank,
            "dim": report.certificate.vector_dim,
            "elapsed_ms": started.elapsed().as_millis() as u64,
            "expected_rank": report.expected_rank,
            "matches_expectation": report.matches_expectation,
        }));
    }
}

pub fn run_conjecture(
    cfg: &RunConfig,
    n: usize,
    vertices: usize,
    trials: usize,
    density: f64,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    if n == 0 || vertices < 2 * n + 1 {
        return Err(CliError::usage(format!(
            "need at least {} vertices for {n} disjoint pinned pairs",
            2 * n + 1
        )));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::internal(e.to_string()))?;
    let results: Vec<Result<Value, CliError>> = pool.install(|| {
        use rayon::prelude::*;
        (0..trials as u64)
            .into_par_iter()
            .map(|i| conjecture_trial(i, cfg.seed, n, vertices, density))
            .collect()
    });
    let mut lines = Vec::with_capacity(trials);
    for r in results {
        lines.push(r?);
    }
    let envelope = Envelope::new(
        "conjecture",
        "exact",
        json!({
            "n": n,
            "vertices": vertices,
            "trials": trials,
            "density": density,
        }),
    );
    write_batch_report(
        &envelope,
        cfg,
        &lines,
        &["seed", "rank", "dim", "elapsed_ms"],
        out.as_deref(),
    )
}
