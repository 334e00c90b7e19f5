//! `enum`, `poly`, and `decompose`: tree listings, constrained polynomial
//! values, and pinned-status decompositions.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use treesurgeon_core::poly::{decompose, tree_poly, EdgeStatus, PinnedSet, TreeVector};
use treesurgeon_core::trees::enumerate_rooted_trees;
use treesurgeon_core::Scalar;

use crate::config::RunConfig;
use crate::report::{object, scalar_json, write_report, Envelope};
use crate::{BackendArg, CliError, ConstraintArgs};

use super::{
    constraint_from, eval_dual, load_graph, pair_label, resolve_pins, resolve_root, scalars_agree,
    with_any,
};

pub fn run_enum(
    graph_path: &Path,
    root: &str,
    constraints: &ConstraintArgs,
    count_only: bool,
) -> Result<(), CliError> {
    use std::io::Write;
    let (any, _) = load_graph(graph_path)?;
    let stdout = std::io::stdout();
    let mut sink = stdout.lock();
    with_any!(&any, |g| {
        let root = resolve_root(g, root)?;
        let c = constraint_from(g, &constraints.avoid, &constraints.require)?;
        let mut count = 0usize;
        for tree in enumerate_rooted_trees(g, root, &c) {
            count += 1;
            if !count_only {
                let line: Vec<String> = tree
                    .edge_set()
                    .iter()
                    .map(|&e| format!("{}>{}", g.label(g.source(e)), g.label(g.target(e))))
                    .collect();
                match writeln!(sink, "{}", line.join(" ")) {
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => return Ok(()),
                    Err(e) => return Err(CliError::internal(e.to_string())),
                    Ok(()) => {}
                }
            }
        }
        if count_only {
            let _ = writeln!(sink, "{count}");
        }
        Ok(())
    })
}

pub fn run_poly(
    cfg: &RunConfig,
    graph_path: &Path,
    root: &str,
    constraints: &ConstraintArgs,
    backend: BackendArg,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let (any, stamp) = load_graph(graph_path)?;
    let payload = with_any!(&any, |g| {
        let root_id = resolve_root(g, root)?;
        let c = constraint_from(g, &constraints.avoid, &constraints.require)?;
        let value = eval_dual(
            backend,
            &format!("tree polynomial rooted at `{root}`"),
            scalars_agree,
            |b| Ok(tree_poly(g, root_id, &c, b)),
        )?;
        object(vec![
            ("root", json!(root)),
            ("avoid", json!(constraints.avoid)),
            ("require", json!(constraints.require)),
            ("backend", json!(backend.name())),
            ("value", scalar_json(&value)),
        ])
    });
    let envelope =
        Envelope::new("poly", stamp.arithmetic, payload).with_graph(&stamp);
    write_report(&envelope, cfg, out.as_deref())
}

/// Status pattern of one entry, one marker per pinned pair.
pub fn status_json(status: &[EdgeStatus]) -> Value {
    Value::Array(
        status
            .iter()
            .map(|s| {
                json!(match s {
                    EdgeStatus::Absent => "absent",
                    EdgeStatus::Forward => "forward",
                    EdgeStatus::Backward => "backward",
                })
            })
            .collect(),
    )
}

pub fn tree_vector_json<S: Scalar>(tv: &TreeVector<S>) -> Value {
    Value::Array(
        tv.statuses
            .iter()
            .zip(&tv.values)
            .map(|(status, value)| {
                object(vec![
                    ("status", status_json(status)),
                    ("value", scalar_json(value)),
                ])
            })
            .collect(),
    )
}

pub fn run_decompose(
    cfg: &RunConfig,
    graph_path: &Path,
    root: &str,
    pins: &[String],
    backend: BackendArg,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let (any, stamp) = load_graph(graph_path)?;
    let payload = with_any!(&any, |g| {
        let root_id = resolve_root(g, root)?;
        let pin_ids = resolve_pins(g, pins)?;
        let pinned =
            PinnedSet::new(g, pin_ids.clone()).map_err(|e| CliError::usage(e.to_string()))?;
        let tv = eval_dual(
            backend,
            &format!("decomposition rooted at `{root}`"),
            |a: &TreeVector<_>, b: &TreeVector<_>| {
                a.values.len() == b.values.len()
                    && a.values.iter().zip(&b.values).all(|(x, y)| scalars_agree(x, y))
            },
            |b| decompose(g, root_id, &pinned, b).map_err(|e| CliError::usage(e.to_string())),
        )?;
        object(vec![
            ("root", json!(root)),
            (
                "pinned",
                Value::Array(
                    pin_ids.iter().map(|&p| json!(pair_label(g, p))).collect(),
                ),
            ),
            ("entries", tree_vector_json(&tv)),
            ("total", scalar_json(&tv.total())),
            ("backend", json!(backend.name())),
        ])
    });
    let envelope =
        Envelope::new("decompose", stamp.arithmetic, payload).with_graph(&stamp);
    write_report(&envelope, cfg, out.as_deref())
}
