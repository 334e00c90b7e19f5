//! Subcommand implementations plus the plumbing they share: graph loading
//! with digests, label resolution, and dual-backend verification.

pub mod flows;
pub mod planes;
pub mod selftest;
pub mod simulate;
pub mod trees;

use std::path::Path;

use treesurgeon_core::graph::{parse_graph, parse_graph_json, AnyGraph, PairId, VertexId, WeightedDigraph};
use treesurgeon_core::poly::Backend;
use treesurgeon_core::trees::TreeConstraint;
use treesurgeon_core::Scalar;

use crate::report::{sha256_hex, GraphStamp};
use crate::{BackendArg, CliError};

/// Read, digest, and parse a graph file (edge list or JSON).
pub fn load_graph(path: &Path) -> Result<(AnyGraph, GraphStamp), CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::usage(format!("{}: not valid UTF-8", path.display())))?;
    let graph = if text.trim_start().starts_with('{') {
        parse_graph_json(&text)
    } else {
        parse_graph(&text)
    }
    .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let stamp = GraphStamp {
        path: path.to_path_buf(),
        sha256: sha256_hex(&bytes),
        vertices: graph.vertex_count(),
        pairs: graph.pair_count(),
        arithmetic: match graph {
            AnyGraph::Exact(_) => "exact",
            AnyGraph::Float(_) => "float",
        },
    };
    Ok((graph, stamp))
}

/// Run the same body for either arithmetic of an [`AnyGraph`].
macro_rules! with_any {
    ($any:expr, |$g:ident| $body:expr) => {
        match $any {
            treesurgeon_core::graph::AnyGraph::Exact($g) => $body,
            treesurgeon_core::graph::AnyGraph::Float($g) => $body,
        }
    };
}
pub(crate) use with_any;

pub fn resolve_root<S: Scalar>(
    g: &WeightedDigraph<S>,
    label: &str,
) -> Result<VertexId, CliError> {
    g.vertex_by_label(label)
        .ok_or_else(|| CliError::usage(format!("unknown root vertex `{label}`")))
}

pub fn resolve_pins<S: Scalar>(
    g: &WeightedDigraph<S>,
    specs: &[String],
) -> Result<Vec<PairId>, CliError> {
    let mut pins = Vec::with_capacity(specs.len());
    for spec in specs {
        let p = g.resolve_pair(spec)?;
        if pins.contains(&p) {
            return Err(CliError::usage(format!("pair `{spec}` pinned twice")));
        }
        pins.push(p);
    }
    Ok(pins)
}

pub fn pair_label<S: Scalar>(g: &WeightedDigraph<S>, p: PairId) -> String {
    let pair = g.pair(p);
    format!("{}:{}", g.label(pair.u), g.label(pair.v))
}

pub fn constraint_from<S: Scalar>(
    g: &WeightedDigraph<S>,
    avoid: &[String],
    require: &[String],
) -> Result<TreeConstraint, CliError> {
    let mut avoided = Vec::new();
    for spec in avoid {
        avoided.push(g.resolve_edge(spec)?);
    }
    let mut required = Vec::new();
    for spec in require {
        required.push(g.resolve_edge(spec)?);
    }
    TreeConstraint::new(avoided.into_iter().collect(), required.into_iter().collect())
        .map_err(|e| CliError::usage(e.to_string()))
}

/// Evaluate with the chosen backend, or with both and an agreement check.
pub fn eval_dual<T>(
    arg: BackendArg,
    what: &str,
    agree: impl Fn(&T, &T) -> bool,
    f: impl Fn(Backend) -> Result<T, CliError>,
) -> Result<T, CliError> {
    match arg.single() {
        Some(b) => f(b),
        None => {
            let by_enum = f(Backend::Enumeration)?;
            let by_det = f(Backend::Determinant)?;
            if agree(&by_enum, &by_det) {
                Ok(by_det)
            } else {
                Err(CliError::verification(format!(
                    "backends disagree on {what}"
                )))
            }
        }
    }
}

/// Entrywise agreement predicate respecting the arithmetic mode.
pub fn scalars_agree<S: Scalar>(a: &S, b: &S) -> bool {
    treesurgeon_core::scalar::values_agree(a, b)
}
