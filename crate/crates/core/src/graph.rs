//! Weighted directed graphs whose edges come in reversible pairs.
//!
//! A graph is a set of labelled vertices plus a list of edge pairs. Each pair
//! joins two distinct vertices `u`, `v` and carries a forward rate (`u -> v`,
//! the orientation in which it was written) and a backward rate (`v -> u`).
//! A rate of zero means that orientation is absent, so one-directional pairs
//! are allowed; at least one orientation of every pair must be positive.
//!
//! Graphs are immutable and strongly connected through their positive-rate
//! edges; both properties are enforced at construction. Rates are either all
//! exact rationals or all `f64`, chosen by how the input file spells them.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use thiserror::Error;

use crate::rng::SplitMix64;
use crate::scalar::Scalar;
use crate::{ExactGraph, FloatGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Forward,
    Backward,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Forward => Sign::Backward,
            Sign::Backward => Sign::Forward,
        }
    }
}

/// One orientation of an edge pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrientedEdge {
    pub pair: PairId,
    pub sign: Sign,
}

impl OrientedEdge {
    pub fn forward(pair: PairId) -> Self {
        OrientedEdge {
            pair,
            sign: Sign::Forward,
        }
    }

    pub fn backward(pair: PairId) -> Self {
        OrientedEdge {
            pair,
            sign: Sign::Backward,
        }
    }

    pub fn reversed(self) -> Self {
        OrientedEdge {
            pair: self.pair,
            sign: self.sign.flip(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgePair<S> {
    pub u: VertexId,
    pub v: VertexId,
    /// Rate of `u -> v`; zero when that orientation is absent.
    pub forward: S,
    /// Rate of `v -> u`; zero when that orientation is absent.
    pub backward: S,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("line {line}: duplicate edge pair between `{u}` and `{v}`")]
    DuplicateEdge { line: usize, u: String, v: String },
    #[error("line {line}: rate `{token}` is not positive")]
    NonpositiveRate { line: usize, token: String },
    #[error("line {line}: self loop on `{label}`")]
    SelfLoop { line: usize, label: String },
    #[error("unknown edge `{spec}`")]
    UnknownEdge { spec: String },
    #[error("density {value} is outside [0, 1]")]
    InvalidDensity { value: f64 },
    #[error("graph is not strongly connected through positive-rate edges")]
    NotIrreducible,
}

/// Characters that would collide with the edge-list format or with the
/// `u>v` / `u:v` selector syntax.
const FORBIDDEN_IN_LABELS: &[char] = &['>', ':', '#', ',', '"'];

fn validate_label(label: &str, line: usize) -> Result<(), GraphError> {
    if label.is_empty()
        || label.chars().any(|c| c.is_whitespace())
        || label.contains(FORBIDDEN_IN_LABELS)
    {
        return Err(GraphError::MalformedLine {
            line,
            message: format!("label `{label}` is empty or contains a reserved character"),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph<S> {
    labels: Vec<String>,
    pairs: Vec<EdgePair<S>>,
    /// Positive-rate out-edges per vertex, sorted by (pair, sign).
    out: Vec<Vec<OrientedEdge>>,
    /// Contracted graphs may hold several pairs between the same endpoints.
    allow_parallel: bool,
}

impl<S: Scalar> WeightedDigraph<S> {
    /// Validating constructor: distinct labels, no self loops, no duplicate
    /// pairs, rates nonnegative with at least one positive per pair, and the
    /// whole graph irreducible.
    pub fn new(labels: Vec<String>, pairs: Vec<EdgePair<S>>) -> Result<Self, GraphError> {
        for (i, l) in labels.iter().enumerate() {
            validate_label(l, i + 1)?;
            if labels[..i].contains(l) {
                return Err(GraphError::MalformedLine {
                    line: i + 1,
                    message: format!("duplicate vertex label `{l}`"),
                });
            }
        }
        let mut seen = BTreeMap::new();
        for (i, p) in pairs.iter().enumerate() {
            let line = i + 1;
            if p.u == p.v {
                return Err(GraphError::SelfLoop {
                    line,
                    label: labels[p.u.0].clone(),
                });
            }
            if p.u.0 >= labels.len() || p.v.0 >= labels.len() {
                return Err(GraphError::MalformedLine {
                    line,
                    message: "edge endpoint out of range".into(),
                });
            }
            let key = (p.u.min(p.v), p.u.max(p.v));
            if seen.insert(key, line).is_some() {
                return Err(GraphError::DuplicateEdge {
                    line,
                    u: labels[p.u.0].clone(),
                    v: labels[p.v.0].clone(),
                });
            }
            check_pair_rates(&p.forward, &p.backward, line)?;
        }
        let g = Self::assemble(labels, pairs, false);
        if !g.is_irreducible() {
            return Err(GraphError::NotIrreducible);
        }
        Ok(g)
    }

    /// Constructor for internally derived graphs (contractions). Skips the
    /// duplicate-pair and irreducibility checks; structural invariants are
    /// the caller's responsibility.
    pub(crate) fn assemble(
        labels: Vec<String>,
        pairs: Vec<EdgePair<S>>,
        allow_parallel: bool,
    ) -> Self {
        let n = labels.len();
        let mut out = vec![Vec::new(); n];
        for (i, p) in pairs.iter().enumerate() {
            debug_assert!(p.u != p.v, "self loops are never valid");
            if p.forward.is_positive() {
                out[p.u.0].push(OrientedEdge::forward(PairId(i)));
            }
            if p.backward.is_positive() {
                out[p.v.0].push(OrientedEdge::backward(PairId(i)));
            }
        }
        for edges in &mut out {
            edges.sort();
        }
        WeightedDigraph {
            labels,
            pairs,
            out,
            allow_parallel,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn has_parallel_pairs(&self) -> bool {
        self.allow_parallel
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.labels.len()).map(VertexId)
    }

    pub fn pair_ids(&self) -> impl Iterator<Item = PairId> {
        (0..self.pairs.len()).map(PairId)
    }

    pub fn pair(&self, id: PairId) -> &EdgePair<S> {
        &self.pairs[id.0]
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<VertexId> {
        self.labels.iter().position(|l| l == label).map(VertexId)
    }

    pub fn rate(&self, e: OrientedEdge) -> &S {
        let p = &self.pairs[e.pair.0];
        match e.sign {
            Sign::Forward => &p.forward,
            Sign::Backward => &p.backward,
        }
    }

    pub fn source(&self, e: OrientedEdge) -> VertexId {
        let p = &self.pairs[e.pair.0];
        match e.sign {
            Sign::Forward => p.u,
            Sign::Backward => p.v,
        }
    }

    pub fn target(&self, e: OrientedEdge) -> VertexId {
        self.source(e.reversed())
    }

    pub fn edge_present(&self, e: OrientedEdge) -> bool {
        e.pair.0 < self.pairs.len() && self.rate(e).is_positive()
    }

    /// True when both orientations of `p` carry positive rate.
    pub fn pair_reversible(&self, p: PairId) -> bool {
        self.pairs[p.0].forward.is_positive() && self.pairs[p.0].backward.is_positive()
    }

    /// Positive-rate out-edges of `v`, sorted by (pair, sign).
    pub fn out_edges(&self, v: VertexId) -> &[OrientedEdge] {
        &self.out[v.0]
    }

    /// All positive-rate oriented edges, sorted by (pair, sign).
    pub fn oriented_edges(&self) -> Vec<OrientedEdge> {
        let mut all = Vec::new();
        for (i, p) in self.pairs.iter().enumerate() {
            if p.forward.is_positive() {
                all.push(OrientedEdge::forward(PairId(i)));
            }
            if p.backward.is_positive() {
                all.push(OrientedEdge::backward(PairId(i)));
            }
        }
        all
    }

    /// Locates the pair joining `u` and `v`, oriented so its source is `u`.
    /// With parallel pairs this returns the first match.
    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<OrientedEdge> {
        self.pairs.iter().enumerate().find_map(|(i, p)| {
            if p.u == u && p.v == v {
                Some(OrientedEdge::forward(PairId(i)))
            } else if p.u == v && p.v == u {
                Some(OrientedEdge::backward(PairId(i)))
            } else {
                None
            }
        })
    }

    /// Resolves a `source>target` selector to an oriented edge with positive
    /// rate.
    pub fn resolve_edge(&self, spec: &str) -> Result<OrientedEdge, GraphError> {
        let err = || GraphError::UnknownEdge { spec: spec.into() };
        let (u, v) = spec.split_once('>').ok_or_else(err)?;
        let u = self.vertex_by_label(u.trim()).ok_or_else(err)?;
        let v = self.vertex_by_label(v.trim()).ok_or_else(err)?;
        let e = self.edge_between(u, v).ok_or_else(err)?;
        if !self.edge_present(e) {
            return Err(err());
        }
        Ok(e)
    }

    /// Resolves a pair selector: either a 0-based index or `u:v` labels.
    pub fn resolve_pair(&self, spec: &str) -> Result<PairId, GraphError> {
        let err = || GraphError::UnknownEdge { spec: spec.into() };
        if let Ok(idx) = spec.trim().parse::<usize>() {
            return if idx < self.pairs.len() {
                Ok(PairId(idx))
            } else {
                Err(err())
            };
        }
        let (u, v) = spec.split_once(':').ok_or_else(err)?;
        let u = self.vertex_by_label(u.trim()).ok_or_else(err)?;
        let v = self.vertex_by_label(v.trim()).ok_or_else(err)?;
        self.edge_between(u, v).map(|e| e.pair).ok_or_else(err)
    }

    /// Strong connectivity through positive-rate edges.
    pub fn is_irreducible(&self) -> bool {
        self.connected_skipping(&[])
    }

    /// True when removing the given pairs (both orientations) leaves the
    /// graph irreducible.
    pub fn stays_connected_without(&self, drop: &[PairId]) -> Result<bool, GraphError> {
        for p in drop {
            if p.0 >= self.pairs.len() {
                return Err(GraphError::UnknownEdge {
                    spec: format!("pair #{}", p.0),
                });
            }
        }
        Ok(self.connected_skipping(drop))
    }

    fn connected_skipping(&self, drop: &[PairId]) -> bool {
        let n = self.labels.len();
        if n == 0 {
            return false;
        }
        let mut fwd = vec![Vec::new(); n];
        let mut bwd = vec![Vec::new(); n];
        for (i, p) in self.pairs.iter().enumerate() {
            if drop.contains(&PairId(i)) {
                continue;
            }
            if p.forward.is_positive() {
                fwd[p.u.0].push(p.v.0);
                bwd[p.v.0].push(p.u.0);
            }
            if p.backward.is_positive() {
                fwd[p.v.0].push(p.u.0);
                bwd[p.u.0].push(p.v.0);
            }
        }
        reaches_all(&fwd) && reaches_all(&bwd)
    }

    /// Same graph with one pair's rates replaced. Rates must stay
    /// nonnegative with at least one positive orientation, and the graph
    /// must stay irreducible.
    pub fn with_pair_rates(
        &self,
        pair: PairId,
        forward: S,
        backward: S,
    ) -> Result<Self, GraphError> {
        if pair.0 >= self.pairs.len() {
            return Err(GraphError::UnknownEdge {
                spec: format!("pair #{}", pair.0),
            });
        }
        check_pair_rates(&forward, &backward, pair.0 + 1)?;
        let mut pairs = self.pairs.clone();
        pairs[pair.0].forward = forward;
        pairs[pair.0].backward = backward;
        let g = Self::assemble(self.labels.clone(), pairs, self.allow_parallel);
        if !g.is_irreducible() {
            return Err(GraphError::NotIrreducible);
        }
        Ok(g)
    }

    /// Same graph with whole pairs removed. Returns the new graph and, for
    /// each surviving pair, its id in `self`.
    pub fn without_pairs(&self, drop: &[PairId]) -> Result<(Self, Vec<PairId>), GraphError> {
        if !self.stays_connected_without(drop)? {
            return Err(GraphError::NotIrreducible);
        }
        let mut kept = Vec::new();
        let mut pairs = Vec::new();
        for (i, p) in self.pairs.iter().enumerate() {
            if !drop.contains(&PairId(i)) {
                kept.push(PairId(i));
                pairs.push(p.clone());
            }
        }
        Ok((
            Self::assemble(self.labels.clone(), pairs, self.allow_parallel),
            kept,
        ))
    }

    pub fn to_float(&self) -> WeightedDigraph<f64> {
        WeightedDigraph::assemble(
            self.labels.clone(),
            self.pairs
                .iter()
                .map(|p| EdgePair {
                    u: p.u,
                    v: p.v,
                    forward: p.forward.to_f64(),
                    backward: p.backward.to_f64(),
                })
                .collect(),
            self.allow_parallel,
        )
    }

    /// Edge-list serialization; parses back to an identical graph.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for p in &self.pairs {
            s.push_str(&format!(
                "{} {} {} {}\n",
                self.labels[p.u.0],
                self.labels[p.v.0],
                p.forward.rate_token(),
                p.backward.rate_token()
            ));
        }
        s
    }

    /// JSON serialization mirroring the edge-list fields.
    pub fn to_json_value(&self) -> serde_json::Value {
        let pairs: Vec<serde_json::Value> = self
            .pairs
            .iter()
            .map(|p| {
                serde_json::json!({
                    "u": self.labels[p.u.0],
                    "v": self.labels[p.v.0],
                    "fwd": p.forward.rate_token(),
                    "bwd": p.backward.rate_token(),
                })
            })
            .collect();
        serde_json::json!({ "vertices": self.labels, "pairs": pairs })
    }
}

fn check_pair_rates<S: Scalar>(forward: &S, backward: &S, line: usize) -> Result<(), GraphError> {
    for r in [forward, backward] {
        if r.is_negative() || (!S::EXACT && !r.to_f64().is_finite()) {
            return Err(GraphError::NonpositiveRate {
                line,
                token: r.to_string(),
            });
        }
    }
    if !forward.is_positive() && !backward.is_positive() {
        return Err(GraphError::NonpositiveRate {
            line,
            token: "0".into(),
        });
    }
    Ok(())
}

fn reaches_all(adj: &[Vec<usize>]) -> bool {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|b| b)
}

impl<S: Scalar> fmt::Display for WeightedDigraph<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "graph with {} vertices, {} pairs",
            self.labels.len(),
            self.pairs.len()
        )
    }
}

/// A parsed graph in whichever arithmetic the file used.
#[derive(Debug, Clone)]
pub enum AnyGraph {
    Exact(ExactGraph),
    Float(FloatGraph),
}

impl AnyGraph {
    pub fn arithmetic_name(&self) -> &'static str {
        match self {
            AnyGraph::Exact(_) => "exact",
            AnyGraph::Float(_) => "float",
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            AnyGraph::Exact(g) => g.vertex_count(),
            AnyGraph::Float(g) => g.vertex_count(),
        }
    }

    pub fn pair_count(&self) -> usize {
        match self {
            AnyGraph::Exact(g) => g.pair_count(),
            AnyGraph::Float(g) => g.pair_count(),
        }
    }

    pub fn to_float(&self) -> FloatGraph {
        match self {
            AnyGraph::Exact(g) => g.to_float(),
            AnyGraph::Float(g) => g.clone(),
        }
    }
}

/// Raw rate literal plus how it was spelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TokenKind {
    Integer,
    Fraction,
    Float,
}

fn classify_token(tok: &str) -> TokenKind {
    if tok.contains(['.', 'e', 'E']) {
        TokenKind::Float
    } else if tok.contains('/') {
        TokenKind::Fraction
    } else {
        TokenKind::Integer
    }
}

fn parse_exact_rate(tok: &str, line: usize) -> Result<BigRational, GraphError> {
    let malformed = |msg: &str| GraphError::MalformedLine {
        line,
        message: format!("bad rate `{tok}`: {msg}"),
    };
    let parse_int = |s: &str| s.parse::<BigInt>().map_err(|_| malformed("not an integer"));
    match tok.split_once('/') {
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den == BigInt::from(0) {
                return Err(malformed("zero denominator"));
            }
            Ok(BigRational::new(num, den))
        }
        None => Ok(BigRational::from_integer(parse_int(tok)?)),
    }
}

fn parse_float_rate(tok: &str, line: usize) -> Result<f64, GraphError> {
    let malformed = || GraphError::MalformedLine {
        line,
        message: format!("bad rate `{tok}`"),
    };
    let v = match tok.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.parse().map_err(|_| malformed())?;
            let den: f64 = den.parse().map_err(|_| malformed())?;
            num / den
        }
        None => tok.parse().map_err(|_| malformed())?,
    };
    if !v.is_finite() {
        return Err(malformed());
    }
    Ok(v)
}

struct RawPair {
    line: usize,
    u: String,
    v: String,
    fwd: String,
    bwd: String,
}

fn build_graph(raw: Vec<RawPair>, explicit_labels: Option<Vec<String>>) -> Result<AnyGraph, GraphError> {
    if raw.is_empty() {
        return Err(GraphError::MalformedLine {
            line: 0,
            message: "no edges in input".into(),
        });
    }
    let float_mode = raw
        .iter()
        .flat_map(|r| [&r.fwd, &r.bwd])
        .any(|t| classify_token(t) == TokenKind::Float);

    let mut labels: Vec<String> = Vec::new();
    if let Some(ls) = &explicit_labels {
        for (i, l) in ls.iter().enumerate() {
            validate_label(l, i + 1)?;
        }
        labels = ls.clone();
    }
    let mut index_of = |label: &str, line: usize| -> Result<VertexId, GraphError> {
        if let Some(i) = labels.iter().position(|l| l == label) {
            return Ok(VertexId(i));
        }
        if explicit_labels.is_some() {
            return Err(GraphError::MalformedLine {
                line,
                message: format!("label `{label}` missing from vertex list"),
            });
        }
        validate_label(label, line)?;
        labels.push(label.to_string());
        Ok(VertexId(labels.len() - 1))
    };

    let mut endpoints = Vec::new();
    for r in &raw {
        let u = index_of(&r.u, r.line)?;
        let v = index_of(&r.v, r.line)?;
        endpoints.push((u, v));
    }

    macro_rules! finish {
        ($parse:ident, $variant:ident) => {{
            let mut pairs = Vec::new();
            for (r, (u, v)) in raw.iter().zip(endpoints) {
                pairs.push(EdgePair {
                    u,
                    v,
                    forward: $parse(&r.fwd, r.line)?,
                    backward: $parse(&r.bwd, r.line)?,
                });
            }
            match WeightedDigraph::new(labels, pairs) {
                Ok(g) => Ok(AnyGraph::$variant(g)),
                Err(e) => Err(relocate_error(e, &raw)),
            }
        }};
    }
    if float_mode {
        finish!(parse_float_rate, Float)
    } else {
        finish!(parse_exact_rate, Exact)
    }
}

/// `WeightedDigraph::new` reports pair indices as line numbers; map them back
/// to source line numbers.
fn relocate_error(e: GraphError, raw: &[RawPair]) -> GraphError {
    let fix = |line: usize| raw.get(line - 1).map_or(line, |r| r.line);
    match e {
        GraphError::DuplicateEdge { line, u, v } => GraphError::DuplicateEdge {
            line: fix(line),
            u,
            v,
        },
        GraphError::SelfLoop { line, label } => GraphError::SelfLoop {
            line: fix(line),
            label,
        },
        GraphError::NonpositiveRate { line, token } => GraphError::NonpositiveRate {
            line: fix(line),
            token,
        },
        GraphError::MalformedLine { line, message } => GraphError::MalformedLine {
            line: fix(line),
            message,
        },
        other => other,
    }
}

/// Parses the whitespace edge-list format:
///
/// ```text
/// # comment
/// LABEL_U LABEL_V RATE_FWD RATE_BWD
/// ```
///
/// Rates written as integers or `p/q` select exact arithmetic; any rate with
/// a decimal point or exponent switches the whole graph to `f64`.
pub fn parse_graph(input: &str) -> Result<AnyGraph, GraphError> {
    let mut raw = Vec::new();
    for (i, full_line) in input.lines().enumerate() {
        let line = i + 1;
        let text = full_line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 4 {
            return Err(GraphError::MalformedLine {
                line,
                message: format!("expected `U V RATE_FWD RATE_BWD`, found {} tokens", tokens.len()),
            });
        }
        raw.push(RawPair {
            line,
            u: tokens[0].to_string(),
            v: tokens[1].to_string(),
            fwd: tokens[2].to_string(),
            bwd: tokens[3].to_string(),
        });
    }
    build_graph(raw, None)
}

/// Parses the JSON mirror of the edge-list format:
///
/// ```json
/// {"vertices": ["a", "b"], "pairs": [{"u": "a", "v": "b", "fwd": "2", "bwd": "1"}]}
/// ```
///
/// `vertices` is optional and fixes the vertex order. Rates may be JSON
/// numbers or strings; non-integral numbers select `f64` arithmetic.
pub fn parse_graph_json(input: &str) -> Result<AnyGraph, GraphError> {
    let malformed = |line: usize, msg: &str| GraphError::MalformedLine {
        line,
        message: msg.to_string(),
    };
    let value: serde_json::Value =
        serde_json::from_str(input).map_err(|e| malformed(0, &format!("invalid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| malformed(0, "top level must be an object"))?;
    let explicit_labels = match obj.get("vertices") {
        None => None,
        Some(v) => Some(
            v.as_array()
                .ok_or_else(|| malformed(0, "`vertices` must be an array"))?
                .iter()
                .map(|l| {
                    l.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| malformed(0, "vertex labels must be strings"))
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    let pairs = obj
        .get("pairs")
        .and_then(|p| p.as_array())
        .ok_or_else(|| malformed(0, "`pairs` must be an array"))?;

    let rate_token = |v: &serde_json::Value, line: usize| -> Result<String, GraphError> {
        match v {
            serde_json::Value::String(s) => Ok(s.clone()),
            serde_json::Value::Number(n) => {
                if n.is_u64() || n.is_i64() {
                    Ok(n.to_string())
                } else {
                    // Keep a decimal point so mode detection sees a float.
                    Ok(format!("{:?}", n.as_f64().unwrap()))
                }
            }
            _ => Err(malformed(line, "rates must be numbers or strings")),
        }
    };

    let mut raw = Vec::new();
    for (i, p) in pairs.iter().enumerate() {
        let line = i + 1;
        let p = p
            .as_object()
            .ok_or_else(|| malformed(line, "each pair must be an object"))?;
        let field = |k: &str| -> Result<&serde_json::Value, GraphError> {
            p.get(k)
                .ok_or_else(|| malformed(line, &format!("missing field `{k}`")))
        };
        let u = field("u")?
            .as_str()
            .ok_or_else(|| malformed(line, "`u` must be a string"))?;
        let v = field("v")?
            .as_str()
            .ok_or_else(|| malformed(line, "`v` must be a string"))?;
        raw.push(RawPair {
            line,
            u: u.to_string(),
            v: v.to_string(),
            fwd: rate_token(field("fwd")?, line)?,
            bwd: rate_token(field("bwd")?, line)?,
        });
    }
    build_graph(raw, explicit_labels)
}

/// Distribution of random edge rates.
#[derive(Debug, Clone, Copy)]
pub enum RateLaw {
    /// Every present rate is 1.
    Unit,
    /// Uniform in `[lo, hi)`; exact graphs round to thousandths.
    Uniform { lo: f64, hi: f64 },
    /// `num/den` with `num` in `1..=max_num`, `den` in `1..=max_den`.
    RationalUniform { max_num: u64, max_den: u64 },
}

impl RateLaw {
    fn sample<S: Scalar>(&self, rng: &mut SplitMix64) -> S {
        match *self {
            RateLaw::Unit => S::one(),
            RateLaw::Uniform { lo, hi } => {
                assert!(lo > 0.0 && hi > lo);
                let thousandths = (rng.next_uniform(lo, hi) * 1000.0).round().max(1.0);
                S::from_ratio(thousandths as i64, 1000)
            }
            RateLaw::RationalUniform { max_num, max_den } => {
                assert!(max_num > 0 && max_den > 0);
                let num = 1 + rng.next_range(max_num) as i64;
                let den = 1 + rng.next_range(max_den);
                S::from_ratio(num, den)
            }
        }
    }
}

/// Random irreducible reversible graph on `n >= 2` vertices: a random
/// spanning tree of pairs is always present, every other vertex pair is
/// added independently with probability `density`, and all rates are drawn
/// from `law`. Deterministic for a fixed seed.
pub fn random_graph<S: Scalar>(
    n: usize,
    density: f64,
    law: RateLaw,
    seed: u64,
) -> Result<WeightedDigraph<S>, GraphError> {
    if !(0.0..=1.0).contains(&density) || density.is_nan() {
        return Err(GraphError::InvalidDensity { value: density });
    }
    assert!(n >= 2, "random graphs need at least two vertices");
    let mut rng = SplitMix64::stream(seed, 0x67726170);
    let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();

    // Random recursive tree keeps the graph irreducible for any density.
    let mut included: Vec<(usize, usize)> = Vec::new();
    for v in 1..n {
        let parent = rng.next_usize(v);
        included.push((parent.min(v), parent.max(v)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if included.contains(&(u, v)) {
                continue;
            }
            if rng.next_f64() < density {
                included.push((u, v));
            }
        }
    }
    included.sort();
    let pairs = included
        .into_iter()
        .map(|(u, v)| EdgePair {
            u: VertexId(u),
            v: VertexId(v),
            forward: law.sample(&mut rng),
            backward: law.sample(&mut rng),
        })
        .collect();
    WeightedDigraph::new(labels, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn rat(n: i64, d: u64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn parses_two_state_example() {
        let g = match parse_graph("a b 2 1").unwrap() {
            AnyGraph::Exact(g) => g,
            AnyGraph::Float(_) => panic!("integer rates must parse exactly"),
        };
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.pair_count(), 1);
        let e = g.resolve_edge("a>b").unwrap();
        assert_eq!(*g.rate(e), rat(2, 1));
        assert_eq!(*g.rate(e.reversed()), rat(1, 1));
        assert_eq!(g.source(e), VertexId(0));
        assert_eq!(g.target(e), VertexId(1));
    }

    #[test]
    fn comments_blanks_and_fractions() {
        let text = "# rates\n\na b 1/2 3 # inline\nb c 7 2/5\nc a 1 1\n";
        let AnyGraph::Exact(g) = parse_graph(text).unwrap() else {
            panic!("expected exact mode");
        };
        assert_eq!(g.pair_count(), 3);
        assert_eq!(*g.rate(g.resolve_edge("a>b").unwrap()), rat(1, 2));
        assert_eq!(*g.rate(g.resolve_edge("c>b").unwrap()), rat(2, 5));
    }

    #[test]
    fn decimal_rate_switches_to_float() {
        let AnyGraph::Float(g) = parse_graph("a b 0.5 1\nb a2 2 1\na2 a 1 1").unwrap() else {
            panic!("expected float mode");
        };
        assert_eq!(*g.rate(g.resolve_edge("a>b").unwrap()), 0.5);
        // `p/q` tokens survive in float mode as divisions.
        let AnyGraph::Float(h) = parse_graph("a b 1/2 1.5\nb a2 2 1\na2 a 1 1").unwrap() else {
            panic!("a decimal anywhere puts the whole file in float mode");
        };
        assert_eq!(*h.rate(h.resolve_edge("a>b").unwrap()), 0.5);
    }

    #[test]
    fn error_cases_carry_line_numbers() {
        match parse_graph("a b 1 1\nc c 1 1") {
            Err(GraphError::SelfLoop { line, label }) => {
                assert_eq!(line, 2);
                assert_eq!(label, "c");
            }
            other => panic!("expected self loop, got {other:?}"),
        }
        match parse_graph("a b 1 1\nb a 2 2") {
            Err(GraphError::DuplicateEdge { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected duplicate, got {other:?}"),
        }
        match parse_graph("a b -1 1") {
            Err(GraphError::NonpositiveRate { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected nonpositive rate, got {other:?}"),
        }
        match parse_graph("a b 1") {
            Err(GraphError::MalformedLine { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected malformed line, got {other:?}"),
        }
        match parse_graph("a b 1 1\nc d 1 1") {
            Err(GraphError::NotIrreducible) => {}
            other => panic!("expected irreducibility failure, got {other:?}"),
        }
    }

    #[test]
    fn one_directional_pair_allowed() {
        let AnyGraph::Exact(g) = parse_graph("a b 1 0\nb a2 1 1\na2 a 1 1").unwrap() else {
            panic!()
        };
        let e = g.resolve_edge("a>b").unwrap();
        assert!(g.edge_present(e));
        assert!(!g.edge_present(e.reversed()));
        assert!(g.resolve_edge("b>a").is_err());
        assert!(!g.pair_reversible(e.pair));
        // but a pair with no present orientation is rejected
        assert!(matches!(
            parse_graph("a b 0 0\nb a2 1 1\na2 a 1 1"),
            Err(GraphError::NonpositiveRate { .. })
        ));
    }

    #[test]
    fn json_round_trip_preserves_everything() {
        let text = "a b 1/2 3\nb c 7 2/5\nc a 1 1\n";
        let AnyGraph::Exact(g) = parse_graph(text).unwrap() else {
            panic!()
        };
        let json = g.to_json_value().to_string();
        let AnyGraph::Exact(h) = parse_graph_json(&json).unwrap() else {
            panic!("mode must survive JSON round trip")
        };
        assert_eq!(g.to_edge_list(), h.to_edge_list());

        let AnyGraph::Exact(k) = parse_graph(&g.to_edge_list()).unwrap() else {
            panic!()
        };
        assert_eq!(g.to_edge_list(), k.to_edge_list());
    }

    #[test]
    fn float_round_trip_keeps_mode_and_values() {
        let AnyGraph::Float(g) = parse_graph("a b 2.0 1.0\nb a2 0.25 3.5\na2 a 1 1").unwrap()
        else {
            panic!()
        };
        let AnyGraph::Float(h) = parse_graph(&g.to_edge_list()).unwrap() else {
            panic!("float mode must survive a round trip")
        };
        assert_eq!(g.to_edge_list(), h.to_edge_list());
    }

    #[test]
    fn stays_connected_detects_bridges() {
        let AnyGraph::Exact(g) = parse_graph("a b 1 1\nb c 1 1\nc a 1 1\nc d 1 1").unwrap()
        else {
            panic!()
        };
        let bridge = g.resolve_pair("c:d").unwrap();
        let cycle_edge = g.resolve_pair("a:b").unwrap();
        assert!(!g.stays_connected_without(&[bridge]).unwrap());
        assert!(g.stays_connected_without(&[cycle_edge]).unwrap());
        assert!(g.stays_connected_without(&[]).unwrap());
        assert!(matches!(
            g.stays_connected_without(&[PairId(99)]),
            Err(GraphError::UnknownEdge { .. })
        ));
    }

    #[test]
    fn random_graphs_are_deterministic_and_irreducible() {
        for seed in 0..20 {
            let g: ExactGraph = random_graph(
                6,
                0.4,
                RateLaw::RationalUniform {
                    max_num: 1000,
                    max_den: 1000,
                },
                seed,
            )
            .unwrap();
            assert!(g.is_irreducible());
            assert!(g.pair_count() >= 5);
            let h: ExactGraph = random_graph(
                6,
                0.4,
                RateLaw::RationalUniform {
                    max_num: 1000,
                    max_den: 1000,
                },
                seed,
            )
            .unwrap();
            assert_eq!(g.to_edge_list(), h.to_edge_list());
        }
        let g: FloatGraph = random_graph(2, 0.0, RateLaw::Uniform { lo: 0.5, hi: 3.0 }, 1).unwrap();
        assert_eq!(g.pair_count(), 1);
        assert!(matches!(
            random_graph::<f64>(4, 1.5, RateLaw::Unit, 0),
            Err(GraphError::InvalidDensity { .. })
        ));
    }

    #[test]
    fn density_one_gives_complete_graph() {
        let g: ExactGraph = random_graph(5, 1.0, RateLaw::Unit, 3).unwrap();
        assert_eq!(g.pair_count(), 10);
    }
}
