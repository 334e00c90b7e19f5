//! Rooted spanning-tree polynomials and their pinned-pair decompositions.
//!
//! A rooted spanning tree of a weighted digraph is an arborescence whose
//! edges all point toward the root; its weight is the product of its edge
//! rates.  The *tree polynomial* `tau(root; avoid A, require B)` sums the
//! weights of all rooted trees that avoid every oriented edge in `A` and
//! contain every oriented edge in `B`.  Two independent evaluation routes
//! are provided: direct enumeration and Laplacian-minor determinants.  They
//! must agree exactly in rational arithmetic; that redundancy is a feature,
//! not an accident, and both routes are kept live by the test suite.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::graph::{EdgePair, GraphError, OrientedEdge, PairId, VertexId, WeightedDigraph};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::trees::{enumerate_rooted_trees, TreeConstraint, TreeError};

/// Vertex-count threshold below which `Backend::Auto` enumerates trees
/// directly instead of evaluating determinants.
pub const AUTO_ENUMERATION_LIMIT: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("required edge `{edge}` has zero rate, so the rescaled polynomial is undefined")]
    ZeroRequiredRate { edge: String },
    #[error("pair #{pair} has no reverse orientation, so it cannot be contracted")]
    MissingReverseEdge { pair: usize },
    #[error("pair #{pair} is pinned more than once")]
    DuplicatePinned { pair: usize },
    #[error("side constraint mentions pinned pair #{pair}")]
    ConstraintMentionsPinned { pair: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Which evaluation route to use for tree polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Enumerate every admissible rooted tree and sum its weights.
    Enumeration,
    /// Evaluate Laplacian-minor determinants, with required edges handled
    /// by inclusion-exclusion over deleted subsets.
    Determinant,
    /// Enumeration up to [`AUTO_ENUMERATION_LIMIT`] vertices, determinants
    /// beyond that.
    Auto,
}

impl Backend {
    /// The concrete route `Auto` resolves to for a graph of `n` vertices.
    pub fn resolve(self, n: usize) -> Backend {
        match self {
            Backend::Auto => {
                if n <= AUTO_ENUMERATION_LIMIT {
                    Backend::Enumeration
                } else {
                    Backend::Determinant
                }
            }
            other => other,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::Enumeration => "enumeration",
            Backend::Determinant => "determinant",
            Backend::Auto => "auto",
        }
    }
}

/// Sum of weights of rooted spanning trees satisfying `constraint`,
/// evaluated with the requested backend.
pub fn tree_poly<S: Scalar>(
    g: &WeightedDigraph<S>,
    root: VertexId,
    constraint: &TreeConstraint,
    backend: Backend,
) -> S {
    match backend.resolve(g.vertex_count()) {
        Backend::Enumeration => tree_poly_enum(g, root, constraint),
        Backend::Determinant => tree_poly_det(g, root, constraint),
        Backend::Auto => unreachable!("resolve never returns Auto"),
    }
}

/// Enumeration route: walk every admissible tree and add up its weights.
pub fn tree_poly_enum<S: Scalar>(
    g: &WeightedDigraph<S>,
    root: VertexId,
    constraint: &TreeConstraint,
) -> S {
    let mut total = S::zero();
    for tree in enumerate_rooted_trees(g, root, constraint) {
        total = total + tree.weight(g);
    }
    total
}

/// Determinant route.
///
/// With only avoided edges the polynomial is the principal minor of the
/// out-degree Laplacian (row and column of the root struck) with the
/// avoided rates set to zero.  Required edges reduce to avoided ones by
/// inclusion-exclusion: summing `(-1)^|Z|` times the avoided-only value
/// over all subsets `Z` of the required set counts exactly the trees that
/// contain every required edge, because a tree missing some required edge
/// contributes equal positive and negative terms.
pub fn tree_poly_det<S: Scalar>(
    g: &WeightedDigraph<S>,
    root: VertexId,
    constraint: &TreeConstraint,
) -> S {
    let required: Vec<OrientedEdge> = constraint.require.iter().copied().collect();
    let mut total = S::zero();
    // Subsets of the required set, encoded in the bits of `mask`.
    for mask in 0u32..(1u32 << required.len()) {
        let mut zeroed: BTreeSet<OrientedEdge> = constraint.avoid.clone();
        let mut sign_flip = false;
        for (i, e) in required.iter().enumerate() {
            if mask & (1 << i) != 0 {
                zeroed.insert(*e);
                sign_flip = !sign_flip;
            }
        }
        let minor = laplacian_minor_det(g, root, &zeroed);
        total = if sign_flip { total - minor } else { total + minor };
    }
    total
}

/// Determinant of the out-degree Laplacian with the root's row and column
/// removed and the rates of `zeroed` edges replaced by zero.
fn laplacian_minor_det<S: Scalar>(
    g: &WeightedDigraph<S>,
    root: VertexId,
    zeroed: &BTreeSet<OrientedEdge>,
) -> S {
    let n = g.vertex_count();
    // Map vertices other than the root onto 0..n-1 minor indices.
    let mut index = vec![usize::MAX; n];
    let mut next = 0usize;
    for v in 0..n {
        if v != root.0 {
            index[v] = next;
            next += 1;
        }
    }
    let mut m: Matrix<S> = Matrix::zeros(n - 1, n - 1);
    for v in g.vertices() {
        for &e in g.out_edges(v) {
            if zeroed.contains(&e) {
                continue;
            }
            let rate = g.rate(e).clone();
            let u = g.source(e).0;
            let w = g.target(e).0;
            if u != root.0 {
                let d = m.get(index[u], index[u]).clone() + rate.clone();
                m.set(index[u], index[u], d);
                if w != root.0 {
                    let off = m.get(index[u], index[w]).clone() - rate;
                    m.set(index[u], index[w], off);
                }
            }
        }
    }
    m.det()
}

/// Tree polynomial divided by the product of the required-edge rates.
///
/// The rescaled value is a polynomial in the *unconstrained* rates only:
/// it does not change when the rates of avoided or required edges change.
pub fn rescaled_poly<S: Scalar>(
    g: &WeightedDigraph<S>,
    root: VertexId,
    constraint: &TreeConstraint,
    backend: Backend,
) -> Result<S, PolyError> {
    let mut denom = S::one();
    for &e in &constraint.require {
        if !g.edge_present(e) {
            return Err(PolyError::ZeroRequiredRate {
                edge: format!("{}>{}", g.label(g.source(e)), g.label(g.target(e))),
            });
        }
        denom = denom * g.rate(e).clone();
    }
    Ok(tree_poly(g, root, constraint, backend) / denom)
}

/// Result of contracting one reversible pair: the two endpoints become a
/// single vertex and the pair itself disappears.
///
/// Other pairs between the same endpoints would become self loops; they are
/// dropped because no tree can use them.  Pairs that become parallel after
/// the merge are kept *distinct* (not rate-summed), so that constraints
/// naming an individual pair still make sense after mapping them through
/// the contraction.  For unconstrained polynomials this makes no
/// difference; the parallel rates add inside every Laplacian entry and
/// every tree count.
#[derive(Debug, Clone)]
pub struct Contraction<S> {
    pub graph: WeightedDigraph<S>,
    /// The vertex of the contracted graph that the two endpoints fused into.
    pub merged: VertexId,
    /// Old pair id -> new pair id; `None` for the contracted pair and for
    /// pairs that degenerated into self loops.
    pub pair_map: Vec<Option<PairId>>,
    /// Old vertex id -> new vertex id.
    pub vertex_map: Vec<VertexId>,
}

impl<S: Scalar> Contraction<S> {
    /// Carry an oriented edge of the original graph into the contracted
    /// one.  `None` when the edge's pair no longer exists.
    pub fn map_edge(&self, e: OrientedEdge) -> Option<OrientedEdge> {
        self.pair_map[e.pair.0].map(|pair| OrientedEdge { pair, sign: e.sign })
    }

    pub fn map_vertex(&self, v: VertexId) -> VertexId {
        self.vertex_map[v.0]
    }

    /// Carry a side constraint through the contraction.  Fails if the
    /// constraint mentions the contracted pair (or a pair that degenerated
    /// into a self loop, which can only happen on already-contracted
    /// graphs).
    pub fn map_constraint(&self, c: &TreeConstraint) -> Result<TreeConstraint, PolyError> {
        let map_set = |set: &BTreeSet<OrientedEdge>| -> Result<Vec<OrientedEdge>, PolyError> {
            set.iter()
                .map(|&e| {
                    self.map_edge(e)
                        .ok_or(PolyError::ConstraintMentionsPinned { pair: e.pair.0 })
                })
                .collect()
        };
        let avoid = map_set(&c.avoid)?;
        let require = map_set(&c.require)?;
        let mut mapped = TreeConstraint::avoiding(avoid);
        mapped = mapped.merged(&TreeConstraint::requiring(require)?)?;
        Ok(mapped)
    }
}

/// Contract a reversible pair: fuse its endpoints and remove the pair.
pub fn contract_pair<S: Scalar>(
    g: &WeightedDigraph<S>,
    p: PairId,
) -> Result<Contraction<S>, PolyError> {
    if !g.pair_reversible(p) {
        return Err(PolyError::MissingReverseEdge { pair: p.0 });
    }
    let pair = g.pair(p);
    let (u, v) = (pair.u, pair.v);
    let keep_slot = u.0.min(v.0);
    let drop_slot = u.0.max(v.0);

    let mut labels = Vec::with_capacity(g.vertex_count() - 1);
    let mut vertex_map = vec![VertexId(0); g.vertex_count()];
    for (i, label) in g.labels().iter().enumerate() {
        if i == drop_slot {
            continue;
        }
        let new_id = VertexId(labels.len());
        if i == keep_slot {
            labels.push(format!("{}+{}", g.label(u), g.label(v)));
        } else {
            labels.push(label.clone());
        }
        vertex_map[i] = new_id;
    }
    vertex_map[drop_slot] = vertex_map[keep_slot];
    let merged = vertex_map[keep_slot];

    let mut pairs: Vec<EdgePair<S>> = Vec::new();
    let mut pair_map = vec![None; g.pair_count()];
    for q in g.pair_ids() {
        if q == p {
            continue;
        }
        let old = g.pair(q);
        let (nu, nv) = (vertex_map[old.u.0], vertex_map[old.v.0]);
        if nu == nv {
            // Became a self loop at the merged vertex; no tree can use it.
            continue;
        }
        pair_map[q.0] = Some(PairId(pairs.len()));
        pairs.push(EdgePair {
            u: nu,
            v: nv,
            forward: old.forward.clone(),
            backward: old.backward.clone(),
        });
    }
    let graph = WeightedDigraph::assemble(labels, pairs, true);
    Ok(Contraction {
        graph,
        merged,
        pair_map,
        vertex_map,
    })
}

/// Tree polynomial of the graph with pair `p` contracted, rooted at the
/// merged vertex, under a side constraint mapped through the contraction.
///
/// This value is already rescaled: the contracted pair's rates no longer
/// appear anywhere in it.
pub fn contracted_root_poly<S: Scalar>(
    g: &WeightedDigraph<S>,
    p: PairId,
    extra: &TreeConstraint,
    backend: Backend,
) -> Result<S, PolyError> {
    let contraction = contract_pair(g, p)?;
    let mapped = contraction.map_constraint(extra)?;
    Ok(tree_poly(
        &contraction.graph,
        contraction.merged,
        &mapped,
        backend,
    ))
}

/// Status of one pinned pair inside a tree: the tree uses neither
/// orientation, the forward one, or the backward one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeStatus {
    Absent,
    Forward,
    Backward,
}

impl EdgeStatus {
    pub fn symbol(self) -> char {
        match self {
            EdgeStatus::Absent => '0',
            EdgeStatus::Forward => '+',
            EdgeStatus::Backward => '-',
        }
    }
}

/// Render a status assignment as one symbol per pinned pair, e.g. `0+-`.
pub fn status_string(status: &[EdgeStatus]) -> String {
    status.iter().map(|s| s.symbol()).collect()
}

/// All `3^n` status assignments for `n` pinned pairs, in canonical order:
/// grouped by how many pairs are used (ascending), subsets of used pairs in
/// lexicographic order, and sign patterns enumerated with the first used
/// pair varying fastest (`Forward` before `Backward`).
///
/// For one pair this is `0, +, -`; for two pairs it is
/// `00, +0, -0, 0+, 0-, ++, -+, +-, --`.
pub fn statuses(n: usize) -> Vec<Vec<EdgeStatus>> {
    let mut all = Vec::with_capacity(3usize.pow(n as u32));
    for size in 0..=n {
        for subset in subsets_of_size(n, size) {
            for mask in 0u32..(1u32 << size) {
                let mut status = vec![EdgeStatus::Absent; n];
                for (j, &idx) in subset.iter().enumerate() {
                    status[idx] = if mask & (1 << j) == 0 {
                        EdgeStatus::Forward
                    } else {
                        EdgeStatus::Backward
                    };
                }
                all.push(status);
            }
        }
    }
    all
}

/// Size-`k` subsets of `0..n` in lexicographic order.
fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(n, k, i + 1, current, out);
            current.pop();
        }
    }
    rec(n, k, 0, &mut current, &mut out);
    out
}

/// An ordered list of distinct reversible pairs singled out for
/// decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinnedSet {
    pairs: Vec<PairId>,
}

impl PinnedSet {
    pub fn new<S: Scalar>(g: &WeightedDigraph<S>, pairs: Vec<PairId>) -> Result<Self, PolyError> {
        let mut seen = BTreeSet::new();
        for &p in &pairs {
            if !seen.insert(p) {
                return Err(PolyError::DuplicatePinned { pair: p.0 });
            }
            if !g.pair_reversible(p) {
                return Err(PolyError::MissingReverseEdge { pair: p.0 });
            }
        }
        Ok(PinnedSet { pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[PairId] {
        &self.pairs
    }

    /// The tree constraint encoding one status assignment: unused pairs are
    /// avoided in both orientations, used pairs require the marked
    /// orientation and avoid the opposite one.
    pub fn constraint_for(&self, status: &[EdgeStatus]) -> TreeConstraint {
        assert_eq!(status.len(), self.pairs.len());
        let mut avoid = Vec::new();
        let mut require = Vec::new();
        for (&p, &s) in self.pairs.iter().zip(status) {
            match s {
                EdgeStatus::Absent => {
                    avoid.push(OrientedEdge::forward(p));
                    avoid.push(OrientedEdge::backward(p));
                }
                EdgeStatus::Forward => {
                    require.push(OrientedEdge::forward(p));
                    avoid.push(OrientedEdge::backward(p));
                }
                EdgeStatus::Backward => {
                    require.push(OrientedEdge::backward(p));
                    avoid.push(OrientedEdge::forward(p));
                }
            }
        }
        TreeConstraint::avoiding(avoid)
            .merged(&TreeConstraint::requiring(require).expect("orientations are distinct"))
            .expect("avoid and require sets are disjoint by construction")
    }

    /// Classify a tree's edge set against the pinned pairs.
    pub fn classify(&self, edges: &BTreeSet<OrientedEdge>) -> Vec<EdgeStatus> {
        self.pairs
            .iter()
            .map(|&p| {
                if edges.contains(&OrientedEdge::forward(p)) {
                    EdgeStatus::Forward
                } else if edges.contains(&OrientedEdge::backward(p)) {
                    EdgeStatus::Backward
                } else {
                    EdgeStatus::Absent
                }
            })
            .collect()
    }
}

/// The full `3^n`-entry decomposition of a root's tree polynomial over the
/// status assignments of `n` pinned pairs.  Every admissible tree is
/// claimed by exactly one status, so the entries add up to the plain tree
/// polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeVector<S> {
    pub root: VertexId,
    pub statuses: Vec<Vec<EdgeStatus>>,
    pub values: Vec<S>,
}

impl<S: Scalar> TreeVector<S> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn entry(&self, status: &[EdgeStatus]) -> &S {
        let idx = self
            .statuses
            .iter()
            .position(|s| s == status)
            .expect("status not part of this decomposition");
        &self.values[idx]
    }

    pub fn total(&self) -> S {
        let mut sum = S::zero();
        for v in &self.values {
            sum = sum + v.clone();
        }
        sum
    }
}

impl<S: Scalar> fmt::Display for TreeVector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .statuses
            .iter()
            .zip(&self.values)
            .map(|(s, v)| format!("{}: {}", status_string(s), v))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Decompose the tree polynomial of `root` over the pinned pairs.
pub fn decompose<S: Scalar>(
    g: &WeightedDigraph<S>,
    root: VertexId,
    pinned: &PinnedSet,
    backend: Backend,
) -> Result<TreeVector<S>, PolyError> {
    decompose_with(g, root, pinned, &TreeConstraint::none(), backend)
}

/// Decompose under an additional side constraint that must not mention any
/// pinned pair.
pub fn decompose_with<S: Scalar>(
    g: &WeightedDigraph<S>,
    root: VertexId,
    pinned: &PinnedSet,
    extra: &TreeConstraint,
    backend: Backend,
) -> Result<TreeVector<S>, PolyError> {
    for &p in pinned.pairs() {
        if extra.mentions_pair(p) {
            return Err(PolyError::ConstraintMentionsPinned { pair: p.0 });
        }
    }
    let status_list = statuses(pinned.len());
    let values = match backend.resolve(g.vertex_count()) {
        Backend::Enumeration => {
            // One enumeration pass: classify each admissible tree into the
            // unique status it realizes.
            let mut index = std::collections::BTreeMap::new();
            for (i, s) in status_list.iter().enumerate() {
                index.insert(s.clone(), i);
            }
            let mut values = vec![S::zero(); status_list.len()];
            for tree in enumerate_rooted_trees(g, root, extra) {
                let status = pinned.classify(&tree.edge_set());
                let slot = index[&status];
                values[slot] = values[slot].clone() + tree.weight(g);
            }
            values
        }
        Backend::Determinant => status_list
            .iter()
            .map(|status| {
                let c = pinned
                    .constraint_for(status)
                    .merged(extra)
                    .expect("side constraint mentions no pinned pair");
                tree_poly_det(g, root, &c)
            })
            .collect(),
        Backend::Auto => unreachable!("resolve never returns Auto"),
    };
    Ok(TreeVector {
        root,
        statuses: status_list,
        values,
    })
}
