//! Rooted spanning trees, constrained enumeration, and the invertible
//! edge-swap surgery between two trees with different roots.
//!
//! Trees here are arborescences directed *toward* the root: every non-root
//! vertex has exactly one outgoing edge, the root has none, and following
//! out-edges from anywhere reaches the root. Surgery exchanges edges between
//! two such trees until their roots trade places, preserving the product of
//! their weights exactly.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{OrientedEdge, PairId, VertexId, WeightedDigraph};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("avoid and require sets overlap")]
    OverlappingConstraint,
    #[error("require contains both orientations of pair #{0}")]
    ConflictingRequirement(usize),
    #[error("tree is not a valid rooted spanning tree of this graph")]
    InvalidTree,
    #[error("both trees are rooted at vertex #{0}")]
    SameRoot(usize),
    #[error("not a swap configuration: {0}")]
    NotASwapConfiguration(String),
    #[error("constraint mentions pinned pair #{0}")]
    ConstraintMentionsPinned(usize),
}

/// A spanning tree of the graph directed toward `root`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootedTree {
    root: VertexId,
    /// `out[v]` is the unique edge leaving `v`, `None` exactly at the root.
    out: Vec<Option<OrientedEdge>>,
}

impl RootedTree {
    pub fn new<S: Scalar>(
        g: &WeightedDigraph<S>,
        root: VertexId,
        out: Vec<Option<OrientedEdge>>,
    ) -> Result<Self, TreeError> {
        let t = RootedTree { root, out };
        if t.is_valid_for(g) {
            Ok(t)
        } else {
            Err(TreeError::InvalidTree)
        }
    }

    pub(crate) fn from_parts_unchecked(root: VertexId, out: Vec<Option<OrientedEdge>>) -> Self {
        RootedTree { root, out }
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn out_edge(&self, v: VertexId) -> Option<OrientedEdge> {
        self.out[v.0]
    }

    pub fn edges(&self) -> impl Iterator<Item = OrientedEdge> + '_ {
        self.out.iter().filter_map(|e| *e)
    }

    pub fn edge_set(&self) -> BTreeSet<OrientedEdge> {
        self.edges().collect()
    }

    pub fn contains(&self, e: OrientedEdge) -> bool {
        self.out.iter().any(|&o| o == Some(e))
    }

    /// Product of the rates of the tree's edges; `one` for a single-vertex
    /// graph.
    pub fn weight<S: Scalar>(&self, g: &WeightedDigraph<S>) -> S {
        self.edges()
            .fold(S::one(), |acc, e| acc * g.rate(e).clone())
    }

    pub fn satisfies(&self, c: &TreeConstraint) -> bool {
        c.avoid.iter().all(|&e| !self.contains(e)) && c.require.iter().all(|&e| self.contains(e))
    }

    /// Edges along the unique path `from ⇝ root`, in walk order. Empty when
    /// `from` is the root.
    pub fn path_to_root<S: Scalar>(
        &self,
        g: &WeightedDigraph<S>,
        from: VertexId,
    ) -> Vec<OrientedEdge> {
        let mut path = Vec::new();
        let mut cur = from;
        while let Some(e) = self.out[cur.0] {
            path.push(e);
            cur = g.target(e);
            if path.len() > self.out.len() {
                panic!("cycle in rooted tree");
            }
        }
        path
    }

    /// Structural validation against a graph: one out-edge per non-root
    /// vertex sourced there with positive rate, none at the root, all chains
    /// reaching the root.
    pub fn is_valid_for<S: Scalar>(&self, g: &WeightedDigraph<S>) -> bool {
        let n = g.vertex_count();
        if self.out.len() != n || self.root.0 >= n || self.out[self.root.0].is_some() {
            return false;
        }
        for v in g.vertices() {
            if v == self.root {
                continue;
            }
            match self.out[v.0] {
                Some(e) if g.edge_present(e) && g.source(e) == v => {}
                _ => return false,
            }
        }
        // Every chain must terminate at the root within n steps.
        for v in g.vertices() {
            let mut cur = v;
            for _ in 0..n {
                if cur == self.root {
                    break;
                }
                cur = g.target(self.out[cur.0].unwrap());
            }
            if cur != self.root {
                return false;
            }
        }
        true
    }

    /// One-line rendering such as `b>a c>d d>a`, in vertex order.
    pub fn render<S: Scalar>(&self, g: &WeightedDigraph<S>) -> String {
        self.edges()
            .map(|e| format!("{}>{}", g.label(g.source(e)), g.label(g.target(e))))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Enumeration constraint: trees must avoid every edge in `avoid` and
/// contain every edge in `require`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TreeConstraint {
    pub avoid: BTreeSet<OrientedEdge>,
    pub require: BTreeSet<OrientedEdge>,
}

impl TreeConstraint {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(
        avoid: BTreeSet<OrientedEdge>,
        require: BTreeSet<OrientedEdge>,
    ) -> Result<Self, TreeError> {
        if avoid.intersection(&require).next().is_some() {
            return Err(TreeError::OverlappingConstraint);
        }
        for &e in &require {
            if require.contains(&e.reversed()) {
                return Err(TreeError::ConflictingRequirement(e.pair.0));
            }
        }
        Ok(TreeConstraint { avoid, require })
    }

    pub fn avoiding<I: IntoIterator<Item = OrientedEdge>>(edges: I) -> Self {
        TreeConstraint {
            avoid: edges.into_iter().collect(),
            require: BTreeSet::new(),
        }
    }

    pub fn requiring<I: IntoIterator<Item = OrientedEdge>>(edges: I) -> Result<Self, TreeError> {
        Self::new(BTreeSet::new(), edges.into_iter().collect())
    }

    pub fn is_empty(&self) -> bool {
        self.avoid.is_empty() && self.require.is_empty()
    }

    pub fn mentions_pair(&self, p: PairId) -> bool {
        self.avoid
            .iter()
            .chain(self.require.iter())
            .any(|e| e.pair == p)
    }

    pub fn allows(&self, t: &RootedTree) -> bool {
        t.satisfies(self)
    }

    /// Combines two constraints into one.
    pub fn merged(&self, other: &TreeConstraint) -> Result<Self, TreeError> {
        Self::new(
            self.avoid.union(&other.avoid).copied().collect(),
            self.require.union(&other.require).copied().collect(),
        )
    }
}

/// Streaming enumerator over all spanning trees with a given root that
/// satisfy a constraint. Deterministic order: backtracking over vertices in
/// ascending index, candidate out-edges in (pair, sign) order.
pub struct TreeEnumerator<'g, S> {
    graph: &'g WeightedDigraph<S>,
    root: VertexId,
    /// Non-root vertices in ascending order.
    verts: Vec<VertexId>,
    /// Allowed out-edges per entry of `verts`.
    candidates: Vec<Vec<OrientedEdge>>,
    /// Currently assigned out-edge per vertex (indexed by vertex id).
    assigned: Vec<Option<OrientedEdge>>,
    /// Chosen candidate index per entry of `verts`, up to `pos`.
    choice: Vec<usize>,
    pos: usize,
    next_choice: usize,
    done: bool,
}

/// All spanning trees rooted at `root` satisfying `c`, streamed each exactly
/// once in a deterministic order. The stream is empty when no tree fits (for
/// example when `c` requires an edge leaving the root).
pub fn enumerate_rooted_trees<'g, S: Scalar>(
    g: &'g WeightedDigraph<S>,
    root: VertexId,
    c: &TreeConstraint,
) -> TreeEnumerator<'g, S> {
    let n = g.vertex_count();
    assert!(root.0 < n, "root out of range");
    let verts: Vec<VertexId> = g.vertices().filter(|&v| v != root).collect();
    let mut candidates = Vec::with_capacity(verts.len());
    let mut feasible = true;
    // A required edge leaving the root can never appear in a tree.
    if c.require.iter().any(|&e| g.source(e) == root) {
        feasible = false;
    }
    for &v in &verts {
        let required: Vec<OrientedEdge> = c
            .require
            .iter()
            .copied()
            .filter(|&e| g.source(e) == v)
            .collect();
        let cand: Vec<OrientedEdge> = match required.len() {
            0 => g
                .out_edges(v)
                .iter()
                .copied()
                .filter(|e| !c.avoid.contains(e))
                .collect(),
            1 if g.edge_present(required[0]) && !c.avoid.contains(&required[0]) => required,
            // Two required edges from one vertex, or a required edge that is
            // absent: nothing can satisfy this.
            _ => Vec::new(),
        };
        if cand.is_empty() {
            feasible = false;
        }
        candidates.push(cand);
    }
    TreeEnumerator {
        graph: g,
        root,
        verts,
        candidates,
        assigned: vec![None; n],
        choice: Vec::new(),
        pos: 0,
        next_choice: 0,
        done: !feasible,
    }
}

impl<S: Scalar> TreeEnumerator<'_, S> {
    /// Would assigning `e` at `v` close a directed cycle among the currently
    /// assigned vertices?
    fn closes_cycle(&self, v: VertexId, e: OrientedEdge) -> bool {
        let mut cur = self.graph.target(e);
        loop {
            if cur == v {
                return true;
            }
            match self.assigned[cur.0] {
                Some(next) => cur = self.graph.target(next),
                None => return false,
            }
        }
    }

    fn step_back(&mut self) -> bool {
        match self.choice.pop() {
            Some(c) => {
                self.pos -= 1;
                self.assigned[self.verts[self.pos].0] = None;
                self.next_choice = c + 1;
                true
            }
            None => {
                self.done = true;
                false
            }
        }
    }
}

impl<S: Scalar> Iterator for TreeEnumerator<'_, S> {
    type Item = RootedTree;

    fn next(&mut self) -> Option<RootedTree> {
        if self.done {
            return None;
        }
        loop {
            if self.pos == self.verts.len() {
                let tree = RootedTree::from_parts_unchecked(self.root, self.assigned.clone());
                // Arrange to resume from the deepest choice point.
                self.step_back();
                return Some(tree);
            }
            let v = self.verts[self.pos];
            let mut placed = false;
            for c in self.next_choice..self.candidates[self.pos].len() {
                let e = self.candidates[self.pos][c];
                if !self.closes_cycle(v, e) {
                    self.assigned[v.0] = Some(e);
                    self.choice.push(c);
                    self.pos += 1;
                    self.next_choice = 0;
                    placed = true;
                    break;
                }
            }
            if !placed && !self.step_back() {
                return None;
            }
        }
    }
}

/// A spanning structure with two sink roots `x`, `y` and one branching
/// vertex with out-degree 2, every other vertex having out-degree 1. The
/// degenerate case `branch == y` (or `x`) is an ordinary tree rooted at the
/// other root and is how surgery starts and ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoublyRootedTree {
    roots: (VertexId, VertexId),
    branch: VertexId,
    out: Vec<Vec<OrientedEdge>>,
}

impl DoublyRootedTree {
    /// Views `t` (rooted at `x`) as the degenerate doubly rooted tree with
    /// roots `(x, y)` and branch `y`.
    pub fn from_tree<S: Scalar>(
        g: &WeightedDigraph<S>,
        t: &RootedTree,
        second_root: VertexId,
    ) -> Result<Self, TreeError> {
        if !t.is_valid_for(g) {
            return Err(TreeError::InvalidTree);
        }
        if second_root == t.root() {
            return Err(TreeError::SameRoot(second_root.0));
        }
        let out = (0..g.vertex_count())
            .map(|v| t.out_edge(VertexId(v)).into_iter().collect())
            .collect();
        Ok(DoublyRootedTree {
            roots: (t.root(), second_root),
            branch: second_root,
            out,
        })
    }

    pub fn roots(&self) -> (VertexId, VertexId) {
        self.roots
    }

    pub fn branch(&self) -> VertexId {
        self.branch
    }

    pub fn edges(&self) -> impl Iterator<Item = OrientedEdge> + '_ {
        self.out.iter().flatten().copied()
    }

    pub fn is_degenerate(&self) -> bool {
        self.branch == self.roots.0 || self.branch == self.roots.1
    }

    /// Converts a degenerate doubly rooted tree into the rooted tree it
    /// encodes: branch at `y` means the structure is rooted at `x` and vice
    /// versa.
    pub fn into_rooted<S: Scalar>(self, g: &WeightedDigraph<S>) -> Result<RootedTree, TreeError> {
        let root = if self.branch == self.roots.1 {
            self.roots.0
        } else if self.branch == self.roots.0 {
            self.roots.1
        } else {
            return Err(TreeError::NotASwapConfiguration(
                "branch is strictly between the roots".into(),
            ));
        };
        let mut out = vec![None; self.out.len()];
        for (v, es) in self.out.iter().enumerate() {
            match es.len() {
                0 => {}
                1 => out[v] = Some(es[0]),
                _ => return Err(TreeError::InvalidTree),
            }
        }
        RootedTree::new(g, root, out)
    }

    /// Follows out-edges from `start`, skipping `skip`, until a root is
    /// reached. Errors if a vertex en route has out-degree ≠ 1 after the
    /// skip, or if the walk does not terminate.
    fn chase<S: Scalar>(
        &self,
        g: &WeightedDigraph<S>,
        start: VertexId,
        skip: Option<OrientedEdge>,
    ) -> Result<VertexId, TreeError> {
        let mut cur = start;
        for _ in 0..=self.out.len() {
            if cur == self.roots.0 || cur == self.roots.1 {
                return Ok(cur);
            }
            let es: Vec<OrientedEdge> = self.out[cur.0]
                .iter()
                .copied()
                .filter(|&e| Some(e) != skip)
                .collect();
            if es.len() != 1 {
                return Err(TreeError::NotASwapConfiguration(format!(
                    "vertex #{} has out-degree {} during a chain walk",
                    cur.0,
                    es.len()
                )));
            }
            cur = g.target(es[0]);
        }
        Err(TreeError::NotASwapConfiguration(
            "chain walk did not reach a root".into(),
        ))
    }

    fn remove_edge(&mut self, v: VertexId, e: OrientedEdge) {
        self.out[v.0].retain(|&o| o != e);
    }

    fn insert_edge(&mut self, v: VertexId, e: OrientedEdge) {
        self.out[v.0].push(e);
        self.out[v.0].sort();
    }
}

/// Record of one swap step: `removed` left the doubly rooted tree for the
/// moving tree, `inserted` went the other way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapRecord {
    pub removed: OrientedEdge,
    pub inserted: OrientedEdge,
    pub branch_before: VertexId,
    pub branch_after: VertexId,
}

/// One elementary edge swap. `t_moving` must have its branch strictly
/// between its roots `(x, y)`, or equal to `y` (the degenerate start), and
/// `t_fixed` must be rooted at that branch. Removes the first edge `e` on
/// the path branch ⇝ x in `t_moving`, inserts the last basin-crossing edge
/// `f` on the chain from e's landing vertex to the branch in `t_fixed`, and
/// exchanges them, advancing the branch to the source of `f`.
pub fn swap_step<S: Scalar>(
    g: &WeightedDigraph<S>,
    t_moving: &DoublyRootedTree,
    t_fixed: &RootedTree,
) -> Result<(DoublyRootedTree, RootedTree, SwapRecord), TreeError> {
    let (x, y) = t_moving.roots;
    let z = t_moving.branch;
    if z == x {
        return Err(TreeError::NotASwapConfiguration(
            "branch already reached the first root".into(),
        ));
    }
    if t_fixed.root() != z {
        return Err(TreeError::NotASwapConfiguration(
            "the rooted tree must be rooted at the branch vertex".into(),
        ));
    }

    // e: the out-edge of the branch whose chain reaches x.
    let mut e = None;
    for &cand in &t_moving.out[z.0] {
        if t_moving.chase(g, g.target(cand), Some(cand))? == x {
            if e.is_some() {
                return Err(TreeError::NotASwapConfiguration(
                    "both branch edges lead to the same root".into(),
                ));
            }
            e = Some(cand);
        }
    }
    let e = e.ok_or_else(|| {
        TreeError::NotASwapConfiguration("no branch edge leads toward the first root".into())
    })?;

    // Basins of t_moving ∖ e: every vertex chains to exactly one root.
    let n = g.vertex_count();
    let mut in_x_basin = vec![false; n];
    for v in 0..n {
        in_x_basin[v] = t_moving.chase(g, VertexId(v), Some(e))? == x;
    }

    // f: last basin-crossing edge on the chain from where e lands down to
    // the fixed tree's root. Taking the path from e's landing vertex (rather
    // than from x) keeps f on the chain that e redirects, so exchanging them
    // can never close a cycle on the rooted side.
    let path = t_fixed.path_to_root(g, g.target(e));
    let f = path
        .iter()
        .rev()
        .find(|&&f| in_x_basin[g.source(f).0] != in_x_basin[g.target(f).0])
        .copied()
        .ok_or_else(|| {
            TreeError::NotASwapConfiguration("no basin-crossing edge on the root path".into())
        })?;
    let z_next = g.source(f);
    debug_assert!(in_x_basin[z_next.0], "crossing edge must lead out of x's basin");
    debug_assert!(g.target(e) != y, "removed edge may not target the second root");
    debug_assert!(g.target(f) != x, "inserted edge may not target the first root");

    let mut next_moving = t_moving.clone();
    next_moving.remove_edge(z, e);
    next_moving.insert_edge(z_next, f);
    next_moving.branch = z_next;

    let mut next_fixed_out: Vec<Option<OrientedEdge>> =
        (0..n).map(|v| t_fixed.out_edge(VertexId(v))).collect();
    next_fixed_out[z_next.0] = None;
    next_fixed_out[z.0] = Some(e);
    let next_fixed = RootedTree::new(g, z_next, next_fixed_out)?;

    Ok((
        next_moving,
        next_fixed,
        SwapRecord {
            removed: e,
            inserted: f,
            branch_before: z,
            branch_after: z_next,
        },
    ))
}

/// Full surgery outcome with the per-step trace.
#[derive(Debug, Clone)]
pub struct SurgeryOutcome {
    /// Tree rooted at the first input's root, built from the second input's
    /// material.
    pub tree_x: RootedTree,
    /// Tree rooted at the second input's root.
    pub tree_y: RootedTree,
    pub steps: Vec<SwapRecord>,
}

/// Repeated edge swaps between `t_x` and `t_y` until their roots trade
/// places. The product of the two tree weights is preserved exactly: the
/// union of the two edge multisets never changes.
pub fn surgery<S: Scalar>(
    g: &WeightedDigraph<S>,
    t_x: &RootedTree,
    t_y: &RootedTree,
) -> Result<(RootedTree, RootedTree), TreeError> {
    surgery_with_trace(g, t_x, t_y).map(|o| (o.tree_x, o.tree_y))
}

pub fn surgery_with_trace<S: Scalar>(
    g: &WeightedDigraph<S>,
    t_x: &RootedTree,
    t_y: &RootedTree,
) -> Result<SurgeryOutcome, TreeError> {
    let x = t_x.root();
    let y = t_y.root();
    if x == y {
        return Err(TreeError::SameRoot(x.0));
    }
    if !t_y.is_valid_for(g) {
        return Err(TreeError::InvalidTree);
    }
    let mut doubly = DoublyRootedTree::from_tree(g, t_x, y)?;
    let mut moving = t_y.clone();
    let mut steps = Vec::new();
    // The path x ⇝ branch in the moving tree strictly shortens each step, so
    // at most n - 1 swaps happen.
    for _ in 0..g.vertex_count() {
        let (d, m, record) = swap_step(g, &doubly, &moving)?;
        doubly = d;
        moving = m;
        steps.push(record);
        if doubly.branch() == x {
            return Ok(SurgeryOutcome {
                tree_x: moving,
                tree_y: doubly.into_rooted(g)?,
                steps,
            });
        }
    }
    Err(TreeError::NotASwapConfiguration(
        "surgery failed to terminate".into(),
    ))
}

/// Executable lemma: when both inputs satisfy `c` (which must not mention
/// any pinned pair), both surgery outputs satisfy `c` as well. Pairs where
/// an input violates `c` certify vacuously.
pub fn surgery_respects_constraints<S: Scalar>(
    g: &WeightedDigraph<S>,
    t_x: &RootedTree,
    t_y: &RootedTree,
    c: &TreeConstraint,
    pinned: &[PairId],
) -> Result<bool, TreeError> {
    for &p in pinned {
        if c.mentions_pair(p) {
            return Err(TreeError::ConstraintMentionsPinned(p.0));
        }
    }
    if !(c.allows(t_x) && c.allows(t_y)) {
        return Ok(true);
    }
    let (out_x, out_y) = surgery(g, t_x, t_y)?;
    Ok(c.allows(&out_x) && c.allows(&out_y))
}
