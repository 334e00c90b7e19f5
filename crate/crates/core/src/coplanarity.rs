//! Annihilating vectors for pinned-pair decompositions and rank analysis
//! of the resulting tree vectors.
//!
//! For one pinned reversible pair, every root's three-slot tree vector lies
//! on a common plane through the origin; the plane's normal is built from
//! tree polynomials of the contracted graph and of the graph with the pair
//! deleted.  For two pinned pairs, six such normals embed into the
//! nine-slot status space and pin the span of the tree vectors down to
//! (generically) three dimensions.  This module constructs those normals,
//! verifies the annihilation identities, and measures ranks exactly or in
//! floating point.

use thiserror::Error;

use crate::graph::{GraphError, OrientedEdge, PairId, VertexId, WeightedDigraph};
use crate::linalg::Matrix;
use crate::poly::{
    contracted_root_poly, decompose_with, statuses, tree_poly, Backend, EdgeStatus, PinnedSet,
    PolyError, TreeVector,
};
use crate::scalar::{Scalar, FLOAT_REL_TOL};
use crate::trees::{TreeConstraint, TreeError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoplanarityError {
    #[error("side constraint mentions pinned pair #{pair}")]
    ConstraintMentionsPinned { pair: usize },
    #[error("pair #{pair} is a bridge: removing it disconnects the graph")]
    BridgePinned { pair: usize },
    #[error("removing the pinned pairs disconnects the graph")]
    DisconnectedWithoutPins,
    #[error("column {column} of the two-pair matrix has a zero leading entry and cannot be rescaled")]
    DegenerateSigma { column: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// The annihilating vector of a single pinned pair, possibly sharpened by
/// an extra side constraint on the other pairs.
///
/// Writing `+1` and `-1` for the pair's orientations,
/// `s(+1)`/`s(-1)` for their sources and `tau*` for the contracted graph's
/// tree polynomial at the merged vertex:
///
/// * `sigma_empty = -r(+1) r(-1) tau*`            (never positive),
/// * `sigma_plus  =  r(+1) tau(s(+1); both orientations avoided)`,
/// * `sigma_minus =  r(-1) tau(s(-1); both orientations avoided)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaVector<S> {
    pub pinned_pair: PairId,
    pub extra: TreeConstraint,
    pub sigma_empty: S,
    pub sigma_plus: S,
    pub sigma_minus: S,
}

impl<S: Scalar> SigmaVector<S> {
    /// Entries aligned with the three-slot tree vector
    /// `(pair absent, forward required, backward required)`.
    ///
    /// The forward slot pairs with `sigma_minus` and the backward slot with
    /// `sigma_plus`: requiring one orientation couples to the tree count
    /// rooted at the *opposite* orientation's source.  With the
    /// straight pairing the dot products simply do not vanish.
    pub fn slot_entries(&self) -> [S; 3] {
        [
            self.sigma_empty.clone(),
            self.sigma_minus.clone(),
            self.sigma_plus.clone(),
        ]
    }

    /// Dot product against a one-pair tree vector.
    pub fn dot(&self, tv: &TreeVector<S>) -> S {
        assert_eq!(tv.dim(), 3, "sigma vectors pair with one-pair decompositions");
        let slots = self.slot_entries();
        let mut sum = S::zero();
        for (a, b) in slots.iter().zip(&tv.values) {
            sum = sum + a.clone() * b.clone();
        }
        sum
    }

    /// Scale of the dot product, for float-mode zero tests.
    pub fn dot_scale(&self, tv: &TreeVector<S>) -> S {
        let slots = self.slot_entries();
        let mut sum = S::zero();
        for (a, b) in slots.iter().zip(&tv.values) {
            sum = sum + (a.clone() * b.clone()).abs();
        }
        sum
    }

    /// Sign structure: the empty slot is never positive, the others never
    /// negative.
    pub fn signs_ok(&self) -> bool {
        !self.sigma_empty.is_positive()
            && !self.sigma_plus.is_negative()
            && !self.sigma_minus.is_negative()
    }
}

/// Build the annihilating vector of `pair` under a side constraint.
pub fn sigma_vector<S: Scalar>(
    g: &WeightedDigraph<S>,
    pair: PairId,
    extra: &TreeConstraint,
    backend: Backend,
) -> Result<SigmaVector<S>, CoplanarityError> {
    if extra.mentions_pair(pair) {
        return Err(CoplanarityError::ConstraintMentionsPinned { pair: pair.0 });
    }
    let plus = OrientedEdge::forward(pair);
    let minus = OrientedEdge::backward(pair);
    let deleted = TreeConstraint::avoiding([plus, minus]).merged(extra)?;
    let r_plus = g.rate(plus).clone();
    let r_minus = g.rate(minus).clone();
    let sigma_plus = r_plus.clone() * tree_poly(g, g.source(plus), &deleted, backend);
    let sigma_minus = r_minus.clone() * tree_poly(g, g.source(minus), &deleted, backend);
    let contracted = contracted_root_poly(g, pair, extra, backend)?;
    let sigma_empty = S::zero() - r_plus * r_minus * contracted;
    Ok(SigmaVector {
        pinned_pair: pair,
        extra: extra.clone(),
        sigma_empty,
        sigma_plus,
        sigma_minus,
    })
}

/// Per-root verification of the second-order splitting identity: the
/// contracted-times-deleted product must equal the cross-paired sum of
/// conditioned polynomials.
#[derive(Debug, Clone)]
pub struct SecondOrderCheck<S> {
    pub sigma: SigmaVector<S>,
    /// `r(+1) r(-1) tau* . tau(x; pair deleted)` per root, in vertex order.
    pub lhs: Vec<S>,
    /// `sigma_plus . tau(x; backward required) + sigma_minus . tau(x;
    /// forward required)` per root.
    pub rhs: Vec<S>,
    /// `lhs - rhs` per root; exact arithmetic demands all zeros.
    pub residuals: Vec<S>,
}

impl<S: Scalar> SecondOrderCheck<S> {
    pub fn all_zero(&self) -> bool {
        self.residuals.iter().all(|r| r.is_zero())
    }
}

/// Evaluate the second-order identity for every root.
pub fn check_second_order<S: Scalar>(
    g: &WeightedDigraph<S>,
    pair: PairId,
    backend: Backend,
) -> Result<SecondOrderCheck<S>, CoplanarityError> {
    ensure_not_bridge(g, pair)?;
    let sigma = sigma_vector(g, pair, &TreeConstraint::none(), backend)?;
    let pinned = PinnedSet::new(g, vec![pair])?;
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    let mut residuals = Vec::new();
    for root in g.vertices() {
        let tv = decompose_with(g, root, &pinned, &TreeConstraint::none(), backend)?;
        let l = (S::zero() - sigma.sigma_empty.clone()) * tv.values[0].clone();
        let r = sigma.sigma_minus.clone() * tv.values[1].clone()
            + sigma.sigma_plus.clone() * tv.values[2].clone();
        residuals.push(l.clone() - r.clone());
        lhs.push(l);
        rhs.push(r);
    }
    Ok(SecondOrderCheck {
        sigma,
        lhs,
        rhs,
        residuals,
    })
}

fn ensure_not_bridge<S: Scalar>(
    g: &WeightedDigraph<S>,
    pair: PairId,
) -> Result<(), CoplanarityError> {
    if !g.stays_connected_without(&[pair])? {
        return Err(CoplanarityError::BridgePinned { pair: pair.0 });
    }
    Ok(())
}

/// How the rank of a tree-vector family was measured.
#[derive(Debug, Clone, PartialEq)]
pub enum ArithmeticMode {
    /// Fraction-free elimination over the rationals; tolerance-free.
    Exact,
    /// Singular-value thresholding at the stated relative tolerance; the
    /// full spectrum is retained for inspection.
    Float {
        tolerance: f64,
        singular_values: Vec<f64>,
    },
}

impl ArithmeticMode {
    pub fn name(&self) -> &'static str {
        match self {
            ArithmeticMode::Exact => "exact",
            ArithmeticMode::Float { .. } => "float",
        }
    }
}

/// Rank measurement for the family of tree vectors over all roots.
#[derive(Debug, Clone, PartialEq)]
pub struct RankCertificate {
    pub pinned: Vec<PairId>,
    pub vector_dim: usize,
    pub rank: usize,
    /// Roots whose vectors were chosen as pivot rows (exact mode only;
    /// deterministic, so certificates reproduce bit for bit).
    pub basis_roots: Vec<VertexId>,
    pub arithmetic: ArithmeticMode,
}

/// Compute every root's tree vector and measure the family's rank.
pub fn rank_certificate<S: Scalar>(
    g: &WeightedDigraph<S>,
    pinned: &PinnedSet,
    backend: Backend,
) -> Result<(RankCertificate, Vec<TreeVector<S>>), CoplanarityError> {
    let mut taus = Vec::with_capacity(g.vertex_count());
    for root in g.vertices() {
        taus.push(decompose_with(
            g,
            root,
            pinned,
            &TreeConstraint::none(),
            backend,
        )?);
    }
    let cert = certificate_from_rows(
        pinned.pairs().to_vec(),
        taus.iter().map(|tv| tv.values.clone()).collect(),
    );
    Ok((cert, taus))
}

/// Rank certificate for an explicit list of row vectors indexed by root.
pub fn certificate_from_rows<S: Scalar>(
    pinned: Vec<PairId>,
    rows: Vec<Vec<S>>,
) -> RankCertificate {
    let vector_dim = rows.first().map_or(0, Vec::len);
    let m = Matrix::from_rows(rows);
    if S::EXACT {
        let (rank, pivot_rows) = m.rank_exact();
        RankCertificate {
            pinned,
            vector_dim,
            rank,
            basis_roots: pivot_rows.into_iter().map(VertexId).collect(),
            arithmetic: ArithmeticMode::Exact,
        }
    } else {
        let (rank, singular_values) = m.rank_float(FLOAT_REL_TOL);
        RankCertificate {
            pinned,
            vector_dim,
            rank,
            basis_roots: Vec::new(),
            arithmetic: ArithmeticMode::Float {
                tolerance: FLOAT_REL_TOL,
                singular_values,
            },
        }
    }
}

/// Rank certificate plus annihilation residuals for one pinned pair.
#[derive(Debug, Clone)]
pub struct CoplanarityCheck<S> {
    pub certificate: RankCertificate,
    pub sigma: SigmaVector<S>,
    /// `sigma . tau(x)` per root, in vertex order.
    pub dots: Vec<S>,
    pub taus: Vec<TreeVector<S>>,
}

impl<S: Scalar> CoplanarityCheck<S> {
    pub fn all_orthogonal(&self) -> bool {
        if S::EXACT {
            self.dots.iter().all(|d| d.is_zero())
        } else {
            self.dots
                .iter()
                .zip(&self.taus)
                .all(|(d, tv)| within_float_zero(d, &self.sigma.dot_scale(tv)))
        }
    }
}

fn within_float_zero<S: Scalar>(value: &S, scale: &S) -> bool {
    let v = value.to_f64().abs();
    let s = scale.to_f64().abs();
    v <= FLOAT_REL_TOL * s.max(1e-300)
}

/// Verify that one pinned pair's tree vectors are coplanar and annihilated
/// by the pair's sigma vector.
pub fn check_coplanarity<S: Scalar>(
    g: &WeightedDigraph<S>,
    pair: PairId,
    backend: Backend,
) -> Result<CoplanarityCheck<S>, CoplanarityError> {
    ensure_not_bridge(g, pair)?;
    let pinned = PinnedSet::new(g, vec![pair])?;
    let (certificate, taus) = rank_certificate(g, &pinned, backend)?;
    let sigma = sigma_vector(g, pair, &TreeConstraint::none(), backend)?;
    let dots = taus.iter().map(|tv| sigma.dot(tv)).collect();
    Ok(CoplanarityCheck {
        certificate,
        sigma,
        dots,
        taus,
    })
}

/// One status condition imposed on a *non-pinned* pair when sharpening a
/// sigma vector: the pair is deleted, or required forward, or required
/// backward (avoiding the opposite orientation in the latter two cases).
fn condition_constraint(pair: PairId, status: EdgeStatus) -> TreeConstraint {
    let plus = OrientedEdge::forward(pair);
    let minus = OrientedEdge::backward(pair);
    match status {
        EdgeStatus::Absent => TreeConstraint::avoiding([plus, minus]),
        EdgeStatus::Forward => TreeConstraint::avoiding([minus])
            .merged(&TreeConstraint::requiring([plus]).expect("single edge"))
            .expect("disjoint"),
        EdgeStatus::Backward => TreeConstraint::avoiding([plus])
            .merged(&TreeConstraint::requiring([minus]).expect("single edge"))
            .expect("disjoint"),
    }
}

/// Embed a sharpened sigma vector into the `3^n`-dim status space of the
/// full pinned set: entries appear only at statuses whose non-pinned
/// coordinates match the sharpening, with the slot pairing of
/// [`SigmaVector::slot_entries`].
fn embed_sigma<S: Scalar>(
    pinned_len: usize,
    pin_index: usize,
    fixed: &[(usize, EdgeStatus)],
    sigma: &SigmaVector<S>,
) -> Vec<S> {
    let slots = sigma.slot_entries();
    statuses(pinned_len)
        .iter()
        .map(|status| {
            if fixed.iter().all(|&(j, s)| status[j] == s) {
                match status[pin_index] {
                    EdgeStatus::Absent => slots[0].clone(),
                    EdgeStatus::Forward => slots[1].clone(),
                    EdgeStatus::Backward => slots[2].clone(),
                }
            } else {
                S::zero()
            }
        })
        .collect()
}

/// The six embedded sigma vectors of a two-pair analysis, raw and rescaled.
#[derive(Debug, Clone)]
pub struct TwoEdgeSigmaMatrix<S> {
    /// 9 x 6; column order: sigma of pair 1 with pair 2 deleted, sigma of
    /// pair 2 with pair 1 deleted, then pair 1 sharpened backward, pair 2
    /// sharpened backward, pair 1 sharpened forward, pair 2 sharpened
    /// forward.
    pub columns: Matrix<S>,
    /// Each column divided by its topmost nonzero entry.
    pub rescaled: Matrix<S>,
    /// The twelve rescaled entries below the leading ones, row-major order
    /// of appearance, named `A..L`.
    pub letters: Vec<S>,
}

pub const LETTER_POSITIONS: [(usize, usize); 12] = [
    (1, 0), // A
    (2, 0), // B
    (3, 1), // C
    (4, 1), // D
    (5, 4), // E
    (5, 5), // F
    (6, 3), // G
    (6, 4), // H
    (7, 2), // I
    (7, 5), // J
    (8, 2), // K
    (8, 3), // L
];

impl<S: Scalar> TwoEdgeSigmaMatrix<S> {
    pub fn letter(&self, name: char) -> &S {
        let idx = (name as usize)
            .checked_sub('A' as usize)
            .filter(|&i| i < 12)
            .expect("letters are A..L");
        &self.letters[idx]
    }
}

/// Everything the two-pair analysis measures.
#[derive(Debug, Clone)]
pub struct TwoEdgeReport<S> {
    pub certificate: RankCertificate,
    pub taus: Vec<TreeVector<S>>,
    pub sigma_matrix: TwoEdgeSigmaMatrix<S>,
    /// Whether every embedded sigma column annihilates every root's vector.
    pub all_orthogonal: bool,
    /// The four obstruction expressions `EC-FA, HC-GB, ID-JA, KD-LB`; if all
    /// of them vanished, the six columns would admit a common null
    /// combination and the rank argument would collapse.
    pub consistency: Vec<(String, S)>,
    pub all_consistency_nonzero: bool,
    /// Determinant of the lower 3x3 block of the tree-vector matrix at the
    /// three distinguished roots (sources of forward pair 1, backward pair
    /// 1, forward pair 2); positive when those roots are distinct and the
    /// graph stays connected without the pins.
    pub lower_block_det: S,
    pub lower_block_roots: [VertexId; 3],
    pub lower_block_roots_distinct: bool,
    /// Rank of the six embedded sigma columns.  Six is the generic
    /// expectation under the incommensurable-rates assumption; it is
    /// reported, never asserted.
    pub sigma_rank: usize,
    pub sigma_rank_expected: usize,
    /// Size condition under which the generic rank argument is stated.
    pub meets_size_condition: bool,
    pub is_complete_reversible: bool,
}

/// Check whether every unordered vertex pair carries a reversible edge.
fn complete_reversible<S: Scalar>(g: &WeightedDigraph<S>) -> bool {
    let n = g.vertex_count();
    if g.pair_count() != n * (n - 1) / 2 {
        return false;
    }
    g.pair_ids().all(|p| g.pair_reversible(p))
}

/// Full two-pair analysis: nine-dim tree vectors, six embedded sigma
/// vectors, rescaled matrix with letters, obstruction expressions, and the
/// lower-block determinant.
pub fn two_edge_analysis<S: Scalar>(
    g: &WeightedDigraph<S>,
    pair1: PairId,
    pair2: PairId,
    backend: Backend,
) -> Result<TwoEdgeReport<S>, CoplanarityError> {
    let pinned = PinnedSet::new(g, vec![pair1, pair2])?;
    if !g.stays_connected_without(&[pair1, pair2])? {
        return Err(CoplanarityError::DisconnectedWithoutPins);
    }
    let (certificate, taus) = rank_certificate(g, &pinned, backend)?;

    // Column plan: (which pair is sharpened, the other pair, status imposed
    // on the other pair).
    let plan = [
        (pair1, pair2, EdgeStatus::Absent),
        (pair2, pair1, EdgeStatus::Absent),
        (pair1, pair2, EdgeStatus::Backward),
        (pair2, pair1, EdgeStatus::Backward),
        (pair1, pair2, EdgeStatus::Forward),
        (pair2, pair1, EdgeStatus::Forward),
    ];
    let mut columns: Matrix<S> = Matrix::zeros(9, 6);
    for (c, &(pin, other, status)) in plan.iter().enumerate() {
        let extra = condition_constraint(other, status);
        let sigma = sigma_vector(g, pin, &extra, backend)?;
        let pin_index = if pin == pair1 { 0 } else { 1 };
        let other_index = 1 - pin_index;
        let embedded = embed_sigma(2, pin_index, &[(other_index, status)], &sigma);
        for (r, v) in embedded.into_iter().enumerate() {
            columns.set(r, c, v);
        }
    }

    // Rescale each column by its topmost nonzero entry.
    let mut rescaled: Matrix<S> = Matrix::zeros(9, 6);
    for c in 0..6 {
        let lead_row = (0..9).find(|&r| !columns.get(r, c).is_zero());
        let lead_row = lead_row.ok_or(CoplanarityError::DegenerateSigma { column: c })?;
        let lead = columns.get(lead_row, c).clone();
        if lead.is_zero() {
            return Err(CoplanarityError::DegenerateSigma { column: c });
        }
        for r in 0..9 {
            rescaled.set(r, c, columns.get(r, c).clone() / lead.clone());
        }
    }
    let letters: Vec<S> = LETTER_POSITIONS
        .iter()
        .map(|&(r, c)| rescaled.get(r, c).clone())
        .collect();

    // Orthogonality of every column against every root's vector.
    let mut all_orthogonal = true;
    for tv in &taus {
        for c in 0..6 {
            let mut dot = S::zero();
            let mut scale = S::zero();
            for r in 0..9 {
                let term = columns.get(r, c).clone() * tv.values[r].clone();
                scale = scale + term.abs();
                dot = dot + term;
            }
            let ok = if S::EXACT {
                dot.is_zero()
            } else {
                within_float_zero(&dot, &scale)
            };
            all_orthogonal &= ok;
        }
    }

    // Obstructions to a common null vector of the rescaled matrix.
    let l = |name: char| letters[(name as usize) - ('A' as usize)].clone();
    let consistency = vec![
        ("EC-FA".to_string(), l('E') * l('C') - l('F') * l('A')),
        ("HC-GB".to_string(), l('H') * l('C') - l('G') * l('B')),
        ("ID-JA".to_string(), l('I') * l('D') - l('J') * l('A')),
        ("KD-LB".to_string(), l('K') * l('D') - l('L') * l('B')),
    ];
    let all_consistency_nonzero = consistency.iter().all(|(_, v)| !v.is_zero());

    // Lower 3x3 block of the tree-vector matrix at the distinguished roots.
    let roots = [
        g.source(OrientedEdge::forward(pair1)),
        g.source(OrientedEdge::backward(pair1)),
        g.source(OrientedEdge::forward(pair2)),
    ];
    let mut block: Matrix<S> = Matrix::zeros(3, 3);
    for (j, &root) in roots.iter().enumerate() {
        let tv = &taus[root.0];
        for i in 0..3 {
            block.set(i, j, tv.values[6 + i].clone());
        }
    }
    let lower_block_det = block.det();
    let roots_distinct = roots[0] != roots[1] && roots[0] != roots[2] && roots[1] != roots[2];

    let sigma_rows: Vec<Vec<S>> = (0..6)
        .map(|c| (0..9).map(|r| columns.get(r, c).clone()).collect())
        .collect();
    let sigma_rank = if S::EXACT {
        Matrix::from_rows(sigma_rows).rank_exact().0
    } else {
        Matrix::from_rows(sigma_rows).rank_float(FLOAT_REL_TOL).0
    };

    Ok(TwoEdgeReport {
        certificate,
        taus,
        sigma_matrix: TwoEdgeSigmaMatrix {
            columns,
            rescaled,
            letters,
        },
        all_orthogonal,
        consistency,
        all_consistency_nonzero,
        lower_block_det,
        lower_block_roots: roots,
        lower_block_roots_distinct: roots_distinct,
        sigma_rank,
        sigma_rank_expected: 6,
        meets_size_condition: g.vertex_count() >= 9,
        is_complete_reversible: complete_reversible(g),
    })
}

/// Report of the rank-(n+1) conjecture test for an n-pair pinned set.
#[derive(Debug, Clone)]
pub struct ConjectureReport {
    pub certificate: RankCertificate,
    pub expected_rank: usize,
    pub matches_expectation: bool,
    /// Distinct candidate annihilating vectors out of the n * 3^(n-1)
    /// construction scheme.
    pub candidate_count: usize,
    /// How many of them annihilate every root's vector.
    pub orthogonal_count: usize,
    /// Rank of the span of the orthogonal candidates.
    pub sigma_rank: usize,
    pub warnings: Vec<String>,
}

/// Measure the rank of the `3^n`-dim tree vectors and of the candidate
/// annihilator family.  Deviations from the expected rank `n+1` are
/// reported, never asserted: this is an open conjecture, and a
/// counterexample is a finding, not a failure.
pub fn conjecture_test<S: Scalar>(
    g: &WeightedDigraph<S>,
    pinned: &PinnedSet,
    backend: Backend,
) -> Result<ConjectureReport, CoplanarityError> {
    let n = pinned.len();
    if !g.stays_connected_without(pinned.pairs())? {
        return Err(CoplanarityError::DisconnectedWithoutPins);
    }
    let mut warnings = Vec::new();
    if g.vertex_count() < n + 2 {
        warnings.push(format!(
            "too few vertices: {} roots cannot span more than rank {}, so the expected rank {} is vacuous",
            g.vertex_count(),
            g.vertex_count(),
            n + 1,
        ));
    }
    let (certificate, taus) = rank_certificate(g, pinned, backend)?;

    // Candidate annihilators: sharpen each pinned pair by every status
    // assignment of the remaining pairs, then embed.
    let mut candidates: Vec<Vec<S>> = Vec::new();
    for (i, &pin) in pinned.pairs().iter().enumerate() {
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        for assignment in statuses(others.len()) {
            let fixed: Vec<(usize, EdgeStatus)> = others
                .iter()
                .copied()
                .zip(assignment.iter().copied())
                .collect();
            let mut extra = TreeConstraint::none();
            for &(j, s) in &fixed {
                extra = extra.merged(&condition_constraint(pinned.pairs()[j], s))?;
            }
            let sigma = sigma_vector(g, pin, &extra, backend)?;
            let embedded = embed_sigma(n, i, &fixed, &sigma);
            if !candidates.contains(&embedded) {
                candidates.push(embedded);
            }
        }
    }
    let candidate_count = candidates.len();

    let mut orthogonal: Vec<Vec<S>> = Vec::new();
    for cand in &candidates {
        let mut ok = true;
        for tv in &taus {
            let mut dot = S::zero();
            let mut scale = S::zero();
            for (a, b) in cand.iter().zip(&tv.values) {
                let term = a.clone() * b.clone();
                scale = scale + term.abs();
                dot = dot + term;
            }
            let zero = if S::EXACT {
                dot.is_zero()
            } else {
                within_float_zero(&dot, &scale)
            };
            if !zero {
                ok = false;
                break;
            }
        }
        if ok {
            orthogonal.push(cand.clone());
        }
    }
    let orthogonal_count = orthogonal.len();
    let sigma_rank = if orthogonal.is_empty() {
        0
    } else if S::EXACT {
        Matrix::from_rows(orthogonal).rank_exact().0
    } else {
        Matrix::from_rows(orthogonal).rank_float(FLOAT_REL_TOL).0
    };

    let expected_rank = n + 1;
    Ok(ConjectureReport {
        matches_expectation: certificate.rank == expected_rank,
        certificate,
        expected_rank,
        candidate_count,
        orthogonal_count,
        sigma_rank,
        warnings,
    })
}
