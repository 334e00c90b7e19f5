//! Stationary distributions, stationary currents, and the affine laws that
//! tie every current to one or two chosen input currents.
//!
//! The stationary probability of a vertex is proportional to its rooted
//! tree polynomial.  Decomposing each polynomial over a pinned input pair
//! turns every current into a ratio of two functions that are affine in
//! the input pair's rates; the coplanarity of the resulting coefficient
//! vectors is what makes every current an affine function of the input
//! current itself, with coefficients that do not depend on the input rates.

use thiserror::Error;

use crate::coplanarity::{
    certificate_from_rows, sigma_vector, CoplanarityError, RankCertificate,
};
use crate::graph::{GraphError, OrientedEdge, PairId, VertexId, WeightedDigraph};
use crate::linalg::Matrix;
use crate::poly::{decompose_with, tree_poly, Backend, EdgeStatus, PinnedSet, PolyError};
use crate::scalar::{Scalar, FLOAT_REL_TOL};
use crate::trees::{TreeConstraint, TreeError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarkovError {
    #[error("pair #{pair} is a bridge: removing it disconnects the graph")]
    BridgePinned { pair: usize },
    #[error("{context}: rank {rank}, needed {needed}")]
    RankDeficient {
        context: String,
        rank: usize,
        needed: usize,
        certificate: RankCertificate,
    },
    #[error("generator kernel is not one-dimensional")]
    KernelFailed,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Coplanarity(#[from] CoplanarityError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Stationary distribution, stored together with the per-root tree weights
/// it was normalized from.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution<S> {
    pub probabilities: Vec<S>,
    pub tree_weights: Vec<S>,
    pub total_weight: S,
}

impl<S: Scalar> StationaryDistribution<S> {
    pub fn probability(&self, v: VertexId) -> &S {
        &self.probabilities[v.0]
    }
}

/// Stationary distribution via rooted tree polynomials:
/// `p(x) = tau(x) / sum_y tau(y)`.
pub fn stationary<S: Scalar>(g: &WeightedDigraph<S>, backend: Backend) -> StationaryDistribution<S> {
    let tree_weights: Vec<S> = g
        .vertices()
        .map(|x| tree_poly(g, x, &TreeConstraint::none(), backend))
        .collect();
    let mut total_weight = S::zero();
    for w in &tree_weights {
        total_weight = total_weight + w.clone();
    }
    let probabilities = tree_weights
        .iter()
        .map(|w| w.clone() / total_weight.clone())
        .collect();
    StationaryDistribution {
        probabilities,
        tree_weights,
        total_weight,
    }
}

/// Stationary distribution as the normalized kernel of the transposed rate
/// matrix — an algorithm independent of tree polynomials, used to
/// cross-check [`stationary`].  Intended for exact arithmetic.
pub fn stationary_kernel<S: Scalar>(g: &WeightedDigraph<S>) -> Result<Vec<S>, MarkovError> {
    let n = g.vertex_count();
    // m[y][x] = rate(x -> y) for x != y; m[x][x] = -sum of rates out of x.
    let mut m: Matrix<S> = Matrix::zeros(n, n);
    for v in g.vertices() {
        for &e in g.out_edges(v) {
            let x = g.source(e).0;
            let y = g.target(e).0;
            let rate = g.rate(e).clone();
            m.set(y, x, m.get(y, x).clone() + rate.clone());
            m.set(x, x, m.get(x, x).clone() - rate);
        }
    }
    let kernel = m.kernel_vector_exact().ok_or(MarkovError::KernelFailed)?;
    let mut sum = S::zero();
    for k in &kernel {
        sum = sum + k.clone();
    }
    if sum.is_zero() {
        return Err(MarkovError::KernelFailed);
    }
    Ok(kernel.into_iter().map(|k| k / sum.clone()).collect())
}

/// Stationary currents, one per pair, oriented along each pair's forward
/// direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Currents<S> {
    pub distribution: StationaryDistribution<S>,
    /// `j(e) = r(+e) p(s(+e)) - r(-e) p(s(-e))`, indexed by pair.
    pub per_pair: Vec<S>,
}

impl<S: Scalar> Currents<S> {
    pub fn current(&self, p: PairId) -> &S {
        &self.per_pair[p.0]
    }
}

/// Stationary currents of every pair.
pub fn currents<S: Scalar>(g: &WeightedDigraph<S>, backend: Backend) -> Currents<S> {
    let distribution = stationary(g, backend);
    let per_pair = g
        .pair_ids()
        .map(|p| {
            let plus = OrientedEdge::forward(p);
            let minus = OrientedEdge::backward(p);
            g.rate(plus).clone() * distribution.probability(g.source(plus)).clone()
                - g.rate(minus).clone() * distribution.probability(g.source(minus)).clone()
        })
        .collect();
    Currents {
        distribution,
        per_pair,
    }
}

/// Net stationary flow into each vertex; all entries vanish at
/// stationarity.
pub fn vertex_balance<S: Scalar>(g: &WeightedDigraph<S>, currents: &Currents<S>) -> Vec<S> {
    let mut net = vec![S::zero(); g.vertex_count()];
    for p in g.pair_ids() {
        let pair = g.pair(p);
        let j = currents.per_pair[p.0].clone();
        net[pair.v.0] = net[pair.v.0].clone() + j.clone();
        net[pair.u.0] = net[pair.u.0].clone() - j;
    }
    net
}

/// The three-slot coefficient vectors expressing every current's
/// dependence on the input pair's rates.
///
/// Writing `a = r(+1)`, `b = r(-1)` for the input pair's rates, every
/// stationary current is the ratio of two affine functions:
///
/// `j(e)(a, b) = (z_e[0] + z_e[1] a + z_e[2] b) / (z_0[0] + z_0[1] a + z_0[2] b)`.
///
/// The slots hold, per root-source difference: the pair-deleted polynomial,
/// and the two *rescaled* one-orientation-required polynomials.  The input
/// pair's own vector is the special case `(0, t(s(+1)), -t(s(-1)))` with
/// `t` the pair-deleted polynomial; the general formula does not reduce to
/// it because the input rates are the variables here.
#[derive(Debug, Clone, PartialEq)]
pub struct ZVectors<S> {
    pub input_pair: PairId,
    pub z0: [S; 3],
    pub per_pair: Vec<[S; 3]>,
}

impl<S: Scalar> ZVectors<S> {
    pub fn numerator_at(&self, e: PairId, a: &S, b: &S) -> S {
        let z = &self.per_pair[e.0];
        z[0].clone() + z[1].clone() * a.clone() + z[2].clone() * b.clone()
    }

    pub fn denominator_at(&self, a: &S, b: &S) -> S {
        self.z0[0].clone() + self.z0[1].clone() * a.clone() + self.z0[2].clone() * b.clone()
    }

    /// The current of pair `e` when the input pair's rates are `(a, b)`.
    pub fn current_at(&self, e: PairId, a: &S, b: &S) -> S {
        self.numerator_at(e, a, b) / self.denominator_at(a, b)
    }
}

/// Build the z-family for one reversible, non-bridge input pair.
pub fn z_vectors<S: Scalar>(
    g: &WeightedDigraph<S>,
    input: PairId,
    backend: Backend,
) -> Result<ZVectors<S>, MarkovError> {
    let pinned = PinnedSet::new(g, vec![input])?;
    if !g.stays_connected_without(&[input])? {
        return Err(MarkovError::BridgePinned { pair: input.0 });
    }
    let plus = OrientedEdge::forward(input);
    let minus = OrientedEdge::backward(input);
    let r_plus = g.rate(plus).clone();
    let r_minus = g.rate(minus).clone();

    let n = g.vertex_count();
    let mut t_abs = Vec::with_capacity(n);
    let mut t_plus = Vec::with_capacity(n);
    let mut t_minus = Vec::with_capacity(n);
    for root in g.vertices() {
        let tv = decompose_with(g, root, &pinned, &TreeConstraint::none(), backend)?;
        t_abs.push(tv.values[0].clone());
        t_plus.push(tv.values[1].clone() / r_plus.clone());
        t_minus.push(tv.values[2].clone() / r_minus.clone());
    }
    let sum = |v: &[S]| {
        let mut s = S::zero();
        for x in v {
            s = s + x.clone();
        }
        s
    };
    let z0 = [sum(&t_abs), sum(&t_plus), sum(&t_minus)];

    let per_pair = g
        .pair_ids()
        .map(|e| {
            if e == input {
                return [
                    S::zero(),
                    t_abs[g.source(plus).0].clone(),
                    S::zero() - t_abs[g.source(minus).0].clone(),
                ];
            }
            let ep = OrientedEdge::forward(e);
            let em = OrientedEdge::backward(e);
            let rp = g.rate(ep).clone();
            let rm = g.rate(em).clone();
            let su = g.source(ep).0;
            let sv = g.source(em).0;
            [
                rp.clone() * t_abs[su].clone() - rm.clone() * t_abs[sv].clone(),
                rp.clone() * t_plus[su].clone() - rm.clone() * t_plus[sv].clone(),
                rp * t_minus[su].clone() - rm * t_minus[sv].clone(),
            ]
        })
        .collect();

    Ok(ZVectors {
        input_pair: input,
        z0,
        per_pair,
    })
}

/// Affine coefficients tying every current to the input current:
/// `j(e) = lambda0(e) + lambda1(e) j(input)` for all rates of the input
/// pair.
#[derive(Debug, Clone)]
pub struct LambdaCoefficients<S> {
    pub input_pair: PairId,
    /// `(lambda0, lambda1)` indexed by pair.
    pub per_pair: Vec<(S, S)>,
    pub z: ZVectors<S>,
    /// `det(z_0, z_input, z_e)` per pair; zero is the coplanarity that
    /// makes the overdetermined 3-equation system solvable.
    pub coplanarity_dets: Vec<S>,
    /// A common annihilator of all z-vectors, certifying those
    /// determinants: the pair's sigma vector with its required-orientation
    /// slots scaled by the input rates.
    pub sigma_z: [S; 3],
}

/// Solve for the lambda coefficients via the first two slots of the
/// z-vectors (the only choice that uses the vanishing slot of the input
/// pair's own vector).
pub fn lambda_coefficients<S: Scalar>(
    g: &WeightedDigraph<S>,
    input: PairId,
    backend: Backend,
) -> Result<LambdaCoefficients<S>, MarkovError> {
    let z = z_vectors(g, input, backend)?;
    let z0e = z.z0[0].clone();
    let z0p = z.z0[1].clone();
    let z1p = z.per_pair[input.0][1].clone();
    if z0e.is_zero() || z1p.is_zero() {
        let cert = certificate_from_rows(
            vec![input],
            vec![z.z0.to_vec(), z.per_pair[input.0].to_vec()],
        );
        return Err(MarkovError::RankDeficient {
            context: "z-vector upper block".into(),
            rank: cert.rank,
            needed: 2,
            certificate: cert,
        });
    }
    let per_pair: Vec<(S, S)> = z
        .per_pair
        .iter()
        .map(|ze| {
            let l0 = ze[0].clone() / z0e.clone();
            let l1 = (z0e.clone() * ze[1].clone() - z0p.clone() * ze[0].clone())
                / (z0e.clone() * z1p.clone());
            (l0, l1)
        })
        .collect();

    let coplanarity_dets = z
        .per_pair
        .iter()
        .map(|ze| {
            Matrix::from_rows(vec![
                z.z0.to_vec(),
                z.per_pair[input.0].to_vec(),
                ze.to_vec(),
            ])
            .det()
        })
        .collect();

    let sigma = sigma_vector(g, input, &TreeConstraint::none(), backend)?;
    let plus = OrientedEdge::forward(input);
    let minus = OrientedEdge::backward(input);
    let sigma_z = [
        sigma.sigma_empty.clone(),
        g.rate(plus).clone() * sigma.sigma_minus.clone(),
        g.rate(minus).clone() * sigma.sigma_plus.clone(),
    ];

    Ok(LambdaCoefficients {
        input_pair: input,
        per_pair,
        z,
        coplanarity_dets,
        sigma_z,
    })
}

/// Residuals of an affine-law verification across rate samples.
#[derive(Debug, Clone)]
pub struct ResidualReport<S> {
    /// `residuals[sample][pair]`.
    pub residuals: Vec<Vec<S>>,
    pub max_abs: f64,
    pub mean_abs: f64,
}

impl<S: Scalar> ResidualReport<S> {
    fn from_rows(residuals: Vec<Vec<S>>) -> Self {
        let mut max_abs = 0f64;
        let mut sum = 0f64;
        let mut count = 0usize;
        for row in &residuals {
            for r in row {
                let a = r.to_f64().abs();
                max_abs = max_abs.max(a);
                sum += a;
                count += 1;
            }
        }
        ResidualReport {
            residuals,
            max_abs,
            mean_abs: if count == 0 { 0.0 } else { sum / count as f64 },
        }
    }

    pub fn all_zero_exact(&self) -> bool {
        self.residuals
            .iter()
            .all(|row| row.iter().all(|r| r.is_zero()))
    }

    pub fn within_float_tolerance(&self, scale: f64) -> bool {
        self.max_abs <= FLOAT_REL_TOL * scale.abs().max(1e-300)
    }
}

/// Recompute stationary currents from scratch at each sampled input-rate
/// pair and report `j(e) - lambda0(e) - lambda1(e) j(input)`.
pub fn verify_linearity<S: Scalar>(
    g: &WeightedDigraph<S>,
    input: PairId,
    samples: &[(S, S)],
    backend: Backend,
) -> Result<(LambdaCoefficients<S>, ResidualReport<S>), MarkovError> {
    let lambda = lambda_coefficients(g, input, backend)?;
    let mut rows = Vec::with_capacity(samples.len());
    for (a, b) in samples {
        let resampled = g.with_pair_rates(input, a.clone(), b.clone())?;
        let cur = currents(&resampled, backend);
        let j_in = cur.per_pair[input.0].clone();
        let row = g
            .pair_ids()
            .map(|e| {
                let (l0, l1) = lambda.per_pair[e.0].clone();
                cur.per_pair[e.0].clone() - l0 - l1 * j_in.clone()
            })
            .collect();
        rows.push(row);
    }
    Ok((lambda, ResidualReport::from_rows(rows)))
}

/// Currents of the graph with the input pair removed, aligned against the
/// lambda0 coefficients: at a stalled input pair the affine law reduces to
/// its constant part.
pub fn lambda_zero_check<S: Scalar>(
    g: &WeightedDigraph<S>,
    lambda: &LambdaCoefficients<S>,
    backend: Backend,
) -> Result<Vec<S>, MarkovError> {
    let (stripped, kept) = g.without_pairs(&[lambda.input_pair])?;
    let cur = currents(&stripped, backend);
    Ok(kept
        .iter()
        .enumerate()
        .map(|(new_idx, &old)| {
            cur.per_pair[new_idx].clone() - lambda.per_pair[old.0].0.clone()
        })
        .collect())
}

/// Detailed balance via the cycle criterion: a spanning tree fixes the
/// unique candidate equilibrium weights, and every remaining pair closes a
/// fundamental cycle whose balance is then checked.  Any one-directional
/// pair rules detailed balance out immediately.
pub fn is_detailed_balanced<S: Scalar>(g: &WeightedDigraph<S>) -> bool {
    if !g.pair_ids().all(|p| g.pair_reversible(p)) {
        return false;
    }
    let n = g.vertex_count();
    let mut weight: Vec<Option<S>> = vec![None; n];
    weight[0] = Some(S::one());
    let mut queue = std::collections::VecDeque::from([VertexId(0)]);
    while let Some(u) = queue.pop_front() {
        let wu = weight[u.0].clone().expect("visited");
        for &e in g.out_edges(u) {
            let v = g.target(e);
            if weight[v.0].is_none() {
                // Balance across e: w(u) r(u->v) = w(v) r(v->u).
                let forward = g.rate(e).clone();
                let backward = g.rate(e.reversed()).clone();
                weight[v.0] = Some(wu.clone() * forward / backward);
                queue.push_back(v);
            }
        }
    }
    if weight.iter().any(Option::is_none) {
        return false;
    }
    g.pair_ids().all(|p| {
        let plus = OrientedEdge::forward(p);
        let u = g.source(plus).0;
        let v = g.target(plus).0;
        let lhs = weight[u].clone().unwrap() * g.rate(plus).clone();
        let rhs = weight[v].clone().unwrap() * g.rate(plus.reversed()).clone();
        lhs == rhs
    })
}

/// Three-coefficient affine law for two input pairs:
/// `j(e) = mu0(e) + mu1(e) j(input1) + mu2(e) j(input2)`.
#[derive(Debug, Clone)]
pub struct MuCoefficients<S> {
    pub input_pairs: (PairId, PairId),
    /// `(mu0, mu1, mu2)` indexed by pair.
    pub per_pair: Vec<[S; 3]>,
    /// Which three of the nine status rows were inverted for each pair's
    /// solve (the first full-rank triple in lexicographic row order).
    pub chosen_rows: Vec<[usize; 3]>,
    /// Rank certificate of the base coefficient matrix `(w_0, w_1, w_2)`.
    pub base_certificate: RankCertificate,
}

/// Solve the two-input affine law through the nine-slot decomposition.
///
/// The base vectors are `w_0 = sum of all roots' tree vectors` and, per
/// non-input pair, `w_e = r(+e) tau(s(+e)) - r(-e) tau(s(-e))` (actual
/// rates, no rescaling).  The input pairs themselves take the same special
/// form as the single-input z-vector, sector by sector of the other pair's
/// status: multiplying a slot that already requires an input edge by that
/// edge's rate would create quadratic terms, and those cancel (a root has
/// no out-edge; opposite-orientation terms cancel under the doubly-rooted
/// bijection), leaving only contributions promoted from the pair-absent
/// slots.  Solvability for every output pair is exactly the statement that
/// the tree vectors span three dimensions; failure produces a certificate,
/// not a panic.
pub fn mu_coefficients<S: Scalar>(
    g: &WeightedDigraph<S>,
    input1: PairId,
    input2: PairId,
    backend: Backend,
) -> Result<MuCoefficients<S>, MarkovError> {
    let pinned = PinnedSet::new(g, vec![input1, input2])?;
    if !g.stays_connected_without(&[input1, input2])? {
        return Err(MarkovError::Coplanarity(
            CoplanarityError::DisconnectedWithoutPins,
        ));
    }
    let dim = 9usize;
    let mut taus = Vec::with_capacity(g.vertex_count());
    let mut statuses = Vec::new();
    for root in g.vertices() {
        let tv = decompose_with(g, root, &pinned, &TreeConstraint::none(), backend)?;
        if statuses.is_empty() {
            statuses = tv.statuses.clone();
        }
        taus.push(tv.values);
    }
    let status_index = |pattern: &[EdgeStatus]| -> usize {
        statuses
            .iter()
            .position(|s| s == pattern)
            .expect("status present in the canonical layout")
    };
    let mut w0 = vec![S::zero(); dim];
    for tv in &taus {
        for (acc, v) in w0.iter_mut().zip(tv) {
            *acc = acc.clone() + v.clone();
        }
    }
    let w_general = |e: PairId| -> Vec<S> {
        let plus = OrientedEdge::forward(e);
        let minus = OrientedEdge::backward(e);
        let rp = g.rate(plus).clone();
        let rm = g.rate(minus).clone();
        let su = g.source(plus).0;
        let sv = g.source(minus).0;
        (0..dim)
            .map(|i| rp.clone() * taus[su][i].clone() - rm.clone() * taus[sv][i].clone())
            .collect()
    };
    // slot = which status component tracks this input pair (0 or 1).
    let w_input = |slot: usize, pair: PairId| -> Vec<S> {
        let plus = OrientedEdge::forward(pair);
        let minus = OrientedEdge::backward(pair);
        let rp = g.rate(plus).clone();
        let rm = g.rate(minus).clone();
        let su = g.source(plus).0;
        let sv = g.source(minus).0;
        (0..dim)
            .map(|i| {
                let mut base = statuses[i].clone();
                match std::mem::replace(&mut base[slot], EdgeStatus::Absent) {
                    EdgeStatus::Absent => S::zero(),
                    EdgeStatus::Forward => rp.clone() * taus[su][status_index(&base)].clone(),
                    EdgeStatus::Backward => {
                        S::zero() - rm.clone() * taus[sv][status_index(&base)].clone()
                    }
                }
            })
            .collect()
    };
    let w1 = w_input(0, input1);
    let w2 = w_input(1, input2);

    let base_rows: Vec<Vec<S>> = vec![w0.clone(), w1.clone(), w2.clone()];
    let base_certificate = certificate_from_rows(vec![input1, input2], base_rows);
    if base_certificate.rank < 3 {
        return Err(MarkovError::RankDeficient {
            context: "base coefficient vectors (w_0, w_1, w_2)".into(),
            rank: base_certificate.rank,
            needed: 3,
            certificate: base_certificate,
        });
    }

    let mut per_pair = Vec::with_capacity(g.pair_count());
    let mut chosen_rows = Vec::with_capacity(g.pair_count());
    for e in g.pair_ids() {
        let we = if e == input1 {
            w1.clone()
        } else if e == input2 {
            w2.clone()
        } else {
            w_general(e)
        };
        let mut solved: Option<([S; 3], [usize; 3])> = None;
        'scan: for i in 0..dim {
            for j in (i + 1)..dim {
                for k in (j + 1)..dim {
                    let m = Matrix::from_rows(vec![
                        vec![w0[i].clone(), w1[i].clone(), w2[i].clone()],
                        vec![w0[j].clone(), w1[j].clone(), w2[j].clone()],
                        vec![w0[k].clone(), w1[k].clone(), w2[k].clone()],
                    ]);
                    let det = m.det();
                    if det.is_zero() {
                        continue;
                    }
                    // Cramer's rule on the selected rows.
                    let rhs = [we[i].clone(), we[j].clone(), we[k].clone()];
                    let mut mu = [S::zero(), S::zero(), S::zero()];
                    for col in 0..3 {
                        let mut mc = m.clone();
                        for (r, value) in rhs.iter().enumerate() {
                            mc.set(r, col, value.clone());
                        }
                        mu[col] = mc.det() / det.clone();
                    }
                    solved = Some((mu, [i, j, k]));
                    break 'scan;
                }
            }
        }
        let (mu, rows) = solved.expect("rank-3 base matrix has a full-rank row triple");

        // The solve used three rows; the law must hold on all nine.  A
        // violation would mean the augmented matrix has rank four.
        for r in 0..dim {
            let residual = we[r].clone()
                - mu[0].clone() * w0[r].clone()
                - mu[1].clone() * w1[r].clone()
                - mu[2].clone() * w2[r].clone();
            let ok = if S::EXACT {
                residual.is_zero()
            } else {
                let scale = we[r].to_f64().abs().max(w0[r].to_f64().abs()).max(1.0);
                residual.to_f64().abs() <= FLOAT_REL_TOL * scale
            };
            if !ok {
                let cert = certificate_from_rows(
                    vec![input1, input2],
                    vec![w0.clone(), w1.clone(), w2.clone(), we.clone()],
                );
                return Err(MarkovError::RankDeficient {
                    context: format!("augmented system for pair #{}", e.0),
                    rank: cert.rank,
                    needed: 3,
                    certificate: cert,
                });
            }
        }
        per_pair.push(mu);
        chosen_rows.push(rows);
    }

    Ok(MuCoefficients {
        input_pairs: (input1, input2),
        per_pair,
        chosen_rows,
        base_certificate,
    })
}

/// Recompute stationary currents from scratch at sampled rates for both
/// input pairs and report `j(e) - mu0(e) - mu1(e) j(1) - mu2(e) j(2)`.
pub fn verify_mu_linearity<S: Scalar>(
    g: &WeightedDigraph<S>,
    input1: PairId,
    input2: PairId,
    samples: &[[S; 4]],
    backend: Backend,
) -> Result<(MuCoefficients<S>, ResidualReport<S>), MarkovError> {
    let mu = mu_coefficients(g, input1, input2, backend)?;
    let mut rows = Vec::with_capacity(samples.len());
    for sample in samples {
        let resampled = g
            .with_pair_rates(input1, sample[0].clone(), sample[1].clone())?
            .with_pair_rates(input2, sample[2].clone(), sample[3].clone())?;
        let cur = currents(&resampled, backend);
        let j1 = cur.per_pair[input1.0].clone();
        let j2 = cur.per_pair[input2.0].clone();
        let row = g
            .pair_ids()
            .map(|e| {
                let m = &mu.per_pair[e.0];
                cur.per_pair[e.0].clone()
                    - m[0].clone()
                    - m[1].clone() * j1.clone()
                    - m[2].clone() * j2.clone()
            })
            .collect();
        rows.push(row);
    }
    Ok((mu, ResidualReport::from_rows(rows)))
}

/// Check that neither the numerator nor the denominator of any current's
/// rational expression in the input pair's rates contains a cross term
/// `r(+1) r(-1)`: mixed second differences vanish identically.
pub fn quadratic_terms_absent<S: Scalar>(
    g: &WeightedDigraph<S>,
    input: PairId,
    backend: Backend,
) -> Result<bool, MarkovError> {
    let plus = OrientedEdge::forward(input);
    let minus = OrientedEdge::backward(input);
    let a = g.rate(plus).clone();
    let b = g.rate(minus).clone();
    let one = S::one();
    // Tree weights and per-pair numerators at the four corners of a unit
    // square in rate space.
    let corner = |da: bool, db: bool| -> Result<(Vec<S>, S), MarkovError> {
        let ra = if da { a.clone() + one.clone() } else { a.clone() };
        let rb = if db { b.clone() + one.clone() } else { b.clone() };
        let gg = g.with_pair_rates(input, ra, rb)?;
        let weights: Vec<S> = gg
            .vertices()
            .map(|x| tree_poly(&gg, x, &TreeConstraint::none(), backend))
            .collect();
        let mut denom = S::zero();
        for w in &weights {
            denom = denom + w.clone();
        }
        let numerators = gg
            .pair_ids()
            .map(|e| {
                let ep = OrientedEdge::forward(e);
                let em = OrientedEdge::backward(e);
                gg.rate(ep).clone() * weights[gg.source(ep).0].clone()
                    - gg.rate(em).clone() * weights[gg.source(em).0].clone()
            })
            .collect();
        Ok((numerators, denom))
    };
    let (n00, d00) = corner(false, false)?;
    let (n10, d10) = corner(true, false)?;
    let (n01, d01) = corner(false, true)?;
    let (n11, d11) = corner(true, true)?;

    let mixed = |f11: &S, f10: &S, f01: &S, f00: &S| -> S {
        f11.clone() - f10.clone() - f01.clone() + f00.clone()
    };
    let zero = |v: S, scale: &S| -> bool {
        if S::EXACT {
            v.is_zero()
        } else {
            v.to_f64().abs() <= FLOAT_REL_TOL * scale.to_f64().abs().max(1.0)
        }
    };
    if !zero(mixed(&d11, &d10, &d01, &d00), &d00) {
        return Ok(false);
    }
    for e in 0..n00.len() {
        if !zero(mixed(&n11[e], &n10[e], &n01[e], &n00[e]), &d00) {
            return Ok(false);
        }
    }
    Ok(true)
}
