//! `selftest`: the bundled identity suite. Covers the worked four-vertex
//! example, a float six-vertex network, and the complete-graph family;
//! `--inject-fault` corrupts a rate after certification and must drive the
//! exit status to 1.

use std::path::PathBuf;

use num::traits::Zero;
use serde_json::{json, Value};

use treesurgeon_core::coplanarity::{check_coplanarity, check_second_order};
use treesurgeon_core::fixtures;
use treesurgeon_core::graph::{OrientedEdge, PairId, WeightedDigraph};
use treesurgeon_core::markov::{stationary, stationary_kernel, vertex_balance, currents};
use treesurgeon_core::poly::{decompose, tree_poly, Backend, PinnedSet};
use treesurgeon_core::scalar::values_agree;
use treesurgeon_core::trees::TreeConstraint;
use treesurgeon_core::{ExactGraph, Rational, Scalar};

use crate::config::RunConfig;
use crate::report::{object, write_report, Envelope};
use crate::CliError;

struct Suite {
    checks: Vec<Value>,
    failures: usize,
}

impl Suite {
    fn new() -> Self {
        Suite {
            checks: Vec::new(),
            failures: 0,
        }
    }

    fn record(&mut self, graph: &str, name: &str, passed: bool, detail: String) {
        if !passed {
            self.failures += 1;
        }
        self.checks.push(json!({
            "graph": graph,
            "check": name,
            "passed": passed,
            "detail": detail,
        }));
    }
}

/// Both backends, every root: the pinned decomposition refines the plain
/// polynomial.
fn decomposition_checks<S: Scalar>(suite: &mut Suite, tag: &str, g: &WeightedDigraph<S>, pin: PairId) {
    let pinned = PinnedSet::new(g, vec![pin]).expect("fixture pin is valid");
    let mut ok = true;
    for root in g.vertices() {
        let by_enum = decompose(g, root, &pinned, Backend::Enumeration).expect("fixture decomposes");
        let by_det = decompose(g, root, &pinned, Backend::Determinant).expect("fixture decomposes");
        let tau = tree_poly(g, root, &TreeConstraint::none(), Backend::Determinant);
        ok &= by_enum
            .values
            .iter()
            .zip(&by_det.values)
            .all(|(a, b)| values_agree(a, b));
        ok &= values_agree(&by_det.total(), &tau);
    }
    suite.record(tag, "decomposition-total", ok, "per-root refinement and backend agreement".into());
}

fn second_order_checks(suite: &mut Suite, tag: &str, g: &ExactGraph) {
    let mut pairs = 0;
    let mut ok = true;
    for pair in g.pair_ids() {
        if !g.stays_connected_without(&[pair]).unwrap_or(false) {
            continue;
        }
        pairs += 1;
        let check = check_second_order(g, pair, Backend::Determinant).expect("fixture splits");
        ok &= check.all_zero();
    }
    suite.record(
        tag,
        "second-order-identity",
        ok && pairs > 0,
        format!("{pairs} non-bridge pairs, exact residuals"),
    );
}

fn coplanarity_checks<S: Scalar>(suite: &mut Suite, tag: &str, g: &WeightedDigraph<S>, pin: PairId) {
    let check = check_coplanarity(g, pin, Backend::Determinant).expect("fixture certifies");
    let rank_ok = check.certificate.rank == 2;
    let dots_ok = check.all_orthogonal();
    suite.record(
        tag,
        "coplanarity-rank-2",
        rank_ok && dots_ok,
        format!("rank {}, orthogonal {}", check.certificate.rank, dots_ok),
    );
}

fn stationary_checks<S: Scalar>(suite: &mut Suite, tag: &str, g: &WeightedDigraph<S>) {
    let p = stationary(g, Backend::Determinant);
    // The fraction-free kernel solve only exists for exact scalars; float
    // fixtures are covered by the flow-balance residual alone.
    let match_ok = if S::EXACT {
        let kernel = stationary_kernel(g).expect("fixture has a kernel");
        p.probabilities
            .iter()
            .zip(&kernel)
            .all(|(a, b)| values_agree(a, b))
    } else {
        true
    };
    let cur = currents(g, Backend::Determinant);
    let balance = vertex_balance(g, &cur);
    let balance_ok = balance
        .iter()
        .all(|r| treesurgeon_core::scalar::is_zero_within(r, 1.0));
    let detail = if S::EXACT {
        "tree route equals kernel solve; vertex balance vanishes"
    } else {
        "vertex balance vanishes within tolerance"
    };
    suite.record(
        tag,
        "stationary-kernel-match",
        match_ok && balance_ok,
        detail.into(),
    );
}

/// The complete-graph family: with unit rates the rooted tree count is
/// n^(n-2), through both backends.
fn cayley_checks(suite: &mut Suite) {
    for n in 3..=5usize {
        let g = fixtures::complete_unit(n);
        let expected = Rational::from_i64((n as i64).pow(n as u32 - 2));
        let mut ok = true;
        for root in g.vertices() {
            ok &= tree_poly(&g, root, &TreeConstraint::none(), Backend::Enumeration) == expected;
            ok &= tree_poly(&g, root, &TreeConstraint::none(), Backend::Determinant) == expected;
        }
        suite.record(
            "complete-unit",
            "rooted-tree-count",
            ok,
            format!("K{n}: {expected} per root"),
        );
    }
}

/// Certify sigma on the clean graph, then corrupt one rate and insist the
/// orthogonality breaks: proves the suite can fail.
fn fault_injection(suite: &mut Suite) {
    let g = fixtures::four_vertex_rational();
    let pin = PairId(0);
    let sigma = treesurgeon_core::coplanarity::sigma_vector(
        &g,
        pin,
        &TreeConstraint::none(),
        Backend::Determinant,
    )
    .expect("fixture sigma");
    let victim = g
        .pair_ids()
        .find(|&p| p != pin)
        .expect("fixture has several pairs");
    let old = g.rate(OrientedEdge::forward(victim)).clone();
    let corrupted = g
        .with_pair_rates(
            victim,
            old + Rational::from_i64(1),
            g.rate(OrientedEdge::backward(victim)).clone(),
        )
        .expect("rate override");
    let pinned = PinnedSet::new(&corrupted, vec![pin]).expect("pin survives");
    let mut violated = false;
    for root in corrupted.vertices() {
        let tv = decompose(&corrupted, root, &pinned, Backend::Determinant)
            .expect("corrupted graph decomposes");
        if !sigma.dot(&tv).is_zero() {
            violated = true;
        }
    }
    // The check *passes* only if the corruption went undetected, which is
    // exactly the failure we want to surface.
    suite.record(
        "four-vertex-rational",
        "fault-injection-detected",
        !violated,
        "stale certificate must not survive a corrupted rate".into(),
    );
}

pub fn run(cfg: &RunConfig, inject_fault: bool, out: Option<PathBuf>) -> Result<(), CliError> {
    let mut suite = Suite::new();

    let worked = fixtures::four_vertex();
    decomposition_checks(&mut suite, "four-vertex", &worked, PairId(0));
    second_order_checks(&mut suite, "four-vertex", &worked);
    coplanarity_checks(&mut suite, "four-vertex", &worked, PairId(0));
    stationary_checks(&mut suite, "four-vertex", &worked);

    let rational = fixtures::four_vertex_rational();
    decomposition_checks(&mut suite, "four-vertex-rational", &rational, PairId(0));
    second_order_checks(&mut suite, "four-vertex-rational", &rational);
    stationary_checks(&mut suite, "four-vertex-rational", &rational);

    let fig = fixtures::complete_float(6, 0.5, 3.0, 3);
    decomposition_checks(&mut suite, "six-vertex-float", &fig, PairId(0));
    coplanarity_checks(&mut suite, "six-vertex-float", &fig, PairId(0));
    stationary_checks(&mut suite, "six-vertex-float", &fig);

    cayley_checks(&mut suite);

    let k5 = fixtures::complete_rational(5, 11);
    decomposition_checks(&mut suite, "complete-rational-5", &k5, PairId(0));
    second_order_checks(&mut suite, "complete-rational-5", &k5);
    coplanarity_checks(&mut suite, "complete-rational-5", &k5, PairId(0));
    stationary_checks(&mut suite, "complete-rational-5", &k5);

    if inject_fault {
        fault_injection(&mut suite);
    }

    let payload = object(vec![
        ("checks", Value::Array(suite.checks.clone())),
        ("failed", json!(suite.failures)),
        ("fault_injected", json!(inject_fault)),
    ]);
    let envelope = Envelope::new("selftest", "exact", payload);
    write_report(&envelope, cfg, out.as_deref())?;
    if suite.failures == 0 {
        Ok(())
    } else {
        Err(CliError::verification(format!(
            "{} selftest check(s) failed",
            suite.failures
        )))
    }
}
