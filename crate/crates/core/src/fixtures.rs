//! Bundled example graphs shared by unit tests, the acceptance suite, and
//! the command-line self-test.
//!
//! Every fixture is deterministic; the random families derive all rates
//! from an explicit seed.

use crate::graph::{parse_graph, AnyGraph, PairId};
use crate::rng::SplitMix64;
use crate::{ExactGraph, FloatGraph};

/// Two vertices, forward rate 2, backward rate 1.  Stationary law
/// (1/3, 2/3), zero current.
pub const TWO_STATE_SRC: &str = "a b 2 1";

/// Unit-rate triangle.
pub const TRIANGLE_SRC: &str = "a b 1 1\nb c 1 1\nc a 1 1";

/// Three-cycle driven forward at rate 2 against rate 1: uniform
/// stationary law with current 1/3 around the cycle.
pub const BIASED_THREE_CYCLE_SRC: &str = "a b 2 1\nb c 2 1\nc a 2 1";

/// The four-vertex worked example with unit rates: pair 0 is the
/// reversible edge between `b` and `a` (forward orientation `b -> a`),
/// and each root carries exactly eight spanning trees.
pub const FOUR_VERTEX_SRC: &str = "b a 1 1\nb c 1 1\nc d 1 1\nd a 1 1\nd b 1 1";

/// The same topology as [`FOUR_VERTEX_SRC`] with generic rational rates.
pub const FOUR_VERTEX_RATIONAL_SRC: &str = "b a 2/3 5\nb c 7 1/2\nc d 3 4\nd a 1 6/5\nd b 9 2";

/// Detailed-balanced graph built from vertex weights (1, 2, 3, 5) with
/// `r(x -> y) = weight(y)`; every stationary current vanishes.
pub const DETAILED_BALANCED_SRC: &str = "a b 2 1\nb c 3 2\nc a 1 3\nc d 5 3\nd a 1 5";

/// A detailed-balanced 4-cycle (vertex weights 1, 2, 3, 5) plus one extra
/// driven pair across `a`-`c`.  Removing the driven pair restores detailed
/// balance, so every current's response to it has zero offset.
pub const DRIVEN_CHORD_SRC: &str = "a b 2 1\nb c 3 2\nc d 5 3\nd a 1 5\na c 7 4";

fn exact(src: &str) -> ExactGraph {
    match parse_graph(src).expect("fixture sources are well-formed") {
        AnyGraph::Exact(g) => g,
        AnyGraph::Float(_) => unreachable!("fixture sources use exact rates"),
    }
}

pub fn two_state() -> ExactGraph {
    exact(TWO_STATE_SRC)
}

pub fn triangle() -> ExactGraph {
    exact(TRIANGLE_SRC)
}

pub fn biased_three_cycle() -> ExactGraph {
    exact(BIASED_THREE_CYCLE_SRC)
}

pub fn four_vertex() -> ExactGraph {
    exact(FOUR_VERTEX_SRC)
}

pub fn four_vertex_rational() -> ExactGraph {
    exact(FOUR_VERTEX_RATIONAL_SRC)
}

pub fn detailed_balanced() -> ExactGraph {
    exact(DETAILED_BALANCED_SRC)
}

/// Graph plus the driven pair's id.
pub fn driven_chord() -> (ExactGraph, PairId) {
    let g = exact(DRIVEN_CHORD_SRC);
    let p = g.resolve_pair("a:c").expect("chord pair exists");
    (g, p)
}

/// Complete reversible graph on `n` vertices, all rates 1.
pub fn complete_unit(n: usize) -> ExactGraph {
    let mut lines = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            lines.push(format!("x{i} x{j} 1 1"));
        }
    }
    exact(&lines.join("\n"))
}

/// Complete reversible graph on `n` vertices with random rational rates
/// (numerators up to 40, denominators up to 11), deterministic per seed.
pub fn complete_rational(n: usize, seed: u64) -> ExactGraph {
    let mut rng = SplitMix64::new(seed);
    let mut lines = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let a = rng.next_range(40) + 1;
            let b = rng.next_range(11) + 1;
            let c = rng.next_range(40) + 1;
            let d = rng.next_range(11) + 1;
            lines.push(format!("x{i} x{j} {a}/{b} {c}/{d}"));
        }
    }
    exact(&lines.join("\n"))
}

/// Complete reversible graph on `n` vertices with float rates drawn
/// uniformly from `[lo, hi)`, deterministic per seed.
pub fn complete_float(n: usize, lo: f64, hi: f64, seed: u64) -> FloatGraph {
    let mut rng = SplitMix64::stream(seed, 0x666c6f61);
    let labels: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push(crate::graph::EdgePair {
                u: crate::graph::VertexId(i),
                v: crate::graph::VertexId(j),
                forward: rng.next_uniform(lo, hi),
                backward: rng.next_uniform(lo, hi),
            });
        }
    }
    crate::graph::WeightedDigraph::new(labels, pairs).expect("complete graph is irreducible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::RateLaw;

    #[test]
    fn fixture_sources_parse_and_have_expected_sizes() {
        assert_eq!(two_state().vertex_count(), 2);
        assert_eq!(triangle().pair_count(), 3);
        assert_eq!(biased_three_cycle().pair_count(), 3);
        assert_eq!(four_vertex().pair_count(), 5);
        assert_eq!(four_vertex_rational().pair_count(), 5);
        assert_eq!(detailed_balanced().pair_count(), 5);
        let (g, p) = driven_chord();
        assert_eq!(g.pair_count(), 5);
        assert!(g.pair_reversible(p));
    }

    #[test]
    fn complete_families_are_deterministic() {
        assert_eq!(complete_rational(5, 7), complete_rational(5, 7));
        assert_eq!(complete_unit(4).pair_count(), 6);
        let f = complete_float(6, 0.5, 3.0, 42);
        assert_eq!(f, complete_float(6, 0.5, 3.0, 42));
        for p in f.pair_ids() {
            let pair = f.pair(p);
            assert!(pair.forward >= 0.5 && pair.forward < 3.0);
            assert!(pair.backward >= 0.5 && pair.backward < 3.0);
        }
    }

    #[test]
    fn random_graph_family_is_reversible_and_deterministic() {
        let g: ExactGraph = crate::graph::random_graph(
            6,
            0.5,
            RateLaw::RationalUniform {
                max_num: 10,
                max_den: 5,
            },
            11,
        )
        .unwrap();
        assert!(g.pair_ids().all(|p| g.pair_reversible(p)));
    }
}
