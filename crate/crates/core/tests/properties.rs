//! Randomized properties of the core algorithms: serialization round
//! trips, dual-backend agreement, decomposition identities, surgery
//! invariants, and stationary-law cross-checks.

use proptest::prelude::*;

use treesurgeon_core::coplanarity::sigma_vector;
use treesurgeon_core::graph::{parse_graph, random_graph, AnyGraph, PairId, RateLaw, VertexId};
use treesurgeon_core::markov::{currents, stationary, stationary_kernel, z_vectors};
use treesurgeon_core::poly::{decompose, statuses, tree_poly, Backend, PinnedSet};
use treesurgeon_core::trees::{enumerate_rooted_trees, surgery, TreeConstraint};
use treesurgeon_core::{ExactGraph, FloatGraph, Rational, Scalar};

fn rational_graph(n: usize, density: f64, seed: u64) -> ExactGraph {
    random_graph(
        n,
        density,
        RateLaw::RationalUniform {
            max_num: 24,
            max_den: 7,
        },
        seed,
    )
    .expect("valid parameters")
}

fn float_graph(n: usize, density: f64, seed: u64) -> FloatGraph {
    random_graph(n, density, RateLaw::Uniform { lo: 0.5, hi: 3.0 }, seed).expect("valid parameters")
}

fn same_rates_by_label<S: Scalar>(
    g: &treesurgeon_core::graph::WeightedDigraph<S>,
    back: &treesurgeon_core::graph::WeightedDigraph<S>,
) -> bool {
    if g.pair_count() != back.pair_count() {
        return false;
    }
    g.pair_ids().all(|p| {
        let pair = g.pair(p);
        let u = g.label(pair.u);
        let v = g.label(pair.v);
        let Ok(bp) = back.resolve_pair(&format!("{u}:{v}")) else {
            return false;
        };
        let bpair = back.pair(bp);
        back.label(bpair.u) == u
            && back.label(bpair.v) == v
            && bpair.forward == pair.forward
            && bpair.backward == pair.backward
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Vertex ids follow first appearance in the text, so a round trip may
    // renumber; rates per labelled edge and the serialized form itself are
    // what must survive.
    #[test]
    fn exact_edge_lists_round_trip(n in 2usize..7, seed in 0u64..10_000) {
        let g = rational_graph(n, 0.6, seed);
        let text = g.to_edge_list();
        let AnyGraph::Exact(back) = parse_graph(&text).unwrap() else {
            return Err(TestCaseError::fail("arithmetic mode changed"));
        };
        prop_assert_eq!(back.to_edge_list(), text);
        prop_assert!(same_rates_by_label(&g, &back));
    }

    #[test]
    fn float_edge_lists_round_trip(n in 2usize..7, seed in 0u64..10_000) {
        let g = float_graph(n, 0.6, seed);
        let text = g.to_edge_list();
        let AnyGraph::Float(back) = parse_graph(&text).unwrap() else {
            return Err(TestCaseError::fail("arithmetic mode changed"));
        };
        prop_assert_eq!(back.to_edge_list(), text);
        prop_assert!(same_rates_by_label(&g, &back));
    }

    #[test]
    fn status_layout_is_complete_and_duplicate_free(n in 0usize..5) {
        let all = statuses(n);
        prop_assert_eq!(all.len(), 3usize.pow(n as u32));
        for s in &all {
            prop_assert_eq!(s.len(), n);
        }
        for i in 0..all.len() {
            for j in (i + 1)..all.len() {
                prop_assert_ne!(&all[i], &all[j]);
            }
        }
    }

    #[test]
    fn backends_agree_on_every_root(n in 3usize..7, seed in 0u64..10_000) {
        let g = rational_graph(n, 0.7, seed);
        for root in g.vertices() {
            let by_enum = tree_poly(&g, root, &TreeConstraint::none(), Backend::Enumeration);
            let by_det = tree_poly(&g, root, &TreeConstraint::none(), Backend::Determinant);
            prop_assert_eq!(by_enum, by_det);
        }
    }

    #[test]
    fn enumerated_trees_are_valid_distinct_and_sum_to_the_polynomial(
        n in 2usize..6,
        seed in 0u64..10_000,
    ) {
        let g = rational_graph(n, 0.6, seed);
        let root = VertexId(seed as usize % n);
        let trees: Vec<_> = enumerate_rooted_trees(&g, root, &TreeConstraint::none()).collect();
        let mut total = Rational::from_i64(0);
        for t in &trees {
            prop_assert!(t.is_valid_for(&g));
            prop_assert_eq!(t.root(), root);
            total = total + t.weight(&g);
        }
        for i in 0..trees.len() {
            for j in (i + 1)..trees.len() {
                prop_assert_ne!(trees[i].edge_set(), trees[j].edge_set());
            }
        }
        prop_assert_eq!(total, tree_poly(&g, root, &TreeConstraint::none(), Backend::Auto));
    }

    #[test]
    fn decomposition_totals_recover_the_polynomial(
        n in 3usize..7,
        seed in 0u64..10_000,
        two_pins in proptest::bool::ANY,
    ) {
        let g = rational_graph(n, 0.7, seed);
        let pins = if two_pins && g.pair_count() >= 2 {
            vec![PairId(0), PairId(1)]
        } else {
            vec![PairId(0)]
        };
        let pinned = PinnedSet::new(&g, pins).unwrap();
        for root in g.vertices() {
            let tv = decompose(&g, root, &pinned, Backend::Auto).unwrap();
            prop_assert_eq!(
                tv.total(),
                tree_poly(&g, root, &TreeConstraint::none(), Backend::Auto)
            );
        }
    }

    #[test]
    fn stationary_probabilities_sum_to_one_and_match_the_kernel(
        n in 2usize..7,
        seed in 0u64..10_000,
    ) {
        let g = rational_graph(n, 0.6, seed);
        let p = stationary(&g, Backend::Auto);
        let mut sum = Rational::from_i64(0);
        for x in &p.probabilities {
            prop_assert!(x > &Rational::from_i64(0));
            sum = sum + x.clone();
        }
        prop_assert_eq!(sum, Rational::from_i64(1));
        prop_assert_eq!(p.probabilities.clone(), stationary_kernel(&g).unwrap());
    }

    #[test]
    fn sigma_annihilates_every_tree_vector(n in 4usize..7, seed in 0u64..10_000) {
        let g = rational_graph(n, 0.8, seed);
        let pair = PairId(seed as usize % g.pair_count());
        prop_assume!(g.stays_connected_without(&[pair]).unwrap());
        let sigma = sigma_vector(&g, pair, &TreeConstraint::none(), Backend::Auto).unwrap();
        let pinned = PinnedSet::new(&g, vec![pair]).unwrap();
        for root in g.vertices() {
            let tv = decompose(&g, root, &pinned, Backend::Auto).unwrap();
            prop_assert_eq!(sigma.dot(&tv), Rational::from_i64(0));
        }
    }

    #[test]
    fn surgery_preserves_weights_and_inverts_itself(
        n in 3usize..6,
        seed in 0u64..10_000,
    ) {
        let g = rational_graph(n, 0.7, seed);
        let x = VertexId(0);
        let y = VertexId(1 + (seed as usize % (n - 1)));
        let from_x: Vec<_> = enumerate_rooted_trees(&g, x, &TreeConstraint::none()).collect();
        let from_y: Vec<_> = enumerate_rooted_trees(&g, y, &TreeConstraint::none()).collect();
        let mut outputs = Vec::new();
        for tx in from_x.iter().take(6) {
            for ty in from_y.iter().take(6) {
                let (sx, sy) = surgery(&g, tx, ty).unwrap();
                prop_assert_eq!(sx.root(), x);
                prop_assert_eq!(sy.root(), y);
                prop_assert!(sx.is_valid_for(&g));
                prop_assert!(sy.is_valid_for(&g));
                prop_assert_eq!(
                    tx.weight(&g) * ty.weight(&g),
                    sx.weight(&g) * sy.weight(&g)
                );
                let (bx, by) = surgery(&g, &sx, &sy).unwrap();
                prop_assert_eq!(bx.edge_set(), tx.edge_set());
                prop_assert_eq!(by.edge_set(), ty.edge_set());
                outputs.push((sx.edge_set(), sy.edge_set()));
            }
        }
        for i in 0..outputs.len() {
            for j in (i + 1)..outputs.len() {
                prop_assert_ne!(&outputs[i], &outputs[j]);
            }
        }
    }

    #[test]
    fn rational_current_expression_matches_from_scratch_solves(
        n in 3usize..6,
        seed in 0u64..10_000,
        num in 1i64..30,
        den in 1u64..9,
    ) {
        let g = rational_graph(n, 0.8, seed);
        let input = PairId(seed as usize % g.pair_count());
        prop_assume!(g.stays_connected_without(&[input]).unwrap());
        let z = z_vectors(&g, input, Backend::Auto).unwrap();
        let a = Rational::from_ratio(num, den);
        let b = Rational::from_ratio(num.rem_euclid(7) + 1, den + 2);
        let resampled = g.with_pair_rates(input, a.clone(), b.clone()).unwrap();
        let cur = currents(&resampled, Backend::Auto);
        for e in g.pair_ids() {
            prop_assert_eq!(z.current_at(e, &a, &b), cur.per_pair[e.0].clone());
        }
    }
}
