//! treesurgeon-core: rooted spanning-tree polynomials of weighted directed
//! graphs, in exact rational or `f64` arithmetic.
//!
//! The crate models finite irreducible weighted digraphs whose edges come in
//! reversible pairs, enumerates rooted spanning trees (arborescences flowing
//! into a root), evaluates conditioned tree polynomials through two
//! independent backends (direct enumeration and Laplacian minors), and builds
//! on them:
//!
//! * pinned-edge decompositions of a tree polynomial into status vectors,
//! * sigma vectors orthogonal to all status vectors, with exact rank
//!   certificates for the resulting low-dimensional span,
//! * edge-swap surgery between pairs of rooted trees,
//! * stationary distributions, edge currents, and the affine dependence of
//!   every current on a chosen input current,
//! * Gillespie simulation with deterministic counter-based randomness.
//!
//! Everything is generic over [`scalar::Scalar`]; use [`Rational`] for exact
//! verification and `f64` for randomized sweeps.
//!
//! ```
//! use treesurgeon_core::poly::{decompose, tree_poly, Backend, PinnedSet};
//! use treesurgeon_core::trees::TreeConstraint;
//! use treesurgeon_core::{fixtures, Rational};
//!
//! let g = fixtures::four_vertex_rational();
//! let root = g.vertices().next().unwrap();
//! let total: Rational = tree_poly(&g, root, &TreeConstraint::none(), Backend::Determinant);
//!
//! let pins = PinnedSet::new(&g, vec![g.pair_ids().next().unwrap()]).unwrap();
//! let vector = decompose(&g, root, &pins, Backend::Determinant).unwrap();
//! assert_eq!(vector.total(), total);
//! ```

pub mod coplanarity;
pub mod fixtures;
pub mod graph;
pub mod linalg;
pub mod markov;
pub mod poly;
pub mod rng;
pub mod scalar;
pub mod sim;
pub mod trees;

pub use scalar::Scalar;

/// Exact scalar used throughout verification.
pub type Rational = num::rational::BigRational;

/// Graph with exact rational rates.
pub type ExactGraph = graph::WeightedDigraph<Rational>;

/// Graph with `f64` rates.
pub type FloatGraph = graph::WeightedDigraph<f64>;
