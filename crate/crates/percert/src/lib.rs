//! Compute, bound, and certify the minimum size of r-bond bootstrap
//! percolating edge sets.
//!
//! The library pairs two routes to the same number: an algebraic lower bound
//! (the dimension of a space of per-vertex polynomials tied to a proper edge
//! colouring) and explicit percolating constructions for Cartesian products
//! with trees, stars and theta graphs. When the routes meet, the value is
//! certified exactly without any search; a desk-scale brute-force oracle
//! cross-checks everything else.

pub mod certify;
pub mod colouring;
pub mod constructions;
pub mod dsl;
pub mod error;
pub mod formulas;
pub mod graph;
pub mod matrix;
pub mod percolation;
pub mod poly;
pub mod witness;

pub use certify::{CertifiedValue, Certifier, Status};
pub use colouring::{greedy_proper_colouring, EdgeColouring};
pub use constructions::{ConstructionPlan, OptimalSetSupplier};
pub use dsl::{build_str, parse_spec, GraphSpec};
pub use error::{Error, Result};
pub use graph::{
    cartesian_product, root_tree, root_tree_at_leaf, DegreeHistogram, Graph, RootedTree,
    ThetaSpec, VertexLabel,
};
pub use matrix::RationalMatrix;
pub use percolation::{closure, is_minimal_percolating, percolates, EdgeSet, PercolationTrace};
pub use poly::{Polynomial, Rational};
