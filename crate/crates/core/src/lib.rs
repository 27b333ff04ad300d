//! Bounded-width arithmetic circuits, graph width algebras, and exact
//! permanent, hamiltonian and perfect-matching polynomials.

pub mod algebra;
pub mod circuit;
pub mod decomposition;
pub mod error;
pub mod evaluators;
pub mod graph;
pub mod oracles;
pub mod poly;
pub mod random;
pub mod reductions;
pub mod report;

pub use error::{Error, Result};
pub use poly::{Poly, Rational, WeightExpr};
