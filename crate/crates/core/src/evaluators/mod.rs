//! Dynamic programs that emit arithmetic circuits: bounded-width skew
//! circuits over path decompositions and polynomial-size circuits over
//! NLC and m-clique terms.
mod cw_dp;
mod layered;
mod path_dp;

pub use cw_dp::{mclique_ham_circuit, mclique_perm_circuit, nlc_matching_circuit, CwDpCircuit};
pub use path_dp::{
    pathwidth_ham_circuit, pathwidth_matching_circuit, pathwidth_perm_circuit, PathDpCircuit,
};
