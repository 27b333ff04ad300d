//! Circuit to graph reductions and formula to register program compilation.
mod lbs;
mod perm;
mod pipeline;
mod skew;

pub use lbs::{formula_to_lbs, lbs_to_width6_skew};
pub use perm::{
    circuit_to_ham_graph, circuit_to_matching_graph, circuit_to_path_graph, circuit_to_perm_graph,
    GraphMode, PermGraphArtifact,
};
pub use pipeline::{formula_to_clique_pipeline, PipelineArtifact};
pub use skew::{decompose_weakly_skew, SkewDecomposition};
