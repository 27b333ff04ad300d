use super::{
    circuit_to_ham_graph, circuit_to_perm_graph, formula_to_lbs, lbs_to_width6_skew, GraphMode,
    PermGraphArtifact,
};
use crate::algebra::{clique_term_io, pd_to_clique_term, AlgebraTerm};
use crate::circuit::{Circuit, LbsProgram};
use crate::error::Result;
use crate::graph::{graph_to_matrix, io_graph, MatrixView, WeightedDigraph};

/// Every intermediate of the formula to clique-term compilation.
#[derive(Clone, Debug)]
pub struct PipelineArtifact {
    pub mode: GraphMode,
    pub program: LbsProgram,
    pub skew: Circuit,
    /// The per or ham graph with its decomposition. In matching mode this is
    /// the per graph whose inside-outside graph is `graph`.
    pub source: PermGraphArtifact,
    pub graph: WeightedDigraph,
    pub term: AlgebraTerm,
    pub matrix: MatrixView,
}

impl PipelineArtifact {
    /// The label budget the construction promises.
    pub fn label_bound(&self) -> usize {
        match self.mode {
            GraphMode::Per => 22,
            GraphMode::Ham => 45,
            GraphMode::Matching => 44,
        }
    }
}

pub fn formula_to_clique_pipeline(f: &Circuit, mode: GraphMode) -> Result<PipelineArtifact> {
    let program = formula_to_lbs(f)?;
    let skew = lbs_to_width6_skew(&program)?;
    let (source, graph, term) = match mode {
        GraphMode::Per => {
            let a = circuit_to_perm_graph(&skew)?;
            let t = pd_to_clique_term(&a.graph, &a.pd)?;
            (a.clone(), a.graph, t)
        }
        GraphMode::Ham => {
            let a = circuit_to_ham_graph(&skew)?;
            let t = pd_to_clique_term(&a.graph, &a.pd)?;
            (a.clone(), a.graph, t)
        }
        GraphMode::Matching => {
            let a = circuit_to_perm_graph(&skew)?;
            let t = clique_term_io(&pd_to_clique_term(&a.graph, &a.pd)?)?;
            let g = io_graph(&a.graph);
            (a, g, t)
        }
    };
    let matrix = graph_to_matrix(&graph)?;
    Ok(PipelineArtifact {
        mode,
        program,
        skew,
        source,
        graph,
        term: AlgebraTerm::Clique(term),
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{eval_symbolic, parse_circuit};
    use crate::oracles::{perfect_matchings, permanent};

    #[test]
    fn sum_times_variable_all_modes() {
        let f = parse_circuit(
            "g0 = var x\ng1 = var y\ng2 = add g0 g1\ng3 = var z\ng4 = mul g2 g3\noutput g4\n",
        )
        .unwrap();
        let want = eval_symbolic(&f);
        for mode in [GraphMode::Per, GraphMode::Ham, GraphMode::Matching] {
            let a = formula_to_clique_pipeline(&f, mode).unwrap();
            assert!(a.term.label_count() <= a.label_bound(), "{mode:?}");
            assert_eq!(a.term.eval_graph().unwrap(), a.graph, "{mode:?}");
            match mode {
                GraphMode::Per => assert_eq!(permanent(&a.graph, 128).unwrap(), want),
                GraphMode::Matching => {
                    assert_eq!(perfect_matchings(&a.graph, usize::MAX).unwrap(), want)
                }
                GraphMode::Ham => {}
            }
        }
    }
}
