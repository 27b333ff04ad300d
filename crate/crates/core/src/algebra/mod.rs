//! Parse trees for the weighted clique, NLC and m-clique algebras.
//!
//! Terms are stored as arenas: every node's children precede it and the root
//! is the last node. Leaves carry vertex ids, so evaluated graphs can be
//! compared by exact id-keyed equality.

mod eval;
mod pathwidth;
mod sexpr;
mod translate;

pub use eval::{eval_clique, eval_mclique, eval_nlc, Evaluated};
pub use pathwidth::pd_to_clique_term;
pub use sexpr::{
    parse_clique, parse_mclique, parse_nlc, parse_term, write_clique, write_mclique, write_nlc,
    write_term,
};
pub use translate::{
    clique_term_io, normalize_nlc_term, strip_loops_clique, strip_loops_mclique, strip_loops_nlc,
    translate_clique_to_nlc, translate_mclique_to_clique, translate_nlc_to_mclique, LabelMapTriple,
};

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::graph::WeightedDigraph;
use crate::poly::WeightExpr;

pub type Label = String;
pub type LabelSet = BTreeSet<Label>;
pub type NodeId = usize;

/// Join table: `(a, b, sign) -> weight`, sign `1` for arcs from the
/// left operand to the right one and `-1` for the reverse direction.
pub type JoinSpec = BTreeMap<(Label, Label, i8), WeightExpr>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CliqueNode {
    Ver {
        label: Label,
        id: String,
    },
    VerLoop {
        label: Label,
        weight: WeightExpr,
        id: String,
    },
    Rename {
        from: Label,
        to: Label,
        sub: NodeId,
    },
    Alpha {
        a: Label,
        b: Label,
        weight: WeightExpr,
        sub: NodeId,
    },
    Union(NodeId, NodeId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NlcNode {
    Ver {
        label: Label,
        id: String,
    },
    VerLoop {
        label: Label,
        weight: WeightExpr,
        id: String,
    },
    /// Labels missing from the map are fixed.
    Relabel {
        map: BTreeMap<Label, Label>,
        sub: NodeId,
    },
    Join {
        spec: JoinSpec,
        left: NodeId,
        right: NodeId,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MNode {
    Ver {
        labels: LabelSet,
        id: String,
    },
    VerLoop {
        labels: LabelSet,
        weight: WeightExpr,
        id: String,
    },
    /// `h` relabels the left operand and `h2` the right one; label sets
    /// missing from a map are fixed.
    Join {
        spec: JoinSpec,
        h: BTreeMap<LabelSet, LabelSet>,
        h2: BTreeMap<LabelSet, LabelSet>,
        left: NodeId,
        right: NodeId,
    },
}

pub trait TermNode: Clone {
    fn children(&self) -> Vec<NodeId>;
    fn labels(&self) -> Vec<&Label>;
    fn leaf_id(&self) -> Option<&str>;
    fn with_children(&self, map: &[NodeId]) -> Self;
}

impl TermNode for CliqueNode {
    fn children(&self) -> Vec<NodeId> {
        match *self {
            CliqueNode::Ver { .. } | CliqueNode::VerLoop { .. } => vec![],
            CliqueNode::Rename { sub, .. } | CliqueNode::Alpha { sub, .. } => vec![sub],
            CliqueNode::Union(l, r) => vec![l, r],
        }
    }

    fn labels(&self) -> Vec<&Label> {
        match self {
            CliqueNode::Ver { label, .. } | CliqueNode::VerLoop { label, .. } => vec![label],
            CliqueNode::Rename { from, to, .. } => vec![from, to],
            CliqueNode::Alpha { a, b, .. } => vec![a, b],
            CliqueNode::Union(..) => vec![],
        }
    }

    fn leaf_id(&self) -> Option<&str> {
        match self {
            CliqueNode::Ver { id, .. } | CliqueNode::VerLoop { id, .. } => Some(id),
            _ => None,
        }
    }

    fn with_children(&self, m: &[NodeId]) -> Self {
        let mut n = self.clone();
        match &mut n {
            CliqueNode::Rename { sub, .. } | CliqueNode::Alpha { sub, .. } => *sub = m[*sub],
            CliqueNode::Union(l, r) => {
                *l = m[*l];
                *r = m[*r];
            }
            _ => {}
        }
        n
    }
}

impl TermNode for NlcNode {
    fn children(&self) -> Vec<NodeId> {
        match *self {
            NlcNode::Ver { .. } | NlcNode::VerLoop { .. } => vec![],
            NlcNode::Relabel { sub, .. } => vec![sub],
            NlcNode::Join { left, right, .. } => vec![left, right],
        }
    }

    fn labels(&self) -> Vec<&Label> {
        match self {
            NlcNode::Ver { label, .. } | NlcNode::VerLoop { label, .. } => vec![label],
            NlcNode::Relabel { map, .. } => map.iter().flat_map(|(a, b)| [a, b]).collect(),
            NlcNode::Join { spec, .. } => spec.keys().flat_map(|(a, b, _)| [a, b]).collect(),
        }
    }

    fn leaf_id(&self) -> Option<&str> {
        match self {
            NlcNode::Ver { id, .. } | NlcNode::VerLoop { id, .. } => Some(id),
            _ => None,
        }
    }

    fn with_children(&self, m: &[NodeId]) -> Self {
        let mut n = self.clone();
        match &mut n {
            NlcNode::Relabel { sub, .. } => *sub = m[*sub],
            NlcNode::Join { left, right, .. } => {
                *left = m[*left];
                *right = m[*right];
            }
            _ => {}
        }
        n
    }
}

impl TermNode for MNode {
    fn children(&self) -> Vec<NodeId> {
        match *self {
            MNode::Ver { .. } | MNode::VerLoop { .. } => vec![],
            MNode::Join { left, right, .. } => vec![left, right],
        }
    }

    fn labels(&self) -> Vec<&Label> {
        match self {
            MNode::Ver { labels, .. } | MNode::VerLoop { labels, .. } => labels.iter().collect(),
            MNode::Join { spec, h, h2, .. } => spec
                .keys()
                .flat_map(|(a, b, _)| [a, b])
                .chain(
                    h.iter()
                        .chain(h2.iter())
                        .flat_map(|(x, y)| x.iter().chain(y.iter())),
                )
                .collect(),
        }
    }

    fn leaf_id(&self) -> Option<&str> {
        match self {
            MNode::Ver { id, .. } | MNode::VerLoop { id, .. } => Some(id),
            _ => None,
        }
    }

    fn with_children(&self, m: &[NodeId]) -> Self {
        let mut n = self.clone();
        if let MNode::Join { left, right, .. } = &mut n {
            *left = m[*left];
            *right = m[*right];
        }
        n
    }
}

/// A parse tree in arena form together with its label alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term<N> {
    nodes: Vec<N>,
    alphabet: LabelSet,
}

pub type CliqueTerm = Term<CliqueNode>;
pub type NlcTerm = Term<NlcNode>;
pub type MTerm = Term<MNode>;

impl<N: TermNode> Default for Term<N> {
    fn default() -> Self {
        Term {
            nodes: Vec::new(),
            alphabet: LabelSet::new(),
        }
    }
}

impl<N: TermNode> Term<N> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a node, adding the labels it mentions to the alphabet.
    pub fn push(&mut self, node: N) -> NodeId {
        for l in node.labels() {
            if !self.alphabet.contains(l) {
                self.alphabet.insert(l.clone());
            }
        }
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn extend_alphabet(&mut self, labels: impl IntoIterator<Item = Label>) {
        self.alphabet.extend(labels);
    }

    pub fn nodes(&self) -> &[N] {
        &self.nodes
    }

    pub fn node(&self, i: NodeId) -> &N {
        &self.nodes[i]
    }

    pub fn root(&self) -> NodeId {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn alphabet(&self) -> &LabelSet {
        &self.alphabet
    }

    pub fn label_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn vertex_ids(&self) -> Vec<&str> {
        self.nodes.iter().filter_map(TermNode::leaf_id).collect()
    }

    /// Checks the arena is a tree rooted at the last node with distinct leaf
    /// ids.
    pub fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::MalformedTerm("empty term".into()));
        }
        let mut parent = vec![false; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            for c in n.children() {
                if c >= i {
                    return Err(Error::MalformedTerm(format!(
                        "node {i} refers forward to {c}"
                    )));
                }
                if parent[c] {
                    return Err(Error::MalformedTerm(format!("node {c} has two parents")));
                }
                parent[c] = true;
            }
        }
        if let Some(i) = parent[..self.nodes.len() - 1].iter().position(|p| !p) {
            return Err(Error::MalformedTerm(format!(
                "node {i} is detached from the root"
            )));
        }
        let mut seen = HashSet::new();
        for id in self.vertex_ids() {
            if !seen.insert(id) {
                return Err(Error::MalformedTerm(format!("vertex id `{id}` used twice")));
            }
        }
        Ok(())
    }

    /// Reorders the arena into left-to-right post-order, so structurally
    /// equal trees have equal arenas.
    pub fn canonical(&self) -> Self {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root(), false)];
        while let Some((i, expanded)) = stack.pop() {
            if expanded {
                order.push(i);
            } else {
                stack.push((i, true));
                for c in self.nodes[i].children().into_iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::with_capacity(order.len());
        for i in order {
            remap[i] = nodes.len();
            nodes.push(self.nodes[i].with_children(&remap));
        }
        Term {
            nodes,
            alphabet: self.alphabet.clone(),
        }
    }
}

impl CliqueTerm {
    pub fn validate_clique(&self) -> Result<()> {
        self.validate()?;
        for n in &self.nodes {
            if let CliqueNode::Alpha { a, b, .. } = n {
                if a == b {
                    return Err(Error::MalformedTerm(format!(
                        "arc operation on `{a}` twice"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A term over any of the three algebras.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraTerm {
    Clique(CliqueTerm),
    Nlc(NlcTerm),
    MClique(MTerm),
}

impl AlgebraTerm {
    pub fn label_count(&self) -> usize {
        match self {
            AlgebraTerm::Clique(t) => t.label_count(),
            AlgebraTerm::Nlc(t) => t.label_count(),
            AlgebraTerm::MClique(t) => t.label_count(),
        }
    }

    pub fn algebra_name(&self) -> &'static str {
        match self {
            AlgebraTerm::Clique(_) => "clique",
            AlgebraTerm::Nlc(_) => "nlc",
            AlgebraTerm::MClique(_) => "m-clique",
        }
    }

    pub fn eval_graph(&self) -> Result<WeightedDigraph> {
        Ok(match self {
            AlgebraTerm::Clique(t) => eval_clique(t)?.graph,
            AlgebraTerm::Nlc(t) => eval_nlc(t)?.graph,
            AlgebraTerm::MClique(t) => eval_mclique(t)?.graph,
        })
    }
}

/// Builders used by tests and generators.
pub mod build {
    use super::*;

    pub fn set<S: AsRef<str>>(labels: &[S]) -> LabelSet {
        labels.iter().map(|s| s.as_ref().to_string()).collect()
    }

    pub fn ver(t: &mut CliqueTerm, label: &str, id: &str) -> NodeId {
        t.push(CliqueNode::Ver {
            label: label.into(),
            id: id.into(),
        })
    }

    pub fn union(t: &mut CliqueTerm, l: NodeId, r: NodeId) -> NodeId {
        t.push(CliqueNode::Union(l, r))
    }

    pub fn rename(t: &mut CliqueTerm, from: &str, to: &str, sub: NodeId) -> NodeId {
        t.push(CliqueNode::Rename {
            from: from.into(),
            to: to.into(),
            sub,
        })
    }

    pub fn alpha(t: &mut CliqueTerm, a: &str, b: &str, w: WeightExpr, sub: NodeId) -> NodeId {
        t.push(CliqueNode::Alpha {
            a: a.into(),
            b: b.into(),
            weight: w,
            sub,
        })
    }

    /// Arcs both ways between labels `a` and `b`.
    pub fn eta(t: &mut CliqueTerm, a: &str, b: &str, w: WeightExpr, sub: NodeId) -> NodeId {
        let x = alpha(t, a, b, w.clone(), sub);
        alpha(t, b, a, w, x)
    }

    /// The four-vertex clique with unit weights over labels `a`, `b`.
    pub fn k4() -> CliqueTerm {
        let mut t = CliqueTerm::new();
        let one = WeightExpr::one;
        let v1 = ver(&mut t, "a", "v1");
        let v2 = ver(&mut t, "b", "v2");
        let u = union(&mut t, v1, v2);
        let e = eta(&mut t, "a", "b", one(), u);
        let r = rename(&mut t, "a", "b", e);
        let v3 = ver(&mut t, "a", "v3");
        let u = union(&mut t, r, v3);
        let e = eta(&mut t, "a", "b", one(), u);
        let r = rename(&mut t, "a", "b", e);
        let v4 = ver(&mut t, "a", "v4");
        let u = union(&mut t, r, v4);
        eta(&mut t, "a", "b", one(), u);
        t
    }
}
