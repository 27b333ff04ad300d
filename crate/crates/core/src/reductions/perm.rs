use std::collections::BTreeSet;

use super::skew::decompose_weakly_skew;
use crate::circuit::{validate_layering, Circuit, Gate, GateId};
use crate::decomposition::{lift_pd_io, validate_path_decomposition, PathDecomposition};
use crate::error::{Error, Result};
use crate::graph::{io_graph, WeightedDigraph};
use crate::poly::WeightExpr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphMode {
    Per,
    Ham,
    Matching,
}

impl GraphMode {
    pub fn name(self) -> &'static str {
        match self {
            GraphMode::Per => "per",
            GraphMode::Ham => "ham",
            GraphMode::Matching => "matching",
        }
    }
}

/// A graph built from a layered weakly skew circuit of width `k`, with a path
/// decomposition certificate.
#[derive(Clone, Debug)]
pub struct PermGraphArtifact {
    pub graph: WeightedDigraph,
    pub pd: PathDecomposition,
    pub s: String,
    pub t: String,
    pub mode: GraphMode,
    pub circuit_width: usize,
}

impl PermGraphArtifact {
    pub fn max_bag(&self) -> usize {
        self.pd.max_bag()
    }

    /// The bag size the construction promises for this mode.
    pub fn bag_bound(&self) -> usize {
        let k = self.circuit_width;
        match self.mode {
            GraphMode::Per => 7 * k / 2,
            GraphMode::Ham => 7 * k + 2,
            GraphMode::Matching => 2 * (7 * k / 2),
        }
    }
}

fn gate_id(g: GateId) -> String {
    format!("g{g}")
}

fn copy_id(g: GateId, sub: usize) -> String {
    format!("g{g}.{sub}")
}

fn source_id(sub: usize) -> String {
    format!("s{sub}")
}

struct Builder {
    /// `(vertex, first bag, last bag)`
    vertices: Vec<(String, usize, usize)>,
    arcs: Vec<(String, String, WeightExpr)>,
}

impl Builder {
    fn finish(self, bag_count: usize) -> Result<(WeightedDigraph, PathDecomposition)> {
        let mut vs = self.vertices;
        vs.sort_by(|a, b| (a.1, a.2).cmp(&(b.1, b.2)).then_with(|| a.0.cmp(&b.0)));
        let mut g = WeightedDigraph::directed();
        let mut bags = vec![BTreeSet::new(); bag_count];
        for (id, lo, hi) in &vs {
            g.add_vertex(id.clone())?;
            for bag in &mut bags[*lo..=*hi] {
                bag.insert(id.clone());
            }
        }
        for (u, v, w) in self.arcs {
            let (a, b) = (g.require(&u)?, g.require(&v)?);
            match w {
                WeightExpr::Const(c) => g.accumulate_arc(a, b, &c)?,
                w => {
                    if g.arc(a, b).is_some() {
                        return Err(Error::MalformedCircuit(format!(
                            "parallel arcs {u} -> {v} in the path graph"
                        )));
                    }
                    g.set_arc(a, b, w);
                }
            }
        }
        let pd = PathDecomposition::new(bags);
        validate_path_decomposition(&g, &pd)?;
        Ok((g, pd))
    }
}

/// The acyclic graph whose `s`-`t` path sum equals the circuit's value,
/// before the permanent closure. Bags are numbered from the output side;
/// bag `b` (0-based) covers layers `b + 1` and `b + 2`.
pub fn circuit_to_path_graph(c: &Circuit) -> Result<PermGraphArtifact> {
    let k = validate_layering(c)?;
    let layers = c.layers().unwrap();
    let l = layers.iter().copied().max().unwrap();
    if l == 1 {
        let Gate::Input(w) = c.gate(c.output()) else {
            unreachable!("a one-layer circuit is a single input");
        };
        let mut g = WeightedDigraph::directed();
        let s = g.add_vertex("s0")?;
        let t = g.add_vertex(gate_id(c.output()))?;
        g.set_arc(s, t, w.clone());
        let pd = PathDecomposition::new(vec![g.ids().iter().cloned().collect()]);
        return Ok(PermGraphArtifact {
            graph: g,
            pd,
            s: "s0".into(),
            t: gate_id(c.output()),
            mode: GraphMode::Per,
            circuit_width: k,
        });
    }
    let d = decompose_weakly_skew(c)?;
    let spans = d.spans.as_ref().unwrap();
    let bag_count = l - 1;
    let mut b = Builder {
        vertices: Vec::new(),
        arcs: Vec::new(),
    };
    let input_bag = |g: GateId| layers[g] - 2;
    let gate_bags = |g: GateId| {
        let n = layers[g];
        (n.saturating_sub(2), (n - 1).min(bag_count - 1))
    };
    for (sub, gates) in d.subcircuits.iter().enumerate() {
        let (top, bot) = spans[sub];
        let s = source_id(sub);
        if sub == 0 {
            b.vertices.push((s.clone(), 0, bag_count - 1));
        } else {
            b.vertices.push((s.clone(), top - 2, bot - 2));
        }
        // inputs outside subcircuit 0 may be shared, so they get private copies
        let vid = |g: GateId| {
            if sub != 0 && c.gate(g).is_input() {
                copy_id(g, sub)
            } else {
                gate_id(g)
            }
        };
        for &g in gates {
            match c.gate(g) {
                Gate::Input(w) => {
                    let bag = input_bag(g);
                    b.vertices.push((vid(g), bag, bag));
                    if !w.is_zero() {
                        b.arcs.push((s.clone(), vid(g), w.clone()));
                    }
                }
                Gate::Add(x, y) => {
                    let (lo, hi) = gate_bags(g);
                    b.vertices.push((vid(g), lo, hi));
                    for o in [*x, *y] {
                        b.arcs.push((vid(o), vid(g), WeightExpr::one()));
                    }
                }
                Gate::Mul(..) => {
                    let (lo, hi) = gate_bags(g);
                    b.vertices.push((vid(g), lo, hi));
                    let j = d.child_of_mul[g].unwrap();
                    let main = d.main_operand(c, g);
                    let child = d.outputs[j];
                    let child_v = if c.gate(child).is_input() {
                        copy_id(child, j)
                    } else {
                        gate_id(child)
                    };
                    b.arcs.push((vid(main), source_id(j), WeightExpr::one()));
                    b.arcs.push((child_v, vid(g), WeightExpr::one()));
                }
            }
        }
    }
    let (graph, pd) = b.finish(bag_count)?;
    Ok(PermGraphArtifact {
        graph,
        pd,
        s: source_id(0),
        t: gate_id(c.output()),
        mode: GraphMode::Per,
        circuit_width: k,
    })
}

/// Adds the arc `t -> s` and unit loops everywhere except on `s` and `t`, so
/// the permanent equals the `s`-`t` path sum.
pub fn circuit_to_perm_graph(c: &Circuit) -> Result<PermGraphArtifact> {
    let mut a = circuit_to_path_graph(c)?;
    let (s, t) = (a.graph.require(&a.s)?, a.graph.require(&a.t)?);
    a.graph.set_arc(t, s, WeightExpr::one());
    for v in 0..a.graph.n() {
        if v != s && v != t {
            a.graph.set_arc(v, v, WeightExpr::one());
        }
    }
    Ok(a)
}

fn companion(id: &str) -> String {
    format!("{id}'")
}

const CHAIN_HEAD: &str = "h";

/// Hamiltonian variant. Every vertex `c` off `{s, t}` gets a companion `c'`;
/// the chain `h, c1', c2', ...` visits each `c` through `prev -> c -> c'` or
/// skips it through `prev -> c'` when the `s`-`t` path already used it.
/// Closing arcs are `t -> h` and `last' -> s`.
pub fn circuit_to_ham_graph(c: &Circuit) -> Result<PermGraphArtifact> {
    let a = circuit_to_path_graph(c)?;
    let order: Vec<String> =
        a.pd.vertex_order(&a.graph)
            .into_iter()
            .filter(|v| *v != a.s && *v != a.t)
            .collect();
    let mut g = a.graph.clone();
    let (s, t) = (g.require(&a.s)?, g.require(&a.t)?);
    if order.is_empty() {
        g.set_arc(t, s, WeightExpr::one());
        return Ok(PermGraphArtifact {
            graph: g,
            pd: a.pd,
            mode: GraphMode::Ham,
            ..a
        });
    }
    let iv = a.pd.intervals();
    let mut bags: Vec<BTreeSet<String>> = a.pd.bags().to_vec();
    let mut prev = CHAIN_HEAD.to_string();
    let mut prev_bag = 0usize;
    let h = g.add_vertex(CHAIN_HEAD)?;
    bags[0].insert(CHAIN_HEAD.to_string());
    g.set_arc(t, h, WeightExpr::one());
    for v in &order {
        let first = iv[v.as_str()].0;
        for bag in &mut bags[prev_bag..=first] {
            bag.insert(prev.clone());
        }
        let cv = companion(v);
        let (p, x) = (g.require(&prev)?, g.require(v)?);
        let y = g.add_vertex(cv.clone())?;
        bags[first].insert(cv.clone());
        g.set_arc(p, x, WeightExpr::one());
        g.set_arc(x, y, WeightExpr::one());
        g.set_arc(p, y, WeightExpr::one());
        prev = cv;
        prev_bag = first;
    }
    let last = g.require(&prev)?;
    g.set_arc(last, s, WeightExpr::one());
    let pd = PathDecomposition::new(bags);
    validate_path_decomposition(&g, &pd)?;
    Ok(PermGraphArtifact {
        graph: g,
        pd,
        mode: GraphMode::Ham,
        ..a
    })
}

/// Inside-outside graph of the permanent construction with the lifted
/// decomposition.
pub fn circuit_to_matching_graph(c: &Circuit) -> Result<PermGraphArtifact> {
    let a = circuit_to_perm_graph(c)?;
    let graph = io_graph(&a.graph);
    let pd = lift_pd_io(&a.pd);
    Ok(PermGraphArtifact {
        graph,
        pd,
        mode: GraphMode::Matching,
        s: format!("{}+", a.s),
        t: format!("{}-", a.t),
        ..a
    })
}
