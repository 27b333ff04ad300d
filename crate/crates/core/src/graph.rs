//! Weighted directed graphs with loops, matrix views and the inside-outside
//! split.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::{is_identifier, parse_rational, Rational, WeightExpr};

/// Simple weighted digraph over string vertex ids. Undirected graphs keep both
/// orientations of every edge and set `directed` to false.
///
/// Equality compares the vertex set and the id-keyed arcs; vertex order and
/// the directed flag are ignored.
#[derive(Clone, Debug, Default)]
pub struct WeightedDigraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    arcs: BTreeMap<(usize, usize), WeightExpr>,
    directed: bool,
}

impl PartialEq for WeightedDigraph {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for WeightedDigraph {}

type Canonical<'a> = (
    BTreeSet<&'a str>,
    BTreeMap<(&'a str, &'a str), &'a WeightExpr>,
);

impl WeightedDigraph {
    pub fn directed() -> Self {
        WeightedDigraph {
            directed: true,
            ..Default::default()
        }
    }

    pub fn undirected() -> Self {
        WeightedDigraph {
            directed: false,
            ..Default::default()
        }
    }

    /// Builds a directed graph from ids and `(tail, head, weight)` triples.
    pub fn from_arcs<S: AsRef<str>>(ids: &[S], arcs: &[(S, S, WeightExpr)]) -> Result<Self> {
        let mut g = Self::directed();
        for id in ids {
            g.add_vertex(id.as_ref())?;
        }
        for (u, v, w) in arcs {
            g.set_arc_by_id(u.as_ref(), v.as_ref(), w.clone())?;
        }
        Ok(g)
    }

    fn canonical(&self) -> Canonical<'_> {
        let ids = self.ids.iter().map(String::as_str).collect();
        let arcs = self
            .arcs
            .iter()
            .map(|(&(u, v), w)| ((self.ids[u].as_str(), self.ids[v].as_str()), w))
            .collect();
        (ids, arcs)
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn add_vertex(&mut self, id: impl Into<String>) -> Result<usize> {
        let id = id.into();
        if self.index.contains_key(&id) {
            return Err(Error::DuplicateVertex(id));
        }
        let v = self.ids.len();
        self.index.insert(id.clone(), v);
        self.ids.push(id);
        Ok(v)
    }

    /// Sets or, for a zero weight, removes the arc `u -> v` (both orientations
    /// when undirected).
    pub fn set_arc(&mut self, u: usize, v: usize, w: WeightExpr) {
        if w.is_zero() {
            self.arcs.remove(&(u, v));
            if !self.directed {
                self.arcs.remove(&(v, u));
            }
        } else {
            if !self.directed {
                self.arcs.insert((v, u), w.clone());
            }
            self.arcs.insert((u, v), w);
        }
    }

    pub fn set_arc_by_id(&mut self, u: &str, v: &str, w: WeightExpr) -> Result<()> {
        let (a, b) = (self.require(u)?, self.require(v)?);
        self.set_arc(a, b, w);
        Ok(())
    }

    /// Adds a constant to a constant-weighted (or absent) arc.
    pub fn accumulate_arc(&mut self, u: usize, v: usize, c: &Rational) -> Result<()> {
        let sum = match self.arcs.get(&(u, v)) {
            None => c.clone(),
            Some(WeightExpr::Const(k)) => k + c,
            Some(WeightExpr::Var(x)) => {
                return Err(Error::MalformedCircuit(format!(
                    "cannot merge parallel arcs {} -> {} carrying `{x}`",
                    self.ids[u], self.ids[v]
                )))
            }
        };
        self.set_arc(u, v, WeightExpr::Const(sum));
        Ok(())
    }

    pub fn remove_arc(&mut self, u: usize, v: usize) {
        self.set_arc(u, v, WeightExpr::Const(Rational::zero()));
    }

    pub fn arc(&self, u: usize, v: usize) -> Option<&WeightExpr> {
        self.arcs.get(&(u, v))
    }

    pub fn arc_by_id(&self, u: &str, v: &str) -> Option<&WeightExpr> {
        self.arc(self.index_of(u)?, self.index_of(v)?)
    }

    pub fn arcs(&self) -> impl Iterator<Item = ((usize, usize), &WeightExpr)> {
        self.arcs.iter().map(|(&k, w)| (k, w))
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn out_neighbours(&self, u: usize) -> impl Iterator<Item = (usize, &WeightExpr)> {
        self.arcs
            .range((u, 0)..(u + 1, 0))
            .map(|(&(_, v), w)| (v, w))
    }

    pub fn is_symmetric(&self) -> bool {
        self.arcs
            .iter()
            .all(|(&(u, v), w)| self.arcs.get(&(v, u)) == Some(w))
    }

    /// Marks a symmetric directed graph as undirected.
    pub fn into_undirected(mut self) -> Result<Self> {
        if !self.is_symmetric() {
            return Err(Error::NotSymmetric("arc set is not symmetric".into()));
        }
        self.directed = false;
        Ok(self)
    }

    pub fn has_loops(&self) -> bool {
        self.arcs.keys().any(|&(u, v)| u == v)
    }

    /// The same graph with its vertices listed in `order` (a permutation of
    /// the ids).
    pub fn with_vertex_order(&self, order: &[String]) -> Result<Self> {
        if order.len() != self.n() {
            return Err(Error::UnknownVertex(
                "vertex order is not a permutation".into(),
            ));
        }
        let mut g = WeightedDigraph {
            directed: self.directed,
            ..Default::default()
        };
        for id in order {
            self.require(id)?;
            g.add_vertex(id.clone())?;
        }
        for (&(u, v), w) in &self.arcs {
            let (a, b) = (g.index[&self.ids[u]], g.index[&self.ids[v]]);
            g.arcs.insert((a, b), w.clone());
        }
        Ok(g)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        let (kind, edge) = if self.directed {
            ("digraph", "->")
        } else {
            ("graph", "--")
        };
        let _ = writeln!(s, "{kind} G {{");
        for id in &self.ids {
            let _ = writeln!(s, "  \"{id}\";");
        }
        for (&(u, v), w) in &self.arcs {
            if !self.directed && u > v {
                continue;
            }
            let _ = writeln!(
                s,
                "  \"{}\" {edge} \"{}\" [label=\"{w}\"];",
                self.ids[u], self.ids[v]
            );
        }
        s.push_str("}\n");
        s
    }
}

/// Square matrix whose entries are weights; `None` is a zero entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixView {
    entries: Vec<Vec<Option<WeightExpr>>>,
}

impl MatrixView {
    pub fn new(entries: Vec<Vec<Option<WeightExpr>>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::NonSquare("matrix has dimension 0".into()));
        }
        if let Some(i) = entries.iter().position(|r| r.len() != n) {
            return Err(Error::NonSquare(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                entries[i].len()
            )));
        }
        let entries = entries
            .into_iter()
            .map(|r| r.into_iter().map(|e| e.filter(|w| !w.is_zero())).collect())
            .collect();
        Ok(MatrixView { entries })
    }

    pub fn from_weights(rows: Vec<Vec<WeightExpr>>) -> Result<Self> {
        Self::new(
            rows.into_iter()
                .map(|r| r.into_iter().map(Some).collect())
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&WeightExpr> {
        self.entries[i][j].as_ref()
    }

    pub fn rows(&self) -> &[Vec<Option<WeightExpr>>] {
        &self.entries
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| self.entries[i][j] == self.entries[j][i]))
    }
}

/// Vertex ids of a matrix graph are `1..=n`.
pub fn matrix_to_graph(m: &MatrixView) -> WeightedDigraph {
    let mut g = WeightedDigraph::directed();
    for i in 0..m.n() {
        g.add_vertex((i + 1).to_string()).expect("fresh ids");
    }
    for i in 0..m.n() {
        for j in 0..m.n() {
            if let Some(w) = m.entry(i, j) {
                g.set_arc(i, j, w.clone());
            }
        }
    }
    g
}

/// Rows and columns follow the graph's vertex order.
pub fn graph_to_matrix(g: &WeightedDigraph) -> Result<MatrixView> {
    let n = g.n();
    let mut entries = vec![vec![None; n]; n];
    for ((u, v), w) in g.arcs() {
        entries[u][v] = Some(w.clone());
    }
    MatrixView::new(entries)
}

/// A symmetric matrix viewed as an undirected graph.
pub fn matrix_to_undirected(m: &MatrixView) -> Result<WeightedDigraph> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric(
            "matrix differs from its transpose".into(),
        ));
    }
    matrix_to_graph(m).into_undirected()
}

pub fn io_plus(id: &str) -> String {
    format!("{id}+")
}

pub fn io_minus(id: &str) -> String {
    format!("{id}-")
}

/// Splits each vertex `u` into `u+` and `u-`; an arc `u -> v` becomes the
/// edge `u+ -- v-` and a loop on `u` becomes `u+ -- u-`.
pub fn io_graph(g: &WeightedDigraph) -> WeightedDigraph {
    let mut h = WeightedDigraph::undirected();
    for id in g.ids() {
        h.add_vertex(io_plus(id)).expect("fresh ids");
        h.add_vertex(io_minus(id)).expect("fresh ids");
    }
    for ((u, v), w) in g.arcs() {
        h.set_arc(2 * u, 2 * v + 1, w.clone());
    }
    h
}

pub fn unloop(g: &WeightedDigraph) -> WeightedDigraph {
    let mut h = g.clone();
    h.arcs.retain(|&(u, v), _| u != v);
    h
}

/// Proper 2-colouring of the underlying undirected graph, if one exists.
pub fn two_colouring(g: &WeightedDigraph) -> Option<Vec<bool>> {
    let n = g.n();
    let mut adj = vec![Vec::new(); n];
    for ((u, v), _) in g.arcs() {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut colour: Vec<Option<bool>> = vec![None; n];
    for s in 0..n {
        if colour[s].is_some() {
            continue;
        }
        colour[s] = Some(false);
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            let cu = colour[u].unwrap();
            for &v in &adj[u] {
                match colour[v] {
                    None => {
                        colour[v] = Some(!cu);
                        stack.push(v);
                    }
                    Some(cv) if cv == cu => return None,
                    _ => {}
                }
            }
        }
    }
    Some(colour.into_iter().map(Option::unwrap).collect())
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        what: "matrix",
        line,
        msg: msg.into(),
    }
}

/// Parses `n` followed by `n` rows of integers, rationals or identifiers.
pub fn parse_matrix(src: &str) -> Result<MatrixView> {
    let mut lines = src
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (first, header) = lines.next().ok_or_else(|| parse_err(0, "empty input"))?;
    let n: usize = header
        .parse()
        .map_err(|_| parse_err(first, format!("expected dimension, found `{header}`")))?;
    if n == 0 {
        return Err(parse_err(first, "dimension must be positive"));
    }
    let mut rows = Vec::with_capacity(n);
    for (line_no, line) in lines {
        if rows.len() == n {
            return Err(parse_err(line_no, "more rows than the declared dimension"));
        }
        let mut row = Vec::new();
        for tok in line.split_whitespace() {
            let w = if let Some(c) = parse_rational(tok) {
                WeightExpr::Const(c)
            } else if is_identifier(tok) {
                WeightExpr::var(tok)
            } else {
                return Err(parse_err(line_no, format!("bad entry `{tok}`")));
            };
            row.push(Some(w));
        }
        if row.len() != n {
            return Err(Error::NonSquare(format!(
                "line {line_no} has {} entries, expected {n}",
                row.len()
            )));
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::NonSquare(format!(
            "{} rows, expected {n}",
            rows.len()
        )));
    }
    MatrixView::new(rows)
}

pub fn write_matrix(m: &MatrixView) -> String {
    let mut s = format!("{}\n", m.n());
    for row in m.rows() {
        let cells: Vec<String> = row
            .iter()
            .map(|e| {
                e.as_ref()
                    .map_or_else(|| "0".to_string(), |w| w.to_string())
            })
            .collect();
        s.push_str(&cells.join(" "));
        s.push('\n');
    }
    s
}
