use std::collections::{BTreeMap, HashMap};

use crate::algebra::{
    clique_term_io, eval_mclique, eval_nlc, translate_clique_to_nlc, translate_mclique_to_clique,
    JoinSpec, Label, LabelSet, MNode, MTerm, NlcNode, NlcTerm,
};
use crate::circuit::{Circuit, CircuitBuilder, GateId};
use crate::error::{Error, Result};
use crate::poly::{rational, Rational, WeightExpr};

/// A circuit from a clique-width style DP, with the size data the
/// polynomial bound is about.
#[derive(Clone, Debug)]
pub struct CwDpCircuit {
    pub circuit: Circuit,
    pub vertices: usize,
    pub labels: usize,
    /// Largest number of distinct descriptions kept at one term node.
    pub max_descriptions: usize,
}

/// Gate emission with shared inputs and powers.
#[derive(Default)]
struct Emitter {
    b: CircuitBuilder,
    inputs: HashMap<WeightExpr, GateId>,
    powers: HashMap<(WeightExpr, usize), GateId>,
}

impl Emitter {
    fn input(&mut self, w: WeightExpr) -> GateId {
        let b = &mut self.b;
        *self.inputs.entry(w.clone()).or_insert_with(|| b.input(w))
    }

    fn constant(&mut self, c: Rational) -> GateId {
        self.input(WeightExpr::Const(c))
    }

    fn power(&mut self, w: &WeightExpr, p: usize) -> GateId {
        if p == 1 {
            return self.input(w.clone());
        }
        if let Some(&g) = self.powers.get(&(w.clone(), p)) {
            return g;
        }
        let lower = self.power(w, p - 1);
        let x = self.input(w.clone());
        let g = self.b.mul(lower, x);
        self.powers.insert((w.clone(), p), g);
        g
    }

    /// `g * c * w^p`, skipping unit factors.
    fn scale(&mut self, g: GateId, c: Rational, w: &WeightExpr, p: usize) -> GateId {
        let mut g = g;
        if c != rational(1) {
            let k = self.constant(c);
            g = self.b.mul(g, k);
        }
        if p > 0 && !w.is_one() {
            let x = self.power(w, p);
            g = self.b.mul(g, x);
        }
        g
    }

    fn finish(self, out: Option<GateId>) -> Result<Circuit> {
        match out {
            Some(g) => self.b.finish(g),
            None => Ok(Circuit::input(WeightExpr::int(0))),
        }
    }
}

/// Adds every gate list into a single gate per key.
fn collapse<K: Ord>(em: &mut Emitter, groups: BTreeMap<K, Vec<GateId>>) -> BTreeMap<K, GateId> {
    groups
        .into_iter()
        .map(|(k, gs)| {
            let g = em.b.sum(&gs);
            (k, g)
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> Rational {
    (0..k).fold(rational(1), |acc, i| {
        acc * rational((n - i) as i64) / rational((i + 1) as i64)
    })
}

fn factorial(n: usize) -> Rational {
    (1..=n).fold(rational(1), |acc, i| acc * rational(i as i64))
}

/// The single non-zero entry for arcs between a left label in `a` and a right
/// label in `b` in direction `sign`.
fn join_weight<'s>(
    spec: &'s JoinSpec,
    a: &[&Label],
    b: &[&Label],
    sign: i8,
) -> Result<Option<&'s WeightExpr>> {
    let mut found = None;
    for x in a {
        for y in b {
            if let Some(w) = spec.get(&((*x).clone(), (*y).clone(), sign)) {
                if w.is_zero() {
                    continue;
                }
                if found.is_some() {
                    return Err(Error::MalformedTerm(format!(
                        "join adds two arcs between label sets containing `{x}` and `{y}`"
                    )));
                }
                found = Some(w);
            }
        }
    }
    Ok(found)
}

/// Sum of perfect matching weights of the symmetric graph an NLC term
/// denotes. A description counts the unmatched vertices per label.
pub fn nlc_matching_circuit(t: &NlcTerm) -> Result<CwDpCircuit> {
    let ev = eval_nlc(t)?;
    if !ev.graph.is_symmetric() {
        return Err(Error::NotSymmetric(
            "the term's graph has an unmatched arc".into(),
        ));
    }
    let labels: Vec<&Label> = t.alphabet().iter().collect();
    let index: BTreeMap<&Label, usize> = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    let k = labels.len();
    let mut em = Emitter::default();
    let mut max_descriptions = 0;
    type Desc = Vec<usize>;
    let mut res: Vec<Option<BTreeMap<Desc, GateId>>> = vec![None; t.len()];
    for (i, node) in t.nodes().iter().enumerate() {
        let out =
            match node {
                NlcNode::Ver { label, .. } | NlcNode::VerLoop { label, .. } => {
                    let mut d = vec![0; k];
                    d[index[label]] = 1;
                    let one = em.input(WeightExpr::one());
                    BTreeMap::from([(d, one)])
                }
                NlcNode::Relabel { map, sub } => {
                    let mut groups: BTreeMap<Desc, Vec<GateId>> = BTreeMap::new();
                    for (d, g) in res[*sub].take().unwrap() {
                        let mut e = vec![0; k];
                        for (j, &c) in d.iter().enumerate() {
                            let to = map.get(labels[j]).unwrap_or(labels[j]);
                            e[index[to]] += c;
                        }
                        groups.entry(e).or_default().push(g);
                    }
                    collapse(&mut em, groups)
                }
                NlcNode::Join { spec, left, right } => {
                    let l = res[*left].take().unwrap();
                    let r = res[*right].take().unwrap();
                    let mut frontier: BTreeMap<(Desc, Desc), GateId> = BTreeMap::new();
                    for (dl, gl) in &l {
                        for (dr, gr) in &r {
                            let g = em.b.mul(*gl, *gr);
                            frontier.insert((dl.clone(), dr.clone()), g);
                        }
                    }
                    for a in 0..k {
                        for b in 0..k {
                            let w = join_weight(spec, &[labels[a]], &[labels[b]], 1)?
                                .or(join_weight(spec, &[labels[a]], &[labels[b]], -1)?);
                            let Some(w) = w else { continue };
                            let mut groups: BTreeMap<(Desc, Desc), Vec<GateId>> = BTreeMap::new();
                            for ((dl, dr), g) in frontier {
                                for p in 0..=dl[a].min(dr[b]) {
                                    let c = binomial(dl[a], p) * binomial(dr[b], p) * factorial(p);
                                    let h = em.scale(g, c, w, p);
                                    let (mut el, mut er) = (dl.clone(), dr.clone());
                                    el[a] -= p;
                                    er[b] -= p;
                                    groups.entry((el, er)).or_default().push(h);
                                }
                            }
                            frontier = collapse(&mut em, groups);
                        }
                    }
                    let mut groups: BTreeMap<Desc, Vec<GateId>> = BTreeMap::new();
                    for ((dl, dr), g) in frontier {
                        let d = dl.iter().zip(&dr).map(|(x, y)| x + y).collect();
                        groups.entry(d).or_default().push(g);
                    }
                    collapse(&mut em, groups)
                }
            };
        max_descriptions = max_descriptions.max(out.len());
        res[i] = Some(out);
    }
    let root = res[t.root()].take().unwrap();
    let out = root.get(&vec![0; k]).copied();
    Ok(CwDpCircuit {
        circuit: em.finish(out)?,
        vertices: ev.graph.n(),
        labels: k,
        max_descriptions,
    })
}

const LEFT: u8 = 0;
const RIGHT: u8 = 1;

/// `(start side, start label set, end side, end label set)` of a path while
/// a join adds arcs; label sets are interned.
type JoinType = (u8, usize, u8, usize);

#[derive(Default)]
struct Interner {
    sets: Vec<LabelSet>,
    ids: BTreeMap<LabelSet, usize>,
}

impl Interner {
    fn id(&mut self, s: &LabelSet) -> usize {
        if let Some(&i) = self.ids.get(s) {
            return i;
        }
        self.sets.push(s.clone());
        self.ids.insert(s.clone(), self.sets.len() - 1);
        self.sets.len() - 1
    }
}

fn arc_weight<'s>(
    spec: &'s JoinSpec,
    sets: &Interner,
    from: (u8, usize),
    to: (u8, usize),
) -> Result<Option<&'s WeightExpr>> {
    if from.0 == to.0 {
        return Ok(None);
    }
    let labels = |i: usize| sets.sets[i].iter().collect::<Vec<_>>();
    if from.0 == LEFT {
        join_weight(spec, &labels(from.1), &labels(to.1), 1)
    } else {
        join_weight(spec, &labels(to.1), &labels(from.1), -1)
    }
}

/// Hamiltonian polynomial of the graph an m-clique term denotes. A
/// description counts the paths of a partial path cover by the label sets of
/// their first and last vertex; a single vertex is a path of length zero.
/// Joins add arcs one at a time, dividing by the number of arcs added so far
/// so that each arc set is counted once. Only the root may close a cycle.
pub fn mclique_ham_circuit(t: &MTerm) -> Result<CwDpCircuit> {
    let ev = eval_mclique(t)?;
    let n = ev.graph.n();
    let labels = t.label_count();
    if n == 1 {
        let w = ev.graph.arc(0, 0).cloned().unwrap_or(WeightExpr::int(0));
        return Ok(CwDpCircuit {
            circuit: Circuit::input(w),
            vertices: 1,
            labels,
            max_descriptions: 1,
        });
    }
    let mut em = Emitter::default();
    let mut sets = Interner::default();
    let mut max_descriptions = 0;
    type Desc = BTreeMap<(usize, usize), usize>;
    type JDesc = BTreeMap<JoinType, usize>;
    let mut res: Vec<Option<BTreeMap<Desc, GateId>>> = vec![None; t.len()];
    let root = t.root();
    let mut closed: Vec<GateId> = Vec::new();
    for (i, node) in t.nodes().iter().enumerate() {
        let out = match node {
            MNode::Ver { labels, .. } | MNode::VerLoop { labels, .. } => {
                let s = sets.id(labels);
                let one = em.input(WeightExpr::one());
                BTreeMap::from([(Desc::from([((s, s), 1)]), one)])
            }
            MNode::Join {
                spec,
                h,
                h2,
                left,
                right,
            } => {
                let l = res[*left].take().unwrap();
                let r = res[*right].take().unwrap();
                let mut frontier: BTreeMap<JDesc, GateId> = BTreeMap::new();
                for (dl, gl) in &l {
                    for (dr, gr) in &r {
                        let mut d = JDesc::new();
                        for (&(s, e), &c) in dl {
                            *d.entry((LEFT, s, LEFT, e)).or_default() += c;
                        }
                        for (&(s, e), &c) in dr {
                            *d.entry((RIGHT, s, RIGHT, e)).or_default() += c;
                        }
                        let g = em.b.mul(*gl, *gr);
                        frontier.insert(d, g);
                    }
                }
                let mut done: Vec<(JDesc, GateId)> = Vec::new();
                let mut step = 0usize;
                while !frontier.is_empty() {
                    step += 1;
                    let inv = Rational::new(1.into(), (step as i64).into());
                    let mut groups: BTreeMap<JDesc, Vec<GateId>> = BTreeMap::new();
                    for (d, g) in &frontier {
                        let total: usize = d.values().sum();
                        for (&t1, &c1) in d {
                            for (&t2, &c2) in d {
                                let Some(w) = arc_weight(spec, &sets, (t1.2, t1.3), (t2.0, t2.1))?
                                else {
                                    continue;
                                };
                                if t1 == t2 && i == root && total == 1 {
                                    let h = em.scale(*g, inv.clone(), w, 1);
                                    closed.push(h);
                                    continue;
                                }
                                let ways = if t1 == t2 { c1 * (c1 - 1) } else { c1 * c2 };
                                if ways == 0 {
                                    continue;
                                }
                                let mut e = d.clone();
                                for ty in [t1, t2] {
                                    let c = e.get_mut(&ty).unwrap();
                                    *c -= 1;
                                    if *c == 0 {
                                        e.remove(&ty);
                                    }
                                }
                                *e.entry((t1.0, t1.1, t2.2, t2.3)).or_default() += 1;
                                let c = rational(ways as i64) * &inv;
                                let h = em.scale(*g, c, w, 1);
                                groups.entry(e).or_default().push(h);
                            }
                        }
                    }
                    let next = collapse(&mut em, groups);
                    done.extend(std::mem::replace(&mut frontier, next));
                }
                if i == root {
                    BTreeMap::new()
                } else {
                    let mut relabel = |side: u8, s: usize| {
                        let set = &sets.sets[s];
                        let map = if side == LEFT { h } else { h2 };
                        let to = map.get(set).cloned().unwrap_or_else(|| set.clone());
                        sets.id(&to)
                    };
                    let mut groups: BTreeMap<Desc, Vec<GateId>> = BTreeMap::new();
                    for (d, g) in done {
                        let mut e = Desc::new();
                        for ((ss, s, es, en), c) in d {
                            let key = (relabel(ss, s), relabel(es, en));
                            *e.entry(key).or_default() += c;
                        }
                        groups.entry(e).or_default().push(g);
                    }
                    collapse(&mut em, groups)
                }
            }
        };
        max_descriptions = max_descriptions.max(out.len());
        res[i] = Some(out);
    }
    let out = (!closed.is_empty()).then(|| em.b.sum(&closed));
    Ok(CwDpCircuit {
        circuit: em.finish(out)?,
        vertices: n,
        labels,
        max_descriptions,
    })
}

/// Permanent of the graph an m-clique term denotes, through perfect
/// matchings of its inside-outside graph.
pub fn mclique_perm_circuit(t: &MTerm) -> Result<CwDpCircuit> {
    let clique = translate_mclique_to_clique(t)?;
    let io = clique_term_io(&clique)?;
    let nlc = translate_clique_to_nlc(&io)?;
    nlc_matching_circuit(&nlc)
}
