use std::collections::{BTreeMap, BTreeSet};

use super::layered::{Contribution, LayeredDp};
use crate::circuit::Circuit;
use crate::decomposition::{lift_pd_io, validate_path_decomposition, PathDecomposition};
use crate::error::{Error, Result};
use crate::graph::{io_graph, WeightedDigraph};
use crate::poly::WeightExpr;

/// A layered skew circuit from a path decomposition DP, with the width the
/// construction guarantees for the decomposition's maximum bag size.
#[derive(Clone, Debug)]
pub struct PathDpCircuit {
    pub circuit: Circuit,
    pub max_bag: usize,
    pub width_bound: usize,
}

enum Event {
    Forget(usize),
    Introduce(usize),
}

/// Forget and introduce events, one vertex at a time, ending with every
/// vertex forgotten.
fn events(g: &WeightedDigraph, pd: &PathDecomposition) -> Vec<Event> {
    let mut out = Vec::new();
    let empty = BTreeSet::new();
    let mut prev = &empty;
    for bag in pd.bags().iter().chain(std::iter::once(&empty)) {
        for v in prev.difference(bag) {
            out.push(Event::Forget(g.index_of(v).unwrap()));
        }
        for v in bag.difference(prev) {
            out.push(Event::Introduce(g.index_of(v).unwrap()));
        }
        prev = bag;
    }
    out
}

fn width_bound(states: usize, contributions: usize, b: usize) -> usize {
    states
        .saturating_add(contributions)
        .saturating_add(2 * b + 2)
}

fn matching_bound(b: usize) -> usize {
    let states = 1usize.checked_shl(b as u32).unwrap_or(usize::MAX);
    width_bound(states, states.saturating_mul(b), b)
}

fn ham_bound(b: usize) -> usize {
    let states = (1..=b).fold(2usize, |acc, i| acc.saturating_mul(4 * i));
    width_bound(states, states.saturating_mul((b + 1) * (b + 1)), b)
}

/// Sum of perfect matching weights of a symmetric graph, as a layered skew
/// circuit. The state is the set of already matched bag vertices.
pub fn pathwidth_matching_circuit(
    g: &WeightedDigraph,
    pd: &PathDecomposition,
) -> Result<PathDpCircuit> {
    validate_path_decomposition(g, pd)?;
    if !g.is_symmetric() {
        return Err(Error::NotSymmetric(
            "perfect matchings need a symmetric graph".into(),
        ));
    }
    let mut dp: LayeredDp<BTreeSet<usize>> = LayeredDp::new(BTreeSet::new());
    let mut bag: BTreeSet<usize> = BTreeSet::new();
    for ev in events(g, pd) {
        match ev {
            Event::Forget(v) => {
                bag.remove(&v);
                dp.remap(|s| {
                    let mut s = s.clone();
                    s.remove(&v).then_some(s)
                });
            }
            Event::Introduce(v) => {
                let mut cs = Vec::new();
                for s in dp.states() {
                    cs.push(Contribution {
                        to: s.clone(),
                        from: s.clone(),
                        weights: vec![],
                    });
                    for &u in bag.iter().filter(|u| !s.contains(u)) {
                        if let Some(w) = g.arc(u, v) {
                            let mut t = s.clone();
                            t.insert(u);
                            t.insert(v);
                            cs.push(Contribution {
                                to: t,
                                from: s.clone(),
                                weights: vec![w.clone()],
                            });
                        }
                    }
                }
                dp.step(cs);
                bag.insert(v);
            }
        }
    }
    Ok(PathDpCircuit {
        circuit: dp.finish(&BTreeSet::new())?,
        max_bag: pd.max_bag(),
        width_bound: matching_bound(pd.max_bag()),
    })
}

/// Partial path cover restricted to the current bag. Vertices leave the bag
/// only once both their in- and out-arc are chosen, so every open path has
/// both endpoints in the bag.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
struct Cover {
    /// `(has in-arc, has out-arc)` per bag vertex
    deg: BTreeMap<usize, (bool, bool)>,
    /// last vertex of each open path -> its first vertex
    start_of: BTreeMap<usize, usize>,
    closed: bool,
}

impl Cover {
    fn add_arc(&self, x: usize, y: usize) -> Option<Cover> {
        let (dx, dy) = (self.deg[&x], self.deg[&y]);
        if dx.1 || dy.0 || self.closed {
            return None;
        }
        let mut c = self.clone();
        let head = *c.start_of.iter().find(|(_, &s)| s == y)?.0;
        let first = c.start_of.remove(&x)?;
        if head == x {
            // only the last open path may close, giving the hamiltonian cycle
            if !c.start_of.is_empty() {
                return None;
            }
            c.closed = true;
        } else {
            c.start_of.insert(head, first);
        }
        c.deg.get_mut(&x).unwrap().1 = true;
        c.deg.get_mut(&y).unwrap().0 = true;
        Some(c)
    }
}

/// Hamiltonian polynomial as a layered skew circuit. Cycles may only close
/// when they would cover every vertex seen so far; a closed cover dies as
/// soon as another vertex is introduced.
pub fn pathwidth_ham_circuit(g: &WeightedDigraph, pd: &PathDecomposition) -> Result<PathDpCircuit> {
    validate_path_decomposition(g, pd)?;
    let max_bag = pd.max_bag();
    if g.n() == 1 {
        let w = g.arc(0, 0).cloned().unwrap_or(WeightExpr::int(0));
        return Ok(PathDpCircuit {
            circuit: Circuit::input(w),
            max_bag,
            width_bound: ham_bound(max_bag),
        });
    }
    let mut dp: LayeredDp<Cover> = LayeredDp::new(Cover::default());
    let mut bag: BTreeSet<usize> = BTreeSet::new();
    for ev in events(g, pd) {
        match ev {
            Event::Forget(v) => {
                bag.remove(&v);
                dp.remap(|c| {
                    if c.deg[&v] != (true, true) {
                        return None;
                    }
                    let mut c = c.clone();
                    c.deg.remove(&v);
                    Some(c)
                });
            }
            Event::Introduce(v) => {
                let ins: Vec<(usize, &WeightExpr)> = bag
                    .iter()
                    .filter_map(|&u| g.arc(u, v).map(|w| (u, w)))
                    .collect();
                let outs: Vec<(usize, &WeightExpr)> = bag
                    .iter()
                    .filter_map(|&u| g.arc(v, u).map(|w| (u, w)))
                    .collect();
                let mut cs = Vec::new();
                for c in dp.states() {
                    if c.closed {
                        continue;
                    }
                    let mut base = c.clone();
                    base.deg.insert(v, (false, false));
                    base.start_of.insert(v, v);
                    let in_opts = std::iter::once(None).chain(ins.iter().map(Some));
                    for i in in_opts {
                        let (after_in, mut ws) = match i {
                            None => (base.clone(), vec![]),
                            Some(&(u, w)) => match base.add_arc(u, v) {
                                Some(n) => (n, vec![w.clone()]),
                                None => continue,
                            },
                        };
                        cs.push(Contribution {
                            to: after_in.clone(),
                            from: c.clone(),
                            weights: ws.clone(),
                        });
                        for &(u, w) in &outs {
                            if let Some(n) = after_in.add_arc(v, u) {
                                ws.push(w.clone());
                                cs.push(Contribution {
                                    to: n,
                                    from: c.clone(),
                                    weights: ws.clone(),
                                });
                                ws.pop();
                            }
                        }
                    }
                }
                dp.step(cs);
                bag.insert(v);
            }
        }
    }
    let done = Cover {
        closed: true,
        ..Cover::default()
    };
    Ok(PathDpCircuit {
        circuit: dp.finish(&done)?,
        max_bag,
        width_bound: ham_bound(max_bag),
    })
}

/// Permanent through perfect matchings of the inside-outside graph with the
/// lifted decomposition.
pub fn pathwidth_perm_circuit(
    g: &WeightedDigraph,
    pd: &PathDecomposition,
) -> Result<PathDpCircuit> {
    validate_path_decomposition(g, pd)?;
    pathwidth_matching_circuit(&io_graph(g), &lift_pd_io(pd))
}
