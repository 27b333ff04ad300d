//! Seeded random instances: matrices, formulas, algebra terms and graphs of
//! bounded pathwidth.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    eval_mclique, eval_nlc, CliqueNode, CliqueTerm, JoinSpec, LabelSet, MNode, MTerm, NlcNode,
    NlcTerm, NodeId,
};
use crate::circuit::{Circuit, CircuitBuilder, GateId};
use crate::decomposition::PathDecomposition;
use crate::graph::{MatrixView, WeightedDigraph};
use crate::poly::WeightExpr;

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entry pool for random matrices: `0, 1, -1, 2, x, y, z`.
pub fn entry_pool() -> Vec<WeightExpr> {
    vec![
        WeightExpr::int(0),
        WeightExpr::one(),
        WeightExpr::int(-1),
        WeightExpr::int(2),
        WeightExpr::var("x"),
        WeightExpr::var("y"),
        WeightExpr::var("z"),
    ]
}

fn nonzero_weight(r: &mut Rng64) -> WeightExpr {
    match r.gen_range(0..6) {
        0 => WeightExpr::one(),
        1 => WeightExpr::int(-1),
        2 => WeightExpr::int(2),
        n => WeightExpr::var(["x", "y", "z"][n - 3]),
    }
}

pub fn random_matrix(r: &mut Rng64, n: usize) -> MatrixView {
    let pool = entry_pool();
    let rows = (0..n)
        .map(|_| (0..n).map(|_| pool.choose(r).unwrap().clone()).collect())
        .collect();
    MatrixView::from_weights(rows).expect("square by construction")
}

/// A random formula with at most `max_size` gates over `x0..x{vars-1}` and
/// a few small constants.
pub fn random_formula(r: &mut Rng64, max_size: usize, vars: usize) -> Circuit {
    let leaves = r.gen_range(1..=max_size.div_ceil(2).max(1));
    let mut b = CircuitBuilder::new();
    let mut pool: Vec<GateId> = (0..leaves)
        .map(|_| {
            let w = if r.gen_bool(0.8) {
                WeightExpr::var(&format!("x{}", r.gen_range(0..vars.max(1))))
            } else {
                WeightExpr::int([-1, 1, 2, 3][r.gen_range(0..4)])
            };
            b.input(w)
        })
        .collect();
    while pool.len() > 1 {
        let i = r.gen_range(0..pool.len());
        let x = pool.swap_remove(i);
        let j = r.gen_range(0..pool.len());
        let y = pool.swap_remove(j);
        let g = if r.gen_bool(0.5) {
            b.add(x, y)
        } else {
            b.mul(x, y)
        };
        pool.push(g);
    }
    b.finish(pool[0]).expect("a tree is a valid circuit")
}

fn label(i: usize) -> String {
    format!("l{i}")
}

fn vertex(i: usize) -> String {
    format!("v{i}")
}

/// A clique term over labels `l0..l{k-1}` with `n` vertices.
pub fn random_clique_term(r: &mut Rng64, k: usize, n: usize) -> CliqueTerm {
    let mut t = CliqueTerm::new();
    let mut pool: Vec<NodeId> = (0..n)
        .map(|i| {
            let l = label(r.gen_range(0..k));
            t.push(if r.gen_bool(0.2) {
                CliqueNode::VerLoop {
                    label: l,
                    weight: nonzero_weight(r),
                    id: vertex(i),
                }
            } else {
                CliqueNode::Ver {
                    label: l,
                    id: vertex(i),
                }
            })
        })
        .collect();
    t.extend_alphabet((0..k).map(label));
    while pool.len() > 1 {
        let i = r.gen_range(0..pool.len());
        let x = pool.swap_remove(i);
        let j = r.gen_range(0..pool.len());
        let y = pool.swap_remove(j);
        let mut cur = t.push(CliqueNode::Union(x, y));
        for _ in 0..r.gen_range(0..=3) {
            let a = r.gen_range(0..k);
            let b = r.gen_range(0..k);
            cur = if a != b && r.gen_bool(0.7) {
                t.push(CliqueNode::Alpha {
                    a: label(a),
                    b: label(b),
                    weight: nonzero_weight(r),
                    sub: cur,
                })
            } else {
                t.push(CliqueNode::Rename {
                    from: label(a),
                    to: label(b),
                    sub: cur,
                })
            };
        }
        pool.push(cur);
    }
    t
}

/// Every `(a, b)` pair gets arcs with probability 0.6.
fn dense_spec(r: &mut Rng64, k: usize, symmetric: bool) -> JoinSpec {
    let mut spec = JoinSpec::new();
    for a in 0..k {
        for b in 0..k {
            for s in [1, -1] {
                if symmetric && s == -1 {
                    continue;
                }
                if r.gen_bool(0.6) {
                    let w = nonzero_weight(r);
                    if symmetric {
                        spec.insert((label(a), label(b), -1), w.clone());
                    }
                    spec.insert((label(a), label(b), s), w);
                }
            }
        }
    }
    spec
}

fn random_spec(r: &mut Rng64, k: usize, symmetric: bool) -> JoinSpec {
    let mut spec = JoinSpec::new();
    for _ in 0..r.gen_range(0..=k + 1) {
        let (a, b) = (label(r.gen_range(0..k)), label(r.gen_range(0..k)));
        let w = nonzero_weight(r);
        if symmetric {
            spec.insert((a.clone(), b.clone(), 1), w.clone());
            spec.insert((a, b, -1), w);
        } else {
            let s = if r.gen_bool(0.5) { 1 } else { -1 };
            spec.insert((a, b, s), w);
        }
    }
    spec
}

fn random_nlc(r: &mut Rng64, k: usize, n: usize, symmetric: bool, dense: bool) -> NlcTerm {
    let mut t = NlcTerm::new();
    let mut pool: Vec<NodeId> = (0..n)
        .map(|i| {
            let l = label(r.gen_range(0..k));
            t.push(if r.gen_bool(0.2) {
                NlcNode::VerLoop {
                    label: l,
                    weight: nonzero_weight(r),
                    id: vertex(i),
                }
            } else {
                NlcNode::Ver {
                    label: l,
                    id: vertex(i),
                }
            })
        })
        .collect();
    t.extend_alphabet((0..k).map(label));
    while pool.len() > 1 {
        let i = r.gen_range(0..pool.len());
        let x = pool.swap_remove(i);
        let j = r.gen_range(0..pool.len());
        let y = pool.swap_remove(j);
        let spec = if dense {
            dense_spec(r, k, symmetric)
        } else {
            random_spec(r, k, symmetric)
        };
        let mut cur = t.push(NlcNode::Join {
            spec,
            left: x,
            right: y,
        });
        if r.gen_bool(0.5) {
            let mut map = BTreeMap::new();
            for a in 0..k {
                if r.gen_bool(0.4) {
                    map.insert(label(a), label(r.gen_range(0..k)));
                }
            }
            cur = t.push(NlcNode::Relabel { map, sub: cur });
        }
        pool.push(cur);
    }
    t
}

/// An NLC term over `l0..l{k-1}`; arcs may be one-directional.
pub fn random_nlc_term(r: &mut Rng64, k: usize, n: usize) -> NlcTerm {
    random_nlc(r, k, n, false, false)
}

/// An NLC term whose joins add both arc directions with equal weights.
pub fn random_symmetric_nlc_term(r: &mut Rng64, k: usize, n: usize) -> NlcTerm {
    let t = random_nlc(r, k, n, true, false);
    debug_assert!(eval_nlc(&t)
        .map(|e| e.graph.is_symmetric())
        .unwrap_or(false));
    t
}

/// Like [`random_symmetric_nlc_term`], with most label pairs joined.
pub fn random_dense_symmetric_nlc_term(r: &mut Rng64, k: usize, n: usize) -> NlcTerm {
    random_nlc(r, k, n, true, true)
}

fn random_set(r: &mut Rng64, k: usize) -> LabelSet {
    (0..k).filter(|_| r.gen_bool(0.5)).map(label).collect()
}

fn random_set_map(r: &mut Rng64, k: usize) -> BTreeMap<LabelSet, LabelSet> {
    (0..r.gen_range(0..=2))
        .map(|_| (random_set(r, k), random_set(r, k)))
        .collect()
}

/// An m-clique term over `l0..l{k-1}`. Terms whose joins would add two arcs
/// between one pair of vertices are redrawn.
pub fn random_mclique_term(r: &mut Rng64, k: usize, n: usize) -> MTerm {
    random_m(r, k, n, false)
}

/// An m-clique term over singleton label sets whose joins add most arcs.
pub fn random_dense_mclique_term(r: &mut Rng64, k: usize, n: usize) -> MTerm {
    random_m(r, k, n, true)
}

fn singleton(r: &mut Rng64, k: usize) -> LabelSet {
    [label(r.gen_range(0..k))].into()
}

fn singleton_map(r: &mut Rng64, k: usize) -> BTreeMap<LabelSet, LabelSet> {
    let mut map = BTreeMap::new();
    for a in 0..k {
        if r.gen_bool(0.3) {
            map.insert([label(a)].into(), singleton(r, k));
        }
    }
    map
}

fn random_m(r: &mut Rng64, k: usize, n: usize, dense: bool) -> MTerm {
    loop {
        let mut t = MTerm::new();
        let mut pool: Vec<NodeId> = (0..n)
            .map(|i| {
                let labels = if dense {
                    singleton(r, k)
                } else {
                    random_set(r, k)
                };
                t.push(if r.gen_bool(0.2) {
                    MNode::VerLoop {
                        labels,
                        weight: nonzero_weight(r),
                        id: vertex(i),
                    }
                } else {
                    MNode::Ver {
                        labels,
                        id: vertex(i),
                    }
                })
            })
            .collect();
        t.extend_alphabet((0..k).map(label));
        while pool.len() > 1 {
            let i = r.gen_range(0..pool.len());
            let x = pool.swap_remove(i);
            let j = r.gen_range(0..pool.len());
            let y = pool.swap_remove(j);
            let node = if dense {
                MNode::Join {
                    spec: dense_spec(r, k, false),
                    h: singleton_map(r, k),
                    h2: singleton_map(r, k),
                    left: x,
                    right: y,
                }
            } else {
                MNode::Join {
                    spec: random_spec(r, k, false),
                    h: random_set_map(r, k),
                    h2: random_set_map(r, k),
                    left: x,
                    right: y,
                }
            };
            pool.push(t.push(node));
        }
        if eval_mclique(&t).is_ok() {
            return t;
        }
    }
}

/// A directed graph on `v0..v{n-1}` with a path decomposition whose bags
/// hold at most `k + 1` vertices. With `symmetric`, every arc comes with its
/// reverse at equal weight.
pub fn random_pathwidth_graph(
    r: &mut Rng64,
    k: usize,
    n: usize,
    symmetric: bool,
) -> (WeightedDigraph, PathDecomposition) {
    let mut g = if symmetric {
        WeightedDigraph::undirected()
    } else {
        WeightedDigraph::directed()
    };
    let mut bag: Vec<usize> = Vec::new();
    let mut bags: Vec<BTreeSet<String>> = Vec::new();
    for v in 0..n {
        g.add_vertex(vertex(v)).unwrap();
        while bag.len() > k || (!bag.is_empty() && r.gen_bool(0.3)) {
            // mostly forget the oldest vertex
            let i = if r.gen_bool(0.7) {
                0
            } else {
                r.gen_range(0..bag.len())
            };
            bag.remove(i);
        }
        for &u in &bag {
            if r.gen_bool(0.6) {
                g.set_arc(u, v, nonzero_weight(r));
            }
            if !symmetric && r.gen_bool(0.6) {
                g.set_arc(v, u, nonzero_weight(r));
            }
        }
        if r.gen_bool(0.2) {
            g.set_arc(v, v, nonzero_weight(r));
        }
        bag.push(v);
        bags.push(bag.iter().map(|&u| vertex(u)).collect());
    }
    (g, PathDecomposition::new(bags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::eval_clique;
    use crate::circuit::classify_circuit;
    use crate::decomposition::validate_path_decomposition;

    #[test]
    fn generators_are_deterministic_and_valid() {
        let mut a = rng(7);
        let mut b = rng(7);
        assert_eq!(random_matrix(&mut a, 4), random_matrix(&mut b, 4));
        for seed in 0..20 {
            let mut r = rng(seed);
            let f = random_formula(&mut r, 20, 4);
            assert!(f.size() <= 20);
            assert!(classify_circuit(&f).is_formula);
            let t = random_clique_term(&mut r, 3, 6);
            assert_eq!(eval_clique(&t).unwrap().graph.n(), 6);
            assert!(t.label_count() <= 3);
            let s = random_symmetric_nlc_term(&mut r, 3, 6);
            assert!(eval_nlc(&s).unwrap().graph.is_symmetric());
            random_nlc_term(&mut r, 2, 5);
            random_mclique_term(&mut r, 2, 5);
            random_dense_mclique_term(&mut r, 2, 5);
            let d = random_dense_symmetric_nlc_term(&mut r, 2, 5);
            assert!(eval_nlc(&d).unwrap().graph.is_symmetric());
            let (g, pd) = random_pathwidth_graph(&mut r, 2, 9, seed % 2 == 0);
            assert!(validate_path_decomposition(&g, &pd).unwrap() <= 2);
        }
    }
}
