use std::collections::BTreeMap;

use super::{CliqueNode, CliqueTerm, JoinSpec, Label, LabelSet, MNode, MTerm, NlcNode, NlcTerm};
use crate::error::{Error, Result};
use crate::graph::WeightedDigraph;
use crate::poly::WeightExpr;

/// The graph a term denotes, with the final label (or label set) of every
/// vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluated<L> {
    pub graph: WeightedDigraph,
    pub labels: BTreeMap<String, L>,
}

type Classes<L> = BTreeMap<L, Vec<usize>>;

fn merge<L: Ord>(mut a: Classes<L>, b: Classes<L>) -> Classes<L> {
    for (l, mut vs) in b {
        a.entry(l).or_default().append(&mut vs);
    }
    a
}

fn leaf<L: Ord + Clone>(
    g: &mut WeightedDigraph,
    id: &str,
    label: &L,
    weight: Option<&WeightExpr>,
) -> Result<Classes<L>> {
    let v = g
        .add_vertex(id)
        .map_err(|_| Error::MalformedTerm(format!("vertex id `{id}` used twice")))?;
    if let Some(w) = weight {
        g.set_arc(v, v, w.clone());
    }
    Ok(BTreeMap::from([(label.clone(), vec![v])]))
}

fn finish<L: Ord + Clone>(g: WeightedDigraph, classes: Classes<L>) -> Evaluated<L> {
    let mut labels = BTreeMap::new();
    for (l, vs) in classes {
        for v in vs {
            labels.insert(g.id(v).to_string(), l.clone());
        }
    }
    Evaluated { graph: g, labels }
}

fn add_if_absent(g: &mut WeightedDigraph, x: usize, y: usize, w: &WeightExpr) {
    if g.arc(x, y).is_none() {
        g.set_arc(x, y, w.clone());
    }
}

pub fn eval_clique(t: &CliqueTerm) -> Result<Evaluated<Label>> {
    t.validate_clique()?;
    let mut g = WeightedDigraph::directed();
    let mut res: Vec<Option<Classes<Label>>> = vec![None; t.len()];
    for (i, node) in t.nodes().iter().enumerate() {
        let c = match node {
            CliqueNode::Ver { label, id } => leaf(&mut g, id, label, None)?,
            CliqueNode::VerLoop { label, weight, id } => leaf(&mut g, id, label, Some(weight))?,
            CliqueNode::Rename { from, to, sub } => {
                let mut c = res[*sub].take().unwrap();
                if from != to {
                    if let Some(mut vs) = c.remove(from) {
                        c.entry(to.clone()).or_default().append(&mut vs);
                    }
                }
                c
            }
            CliqueNode::Alpha { a, b, weight, sub } => {
                let c = res[*sub].take().unwrap();
                if !weight.is_zero() {
                    if let (Some(xs), Some(ys)) = (c.get(a), c.get(b)) {
                        for &x in xs {
                            for &y in ys {
                                add_if_absent(&mut g, x, y, weight);
                            }
                        }
                    }
                }
                c
            }
            CliqueNode::Union(l, r) => {
                let a = res[*l].take().unwrap();
                let b = res[*r].take().unwrap();
                merge(a, b)
            }
        };
        res[i] = Some(c);
    }
    let root = res[t.root()].take().unwrap();
    Ok(finish(g, root))
}

fn join_arcs<L: Ord>(
    g: &mut WeightedDigraph,
    left: &Classes<L>,
    right: &Classes<L>,
    applies: impl Fn(&L, &L) -> Vec<(i8, WeightExpr)>,
) -> Result<()> {
    for (la, xs) in left {
        for (lb, ys) in right {
            let entries = applies(la, lb);
            let mut fwd = 0;
            let mut bwd = 0;
            for (sign, _) in &entries {
                if *sign > 0 {
                    fwd += 1;
                } else {
                    bwd += 1;
                }
            }
            if fwd > 1 || bwd > 1 {
                let (x, y) = (xs[0], ys[0]);
                return Err(Error::MalformedTerm(format!(
                    "join adds two arcs between `{}` and `{}`",
                    g.id(x),
                    g.id(y)
                )));
            }
            for (sign, w) in entries {
                for &x in xs {
                    for &y in ys {
                        if sign > 0 {
                            add_if_absent(g, x, y, &w);
                        } else {
                            add_if_absent(g, y, x, &w);
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn spec_entries(spec: &JoinSpec, a: &Label, b: &Label) -> Vec<(i8, WeightExpr)> {
    [1i8, -1]
        .into_iter()
        .filter_map(|s| {
            spec.get(&(a.clone(), b.clone(), s))
                .filter(|w| !w.is_zero())
                .map(|w| (s, w.clone()))
        })
        .collect()
}

pub fn eval_nlc(t: &NlcTerm) -> Result<Evaluated<Label>> {
    t.validate()?;
    let mut g = WeightedDigraph::directed();
    let mut res: Vec<Option<Classes<Label>>> = vec![None; t.len()];
    for (i, node) in t.nodes().iter().enumerate() {
        let c = match node {
            NlcNode::Ver { label, id } => leaf(&mut g, id, label, None)?,
            NlcNode::VerLoop { label, weight, id } => leaf(&mut g, id, label, Some(weight))?,
            NlcNode::Relabel { map, sub } => {
                let c = res[*sub].take().unwrap();
                let mut out: Classes<Label> = BTreeMap::new();
                for (l, mut vs) in c {
                    let to = map.get(&l).cloned().unwrap_or(l);
                    out.entry(to).or_default().append(&mut vs);
                }
                out
            }
            NlcNode::Join { spec, left, right } => {
                let a = res[*left].take().unwrap();
                let b = res[*right].take().unwrap();
                join_arcs(&mut g, &a, &b, |x, y| spec_entries(spec, x, y))?;
                merge(a, b)
            }
        };
        res[i] = Some(c);
    }
    let root = res[t.root()].take().unwrap();
    Ok(finish(g, root))
}

fn apply_set_map(c: Classes<LabelSet>, h: &BTreeMap<LabelSet, LabelSet>) -> Classes<LabelSet> {
    let mut out: Classes<LabelSet> = BTreeMap::new();
    for (s, mut vs) in c {
        let to = h.get(&s).cloned().unwrap_or(s);
        out.entry(to).or_default().append(&mut vs);
    }
    out
}

pub fn eval_mclique(t: &MTerm) -> Result<Evaluated<LabelSet>> {
    t.validate()?;
    let mut g = WeightedDigraph::directed();
    let mut res: Vec<Option<Classes<LabelSet>>> = vec![None; t.len()];
    for (i, node) in t.nodes().iter().enumerate() {
        let c = match node {
            MNode::Ver { labels, id } => leaf(&mut g, id, labels, None)?,
            MNode::VerLoop { labels, weight, id } => leaf(&mut g, id, labels, Some(weight))?,
            MNode::Join {
                spec,
                h,
                h2,
                left,
                right,
            } => {
                let a = res[*left].take().unwrap();
                let b = res[*right].take().unwrap();
                join_arcs(&mut g, &a, &b, |sa, sb| {
                    let mut out = Vec::new();
                    for x in sa {
                        for y in sb {
                            out.extend(spec_entries(spec, x, y));
                        }
                    }
                    out
                })?;
                merge(apply_set_map(a, h), apply_set_map(b, h2))
            }
        };
        res[i] = Some(c);
    }
    let root = res[t.root()].take().unwrap();
    Ok(finish(g, root))
}

#[cfg(test)]
mod tests {
    use super::super::build::*;
    use super::*;

    #[test]
    fn k4_evaluates_to_complete_graph() {
        let e = eval_clique(&k4()).unwrap();
        assert_eq!(e.graph.n(), 4);
        assert_eq!(e.graph.arc_count(), 12);
        assert!(e.graph.is_symmetric());
        assert!(!e.graph.has_loops());
        assert!(e.labels.values().all(|l| l == "a" || l == "b"));
    }

    #[test]
    fn single_vertex_and_empty_join() {
        let mut t = CliqueTerm::new();
        ver(&mut t, "a", "v");
        let e = eval_clique(&t).unwrap();
        assert_eq!((e.graph.n(), e.graph.arc_count()), (1, 0));

        let mut n = NlcTerm::new();
        let a = n.push(NlcNode::Ver {
            label: "a".into(),
            id: "x".into(),
        });
        let b = n.push(NlcNode::Ver {
            label: "b".into(),
            id: "y".into(),
        });
        n.push(NlcNode::Join {
            spec: JoinSpec::new(),
            left: a,
            right: b,
        });
        let e = eval_nlc(&n).unwrap();
        assert_eq!((e.graph.n(), e.graph.arc_count()), (2, 0));
    }

    #[test]
    fn arcs_are_only_added_when_absent() {
        let mut t = CliqueTerm::new();
        let x = ver(&mut t, "a", "x");
        let y = ver(&mut t, "b", "y");
        let u = union(&mut t, x, y);
        let first = alpha(&mut t, "a", "b", WeightExpr::var("p"), u);
        alpha(&mut t, "a", "b", WeightExpr::var("q"), first);
        let e = eval_clique(&t).unwrap();
        assert_eq!(e.graph.arc_by_id("x", "y"), Some(&WeightExpr::var("p")));
    }

    #[test]
    fn nlc_join_signs() {
        let mut n = NlcTerm::new();
        let a = n.push(NlcNode::Ver {
            label: "a".into(),
            id: "x".into(),
        });
        let b = n.push(NlcNode::Ver {
            label: "b".into(),
            id: "y".into(),
        });
        let spec = JoinSpec::from([(("a".into(), "b".into(), -1), WeightExpr::var("w"))]);
        n.push(NlcNode::Join {
            spec,
            left: a,
            right: b,
        });
        let e = eval_nlc(&n).unwrap();
        assert_eq!(e.graph.arc_by_id("y", "x"), Some(&WeightExpr::var("w")));
        assert_eq!(e.graph.arc_count(), 1);
    }

    #[test]
    fn mclique_duplicate_arc_is_malformed() {
        let mut m = MTerm::new();
        let a = m.push(MNode::Ver {
            labels: set(&["a", "b"]),
            id: "x".into(),
        });
        let b = m.push(MNode::Ver {
            labels: set(&["c"]),
            id: "y".into(),
        });
        let spec = JoinSpec::from([
            (("a".into(), "c".into(), 1), WeightExpr::one()),
            (("b".into(), "c".into(), 1), WeightExpr::one()),
        ]);
        m.push(MNode::Join {
            spec,
            h: BTreeMap::new(),
            h2: BTreeMap::new(),
            left: a,
            right: b,
        });
        assert!(matches!(eval_mclique(&m), Err(Error::MalformedTerm(_))));
    }

    #[test]
    fn mclique_relabels_after_join() {
        let mut m = MTerm::new();
        let a = m.push(MNode::VerLoop {
            labels: set(&["a"]),
            weight: WeightExpr::var("z"),
            id: "x".into(),
        });
        let b = m.push(MNode::Ver {
            labels: set::<&str>(&[]),
            id: "y".into(),
        });
        let spec = JoinSpec::from([(("a".into(), "a".into(), 1), WeightExpr::one())]);
        m.push(MNode::Join {
            spec,
            h: BTreeMap::from([(set(&["a"]), set(&["a", "b"]))]),
            h2: BTreeMap::new(),
            left: a,
            right: b,
        });
        let e = eval_mclique(&m).unwrap();
        assert_eq!(e.graph.arc_count(), 1);
        assert_eq!(e.labels["x"], set(&["a", "b"]));
        assert!(e.labels["y"].is_empty());
    }
}
