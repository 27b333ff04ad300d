use std::collections::{BTreeMap, BTreeSet};

use super::{CliqueNode, CliqueTerm, NodeId};
use crate::decomposition::{validate_path_decomposition, PathDecomposition};
use crate::error::Result;
use crate::graph::WeightedDigraph;

const SINK: &str = "sink";

fn slot(i: usize) -> String {
    format!("s{i}")
}

/// Clique term for a graph with a path decomposition of width `k`, using at
/// most `k + 2` labels: bag vertices hold distinct slot labels and every
/// forgotten vertex holds the sink label. Each arc is added once, at the
/// first bag containing both endpoints.
pub fn pd_to_clique_term(g: &WeightedDigraph, pd: &PathDecomposition) -> Result<CliqueTerm> {
    validate_path_decomposition(g, pd)?;
    let mut t = CliqueTerm::new();
    let mut cur: Option<NodeId> = None;
    let mut slot_of: BTreeMap<&str, usize> = BTreeMap::new();
    let empty = BTreeSet::new();
    let mut prev: &BTreeSet<String> = &empty;
    for bag in pd.bags() {
        for v in prev.difference(bag) {
            let s = slot_of.remove(v.as_str()).unwrap();
            cur = Some(t.push(CliqueNode::Rename {
                from: slot(s),
                to: SINK.into(),
                sub: cur.unwrap(),
            }));
        }
        let mut fresh = Vec::new();
        for v in bag.difference(prev) {
            let used: BTreeSet<usize> = slot_of.values().copied().collect();
            let s = (0..).find(|i| !used.contains(i)).unwrap();
            slot_of.insert(v.as_str(), s);
            let x = g.index_of(v).unwrap();
            let leaf = t.push(match g.arc(x, x) {
                Some(w) => CliqueNode::VerLoop {
                    label: slot(s),
                    weight: w.clone(),
                    id: v.clone(),
                },
                None => CliqueNode::Ver {
                    label: slot(s),
                    id: v.clone(),
                },
            });
            cur = Some(match cur {
                Some(c) => t.push(CliqueNode::Union(c, leaf)),
                None => leaf,
            });
            fresh.push(v);
        }
        for (k, v) in fresh.iter().enumerate() {
            let x = g.index_of(v).unwrap();
            let older = bag
                .iter()
                .filter(|u| prev.contains(*u) || fresh[..k].contains(u));
            for u in older {
                let y = g.index_of(u).unwrap();
                for (a, b) in [(x, y), (y, x)] {
                    if let Some(w) = g.arc(a, b) {
                        cur = Some(t.push(CliqueNode::Alpha {
                            a: slot(slot_of[g.id(a)]),
                            b: slot(slot_of[g.id(b)]),
                            weight: w.clone(),
                            sub: cur.unwrap(),
                        }));
                    }
                }
            }
        }
        prev = bag;
    }
    Ok(t)
}
