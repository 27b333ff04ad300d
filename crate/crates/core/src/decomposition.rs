//! Path decompositions: validation, width and the inside-outside lift.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{io_minus, io_plus, WeightedDigraph};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PathDecomposition {
    bags: Vec<BTreeSet<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PdViolation {
    NoBags,
    UnknownVertex { vertex: String, bag: usize },
    Uncovered { vertex: String },
    NotContiguous { vertex: String, gap: usize },
    ArcNotCovered { tail: String, head: String },
}

impl fmt::Display for PdViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PdViolation::NoBags => write!(f, "decomposition has no bags"),
            PdViolation::UnknownVertex { vertex, bag } => {
                write!(
                    f,
                    "bag {bag} mentions `{vertex}`, which is not a graph vertex"
                )
            }
            PdViolation::Uncovered { vertex } => write!(f, "vertex `{vertex}` is in no bag"),
            PdViolation::NotContiguous { vertex, gap } => {
                write!(f, "bags containing `{vertex}` are interrupted at bag {gap}")
            }
            PdViolation::ArcNotCovered { tail, head } => {
                write!(f, "no bag contains both endpoints of `{tail}` -> `{head}`")
            }
        }
    }
}

impl PathDecomposition {
    pub fn new(bags: Vec<BTreeSet<String>>) -> Self {
        PathDecomposition { bags }
    }

    pub fn from_bags<S: AsRef<str>>(bags: &[Vec<S>]) -> Self {
        PathDecomposition {
            bags: bags
                .iter()
                .map(|b| b.iter().map(|s| s.as_ref().to_string()).collect())
                .collect(),
        }
    }

    pub fn bags(&self) -> &[BTreeSet<String>] {
        &self.bags
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn max_bag(&self) -> usize {
        self.bags.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    /// Largest bag size minus one (0 for a decomposition of empty bags).
    pub fn width(&self) -> usize {
        self.max_bag().saturating_sub(1)
    }

    /// First and last bag index per vertex.
    pub fn intervals(&self) -> HashMap<&str, (usize, usize)> {
        let mut out: HashMap<&str, (usize, usize)> = HashMap::new();
        for (i, bag) in self.bags.iter().enumerate() {
            for v in bag {
                out.entry(v.as_str())
                    .and_modify(|e| e.1 = i)
                    .or_insert((i, i));
            }
        }
        out
    }

    /// Graph vertices ordered by first bag, ties broken by graph order.
    pub fn vertex_order(&self, g: &WeightedDigraph) -> Vec<String> {
        let iv = self.intervals();
        let mut ids: Vec<(usize, usize, &String)> = g
            .ids()
            .iter()
            .enumerate()
            .map(|(i, id)| (iv.get(id.as_str()).map_or(usize::MAX, |x| x.0), i, id))
            .collect();
        ids.sort();
        ids.into_iter().map(|(_, _, id)| id.clone()).collect()
    }
}

/// Returns the width when the decomposition covers every vertex, every
/// non-loop arc, and every vertex occupies a contiguous run of bags.
pub fn validate_path_decomposition(g: &WeightedDigraph, pd: &PathDecomposition) -> Result<usize> {
    if pd.is_empty() {
        return Err(PdViolation::NoBags.into());
    }
    for (b, bag) in pd.bags().iter().enumerate() {
        if let Some(v) = bag.iter().find(|v| g.index_of(v).is_none()) {
            return Err(PdViolation::UnknownVertex {
                vertex: v.clone(),
                bag: b,
            }
            .into());
        }
    }
    let iv = pd.intervals();
    for id in g.ids() {
        let Some(&(lo, hi)) = iv.get(id.as_str()) else {
            return Err(PdViolation::Uncovered { vertex: id.clone() }.into());
        };
        if let Some(gap) = (lo..=hi).find(|&b| !pd.bags()[b].contains(id)) {
            return Err(PdViolation::NotContiguous {
                vertex: id.clone(),
                gap,
            }
            .into());
        }
    }
    for ((u, v), _) in g.arcs() {
        if u == v {
            continue;
        }
        let (a, b) = (iv[g.id(u)], iv[g.id(v)]);
        if a.0.max(b.0) > a.1.min(b.1) {
            return Err(PdViolation::ArcNotCovered {
                tail: g.id(u).to_string(),
                head: g.id(v).to_string(),
            }
            .into());
        }
    }
    Ok(pd.width())
}

/// Replaces every vertex `u` by `u+` and `u-` in each bag.
pub fn lift_pd_io(pd: &PathDecomposition) -> PathDecomposition {
    PathDecomposition {
        bags: pd
            .bags()
            .iter()
            .map(|bag| bag.iter().flat_map(|u| [io_plus(u), io_minus(u)]).collect())
            .collect(),
    }
}

/// One bag per line, vertex ids separated by whitespace; `-` marks an empty
/// bag.
pub fn parse_pd(src: &str) -> Result<PathDecomposition> {
    let mut bags = Vec::new();
    for raw in src.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "-" {
            bags.push(BTreeSet::new());
        } else {
            bags.push(line.split_whitespace().map(str::to_string).collect());
        }
    }
    if bags.is_empty() {
        return Err(Error::Parse {
            what: "decomposition",
            line: 0,
            msg: "no bags".into(),
        });
    }
    Ok(PathDecomposition { bags })
}

pub fn write_pd(pd: &PathDecomposition) -> String {
    let mut s = String::new();
    for bag in pd.bags() {
        if bag.is_empty() {
            s.push('-');
        } else {
            s.push_str(&bag.iter().cloned().collect::<Vec<_>>().join(" "));
        }
        s.push('\n');
    }
    s
}
