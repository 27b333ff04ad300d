//! Translations between the three algebras, the inside-outside transform of
//! clique terms, and loop stripping.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{
    eval_clique, CliqueNode, CliqueTerm, JoinSpec, Label, LabelSet, MNode, MTerm, NlcNode, NlcTerm,
    NodeId,
};
use crate::error::{Error, Result};
use crate::graph::{io_minus, io_plus};
use crate::poly::WeightExpr;

fn compose(
    outer: &BTreeMap<Label, Label>,
    inner: &BTreeMap<Label, Label>,
) -> BTreeMap<Label, Label> {
    let mut out = BTreeMap::new();
    for x in inner.keys().chain(outer.keys()) {
        let mid = inner.get(x).unwrap_or(x);
        let to = outer.get(mid).unwrap_or(mid);
        if to != x {
            out.insert(x.clone(), to.clone());
        }
    }
    out
}

fn apply<'a>(m: &'a BTreeMap<Label, Label>, x: &'a Label) -> &'a Label {
    m.get(x).unwrap_or(x)
}

enum Lazy {
    Leaf {
        label: Label,
        weight: Option<WeightExpr>,
        id: String,
    },
    Built {
        join: NodeId,
        map: BTreeMap<Label, Label>,
    },
}

fn materialize(out: &mut NlcTerm, lazy: Lazy) -> NodeId {
    match lazy {
        Lazy::Leaf {
            label,
            weight: None,
            id,
        } => out.push(NlcNode::Ver { label, id }),
        Lazy::Leaf {
            label,
            weight: Some(weight),
            id,
        } => out.push(NlcNode::VerLoop { label, weight, id }),
        Lazy::Built { join, map } => out.push(NlcNode::Relabel { map, sub: join }),
    }
}

/// Fuses consecutive relabellings, pushes relabellings into leaves and puts
/// exactly one (possibly identity) relabelling above every join.
pub fn normalize_nlc_term(t: &NlcTerm) -> NlcTerm {
    let mut out = NlcTerm::new();
    let mut lazy: Vec<Option<Lazy>> = (0..t.len()).map(|_| None).collect();
    for (i, n) in t.nodes().iter().enumerate() {
        let l = match n {
            NlcNode::Ver { label, id } => Lazy::Leaf {
                label: label.clone(),
                weight: None,
                id: id.clone(),
            },
            NlcNode::VerLoop { label, weight, id } => Lazy::Leaf {
                label: label.clone(),
                weight: Some(weight.clone()),
                id: id.clone(),
            },
            NlcNode::Relabel { map, sub } => match lazy[*sub].take().unwrap() {
                Lazy::Leaf { label, weight, id } => Lazy::Leaf {
                    label: apply(map, &label).clone(),
                    weight,
                    id,
                },
                Lazy::Built { join, map: inner } => Lazy::Built {
                    join,
                    map: compose(map, &inner),
                },
            },
            NlcNode::Join { spec, left, right } => {
                let l = materialize(&mut out, lazy[*left].take().unwrap());
                let r = materialize(&mut out, lazy[*right].take().unwrap());
                Lazy::Built {
                    join: out.push(NlcNode::Join {
                        spec: spec.clone(),
                        left: l,
                        right: r,
                    }),
                    map: BTreeMap::new(),
                }
            }
        };
        lazy[i] = Some(l);
    }
    materialize(&mut out, lazy[t.root()].take().unwrap());
    out.extend_alphabet(t.alphabet().iter().cloned());
    out.canonical()
}

/// Singleton label sets throughout; a relabelled join becomes one m-clique
/// join whose two relabellings coincide.
pub fn translate_nlc_to_mclique(t: &NlcTerm) -> Result<MTerm> {
    let t = normalize_nlc_term(t);
    let single = |a: &Label| LabelSet::from([a.clone()]);
    let mut out = MTerm::new();
    let mut id: Vec<Option<NodeId>> = vec![None; t.len()];
    for (i, n) in t.nodes().iter().enumerate() {
        match n {
            NlcNode::Ver { label, id: v } => {
                id[i] = Some(out.push(MNode::Ver {
                    labels: single(label),
                    id: v.clone(),
                }));
            }
            NlcNode::VerLoop {
                label,
                weight,
                id: v,
            } => {
                id[i] = Some(out.push(MNode::VerLoop {
                    labels: single(label),
                    weight: weight.clone(),
                    id: v.clone(),
                }));
            }
            NlcNode::Join { .. } => {}
            NlcNode::Relabel { map, sub } => {
                let NlcNode::Join { spec, left, right } = t.node(*sub) else {
                    return Err(Error::MalformedTerm(
                        "normal form has a relabelling that is not above a join".into(),
                    ));
                };
                let h: BTreeMap<LabelSet, LabelSet> =
                    map.iter().map(|(a, b)| (single(a), single(b))).collect();
                id[i] = Some(out.push(MNode::Join {
                    spec: spec.clone(),
                    h: h.clone(),
                    h2: h,
                    left: id[*left].unwrap(),
                    right: id[*right].unwrap(),
                }));
            }
        }
    }
    out.extend_alphabet(t.alphabet().iter().cloned());
    Ok(out.canonical())
}

/// Every arc between the two operands of a union is produced by some later
/// arc operation, which treats whole label classes at once; the classes at
/// the union therefore determine a join table exactly. Arc
/// operations are dropped and renamings become relabellings.
pub fn translate_clique_to_nlc(t: &CliqueTerm) -> Result<NlcTerm> {
    let g = eval_clique(t)?.graph;
    let n = g.n();
    let mut incoming: Vec<Vec<(usize, &WeightExpr)>> = vec![Vec::new(); n];
    for ((u, v), w) in g.arcs() {
        incoming[v].push((u, w));
    }
    let mut label: Vec<Label> = vec![String::new(); n];
    let mut stamp = vec![usize::MAX; n];
    let mut classes: Vec<Option<BTreeMap<Label, Vec<usize>>>> = vec![None; t.len()];
    let mut out = NlcTerm::new();
    let mut id: Vec<NodeId> = vec![usize::MAX; t.len()];
    for (i, node) in t.nodes().iter().enumerate() {
        match node {
            CliqueNode::Ver { label: a, id: v }
            | CliqueNode::VerLoop {
                label: a, id: v, ..
            } => {
                let x = g.index_of(v).unwrap();
                label[x] = a.clone();
                classes[i] = Some(BTreeMap::from([(a.clone(), vec![x])]));
                id[i] = out.push(match node {
                    CliqueNode::VerLoop { weight, .. } => NlcNode::VerLoop {
                        label: a.clone(),
                        weight: weight.clone(),
                        id: v.clone(),
                    },
                    _ => NlcNode::Ver {
                        label: a.clone(),
                        id: v.clone(),
                    },
                });
            }
            CliqueNode::Alpha { sub, .. } => {
                classes[i] = classes[*sub].take();
                id[i] = id[*sub];
            }
            CliqueNode::Rename { from, to, sub } => {
                let mut c = classes[*sub].take().unwrap();
                let mut map = BTreeMap::new();
                if from != to {
                    if let Some(mut vs) = c.remove(from) {
                        for &x in &vs {
                            label[x] = to.clone();
                        }
                        c.entry(to.clone()).or_default().append(&mut vs);
                    }
                    map.insert(from.clone(), to.clone());
                }
                classes[i] = Some(c);
                id[i] = out.push(NlcNode::Relabel { map, sub: id[*sub] });
            }
            CliqueNode::Union(l, r) => {
                let left = classes[*l].take().unwrap();
                let right = classes[*r].take().unwrap();
                for vs in right.values() {
                    for &y in vs {
                        stamp[y] = i;
                    }
                }
                let mut found: BTreeMap<(Label, Label, i8), (WeightExpr, usize)> = BTreeMap::new();
                let mut record = |key: (Label, Label, i8), w: &WeightExpr| -> Result<()> {
                    let e = found.entry(key).or_insert((w.clone(), 0));
                    if e.0 != *w {
                        return Err(Error::Preprocessing(format!(
                            "arcs between classes {} and {} carry different weights",
                            e.0, w
                        )));
                    }
                    e.1 += 1;
                    Ok(())
                };
                for xs in left.values() {
                    for &x in xs {
                        for (y, w) in g.out_neighbours(x) {
                            if stamp[y] == i {
                                record((label[x].clone(), label[y].clone(), 1), w)?;
                            }
                        }
                        for &(y, w) in &incoming[x] {
                            if stamp[y] == i {
                                record((label[x].clone(), label[y].clone(), -1), w)?;
                            }
                        }
                    }
                }
                let mut spec = JoinSpec::new();
                for ((a, b, s), (w, count)) in found {
                    if count != left[&a].len() * right[&b].len() {
                        return Err(Error::Preprocessing(format!(
                            "arcs between classes `{a}` and `{b}` do not form a complete block"
                        )));
                    }
                    spec.insert((a, b, s), w);
                }
                id[i] = out.push(NlcNode::Join {
                    spec,
                    left: id[*l],
                    right: id[*r],
                });
                let mut merged = left;
                for (lab, mut vs) in right {
                    merged.entry(lab).or_default().append(&mut vs);
                }
                classes[i] = Some(merged);
            }
        }
    }
    out.extend_alphabet(t.alphabet().iter().cloned());
    Ok(out.canonical())
}

/// The label bijections used by the m-clique to clique translation: `l` and
/// `r` name nonempty label sets on the left and right operand of a join, and
/// `u` moves right names to left ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMapTriple {
    pub l: BTreeMap<LabelSet, Label>,
    pub r: BTreeMap<LabelSet, Label>,
    pub u: BTreeMap<Label, Label>,
}

pub const EMPTY_LABEL: &str = "empty";
/// Holds a join's right unlabelled vertices when every other label is taken.
pub const SPARE_LABEL: &str = "empty.r";

fn set_name(prefix: char, s: &LabelSet) -> Label {
    format!(
        "{prefix}{{{}}}",
        s.iter().cloned().collect::<Vec<_>>().join(",")
    )
}

impl LabelMapTriple {
    pub fn new(alphabet: &LabelSet) -> Self {
        let labels: Vec<&Label> = alphabet.iter().collect();
        let mut l = BTreeMap::new();
        let mut r = BTreeMap::new();
        for mask in 1u64..(1u64 << labels.len()) {
            let s: LabelSet = (0..labels.len())
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| labels[b].clone())
                .collect();
            l.insert(s.clone(), set_name('L', &s));
            r.insert(s.clone(), set_name('R', &s));
        }
        let u = l
            .iter()
            .map(|(s, name)| (name.clone(), r[s].clone()))
            .collect();
        LabelMapTriple { l, r, u }
    }

    fn left(&self, s: &LabelSet) -> Label {
        if s.is_empty() {
            EMPTY_LABEL.to_string()
        } else {
            self.l[s].clone()
        }
    }

    pub fn alphabet(&self) -> LabelSet {
        self.l
            .values()
            .chain(self.r.values())
            .cloned()
            .chain([EMPTY_LABEL.to_string()])
            .collect()
    }
}

/// Renaming steps `x -> y` turning each occupied label into its target.
/// Cycles are broken through a free label; when none is free, two labels
/// with the same target are merged first.
fn rename_schedule(
    mut target: BTreeMap<Label, Label>,
    alphabet: &LabelSet,
) -> Result<Vec<(Label, Label)>> {
    let mut steps = Vec::new();
    loop {
        let pending: Vec<Label> = target
            .iter()
            .filter(|(x, t)| x != t)
            .map(|(x, _)| x.clone())
            .collect();
        if pending.is_empty() {
            return Ok(steps);
        }
        let direct = pending.iter().find(|x| {
            let t = &target[*x];
            target.get(t).is_none_or(|tt| tt == t)
        });
        if let Some(x) = direct.cloned() {
            let t = target.remove(&x).unwrap();
            target.entry(t.clone()).or_insert_with(|| t.clone());
            steps.push((x, t));
            continue;
        }
        if let Some(z) = alphabet.iter().find(|z| !target.contains_key(*z)).cloned() {
            let mut x = pending[0].clone();
            let mut seen = BTreeSet::new();
            while seen.insert(x.clone()) {
                x = target[&x].clone();
            }
            let t = target.remove(&x).unwrap();
            target.insert(z.clone(), t);
            steps.push((x, z));
            continue;
        }
        let mut by_target: HashMap<&Label, &Label> = HashMap::new();
        let mut merge = None;
        for x in &pending {
            if let Some(y) = by_target.insert(&target[x], x) {
                merge = Some((x.clone(), y.clone()));
                break;
            }
        }
        let (x, y) = merge
            .ok_or_else(|| Error::MalformedTerm("no renaming schedule fits the alphabet".into()))?;
        target.remove(&x);
        steps.push((x, y));
    }
}

fn push_renames(out: &mut CliqueTerm, mut node: NodeId, steps: &[(Label, Label)]) -> NodeId {
    for (x, y) in steps {
        node = out.push(CliqueNode::Rename {
            from: x.clone(),
            to: y.clone(),
            sub: node,
        });
    }
    node
}

/// Vertices with label set `A` carry the label `L{A}` (or `empty`); the
/// result uses an alphabet of `2^(k+1) - 1` labels for `k` m-clique labels.
/// A join whose operands both hold unlabelled vertices, relabelled apart,
/// while every label set is in use adds `SPARE_LABEL`, for `2^(k+1)` labels.
pub fn translate_mclique_to_clique(t: &MTerm) -> Result<CliqueTerm> {
    t.validate()?;
    let maps = LabelMapTriple::new(t.alphabet());
    let alphabet = maps.alphabet();
    let mut out = CliqueTerm::new();
    let mut id: Vec<NodeId> = vec![usize::MAX; t.len()];
    let mut present: Vec<BTreeSet<LabelSet>> = vec![BTreeSet::new(); t.len()];
    let mut spare_used = false;
    let image = |m: &BTreeMap<LabelSet, LabelSet>, s: &LabelSet| m.get(s).unwrap_or(s).clone();
    for (i, node) in t.nodes().iter().enumerate() {
        match node {
            MNode::Ver { labels, id: v } => {
                id[i] = out.push(CliqueNode::Ver {
                    label: maps.left(labels),
                    id: v.clone(),
                });
                present[i].insert(labels.clone());
            }
            MNode::VerLoop {
                labels,
                weight,
                id: v,
            } => {
                id[i] = out.push(CliqueNode::VerLoop {
                    label: maps.left(labels),
                    weight: weight.clone(),
                    id: v.clone(),
                });
                present[i].insert(labels.clone());
            }
            MNode::Join {
                spec,
                h,
                h2,
                left,
                right,
            } => {
                let lp = std::mem::take(&mut present[*left]);
                let rp = std::mem::take(&mut present[*right]);
                let mut to_right: Vec<(Label, Label)> = rp
                    .iter()
                    .filter(|b| !b.is_empty())
                    .map(|b| (maps.l[b].clone(), maps.u[&maps.l[b]].clone()))
                    .collect();
                let empty = LabelSet::new();
                let mut right_empty = EMPTY_LABEL.to_string();
                if lp.contains(&empty)
                    && rp.contains(&empty)
                    && image(h, &empty) != image(h2, &empty)
                {
                    // park the right unlabelled vertices on a label no arc of this join touches
                    right_empty = maps
                        .l
                        .iter()
                        .find(|(s, _)| !lp.contains(*s))
                        .or_else(|| maps.r.iter().find(|(s, _)| !rp.contains(*s)))
                        .map(|(_, name)| name.clone())
                        .unwrap_or_else(|| SPARE_LABEL.to_string());
                    to_right.push((EMPTY_LABEL.to_string(), right_empty.clone()));
                }
                let r = push_renames(&mut out, id[*right], &to_right);
                let mut cur = out.push(CliqueNode::Union(id[*left], r));
                for a_set in lp.iter().filter(|s| !s.is_empty()) {
                    for b_set in rp.iter().filter(|s| !s.is_empty()) {
                        for sign in [1i8, -1] {
                            let hits: Vec<&WeightExpr> = a_set
                                .iter()
                                .flat_map(|a| b_set.iter().map(move |b| (a, b)))
                                .filter_map(|(a, b)| spec.get(&(a.clone(), b.clone(), sign)))
                                .filter(|w| !w.is_zero())
                                .collect();
                            if hits.len() > 1 {
                                return Err(Error::MalformedTerm(format!(
                                    "join adds two arcs between label sets {} and {}",
                                    set_name('L', a_set),
                                    set_name('R', b_set)
                                )));
                            }
                            if let Some(w) = hits.first() {
                                let (la, rb) = (maps.l[a_set].clone(), maps.r[b_set].clone());
                                let (a, b) = if sign > 0 { (la, rb) } else { (rb, la) };
                                cur = out.push(CliqueNode::Alpha {
                                    a,
                                    b,
                                    weight: (*w).clone(),
                                    sub: cur,
                                });
                            }
                        }
                    }
                }
                let mut target: BTreeMap<Label, Label> = BTreeMap::new();
                for a_set in &lp {
                    target.insert(maps.left(a_set), maps.left(&image(h, a_set)));
                }
                for b_set in &rp {
                    let from = if b_set.is_empty() {
                        right_empty.clone()
                    } else {
                        maps.r[b_set].clone()
                    };
                    let to = maps.left(&image(h2, b_set));
                    if let Some(prev) = target.insert(from.clone(), to.clone()) {
                        if prev != to {
                            return Err(Error::MalformedTerm(
                                "both operands hold unlabelled vertices that the join \
                                 relabels differently"
                                    .into(),
                            ));
                        }
                    }
                }
                let steps = if right_empty == SPARE_LABEL {
                    spare_used = true;
                    let mut wider = alphabet.clone();
                    wider.insert(SPARE_LABEL.to_string());
                    rename_schedule(target, &wider)?
                } else {
                    rename_schedule(target, &alphabet)?
                };
                id[i] = push_renames(&mut out, cur, &steps);
                present[i] = lp
                    .iter()
                    .map(|s| image(h, s))
                    .chain(rp.iter().map(|s| image(h2, s)))
                    .collect();
            }
        }
    }
    let mut alphabet = alphabet;
    if spare_used {
        alphabet.insert(SPARE_LABEL.to_string());
    }
    out.extend_alphabet(alphabet);
    Ok(out.canonical())
}

fn io_label(l: &Label, plus: bool) -> Label {
    if plus {
        io_plus(l)
    } else {
        io_minus(l)
    }
}

/// Clique term for the inside-outside graph over the labels `a+`, `a-`.
pub fn clique_term_io(t: &CliqueTerm) -> Result<CliqueTerm> {
    t.validate_clique()?;
    let mut out = CliqueTerm::new();
    let mut id: Vec<NodeId> = vec![usize::MAX; t.len()];
    let pair = |out: &mut CliqueTerm, a: &Label, v: &str| {
        let p = out.push(CliqueNode::Ver {
            label: io_plus(a),
            id: io_plus(v),
        });
        let m = out.push(CliqueNode::Ver {
            label: io_minus(a),
            id: io_minus(v),
        });
        out.push(CliqueNode::Union(p, m))
    };
    for (i, node) in t.nodes().iter().enumerate() {
        id[i] = match node {
            CliqueNode::Ver { label, id: v } => pair(&mut out, label, v),
            CliqueNode::VerLoop {
                label,
                weight,
                id: v,
            } => {
                let u = pair(&mut out, label, v);
                let x = out.push(CliqueNode::Alpha {
                    a: io_plus(label),
                    b: io_minus(label),
                    weight: weight.clone(),
                    sub: u,
                });
                out.push(CliqueNode::Alpha {
                    a: io_minus(label),
                    b: io_plus(label),
                    weight: weight.clone(),
                    sub: x,
                })
            }
            CliqueNode::Rename { from, to, sub } => {
                let mut cur = id[*sub];
                for plus in [true, false] {
                    cur = out.push(CliqueNode::Rename {
                        from: io_label(from, plus),
                        to: io_label(to, plus),
                        sub: cur,
                    });
                }
                cur
            }
            CliqueNode::Alpha { a, b, weight, sub } => {
                let x = out.push(CliqueNode::Alpha {
                    a: io_plus(a),
                    b: io_minus(b),
                    weight: weight.clone(),
                    sub: id[*sub],
                });
                out.push(CliqueNode::Alpha {
                    a: io_minus(b),
                    b: io_plus(a),
                    weight: weight.clone(),
                    sub: x,
                })
            }
            CliqueNode::Union(l, r) => out.push(CliqueNode::Union(id[*l], id[*r])),
        };
    }
    out.extend_alphabet(t.alphabet().iter().flat_map(|a| [io_plus(a), io_minus(a)]));
    Ok(out.canonical())
}

pub fn strip_loops_clique(t: &CliqueTerm) -> CliqueTerm {
    let mut out = t.clone();
    for n in &mut out.nodes {
        if let CliqueNode::VerLoop { label, id, .. } = n {
            *n = CliqueNode::Ver {
                label: std::mem::take(label),
                id: std::mem::take(id),
            };
        }
    }
    out
}

pub fn strip_loops_nlc(t: &NlcTerm) -> NlcTerm {
    let mut out = t.clone();
    for n in &mut out.nodes {
        if let NlcNode::VerLoop { label, id, .. } = n {
            *n = NlcNode::Ver {
                label: std::mem::take(label),
                id: std::mem::take(id),
            };
        }
    }
    out
}

pub fn strip_loops_mclique(t: &MTerm) -> MTerm {
    let mut out = t.clone();
    for n in &mut out.nodes {
        if let MNode::VerLoop { labels, id, .. } = n {
            *n = MNode::Ver {
                labels: std::mem::take(labels),
                id: std::mem::take(id),
            };
        }
    }
    out
}
