//! S-expression syntax for terms. Parsing and printing use explicit stacks,
//! so arbitrarily deep terms are fine.

use std::collections::BTreeMap;

use super::{
    AlgebraTerm, CliqueNode, CliqueTerm, JoinSpec, Label, LabelSet, MNode, MTerm, NlcNode, NlcTerm,
    NodeId, Term, TermNode,
};
use crate::error::{Error, Result};
use crate::poly::WeightExpr;

const KEYWORDS: &[&str] = &[
    "ver", "verloop", "union", "rename", "alpha", "relabel", "join", "mver", "mverloop", "mjoin",
    "labels",
];

#[derive(Clone, Debug)]
enum Item {
    Atom(String),
    List(Vec<Item>),
    Node(NodeId),
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        what: "term",
        line,
        msg: msg.into(),
    }
}

fn tokens(src: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    for (n, raw) in src.lines().enumerate() {
        let line = raw.split(';').next().unwrap_or("");
        let mut cur = String::new();
        for ch in line.chars() {
            if ch == '(' || ch == ')' || ch.is_whitespace() {
                if !cur.is_empty() {
                    out.push((n + 1, std::mem::take(&mut cur)));
                }
                if !ch.is_whitespace() {
                    out.push((n + 1, ch.to_string()));
                }
            } else {
                cur.push(ch);
            }
        }
        if !cur.is_empty() {
            out.push((n + 1, cur));
        }
    }
    out
}

type Maker<'a, N> = dyn Fn(&str, Vec<Item>, usize) -> Result<N> + 'a;

fn parse_with<N: TermNode>(src: &str, make: &Maker<'_, N>) -> Result<Term<N>> {
    let toks = tokens(src);
    let mut term = Term::new();
    let mut stack: Vec<(usize, Vec<Item>)> = Vec::new();
    let mut done: Option<Item> = None;
    let mut explicit: Option<LabelSet> = None;
    for (line, tok) in toks {
        if done.is_some() {
            return Err(perr(line, "trailing input after the term"));
        }
        match tok.as_str() {
            "(" => stack.push((line, Vec::new())),
            ")" => {
                let (open_line, items) = stack.pop().ok_or_else(|| perr(line, "unbalanced `)`"))?;
                let item = match items.first() {
                    Some(Item::Atom(h)) if h == "labels" && stack.is_empty() => {
                        let [_, Item::List(ls), Item::Node(root)] = items.as_slice() else {
                            return Err(perr(open_line, "expected (labels (l ...) T)"));
                        };
                        explicit = Some(atoms(ls, open_line)?.into_iter().collect());
                        Item::Node(*root)
                    }
                    Some(Item::Atom(h)) if KEYWORDS.contains(&h.as_str()) => {
                        let head = h.clone();
                        let args = items.into_iter().skip(1).collect();
                        Item::Node(term.push(make(&head, args, open_line)?))
                    }
                    _ => Item::List(items),
                };
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(item),
                    None => done = Some(item),
                }
            }
            _ => match stack.last_mut() {
                Some((_, parent)) => parent.push(Item::Atom(tok)),
                None => return Err(perr(line, format!("unexpected atom `{tok}`"))),
            },
        }
    }
    if let Some((line, _)) = stack.last() {
        return Err(perr(*line, "unclosed `(`"));
    }
    match done {
        Some(Item::Node(_)) => {}
        _ => return Err(perr(0, "input holds no term")),
    }
    if let Some(extra) = explicit {
        term.extend_alphabet(extra);
    }
    let canon = term.canonical();
    if canon.len() != term.len() {
        return Err(perr(0, "term contains nodes outside the root"));
    }
    canon.validate()?;
    Ok(canon)
}

fn atoms(items: &[Item], line: usize) -> Result<Vec<String>> {
    items
        .iter()
        .map(|i| match i {
            Item::Atom(a) => Ok(a.clone()),
            _ => Err(perr(line, "expected a flat list of atoms")),
        })
        .collect()
}

fn label(item: &Item, line: usize) -> Result<Label> {
    match item {
        Item::Atom(a) if !KEYWORDS.contains(&a.as_str()) => Ok(a.clone()),
        _ => Err(perr(line, "expected a label")),
    }
}

fn weight(item: &Item, line: usize) -> Result<WeightExpr> {
    match item {
        Item::Atom(a) => {
            WeightExpr::parse(a).ok_or_else(|| perr(line, format!("bad weight `{a}`")))
        }
        _ => Err(perr(line, "expected a weight")),
    }
}

fn node(item: &Item, line: usize) -> Result<NodeId> {
    match item {
        Item::Node(n) => Ok(*n),
        _ => Err(perr(line, "expected a subterm")),
    }
}

fn id(item: &Item, line: usize) -> Result<String> {
    match item {
        Item::Atom(a) => Ok(a.clone()),
        _ => Err(perr(line, "expected a vertex id")),
    }
}

fn label_set(item: &Item, line: usize) -> Result<LabelSet> {
    match item {
        Item::List(ls) => ls.iter().map(|l| label(l, line)).collect(),
        _ => Err(perr(line, "expected a label set")),
    }
}

fn join_spec(item: &Item, line: usize) -> Result<JoinSpec> {
    let Item::List(entries) = item else {
        return Err(perr(line, "expected a join table"));
    };
    let mut spec = JoinSpec::new();
    for e in entries {
        let Item::List(parts) = e else {
            return Err(perr(line, "expected (a b sign weight)"));
        };
        let [a, b, s, w] = parts.as_slice() else {
            return Err(perr(line, "expected (a b sign weight)"));
        };
        let sign = match s {
            Item::Atom(x) if x == "1" => 1,
            Item::Atom(x) if x == "-1" => -1,
            _ => return Err(perr(line, "sign must be 1 or -1")),
        };
        spec.insert((label(a, line)?, label(b, line)?, sign), weight(w, line)?);
    }
    Ok(spec)
}

fn relabel_map(item: &Item, line: usize) -> Result<BTreeMap<Label, Label>> {
    let Item::List(pairs) = item else {
        return Err(perr(line, "expected a relabelling"));
    };
    let mut map = BTreeMap::new();
    for p in pairs {
        let Item::List(ab) = p else {
            return Err(perr(line, "expected (from to)"));
        };
        let [a, b] = ab.as_slice() else {
            return Err(perr(line, "expected (from to)"));
        };
        let (a, b) = (label(a, line)?, label(b, line)?);
        if a != b {
            map.insert(a, b);
        }
    }
    Ok(map)
}

fn set_map(item: &Item, line: usize) -> Result<BTreeMap<LabelSet, LabelSet>> {
    let Item::List(parts) = item else {
        return Err(perr(line, "expected a label-set map"));
    };
    if parts.len() % 3 != 0 {
        return Err(perr(line, "expected entries of the form (a)->(b)"));
    }
    let mut map = BTreeMap::new();
    for chunk in parts.chunks(3) {
        match &chunk[1] {
            Item::Atom(arrow) if arrow == "->" => {}
            _ => return Err(perr(line, "expected `->`")),
        }
        let (a, b) = (label_set(&chunk[0], line)?, label_set(&chunk[2], line)?);
        if a != b {
            map.insert(a, b);
        }
    }
    Ok(map)
}

fn arity(head: &str, args: &[Item], n: usize, line: usize) -> Result<()> {
    if args.len() == n {
        Ok(())
    } else {
        Err(perr(
            line,
            format!("`{head}` takes {n} arguments, got {}", args.len()),
        ))
    }
}

fn make_clique(head: &str, a: Vec<Item>, line: usize) -> Result<CliqueNode> {
    Ok(match head {
        "ver" => {
            arity(head, &a, 2, line)?;
            CliqueNode::Ver {
                label: label(&a[0], line)?,
                id: id(&a[1], line)?,
            }
        }
        "verloop" => {
            arity(head, &a, 3, line)?;
            CliqueNode::VerLoop {
                label: label(&a[0], line)?,
                weight: weight(&a[1], line)?,
                id: id(&a[2], line)?,
            }
        }
        "union" => {
            arity(head, &a, 2, line)?;
            CliqueNode::Union(node(&a[0], line)?, node(&a[1], line)?)
        }
        "rename" => {
            arity(head, &a, 3, line)?;
            CliqueNode::Rename {
                from: label(&a[0], line)?,
                to: label(&a[1], line)?,
                sub: node(&a[2], line)?,
            }
        }
        "alpha" => {
            arity(head, &a, 4, line)?;
            CliqueNode::Alpha {
                a: label(&a[0], line)?,
                b: label(&a[1], line)?,
                weight: weight(&a[2], line)?,
                sub: node(&a[3], line)?,
            }
        }
        _ => return Err(perr(line, format!("`{head}` is not a clique operation"))),
    })
}

fn make_nlc(head: &str, a: Vec<Item>, line: usize) -> Result<NlcNode> {
    Ok(match head {
        "ver" => {
            arity(head, &a, 2, line)?;
            NlcNode::Ver {
                label: label(&a[0], line)?,
                id: id(&a[1], line)?,
            }
        }
        "verloop" => {
            arity(head, &a, 3, line)?;
            NlcNode::VerLoop {
                label: label(&a[0], line)?,
                weight: weight(&a[1], line)?,
                id: id(&a[2], line)?,
            }
        }
        "relabel" => {
            arity(head, &a, 2, line)?;
            NlcNode::Relabel {
                map: relabel_map(&a[0], line)?,
                sub: node(&a[1], line)?,
            }
        }
        "join" => {
            arity(head, &a, 3, line)?;
            NlcNode::Join {
                spec: join_spec(&a[0], line)?,
                left: node(&a[1], line)?,
                right: node(&a[2], line)?,
            }
        }
        _ => return Err(perr(line, format!("`{head}` is not an NLC operation"))),
    })
}

fn make_m(head: &str, a: Vec<Item>, line: usize) -> Result<MNode> {
    Ok(match head {
        "mver" => {
            arity(head, &a, 2, line)?;
            MNode::Ver {
                labels: label_set(&a[0], line)?,
                id: id(&a[1], line)?,
            }
        }
        "mverloop" => {
            arity(head, &a, 3, line)?;
            MNode::VerLoop {
                labels: label_set(&a[0], line)?,
                weight: weight(&a[1], line)?,
                id: id(&a[2], line)?,
            }
        }
        "mjoin" => {
            arity(head, &a, 5, line)?;
            MNode::Join {
                spec: join_spec(&a[0], line)?,
                h: set_map(&a[1], line)?,
                h2: set_map(&a[2], line)?,
                left: node(&a[3], line)?,
                right: node(&a[4], line)?,
            }
        }
        _ => return Err(perr(line, format!("`{head}` is not an m-clique operation"))),
    })
}

pub fn parse_clique(src: &str) -> Result<CliqueTerm> {
    parse_with(src, &make_clique)
}

pub fn parse_nlc(src: &str) -> Result<NlcTerm> {
    parse_with(src, &make_nlc)
}

pub fn parse_mclique(src: &str) -> Result<MTerm> {
    parse_with(src, &make_m)
}

/// Detects the algebra from the operations used; a bare leaf reads as a
/// clique term.
pub fn parse_term(src: &str) -> Result<AlgebraTerm> {
    let toks = tokens(src);
    let has = |ks: &[&str]| toks.iter().any(|(_, t)| ks.contains(&t.as_str()));
    if has(&["mver", "mverloop", "mjoin"]) {
        parse_mclique(src).map(AlgebraTerm::MClique)
    } else if has(&["relabel", "join"]) {
        parse_nlc(src).map(AlgebraTerm::Nlc)
    } else {
        parse_clique(src).map(AlgebraTerm::Clique)
    }
}

fn fmt_set(s: &LabelSet) -> String {
    format!("({})", s.iter().cloned().collect::<Vec<_>>().join(" "))
}

fn fmt_spec(spec: &JoinSpec) -> String {
    let parts: Vec<String> = spec
        .iter()
        .map(|((a, b, s), w)| format!("({a} {b} {s} {w})"))
        .collect();
    format!("({})", parts.join(" "))
}

fn fmt_set_map(m: &BTreeMap<LabelSet, LabelSet>) -> String {
    let parts: Vec<String> = m
        .iter()
        .map(|(a, b)| format!("{}->{}", fmt_set(a), fmt_set(b)))
        .collect();
    format!("({})", parts.join(" "))
}

/// Prints `prefix`, the children separated by spaces, then `)`, for every
/// node, without recursion.
fn write_with<N: TermNode>(t: &Term<N>, prefix: impl Fn(&N) -> String) -> String {
    enum Task {
        Node(NodeId),
        Text(&'static str),
    }
    let mut out = String::new();
    let mentioned: LabelSet = t.nodes().iter().flat_map(|n| n.labels()).cloned().collect();
    let wrap = mentioned != *t.alphabet();
    if wrap {
        out.push_str(&format!("(labels {} ", fmt_set(t.alphabet())));
    }
    let mut stack = vec![Task::Node(t.root())];
    while let Some(task) = stack.pop() {
        match task {
            Task::Text(s) => out.push_str(s),
            Task::Node(i) => {
                let n = t.node(i);
                out.push_str(&prefix(n));
                stack.push(Task::Text(")"));
                for c in n.children().into_iter().rev() {
                    stack.push(Task::Node(c));
                    stack.push(Task::Text(" "));
                }
            }
        }
    }
    if wrap {
        out.push(')');
    }
    out
}

pub fn write_clique(t: &CliqueTerm) -> String {
    write_with(t, |n| match n {
        CliqueNode::Ver { label, id } => format!("(ver {label} {id}"),
        CliqueNode::VerLoop { label, weight, id } => format!("(verloop {label} {weight} {id}"),
        CliqueNode::Rename { from, to, .. } => format!("(rename {from} {to}"),
        CliqueNode::Alpha { a, b, weight, .. } => format!("(alpha {a} {b} {weight}"),
        CliqueNode::Union(..) => "(union".to_string(),
    })
}

pub fn write_nlc(t: &NlcTerm) -> String {
    write_with(t, |n| match n {
        NlcNode::Ver { label, id } => format!("(ver {label} {id}"),
        NlcNode::VerLoop { label, weight, id } => format!("(verloop {label} {weight} {id}"),
        NlcNode::Relabel { map, .. } => {
            let parts: Vec<String> = map.iter().map(|(a, b)| format!("({a} {b})")).collect();
            format!("(relabel ({})", parts.join(" "))
        }
        NlcNode::Join { spec, .. } => format!("(join {}", fmt_spec(spec)),
    })
}

pub fn write_mclique(t: &MTerm) -> String {
    write_with(t, |n| match n {
        MNode::Ver { labels, id } => format!("(mver {} {id}", fmt_set(labels)),
        MNode::VerLoop { labels, weight, id } => {
            format!("(mverloop {} {weight} {id}", fmt_set(labels))
        }
        MNode::Join { spec, h, h2, .. } => format!(
            "(mjoin {} {} {}",
            fmt_spec(spec),
            fmt_set_map(h),
            fmt_set_map(h2)
        ),
    })
}

pub fn write_term(t: &AlgebraTerm) -> String {
    match t {
        AlgebraTerm::Clique(t) => write_clique(t),
        AlgebraTerm::Nlc(t) => write_nlc(t),
        AlgebraTerm::MClique(t) => write_mclique(t),
    }
}

#[cfg(test)]
mod tests {
    use super::super::build::k4;
    use super::super::{eval_clique, eval_mclique, eval_nlc};
    use super::*;

    #[test]
    fn clique_roundtrip() {
        let t = k4();
        let s = write_clique(&t);
        assert!(s.starts_with("(alpha b a 1 (alpha a b 1 (union (rename a b"));
        assert_eq!(parse_clique(&s).unwrap(), t);
        assert_eq!(parse_term(&s).unwrap(), AlgebraTerm::Clique(t));
    }

    #[test]
    fn documented_examples_parse() {
        let u = parse_term("(union (ver a v1) (ver b v2))").unwrap();
        assert!(matches!(u, AlgebraTerm::Clique(_)));
        let j = parse_term("(join ((a b 1 w)) (ver a v1) (verloop b 2 v2))").unwrap();
        let AlgebraTerm::Nlc(j) = j else { panic!() };
        let g = eval_nlc(&j).unwrap().graph;
        assert_eq!(g.arc_by_id("v1", "v2"), Some(&WeightExpr::var("w")));
        assert_eq!(g.arc_by_id("v2", "v2"), Some(&WeightExpr::int(2)));

        let m = parse_term("(mjoin ((a b 1 w)) ((a)->(b)) ((b)->(b)) (mver (a) v1) (mver (b) v2))")
            .unwrap();
        let AlgebraTerm::MClique(m) = m else { panic!() };
        let e = eval_mclique(&m).unwrap();
        assert_eq!(e.graph.arc_count(), 1);
        assert_eq!(parse_mclique(&write_mclique(&m)).unwrap(), m);
        let a = parse_clique("(alpha a b 3 (union (ver a v1) (ver b v2)))").unwrap();
        assert_eq!(eval_clique(&a).unwrap().graph.arc_count(), 1);
    }

    #[test]
    fn explicit_alphabet_survives() {
        let mut t = parse_clique("(ver a v)").unwrap();
        t.extend_alphabet(["z".to_string()]);
        let s = write_clique(&t);
        assert_eq!(s, "(labels (a z) (ver a v))");
        assert_eq!(parse_clique(&s).unwrap().label_count(), 2);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_clique("(union (ver a v1)").is_err());
        assert!(parse_clique("(union (ver a v1) (ver a v1))").is_err());
        assert!(parse_clique("(frob a)").is_err());
        assert!(parse_nlc("(join ((a b 2 w)) (ver a x) (ver b y))").is_err());
        assert!(matches!(
            parse_clique("(ver a v1)\n(ver b v2)"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn deep_terms_do_not_overflow() {
        let mut t = CliqueTerm::new();
        let mut cur = super::super::build::ver(&mut t, "a", "v0");
        for i in 1..50_000 {
            let v = super::super::build::ver(&mut t, "a", &format!("v{i}"));
            cur = super::super::build::union(&mut t, cur, v);
        }
        let s = write_clique(&t);
        assert_eq!(parse_clique(&s).unwrap().len(), t.len());
    }
}
