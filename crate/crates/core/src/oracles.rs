//! Exact exponential-time references: permanent, hamiltonian, perfect
//! matchings and s-t path sums.
//!
//! The permanent and matching enumerations share partial results between
//! branches that agree on the still-relevant part of their state, so they
//! scale with the vertex-ordering frontier rather than with `n!`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{matrix_to_graph, MatrixView, WeightedDigraph};
use crate::poly::{Poly, WeightExpr};

pub const DEFAULT_PERMANENT_CAP: usize = 8;
pub const DEFAULT_HAMILTONIAN_CAP: usize = 10;
pub const DEFAULT_MATCHING_CAP: usize = 14;
pub const DEFAULT_ST_PATHS_CAP: usize = 100_000;
pub const DEFAULT_FRONTIER_STATES_CAP: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleCaps {
    pub permanent: usize,
    pub hamiltonian: usize,
    pub matchings: usize,
    pub st_paths: usize,
    /// Live partial covers allowed in [`hamiltonian_ordered`].
    pub frontier_states: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            permanent: DEFAULT_PERMANENT_CAP,
            hamiltonian: DEFAULT_HAMILTONIAN_CAP,
            matchings: DEFAULT_MATCHING_CAP,
            st_paths: DEFAULT_ST_PATHS_CAP,
            frontier_states: DEFAULT_FRONTIER_STATES_CAP,
        }
    }
}

impl OracleCaps {
    pub fn unlimited() -> Self {
        OracleCaps {
            permanent: usize::MAX,
            hamiltonian: usize::MAX,
            matchings: usize::MAX,
            st_paths: usize::MAX,
            frontier_states: usize::MAX,
        }
    }
}

fn check_cap(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::SizeCap { what, n, cap })
    } else {
        Ok(())
    }
}

fn times(p: &Poly, w: &WeightExpr) -> Poly {
    match w {
        WeightExpr::Const(c) => p.scale(c),
        WeightExpr::Var(_) => p * &w.to_poly(),
    }
}

fn accumulate(map: &mut HashMap<Vec<usize>, Poly>, key: Vec<usize>, val: Poly) {
    match map.get_mut(&key) {
        Some(acc) => *acc += val,
        None => {
            map.insert(key, val);
        }
    }
}

pub fn brute_permanent(m: &MatrixView) -> Result<Poly> {
    permanent(&matrix_to_graph(m), DEFAULT_PERMANENT_CAP)
}

/// Sum over permutations of the graph's adjacency matrix (rows and columns in
/// vertex order). Rows are processed in order; the state is the set of used
/// columns that some later row may still reference.
pub fn permanent(g: &WeightedDigraph, cap: usize) -> Result<Poly> {
    let n = g.n();
    check_cap("permanent", n, cap)?;
    let mut last_ref: Vec<Option<usize>> = vec![None; n];
    for ((i, j), _) in g.arcs() {
        last_ref[j] = Some(last_ref[j].map_or(i, |r| r.max(i)));
    }
    if last_ref.iter().any(Option::is_none) {
        return Ok(Poly::zero());
    }
    let mut retire: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, r) in last_ref.iter().enumerate() {
        retire[r.unwrap()].push(c);
    }

    let mut states: HashMap<Vec<usize>, Poly> = HashMap::new();
    states.insert(Vec::new(), Poly::one());
    for (i, retired) in retire.iter().enumerate() {
        let mut next: HashMap<Vec<usize>, Poly> = HashMap::new();
        for (used, val) in &states {
            for (j, w) in g.out_neighbours(i) {
                let Err(pos) = used.binary_search(&j) else {
                    continue;
                };
                let mut key = used.clone();
                key.insert(pos, j);
                if !retired.iter().all(|c| key.binary_search(c).is_ok()) {
                    continue;
                }
                key.retain(|c| !retire[i].contains(c));
                accumulate(&mut next, key, times(val, w));
            }
        }
        next.retain(|_, v| !v.is_zero());
        states = next;
    }
    Ok(states.remove(&Vec::new()).unwrap_or_else(Poly::zero))
}

pub fn brute_hamiltonian(m: &MatrixView) -> Result<Poly> {
    hamiltonian(&matrix_to_graph(m), DEFAULT_HAMILTONIAN_CAP)
}

/// Sum over directed hamiltonian cycles, each counted once. A single vertex
/// contributes its loop weight.
pub fn hamiltonian(g: &WeightedDigraph, cap: usize) -> Result<Poly> {
    let n = g.n();
    check_cap("hamiltonian", n, cap)?;
    if n == 0 {
        return Ok(Poly::zero());
    }
    if n == 1 {
        return Ok(g.arc(0, 0).map_or_else(Poly::zero, WeightExpr::to_poly));
    }
    let adj: Vec<Vec<(usize, WeightExpr)>> = (0..n)
        .map(|u| {
            g.out_neighbours(u)
                .filter(|&(v, _)| v != u)
                .map(|(v, w)| (v, w.clone()))
                .collect()
        })
        .collect();
    let mut visited = vec![false; n];
    visited[0] = true;
    let mut total = Poly::zero();
    ham_dfs(&adj, 0, 1, &Poly::one(), &mut visited, &mut total);
    Ok(total)
}

/// Open vertex of a partial path cover: `(vertex, flags, other end)` with
/// bit 0 for a chosen in-arc and bit 1 for a chosen out-arc; the other end
/// is meaningful only for path endpoints.
type Open = (usize, u8, usize);

const HAS_IN: u8 = 1;
const HAS_OUT: u8 = 2;
const INTERIOR: u8 = HAS_IN | HAS_OUT;

fn link(state: &[Open], x: usize, y: usize, last_step: bool) -> Option<(Vec<Open>, bool)> {
    let ix = state.iter().position(|o| o.0 == x)?;
    let iy = state.iter().position(|o| o.0 == y)?;
    let (fx, sx) = (state[ix].1, state[ix].2);
    let (fy, ey) = (state[iy].1, state[iy].2);
    if fx & HAS_OUT != 0 || fy & HAS_IN != 0 {
        return None;
    }
    let mut next = state.to_vec();
    next[ix].1 |= HAS_OUT;
    next[iy].1 |= HAS_IN;
    let closes = sx == y;
    if closes {
        let others_done = next.iter().all(|o| o.1 == INTERIOR);
        if !(last_step && others_done) {
            return None;
        }
    } else {
        for o in next.iter_mut() {
            if o.0 == sx {
                o.2 = ey;
            }
            if o.0 == ey {
                o.2 = sx;
            }
        }
    }
    for o in next.iter_mut() {
        if o.1 == INTERIOR {
            o.2 = usize::MAX;
        }
    }
    Some((next, closes))
}

/// Hamiltonian cycles by a frontier sweep over `order`: vertices are added
/// one at a time with their arcs to earlier vertices, and leave the frontier
/// once all their neighbours are in. Exact for every order; a good order
/// keeps the frontier small. Errors when more than `max_states` partial
/// covers are alive at once.
pub fn hamiltonian_ordered(
    g: &WeightedDigraph,
    order: &[usize],
    max_states: usize,
) -> Result<Poly> {
    let n = g.n();
    if order.len() != n || {
        let mut seen = order.to_vec();
        seen.sort_unstable();
        seen.dedup();
        seen.len() != n || seen.last().is_some_and(|&l| l >= n)
    } {
        return Err(Error::MalformedCircuit(
            "vertex order is not a permutation".into(),
        ));
    }
    if n <= 1 {
        return hamiltonian(g, 1);
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut last = pos.clone();
    for ((u, v), _) in g.arcs() {
        if u != v {
            last[u] = last[u].max(pos[v]);
            last[v] = last[v].max(pos[u]);
        }
    }
    let mut states: HashMap<(Vec<Open>, bool), Poly> = HashMap::new();
    states.insert((Vec::new(), false), Poly::one());
    for (i, &v) in order.iter().enumerate() {
        let last_step = i + 1 == n;
        let ins: Vec<(usize, &WeightExpr)> = g
            .arcs()
            .filter(|((a, b), _)| *b == v && *a != v && pos[*a] < i)
            .map(|((a, _), w)| (a, w))
            .collect();
        let outs: Vec<(usize, &WeightExpr)> = g
            .out_neighbours(v)
            .filter(|(b, _)| *b != v && pos[*b] < i)
            .collect();
        let mut next: HashMap<(Vec<Open>, bool), Poly> = HashMap::new();
        for ((state, closed), val) in states {
            if closed {
                continue;
            }
            let mut base = state.clone();
            base.push((v, 0, v));
            let mut options: Vec<(Vec<Open>, bool, Poly)> =
                vec![(base.clone(), false, val.clone())];
            for &(u, w) in &ins {
                if let Some((s, c)) = link(&base, u, v, last_step) {
                    options.push((s, c, times(&val, w)));
                }
            }
            let with_out: Vec<(Vec<Open>, bool, Poly)> = options
                .iter()
                .filter(|o| !o.1)
                .flat_map(|(s, _, p)| {
                    outs.iter().filter_map(move |&(u, w)| {
                        link(s, v, u, last_step).map(|(t, c)| (t, c, times(p, w)))
                    })
                })
                .collect();
            options.extend(with_out);
            for (mut s, c, p) in options {
                if s.iter().any(|o| last[o.0] <= i && o.1 != INTERIOR) {
                    continue;
                }
                s.retain(|o| last[o.0] > i);
                s.sort_unstable();
                match next.get_mut(&(s.clone(), c)) {
                    Some(acc) => *acc += p,
                    None => {
                        next.insert((s, c), p);
                    }
                }
            }
        }
        next.retain(|_, p| !p.is_zero());
        check_cap("hamiltonian frontier states", next.len(), max_states)?;
        states = next;
    }
    Ok(states
        .remove(&(Vec::new(), true))
        .unwrap_or_else(Poly::zero))
}

fn ham_dfs(
    adj: &[Vec<(usize, WeightExpr)>],
    u: usize,
    depth: usize,
    acc: &Poly,
    visited: &mut [bool],
    total: &mut Poly,
) {
    let n = adj.len();
    for (v, w) in &adj[u] {
        if depth == n {
            if *v == 0 {
                *total += times(acc, w);
            }
        } else if !visited[*v] {
            visited[*v] = true;
            ham_dfs(adj, *v, depth + 1, &times(acc, w), visited, total);
            visited[*v] = false;
        }
    }
}

pub fn brute_perfect_matchings(g: &WeightedDigraph) -> Result<Poly> {
    perfect_matchings(g, DEFAULT_MATCHING_CAP)
}

/// Sum over perfect matchings of a symmetric graph; loops never take part.
/// The lowest unmatched vertex is matched first; the state is the set of
/// later vertices that are already matched.
pub fn perfect_matchings(g: &WeightedDigraph, cap: usize) -> Result<Poly> {
    let n = g.n();
    check_cap("perfect matchings", n, cap)?;
    if !g.is_symmetric() {
        return Err(Error::NotSymmetric(
            "matching oracle needs an undirected graph".into(),
        ));
    }
    if n % 2 == 1 {
        return Ok(Poly::zero());
    }
    let mut states: HashMap<Vec<usize>, Poly> = HashMap::new();
    states.insert(Vec::new(), Poly::one());
    for i in 0..n {
        let mut next: HashMap<Vec<usize>, Poly> = HashMap::new();
        for (matched, val) in states {
            if matched.first() == Some(&i) {
                accumulate(&mut next, matched[1..].to_vec(), val);
                continue;
            }
            for (j, w) in g.out_neighbours(i) {
                if j <= i {
                    continue;
                }
                let Err(pos) = matched.binary_search(&j) else {
                    continue;
                };
                let mut key = matched.clone();
                key.insert(pos, j);
                accumulate(&mut next, key, times(&val, w));
            }
        }
        next.retain(|_, v| !v.is_zero());
        states = next;
    }
    Ok(states.remove(&Vec::new()).unwrap_or_else(Poly::zero))
}

pub fn brute_st_paths(g: &WeightedDigraph, s: &str, t: &str) -> Result<Poly> {
    st_paths(g, s, t, DEFAULT_ST_PATHS_CAP)
}

/// Sum over directed s-t paths of an acyclic graph.
pub fn st_paths(g: &WeightedDigraph, s: &str, t: &str, cap: usize) -> Result<Poly> {
    let n = g.n();
    check_cap("s-t paths", n, cap)?;
    let (s, t) = (g.require(s)?, g.require(t)?);
    let mut indeg = vec![0usize; n];
    for ((_, v), _) in g.arcs() {
        indeg[v] += 1;
    }
    let mut order = Vec::with_capacity(n);
    let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    while let Some(u) = ready.pop() {
        order.push(u);
        for (v, _) in g.out_neighbours(u) {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                ready.push(v);
            }
        }
    }
    if order.len() < n {
        let v = (0..n).find(|&v| indeg[v] > 0).unwrap();
        return Err(Error::CycleDetected(g.id(v).to_string()));
    }
    let mut val: Vec<Poly> = vec![Poly::zero(); n];
    val[s] = Poly::one();
    for u in order {
        if val[u].is_zero() || u == t {
            continue;
        }
        let pu = std::mem::take(&mut val[u]);
        for (v, w) in g.out_neighbours(u) {
            val[v] += times(&pu, w);
        }
    }
    Ok(std::mem::take(&mut val[t]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{matrix_to_undirected, parse_matrix};

    fn m(src: &str) -> MatrixView {
        parse_matrix(src).unwrap()
    }

    fn ad_bc() -> Poly {
        &(&Poly::var("a") * &Poly::var("d")) + &(&Poly::var("b") * &Poly::var("c"))
    }

    #[test]
    fn permanent_examples() {
        assert_eq!(brute_permanent(&m("2\na b\nc d\n")).unwrap(), ad_bc());
        assert_eq!(
            brute_permanent(&m("4\n1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n")).unwrap(),
            Poly::one()
        );
        assert!(brute_permanent(&m("3\n0 x y\n0 0 z\n0 0 0\n"))
            .unwrap()
            .is_zero());
        assert_eq!(
            brute_permanent(&m("3\n1 1 1\n1 1 1\n1 1 1\n")).unwrap(),
            Poly::int(6)
        );
    }

    #[test]
    fn permanent_cap() {
        let big = format!("9\n{}", "1 1 1 1 1 1 1 1 1\n".repeat(9));
        assert!(matches!(
            brute_permanent(&m(&big)),
            Err(Error::SizeCap { n: 9, cap: 8, .. })
        ));
    }

    #[test]
    fn hamiltonian_examples() {
        let bc = &Poly::var("b") * &Poly::var("c");
        assert_eq!(brute_hamiltonian(&m("2\n0 b\nc 0\n")).unwrap(), bc);
        assert!(brute_hamiltonian(&m("3\n0 1 0\n1 0 0\n0 0 0\n"))
            .unwrap()
            .is_zero());
        assert_eq!(
            brute_hamiltonian(&m("3\n0 1 1\n1 0 1\n1 1 0\n")).unwrap(),
            Poly::int(2)
        );
        assert_eq!(brute_hamiltonian(&m("1\nx\n")).unwrap(), Poly::var("x"));
        assert!(brute_hamiltonian(&m("1\n0\n")).unwrap().is_zero());
    }

    #[test]
    fn frontier_sweep_agrees_with_search() {
        use rand::seq::SliceRandom;
        let mut r = crate::random::rng(11);
        for n in 1..=7 {
            for _ in 0..30 {
                let g = matrix_to_graph(&crate::random::random_matrix(&mut r, n));
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut r);
                assert_eq!(
                    hamiltonian_ordered(&g, &order, usize::MAX).unwrap(),
                    hamiltonian(&g, 10).unwrap()
                );
            }
        }
        let g = matrix_to_graph(&m("2\n0 b\nc 0\n"));
        assert!(hamiltonian_ordered(&g, &[0, 0], 10).is_err());
    }

    #[test]
    fn matching_examples() {
        let edge = matrix_to_undirected(&m("2\n0 w\nw 0\n")).unwrap();
        assert_eq!(brute_perfect_matchings(&edge).unwrap(), Poly::var("w"));
        let tri = matrix_to_undirected(&m("3\n0 1 1\n1 0 1\n1 1 0\n")).unwrap();
        assert!(brute_perfect_matchings(&tri).unwrap().is_zero());
        let c4 = matrix_to_undirected(&m("4\n0 1 0 1\n1 0 1 0\n0 1 0 1\n1 0 1 0\n")).unwrap();
        assert_eq!(brute_perfect_matchings(&c4).unwrap(), Poly::int(2));
        let directed = matrix_to_graph(&m("2\n0 1\n0 0\n"));
        assert!(matches!(
            brute_perfect_matchings(&directed),
            Err(Error::NotSymmetric(_))
        ));
    }

    #[test]
    fn st_path_examples() {
        let one =
            WeightedDigraph::from_arcs(&["s", "t"], &[("s", "t", WeightExpr::var("x"))]).unwrap();
        assert_eq!(brute_st_paths(&one, "s", "t").unwrap(), Poly::var("x"));
        let two = WeightedDigraph::from_arcs(
            &["s", "p", "q", "t"],
            &[
                ("s", "p", WeightExpr::var("a")),
                ("p", "t", WeightExpr::one()),
                ("s", "q", WeightExpr::var("b")),
                ("q", "t", WeightExpr::one()),
            ],
        )
        .unwrap();
        assert_eq!(
            brute_st_paths(&two, "s", "t").unwrap(),
            &Poly::var("a") + &Poly::var("b")
        );
        let apart = WeightedDigraph::from_arcs(&["s", "t"], &[]).unwrap();
        assert!(brute_st_paths(&apart, "s", "t").unwrap().is_zero());
        let cyc = WeightedDigraph::from_arcs(
            &["s", "t"],
            &[("s", "t", WeightExpr::one()), ("t", "s", WeightExpr::one())],
        )
        .unwrap();
        assert!(matches!(
            brute_st_paths(&cyc, "s", "t"),
            Err(Error::CycleDetected(_))
        ));
    }
}
