//! One PASS/FAIL line per acceptance criterion. Every comparison is exact
//! polynomial or graph equality; runtime targets are enforced.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use polywidth::algebra::{
    clique_term_io, eval_clique, eval_mclique, eval_nlc, pd_to_clique_term,
    translate_clique_to_nlc, translate_mclique_to_clique, translate_nlc_to_mclique,
};
use polywidth::circuit::{classify_circuit, eval_symbolic, validate_layering, Circuit};
use polywidth::decomposition::validate_path_decomposition;
use polywidth::evaluators::{
    mclique_ham_circuit, mclique_perm_circuit, nlc_matching_circuit, pathwidth_ham_circuit,
    pathwidth_matching_circuit, pathwidth_perm_circuit, PathDpCircuit,
};
use polywidth::graph::{io_graph, matrix_to_graph};
use polywidth::oracles::{
    brute_perfect_matchings, brute_permanent, hamiltonian, perfect_matchings, permanent, st_paths,
    OracleCaps,
};
use polywidth::random::{
    random_clique_term, random_dense_mclique_term, random_dense_symmetric_nlc_term, random_formula,
    random_matrix, random_mclique_term, random_nlc_term, random_pathwidth_graph,
    random_symmetric_nlc_term, rng,
};
use polywidth::reductions::{
    circuit_to_ham_graph, circuit_to_matching_graph, circuit_to_path_graph, circuit_to_perm_graph,
    formula_to_lbs, lbs_to_width6_skew,
};
use polywidth::report::{roundtrip, Verdict, UNREPRODUCED_NOTE};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

const FORMULA_SEED: u64 = 0x5eed_0002;
const FORMULAS: usize = 100;

fn formula_corpus() -> Vec<Circuit> {
    let mut r = rng(FORMULA_SEED);
    (0..FORMULAS)
        .map(|_| random_formula(&mut r, 20, 4))
        .collect()
}

fn within(t: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let e = t.elapsed();
    if e > limit {
        Err(format!("{what} took {e:.1?}, target {limit:?}"))
    } else {
        Ok(())
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_io_identity() -> Outcome {
    let t = Instant::now();
    let mut r = rng(1);
    for i in 0..200 {
        let n = r.gen_range(1..=6);
        let m = random_matrix(&mut r, n);
        let per = brute_permanent(&m).map_err(|e| e.to_string())?;
        let io = io_graph(&matrix_to_graph(&m));
        let pm = brute_perfect_matchings(&io).map_err(|e| e.to_string())?;
        ensure(per == pm, || {
            format!("matrix {i}: per {per} vs matchings {pm}")
        })?;
    }
    within(t, Duration::from_secs(30), "200 matrices")?;
    Ok(format!("200 matrices, n <= 6, in {:.1?}", t.elapsed()))
}

fn c2_formula_chain(corpus: &[Circuit]) -> Outcome {
    let t = Instant::now();
    let mut max_bag = 0;
    let mut max_n = 0;
    for (i, f) in corpus.iter().enumerate() {
        let err = |e: polywidth::Error| format!("formula {i}: {e}");
        let want = eval_symbolic(f);
        let p = formula_to_lbs(f).map_err(err)?;
        let skew = lbs_to_width6_skew(&p).map_err(err)?;
        ensure(classify_circuit(&skew).is_skew, || {
            format!("formula {i}: not skew")
        })?;
        let w = validate_layering(&skew).map_err(err)?;
        ensure(w <= 6, || format!("formula {i}: width {w} > 6"))?;
        let open = circuit_to_path_graph(&skew).map_err(err)?;
        let paths = st_paths(&open.graph, &open.s, &open.t, usize::MAX).map_err(err)?;
        ensure(paths == want, || {
            format!("formula {i}: s-t paths {paths} vs {want}")
        })?;
        let a = circuit_to_perm_graph(&skew).map_err(err)?;
        validate_path_decomposition(&a.graph, &a.pd).map_err(err)?;
        ensure(a.max_bag() <= 21, || {
            format!("formula {i}: bag {} > 21", a.max_bag())
        })?;
        let per = permanent(&a.graph, usize::MAX).map_err(err)?;
        ensure(per == want, || format!("formula {i}: per {per} vs {want}"))?;
        max_bag = max_bag.max(a.max_bag());
        max_n = max_n.max(a.graph.n());
    }
    within(t, Duration::from_secs(300), "formula chain")?;
    Ok(format!(
        "{FORMULAS} formulas, max bag {max_bag}/21, largest graph {max_n} vertices, in {:.1?}",
        t.elapsed()
    ))
}

fn c3_ham_and_matching(corpus: &[Circuit]) -> Outcome {
    let mut checked = 0;
    let mut max_ham_bag = 0;
    for (i, f) in corpus.iter().enumerate() {
        let err = |e: polywidth::Error| format!("formula {i}: {e}");
        let skew = lbs_to_width6_skew(&formula_to_lbs(f).map_err(err)?).map_err(err)?;
        if circuit_to_perm_graph(&skew).map_err(err)?.graph.n() > 12 {
            continue;
        }
        checked += 1;
        let want = eval_symbolic(f);
        let h = circuit_to_ham_graph(&skew).map_err(err)?;
        ensure(h.max_bag() <= 44, || {
            format!("formula {i}: ham bag {} > 44", h.max_bag())
        })?;
        max_ham_bag = max_ham_bag.max(h.max_bag());
        let ham = hamiltonian(&h.graph, usize::MAX).map_err(err)?;
        ensure(ham == want, || format!("formula {i}: ham {ham} vs {want}"))?;
        let m = circuit_to_matching_graph(&skew).map_err(err)?;
        let pm = perfect_matchings(&m.graph, usize::MAX).map_err(err)?;
        ensure(pm == want, || {
            format!("formula {i}: matchings {pm} vs {want}")
        })?;
    }
    ensure(checked > 0, || {
        "no formula gives a graph on at most 12 vertices".into()
    })?;
    Ok(format!(
        "{checked} formulas with graphs on <= 12 vertices, max ham bag {max_ham_bag}/44"
    ))
}

fn c4_translations() -> Outcome {
    let t = Instant::now();
    let mut r = rng(4);
    for i in 0..200 {
        let (k, n) = (r.gen_range(1..=3), r.gen_range(1..=8));
        let nlc = random_nlc_term(&mut r, k, n);
        let m = translate_nlc_to_mclique(&nlc).map_err(|e| format!("nlc {i}: {e}"))?;
        let (g1, g2) = (
            eval_nlc(&nlc).unwrap().graph,
            eval_mclique(&m).unwrap().graph,
        );
        ensure(g1 == g2, || format!("nlc {i}: graphs differ"))?;
        ensure(m.label_count() <= nlc.label_count(), || {
            format!("nlc {i}: labels grew")
        })?;
    }
    for i in 0..200 {
        let (k, n) = (r.gen_range(1..=3), r.gen_range(1..=8));
        let c = random_clique_term(&mut r, k, n);
        let nlc = translate_clique_to_nlc(&c).map_err(|e| format!("clique {i}: {e}"))?;
        let (g1, g2) = (
            eval_clique(&c).unwrap().graph,
            eval_nlc(&nlc).unwrap().graph,
        );
        ensure(g1 == g2, || format!("clique {i}: graphs differ"))?;
        ensure(nlc.label_count() <= c.label_count(), || {
            format!("clique {i}: labels grew")
        })?;
    }
    let mut over = Vec::new();
    for i in 0..200 {
        let (k, n) = (r.gen_range(1..=2), r.gen_range(1..=8));
        let m = random_mclique_term(&mut r, k, n);
        let c = translate_mclique_to_clique(&m).map_err(|e| format!("m-clique {i}: {e}"))?;
        let (g1, g2) = (
            eval_mclique(&m).unwrap().graph,
            eval_clique(&c).unwrap().graph,
        );
        ensure(g1 == g2, || format!("m-clique {i}: graphs differ"))?;
        if c.label_count() > (1 << (k + 1)) - 1 {
            over.push(i);
        }
    }
    ensure(over.is_empty(), || {
        format!(
            "m-clique to clique needs 2^(k+1) labels on {} of 200 terms (first: {}): a join \
             relabels the empty set differently on the two sides while both sides use all 2^k \
             label sets; graphs agree on all 200",
            over.len(),
            over[0]
        )
    })?;
    within(t, Duration::from_secs(120), "translations")?;
    Ok(format!("3 x 200 terms, in {:.1?}", t.elapsed()))
}

fn c5_pathwidth_terms() -> Outcome {
    let mut r = rng(5);
    let mut worst = 0i64;
    for i in 0..100 {
        let (k, n) = (r.gen_range(1..=3), r.gen_range(1..=12));
        let symmetric = r.gen_bool(0.5);
        let (g, pd) = random_pathwidth_graph(&mut r, k, n, symmetric);
        let w = validate_path_decomposition(&g, &pd).map_err(|e| format!("graph {i}: {e}"))?;
        let t = pd_to_clique_term(&g, &pd).map_err(|e| format!("graph {i}: {e}"))?;
        ensure(t.label_count() <= w + 2, || {
            format!("graph {i}: {} labels, width {w}", t.label_count())
        })?;
        ensure(eval_clique(&t).unwrap().graph == g, || {
            format!("graph {i}: graphs differ")
        })?;
        worst = worst.max(t.label_count() as i64 - (w as i64 + 2));
    }
    Ok(format!("100 graphs, labels - (width + 2) at most {worst}"))
}

fn c6_io_terms() -> Outcome {
    let mut r = rng(6);
    for i in 0..100 {
        let (k, n) = (r.gen_range(1..=3), r.gen_range(1..=10));
        let t = random_clique_term(&mut r, k, n);
        let io = clique_term_io(&t).map_err(|e| format!("term {i}: {e}"))?;
        ensure(io.label_count() == 2 * t.label_count(), || {
            format!(
                "term {i}: {} labels for k = {}",
                io.label_count(),
                t.label_count()
            )
        })?;
        let want = io_graph(&eval_clique(&t).unwrap().graph);
        ensure(eval_clique(&io).unwrap().graph == want, || {
            format!("term {i}: graphs differ")
        })?;
    }
    Ok("100 terms, exactly 2k labels".into())
}

/// Least squares slope of `ln(mean size)` against `ln(n)`.
fn log_log_slope(sizes: &BTreeMap<usize, Vec<usize>>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = sizes
        .iter()
        .filter(|(&n, _)| n >= 2)
        .map(|(&n, v)| {
            let mean = v.iter().sum::<usize>() as f64 / v.len() as f64;
            ((n as f64).ln(), mean.ln())
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(num / den)
}

fn c7_cliquewidth_circuits() -> Outcome {
    let mut r = rng(7);
    let mut notes = Vec::new();
    let mut sizes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut nonzero = 0;
    for i in 0..100 {
        let (k, n) = (r.gen_range(1..=3), r.gen_range(1..=10));
        let t = if i % 2 == 0 {
            random_symmetric_nlc_term(&mut r, k, n)
        } else {
            random_dense_symmetric_nlc_term(&mut r, k, n)
        };
        let c = nlc_matching_circuit(&t).map_err(|e| format!("nlc {i}: {e}"))?;
        let want = perfect_matchings(&eval_nlc(&t).unwrap().graph, usize::MAX).unwrap();
        let got = eval_symbolic(&c.circuit);
        ensure(got == want, || format!("nlc {i}: {got} vs {want}"))?;
        nonzero += usize::from(!want.is_zero());
        sizes.entry(n).or_default().push(c.circuit.size());
    }
    notes.push(format!(
        "matching slope {:.2} with {nonzero}/100 nonzero",
        log_log_slope(&sizes).unwrap_or(f64::NAN)
    ));
    nonzero = 0;
    sizes.clear();
    for i in 0..100 {
        let (k, n) = (r.gen_range(1..=2), r.gen_range(1..=9));
        let t = if i % 2 == 0 {
            random_mclique_term(&mut r, k, n)
        } else {
            random_dense_mclique_term(&mut r, k, n)
        };
        let c = mclique_ham_circuit(&t).map_err(|e| format!("ham {i}: {e}"))?;
        let want = hamiltonian(&eval_mclique(&t).unwrap().graph, usize::MAX).unwrap();
        let got = eval_symbolic(&c.circuit);
        ensure(got == want, || format!("ham {i}: {got} vs {want}"))?;
        nonzero += usize::from(!want.is_zero());
        sizes.entry(n).or_default().push(c.circuit.size());
    }
    notes.push(format!(
        "ham slope {:.2} with {nonzero}/100 nonzero",
        log_log_slope(&sizes).unwrap_or(f64::NAN)
    ));
    nonzero = 0;
    sizes.clear();
    for i in 0..50 {
        let (k, n) = (r.gen_range(1..=2), r.gen_range(1..=7));
        let t = if i % 2 == 0 {
            random_mclique_term(&mut r, k, n)
        } else {
            random_dense_mclique_term(&mut r, k, n)
        };
        let c = mclique_perm_circuit(&t).map_err(|e| format!("perm {i}: {e}"))?;
        let want = permanent(&eval_mclique(&t).unwrap().graph, usize::MAX).unwrap();
        let got = eval_symbolic(&c.circuit);
        ensure(got == want, || format!("perm {i}: {got} vs {want}"))?;
        nonzero += usize::from(!want.is_zero());
        sizes.entry(n).or_default().push(c.circuit.size());
    }
    notes.push(format!(
        "perm slope {:.2} with {nonzero}/50 nonzero",
        log_log_slope(&sizes).unwrap_or(f64::NAN)
    ));
    Ok(format!(
        "250 terms oracle-equal; size growth (informational): {}",
        notes.join(", ")
    ))
}

fn c8_pathwidth_circuits() -> Outcome {
    let mut r = rng(8);
    // pd width -> (largest realized width, guaranteed bound) per kind
    let mut seen: BTreeMap<(&str, usize), (usize, usize)> = BTreeMap::new();
    let mut record = |kind: &'static str, w: usize, d: &PathDpCircuit| -> Result<(), String> {
        let rep = classify_circuit(&d.circuit);
        ensure(rep.is_skew, || format!("{kind}: circuit is not skew"))?;
        let width = validate_layering(&d.circuit).map_err(|e| format!("{kind}: {e}"))?;
        ensure(width <= d.width_bound, || {
            format!("{kind}: width {width} > bound {}", d.width_bound)
        })?;
        let e = seen.entry((kind, w)).or_insert((0, d.width_bound));
        e.0 = e.0.max(width);
        e.1 = e.1.max(d.width_bound);
        Ok(())
    };
    let mut nonzero: BTreeMap<&str, usize> = BTreeMap::new();
    for i in 0..100 {
        let (k, n) = (r.gen_range(1..=2), r.gen_range(1..=10));
        let (g, pd) = random_pathwidth_graph(&mut r, k, n, false);
        let w = validate_path_decomposition(&g, &pd).unwrap();
        let ham = pathwidth_ham_circuit(&g, &pd).map_err(|e| format!("ham {i}: {e}"))?;
        record("ham", w, &ham)?;
        let want = hamiltonian(&g, usize::MAX).unwrap();
        ensure(eval_symbolic(&ham.circuit) == want, || {
            format!("ham {i}: value differs")
        })?;
        *nonzero.entry("ham").or_default() += usize::from(!want.is_zero());
        let per = pathwidth_perm_circuit(&g, &pd).map_err(|e| format!("perm {i}: {e}"))?;
        record("perm", w, &per)?;
        let want = permanent(&g, usize::MAX).unwrap();
        ensure(eval_symbolic(&per.circuit) == want, || {
            format!("perm {i}: value differs")
        })?;
        *nonzero.entry("perm").or_default() += usize::from(!want.is_zero());

        let (s, spd) = random_pathwidth_graph(&mut r, k, n, true);
        let w = validate_path_decomposition(&s, &spd).unwrap();
        let m = pathwidth_matching_circuit(&s, &spd).map_err(|e| format!("matching {i}: {e}"))?;
        record("matching", w, &m)?;
        let want = perfect_matchings(&s, usize::MAX).unwrap();
        ensure(eval_symbolic(&m.circuit) == want, || {
            format!("matching {i}: value differs")
        })?;
        *nonzero.entry("matching").or_default() += usize::from(!want.is_zero());
    }
    let summary: Vec<String> = seen
        .iter()
        .map(|((kind, w), (got, bound))| format!("{kind}@pw{w}: {got}<={bound}"))
        .collect();
    Ok(format!(
        "100 instances per kind, skew and layered, nonzero {:?}; widths {}",
        nonzero,
        summary.join(" ")
    ))
}

fn c9_pipeline_labels(corpus: &[Circuit], caps: &OracleCaps) -> Outcome {
    let t = Instant::now();
    let mut max = BTreeMap::new();
    for (i, f) in corpus.iter().enumerate() {
        let rep = roundtrip(f, caps).map_err(|e| format!("formula {i}: {e}"))?;
        ensure(rep.violations.is_empty(), || {
            format!("formula {i}: {:?}", rep.violations)
        })?;
        for (name, v) in &rep.verdicts {
            ensure(*v == Verdict::Equal, || format!("formula {i}: {name} {v}"))?;
        }
        for (name, value) in &rep.bounds {
            if let Some(mode) = name.strip_suffix(".labels") {
                let used: usize = value.split('/').next().unwrap().parse().unwrap();
                let e = max.entry(mode.to_string()).or_insert(0);
                *e = (*e).max(used);
            }
        }
    }
    let (per, ham, pm) = (max["per"], max["ham"], max["matching"]);
    ensure(per <= 22 && ham <= 45 && pm <= 44, || {
        format!("labels {per}/{ham}/{pm}")
    })?;
    Ok(format!(
        "max labels per {per}/22, ham {ham}/45, matching {pm}/44, all oracles equal, in {:.1?}",
        t.elapsed()
    ))
}

fn c10_unreproduced_constants(corpus: &[Circuit], caps: &OracleCaps) -> Outcome {
    let rep = roundtrip(&corpus[0], caps).map_err(|e| e.to_string())?;
    let text = rep.to_string();
    let stated = text.contains(&format!("note={UNREPRODUCED_NOTE}"))
        && ["13", "34", "26"]
            .iter()
            .all(|c| UNREPRODUCED_NOTE.contains(c));
    ensure(stated, || {
        "report does not state the unreproduced constants".into()
    })?;
    Ok("constants 13/34/26 not reproduced; every roundtrip report says so".into())
}

fn main() {
    let corpus = formula_corpus();
    let mut caps = OracleCaps::unlimited();
    caps.frontier_states = 2_000_000;
    let criteria: Vec<Criterion> = vec![
        ("io identity", Box::new(c1_io_identity)),
        ("formula chain", Box::new(|| c2_formula_chain(&corpus))),
        (
            "ham and matching graphs",
            Box::new(|| c3_ham_and_matching(&corpus)),
        ),
        ("algebra translations", Box::new(c4_translations)),
        ("pathwidth to clique terms", Box::new(c5_pathwidth_terms)),
        ("inside-outside terms", Box::new(c6_io_terms)),
        ("clique-width circuits", Box::new(c7_cliquewidth_circuits)),
        ("pathwidth circuits", Box::new(c8_pathwidth_circuits)),
        (
            "pipeline labels",
            Box::new(|| c9_pipeline_labels(&corpus, &caps)),
        ),
        (
            "unreproduced constants",
            Box::new(|| c10_unreproduced_constants(&corpus, &caps)),
        ),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
