use std::collections::HashMap;

use proptest::prelude::*;

use polywidth::algebra::{
    clique_term_io, eval_clique, eval_mclique, eval_nlc, parse_clique, parse_mclique, parse_nlc,
    pd_to_clique_term, translate_clique_to_nlc, translate_nlc_to_mclique, write_clique,
    write_mclique, write_nlc,
};
use polywidth::circuit::{
    classify_circuit, eval_numeric, eval_symbolic, parse_circuit, run_lbs, validate_layering,
    write_circuit, EvalMode, Value,
};
use polywidth::decomposition::{lift_pd_io, parse_pd, validate_path_decomposition, write_pd};
use polywidth::evaluators::{
    mclique_ham_circuit, nlc_matching_circuit, pathwidth_ham_circuit, pathwidth_matching_circuit,
    pathwidth_perm_circuit,
};
use polywidth::graph::{io_graph, matrix_to_graph, parse_matrix, write_matrix};
use polywidth::oracles::{brute_permanent, hamiltonian, perfect_matchings, permanent, st_paths};
use polywidth::poly::ratio;
use polywidth::random::{
    random_clique_term, random_formula, random_matrix, random_mclique_term, random_nlc_term,
    random_pathwidth_graph, random_symmetric_nlc_term, rng,
};
use polywidth::reductions::{
    circuit_to_ham_graph, circuit_to_matching_graph, circuit_to_path_graph, circuit_to_perm_graph,
    formula_to_lbs, lbs_to_width6_skew,
};

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn permanent_is_matching_count_of_io_graph(seed: u64, n in 1usize..=5) {
        let m = random_matrix(&mut rng(seed), n);
        let io = io_graph(&matrix_to_graph(&m));
        prop_assert_eq!(brute_permanent(&m).unwrap(), perfect_matchings(&io, 12).unwrap());
    }

    #[test]
    fn matrix_text_round_trips(seed: u64, n in 1usize..=5) {
        let m = random_matrix(&mut rng(seed), n);
        prop_assert_eq!(parse_matrix(&write_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn circuit_text_round_trips(seed: u64, size in 1usize..=24) {
        let f = random_formula(&mut rng(seed), size, 3);
        let back = parse_circuit(&write_circuit(&f)).unwrap();
        prop_assert_eq!(eval_symbolic(&back), eval_symbolic(&f));
        prop_assert_eq!(back.size(), f.size());
    }

    #[test]
    fn numeric_evaluation_agrees_with_symbolic(seed: u64, a in -5i64..5, b in 1i64..4) {
        let f = random_formula(&mut rng(seed), 16, 3);
        let env: HashMap<String, _> = (0..3).map(|i| (format!("x{i}"), ratio(a + i, b))).collect();
        prop_assert_eq!(
            eval_numeric(&f, &env).unwrap(),
            eval_symbolic(&f).eval(&env).unwrap()
        );
    }

    #[test]
    fn register_program_computes_the_formula(seed: u64, size in 1usize..=20) {
        let f = random_formula(&mut rng(seed), size, 3);
        let p = formula_to_lbs(&f).unwrap();
        let Value::Poly(r1) = run_lbs(&p, EvalMode::Symbolic).unwrap().swap_remove(0) else {
            unreachable!()
        };
        prop_assert_eq!(&r1, &eval_symbolic(&f));
        let skew = lbs_to_width6_skew(&p).unwrap();
        prop_assert!(classify_circuit(&skew).is_skew);
        prop_assert!(validate_layering(&skew).unwrap() <= 6);
        prop_assert_eq!(eval_symbolic(&skew), r1);
    }

    #[test]
    fn skew_circuit_graphs_carry_its_value(seed: u64, size in 1usize..=10) {
        let f = random_formula(&mut rng(seed), size, 2);
        let want = eval_symbolic(&f);
        let skew = lbs_to_width6_skew(&formula_to_lbs(&f).unwrap()).unwrap();
        let open = circuit_to_path_graph(&skew).unwrap();
        prop_assert_eq!(st_paths(&open.graph, &open.s, &open.t, usize::MAX).unwrap(), want.clone());
        let per = circuit_to_perm_graph(&skew).unwrap();
        validate_path_decomposition(&per.graph, &per.pd).unwrap();
        prop_assert!(per.max_bag() <= per.bag_bound());
        prop_assert_eq!(permanent(&per.graph, usize::MAX).unwrap(), want.clone());
        let ham = circuit_to_ham_graph(&skew).unwrap();
        validate_path_decomposition(&ham.graph, &ham.pd).unwrap();
        prop_assert!(ham.max_bag() <= ham.bag_bound());
        let pm = circuit_to_matching_graph(&skew).unwrap();
        validate_path_decomposition(&pm.graph, &pm.pd).unwrap();
        prop_assert_eq!(perfect_matchings(&pm.graph, usize::MAX).unwrap(), want);
    }

    #[test]
    fn term_text_round_trips(seed: u64, k in 1usize..=3, n in 1usize..=7) {
        let mut r = rng(seed);
        let c = random_clique_term(&mut r, k, n);
        prop_assert_eq!(
            eval_clique(&parse_clique(&write_clique(&c)).unwrap()).unwrap(),
            eval_clique(&c).unwrap()
        );
        let t = random_nlc_term(&mut r, k, n);
        prop_assert_eq!(
            eval_nlc(&parse_nlc(&write_nlc(&t)).unwrap()).unwrap(),
            eval_nlc(&t).unwrap()
        );
        let m = random_mclique_term(&mut r, k.min(2), n);
        prop_assert_eq!(
            eval_mclique(&parse_mclique(&write_mclique(&m)).unwrap()).unwrap(),
            eval_mclique(&m).unwrap()
        );
    }

    #[test]
    fn translations_never_add_labels(seed: u64, k in 1usize..=3, n in 1usize..=8) {
        let mut r = rng(seed);
        let c = random_clique_term(&mut r, k, n);
        let nlc = translate_clique_to_nlc(&c).unwrap();
        prop_assert!(nlc.label_count() <= c.label_count());
        let m = translate_nlc_to_mclique(&nlc).unwrap();
        prop_assert!(m.label_count() <= nlc.label_count());
        prop_assert_eq!(eval_mclique(&m).unwrap().graph, eval_clique(&c).unwrap().graph);
    }

    #[test]
    fn io_term_doubles_labels(seed: u64, k in 1usize..=3, n in 1usize..=8) {
        let t = random_clique_term(&mut rng(seed), k, n);
        let io = clique_term_io(&t).unwrap();
        prop_assert_eq!(io.label_count(), 2 * t.label_count());
        prop_assert_eq!(eval_clique(&io).unwrap().graph, io_graph(&eval_clique(&t).unwrap().graph));
    }

    #[test]
    fn pathwidth_terms_use_width_plus_two_labels(
        seed: u64, k in 1usize..=3, n in 1usize..=10, symmetric: bool,
    ) {
        let (g, pd) = random_pathwidth_graph(&mut rng(seed), k, n, symmetric);
        prop_assert_eq!(parse_pd(&write_pd(&pd)).unwrap(), pd.clone());
        let w = validate_path_decomposition(&g, &pd).unwrap();
        validate_path_decomposition(&io_graph(&g), &lift_pd_io(&pd)).unwrap();
        let t = pd_to_clique_term(&g, &pd).unwrap();
        prop_assert!(t.label_count() <= w + 2);
        prop_assert_eq!(eval_clique(&t).unwrap().graph, g);
    }

    #[test]
    fn pathwidth_circuits_match_oracles(seed: u64, k in 1usize..=2, n in 1usize..=8) {
        let mut r = rng(seed);
        let (g, pd) = random_pathwidth_graph(&mut r, k, n, false);
        let ham = pathwidth_ham_circuit(&g, &pd).unwrap();
        prop_assert!(classify_circuit(&ham.circuit).is_skew);
        prop_assert!(validate_layering(&ham.circuit).unwrap() <= ham.width_bound);
        prop_assert_eq!(eval_symbolic(&ham.circuit), hamiltonian(&g, usize::MAX).unwrap());
        let per = pathwidth_perm_circuit(&g, &pd).unwrap();
        prop_assert!(validate_layering(&per.circuit).unwrap() <= per.width_bound);
        prop_assert_eq!(eval_symbolic(&per.circuit), permanent(&g, usize::MAX).unwrap());
        let (s, spd) = random_pathwidth_graph(&mut r, k, n, true);
        let pm = pathwidth_matching_circuit(&s, &spd).unwrap();
        prop_assert!(validate_layering(&pm.circuit).unwrap() <= pm.width_bound);
        prop_assert_eq!(eval_symbolic(&pm.circuit), perfect_matchings(&s, usize::MAX).unwrap());
    }

    #[test]
    fn cliquewidth_circuits_match_oracles(seed: u64, k in 1usize..=2, n in 1usize..=7) {
        let mut r = rng(seed);
        let t = random_symmetric_nlc_term(&mut r, k, n);
        let g = eval_nlc(&t).unwrap().graph;
        let c = nlc_matching_circuit(&t).unwrap();
        prop_assert_eq!(eval_symbolic(&c.circuit), perfect_matchings(&g, usize::MAX).unwrap());
        let m = random_mclique_term(&mut r, k, n);
        let g = eval_mclique(&m).unwrap().graph;
        let c = mclique_ham_circuit(&m).unwrap();
        prop_assert_eq!(eval_symbolic(&c.circuit), hamiltonian(&g, usize::MAX).unwrap());
    }
}
