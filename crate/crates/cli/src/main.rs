//! `polywidth`: batch front end over the core library.
//!
//! Exit status is 0 on success, 1 when a verdict is a mismatch, an audited
//! bound fails or a `check` rejects its input, and 2 on usage or format errors.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use polywidth::algebra::{
    clique_term_io, parse_term, translate_clique_to_nlc, translate_mclique_to_clique,
    translate_nlc_to_mclique, write_term, AlgebraTerm, MTerm, NlcTerm,
};
use polywidth::circuit::{
    classify_circuit, eval_numeric, eval_symbolic, parse_circuit, validate_layering, write_circuit,
    Circuit,
};
use polywidth::decomposition::{
    parse_pd, validate_path_decomposition, write_pd, PathDecomposition,
};
use polywidth::evaluators::{
    mclique_ham_circuit, mclique_perm_circuit, nlc_matching_circuit, pathwidth_ham_circuit,
    pathwidth_matching_circuit, pathwidth_perm_circuit,
};
use polywidth::graph::{
    graph_to_matrix, matrix_to_graph, matrix_to_undirected, parse_matrix, write_matrix,
    WeightedDigraph,
};
use polywidth::oracles::{hamiltonian, perfect_matchings, permanent, OracleCaps};
use polywidth::poly::{parse_rational, Poly};
use polywidth::random::{random_formula, rng};
use polywidth::reductions::{
    circuit_to_ham_graph, circuit_to_matching_graph, circuit_to_perm_graph,
    formula_to_clique_pipeline, formula_to_lbs, lbs_to_width6_skew, GraphMode,
};
use polywidth::report::{oracle_verdict, roundtrip, RunReport};

#[derive(Parser)]
#[command(
    name = "polywidth",
    version,
    about = "Bounded-width circuits for permanent, hamiltonian and matching polynomials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Value of a circuit, the permanent of a matrix, or the graph of a term.
    Eval(EvalArgs),
    /// Permanent polynomial.
    Per(PolyArgs),
    /// Hamiltonian cycle polynomial.
    Ham(PolyArgs),
    /// Perfect matching polynomial of a symmetric matrix or term.
    Pm(PolyArgs),
    /// Compile a formula into a register program, a skew circuit, a graph or a clique term.
    Compile(CompileArgs),
    /// Translate a term between algebras.
    Translate(TranslateArgs),
    /// Validate a path decomposition or a circuit.
    Check(CheckArgs),
    /// Run the whole formula chain against exact oracles.
    Roundtrip(RoundtripArgs),
    /// Graphviz rendering of a matrix or term graph.
    Dot(GraphSource),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct GraphSource {
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    term: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, group = "input", required = true)]
    circuit: Option<PathBuf>,
    #[arg(long, group = "input")]
    matrix: Option<PathBuf>,
    #[arg(long, group = "input")]
    term: Option<PathBuf>,
    /// Numeric point such as `x=1,y=-2/3`; circuits only.
    #[arg(long, requires = "circuit")]
    at: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Oracle,
    Pathwidth,
    Cliquewidth,
}

#[derive(Args)]
struct PolyArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long, value_enum, default_value = "oracle")]
    method: Method,
    /// Path decomposition, required by `--method pathwidth`.
    #[arg(long)]
    pd: Option<PathBuf>,
    /// Compare the circuit value with the oracle.
    #[arg(long)]
    verify: bool,
    /// Print a run report instead of the bare polynomial.
    #[arg(long)]
    report: bool,
    /// Apply the default oracle size caps.
    #[arg(long)]
    capped: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Formula,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Lbs,
    Skew6,
    PermGraph,
    HamGraph,
    MatchGraph,
    CliqueTerm,
}

#[derive(Args)]
struct CompileArgs {
    #[arg(long, value_enum)]
    from: Source,
    #[arg(long, value_enum)]
    to: Target,
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Where to write the decomposition of an emitted graph.
    #[arg(long)]
    pd_out: Option<PathBuf>,
    /// Graph mode of `--to clique-term`.
    #[arg(long, value_enum, default_value = "per")]
    mode: Mode,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Per,
    Ham,
    Matching,
}

impl Mode {
    fn graph_mode(self) -> GraphMode {
        match self {
            Mode::Per => GraphMode::Per,
            Mode::Ham => GraphMode::Ham,
            Mode::Matching => GraphMode::Matching,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Algebra {
    Nlc2m,
    C2nlc,
    M2c,
    Io,
}

#[derive(Args)]
struct TranslateArgs {
    #[arg(long, value_enum)]
    algebra: Algebra,
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "what")]
struct CheckWhat {
    /// Path decomposition checked against `--matrix`.
    #[arg(long, requires = "matrix")]
    pd: Option<PathBuf>,
    /// Layered circuit; prints its width.
    #[arg(long)]
    layering: Option<PathBuf>,
    /// Circuit; prints its class report.
    #[arg(long)]
    class: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    what: CheckWhat,
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Args)]
struct RoundtripArgs {
    /// Formula to run; random formulas are drawn without it.
    #[arg(long)]
    formula: Option<PathBuf>,
    #[arg(long, default_value_t = 1, conflicts_with = "formula")]
    trials: usize,
    #[arg(long, env = "POLYWIDTH_SEED", default_value_t = 0)]
    seed: u64,
    /// Gate bound of random formulas.
    #[arg(long, default_value_t = 20)]
    size: usize,
    #[arg(long, default_value_t = 4)]
    vars: usize,
    /// Directory receiving the intermediate artifacts of `--formula`.
    #[arg(long, requires = "formula")]
    emit: Option<PathBuf>,
    /// Apply the default oracle size caps; capped oracles report skipped verdicts.
    #[arg(long)]
    capped: bool,
}

/// Exit 1 for a rejected input or a mismatch, 2 for everything else.
enum Failure {
    Rejected(String),
    Error(String),
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Error(s)
    }
}

impl From<&str> for Failure {
    fn from(s: &str) -> Self {
        Failure::Error(s.to_string())
    }
}

type Run = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(a) => eval(a),
        Command::Per(a) => poly(Kind::Per, a),
        Command::Ham(a) => poly(Kind::Ham, a),
        Command::Pm(a) => poly(Kind::Pm, a),
        Command::Compile(a) => compile(a),
        Command::Translate(a) => translate(a),
        Command::Check(a) => check(a),
        Command::Roundtrip(a) => roundtrip_cmd(a),
        Command::Dot(a) => dot(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Rejected(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Error(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn digest(text: &str) -> String {
    let hash = Sha256::digest(text.as_bytes());
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

fn in_file<T>(path: &Path, r: polywidth::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("{}: {e}", path.display()))
}

fn load<T>(
    path: &Path,
    parse: impl Fn(&str) -> polywidth::Result<T>,
) -> Result<(T, String), String> {
    let text = read(path)?;
    let value = in_file(path, parse(&text))?;
    Ok((value, digest(&text)))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), String> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn core(e: polywidth::Error) -> String {
    e.to_string()
}

/// Matrix text with a leading comment naming the vertex of each row.
fn graph_text(g: &WeightedDigraph) -> Result<String, String> {
    let m = graph_to_matrix(g).map_err(core)?;
    Ok(format!(
        "# vertices: {}\n{}",
        g.ids().join(" "),
        write_matrix(&m)
    ))
}

/// The decomposition over matrix indices `1..=n`.
fn pd_by_index(g: &WeightedDigraph, pd: &PathDecomposition) -> PathDecomposition {
    let index: HashMap<&str, String> = g
        .ids()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), (i + 1).to_string()))
        .collect();
    PathDecomposition::new(
        pd.bags()
            .iter()
            .map(|b| b.iter().map(|v| index[v.as_str()].clone()).collect())
            .collect(),
    )
}

fn parse_point(spec: &str) -> Result<HashMap<String, polywidth::poly::Rational>, String> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| format!("`{pair}` is not of the form name=value"))?;
            let v = parse_rational(v.trim()).ok_or_else(|| format!("bad value `{v}`"))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn eval(a: EvalArgs) -> Run {
    if let Some(path) = &a.circuit {
        let (c, _) = load(path, parse_circuit)?;
        match &a.at {
            Some(spec) => println!("{}", eval_numeric(&c, &parse_point(spec)?).map_err(core)?),
            None => println!("{}", eval_symbolic(&c)),
        }
    } else if let Some(path) = &a.matrix {
        let (m, _) = load(path, parse_matrix)?;
        println!(
            "{}",
            permanent(&matrix_to_graph(&m), usize::MAX).map_err(core)?
        );
    } else if let Some(path) = &a.term {
        let (t, _) = load(path, parse_term)?;
        print!("{}", graph_text(&in_file(path, t.eval_graph())?)?);
    }
    Ok(true)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Per,
    Ham,
    Pm,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Per => "per",
            Kind::Ham => "ham",
            Kind::Pm => "pm",
        }
    }
}

fn to_mclique(t: AlgebraTerm) -> polywidth::Result<MTerm> {
    match t {
        AlgebraTerm::MClique(m) => Ok(m),
        AlgebraTerm::Nlc(n) => translate_nlc_to_mclique(&n),
        AlgebraTerm::Clique(c) => translate_nlc_to_mclique(&translate_clique_to_nlc(&c)?),
    }
}

fn to_nlc(t: AlgebraTerm) -> polywidth::Result<NlcTerm> {
    match t {
        AlgebraTerm::Nlc(n) => Ok(n),
        AlgebraTerm::Clique(c) => translate_clique_to_nlc(&c),
        AlgebraTerm::MClique(m) => translate_clique_to_nlc(&translate_mclique_to_clique(&m)?),
    }
}

fn oracle(kind: Kind, g: &WeightedDigraph, caps: &OracleCaps) -> polywidth::Result<Poly> {
    match kind {
        Kind::Per => permanent(g, caps.permanent),
        Kind::Ham => hamiltonian(g, caps.hamiltonian),
        Kind::Pm => perfect_matchings(g, caps.matchings),
    }
}

fn poly(kind: Kind, a: PolyArgs) -> Run {
    let caps = if a.capped {
        OracleCaps::default()
    } else {
        OracleCaps::unlimited()
    };
    let mut report = RunReport::new(format!(
        "{}/{}",
        kind.name(),
        a.method.to_possible_value().unwrap().get_name()
    ));
    let (graph, term) = if let Some(path) = &a.source.matrix {
        let (m, d) = load(path, parse_matrix)?;
        report.input("matrix", d);
        let g = match kind {
            Kind::Pm => in_file(path, matrix_to_undirected(&m))?,
            _ => matrix_to_graph(&m),
        };
        (g, None)
    } else {
        let path = a.source.term.as_ref().expect("clap enforces a source");
        let (t, d) = load(path, parse_term)?;
        report.input("term", d);
        let mut g = in_file(path, t.eval_graph())?;
        if kind == Kind::Pm && g.is_directed() {
            g = in_file(path, g.into_undirected())?;
        }
        (g, Some(t))
    };
    let circuit: Option<Circuit> = match a.method {
        Method::Oracle => None,
        Method::Pathwidth => {
            let path = a.pd.as_ref().ok_or("--method pathwidth needs --pd")?;
            let (pd, d) = load(path, parse_pd)?;
            report.input("pd", d);
            let dp = match kind {
                Kind::Per => pathwidth_perm_circuit(&graph, &pd),
                Kind::Ham => pathwidth_ham_circuit(&graph, &pd),
                Kind::Pm => pathwidth_matching_circuit(&graph, &pd),
            }
            .map_err(core)?;
            report.bound("pd.max_bag", dp.max_bag);
            report.audit(
                "circuit.width",
                validate_layering(&dp.circuit).map_err(core)?,
                dp.width_bound,
            );
            Some(dp.circuit)
        }
        Method::Cliquewidth => {
            let t = term.ok_or("--method cliquewidth needs --term")?;
            let dp = match kind {
                Kind::Per => mclique_perm_circuit(&to_mclique(t).map_err(core)?),
                Kind::Ham => mclique_ham_circuit(&to_mclique(t).map_err(core)?),
                Kind::Pm => nlc_matching_circuit(&to_nlc(t).map_err(core)?),
            }
            .map_err(core)?;
            report.bound("term.labels", dp.labels);
            report.bound("dp.max_descriptions", dp.max_descriptions);
            Some(dp.circuit)
        }
    };
    report.bound("graph.vertices", graph.n());
    let value = match &circuit {
        None => oracle(kind, &graph, &caps).map_err(core)?,
        Some(c) => {
            report.bound("circuit.size", c.size());
            report.bound("circuit.depth", c.depth());
            eval_symbolic(c)
        }
    };
    if a.verify && circuit.is_some() {
        report.verdict(
            "oracle",
            oracle_verdict(&value, oracle(kind, &graph, &caps)).map_err(core)?,
        );
    }
    if a.report {
        print!("{report}");
    } else {
        println!("{value}");
        for (name, v) in &report.verdicts {
            if v.is_failure() {
                eprintln!("verdict.{name}={v}");
            }
        }
    }
    Ok(report.ok())
}

fn compile(a: CompileArgs) -> Run {
    let Source::Formula = a.from;
    let (f, _) = load(&a.input, parse_circuit)?;
    let program = in_file(&a.input, formula_to_lbs(&f))?;
    let skew = || lbs_to_width6_skew(&program).map_err(core);
    let (text, graph) = match a.to {
        Target::Lbs => (program.to_string(), None),
        Target::Skew6 => (write_circuit(&skew()?), None),
        Target::PermGraph | Target::HamGraph | Target::MatchGraph => {
            let s = skew()?;
            let art = match a.to {
                Target::PermGraph => circuit_to_perm_graph(&s),
                Target::HamGraph => circuit_to_ham_graph(&s),
                _ => circuit_to_matching_graph(&s),
            }
            .map_err(core)?;
            (graph_text(&art.graph)?, Some((art.graph, art.pd)))
        }
        Target::CliqueTerm => {
            let p = formula_to_clique_pipeline(&f, a.mode.graph_mode()).map_err(core)?;
            (write_term(&p.term), None)
        }
    };
    emit(a.output.as_deref(), &text)?;
    match (&a.pd_out, graph) {
        (Some(path), Some((g, pd))) => emit(Some(path), &write_pd(&pd_by_index(&g, &pd)))?,
        (Some(_), None) => return Err("--pd-out applies to graph targets only".to_string().into()),
        _ => {}
    }
    Ok(true)
}

fn translate(a: TranslateArgs) -> Run {
    let (t, _) = load(&a.input, parse_term)?;
    let wrong = |want: &str| format!("{}: expected a {want} term", a.input.display());
    let out = match (a.algebra, t) {
        (Algebra::Nlc2m, AlgebraTerm::Nlc(n)) => {
            AlgebraTerm::MClique(translate_nlc_to_mclique(&n).map_err(core)?)
        }
        (Algebra::C2nlc, AlgebraTerm::Clique(c)) => {
            AlgebraTerm::Nlc(translate_clique_to_nlc(&c).map_err(core)?)
        }
        (Algebra::M2c, AlgebraTerm::MClique(m)) => {
            AlgebraTerm::Clique(translate_mclique_to_clique(&m).map_err(core)?)
        }
        (Algebra::Io, AlgebraTerm::Clique(c)) => {
            AlgebraTerm::Clique(clique_term_io(&c).map_err(core)?)
        }
        (Algebra::Nlc2m, _) => return Err(wrong("nlc").into()),
        (Algebra::M2c, _) => return Err(wrong("m-clique").into()),
        (Algebra::C2nlc | Algebra::Io, _) => return Err(wrong("clique").into()),
    };
    emit(a.output.as_deref(), &write_term(&out))?;
    Ok(true)
}

fn check(a: CheckArgs) -> Run {
    let reject =
        |path: &Path, e: polywidth::Error| Failure::Rejected(format!("{}: {e}", path.display()));
    if let Some(path) = &a.what.pd {
        let mpath = a.matrix.as_ref().expect("clap enforces --matrix");
        let (m, _) = load(mpath, parse_matrix)?;
        let (pd, _) = load(path, parse_pd)?;
        let w =
            validate_path_decomposition(&matrix_to_graph(&m), &pd).map_err(|e| reject(path, e))?;
        println!("width={w}");
    } else if let Some(path) = &a.what.layering {
        let (c, _) = load(path, parse_circuit)?;
        println!(
            "width={}",
            validate_layering(&c).map_err(|e| reject(path, e))?
        );
    } else if let Some(path) = &a.what.class {
        let (c, _) = load(path, parse_circuit)?;
        let r = classify_circuit(&c);
        println!("formula={}", r.is_formula);
        println!("skew={}", r.is_skew);
        println!("weakly_skew={}", r.is_weakly_skew);
        println!("width={}", r.width.map_or("none".into(), |w| w.to_string()));
        println!("size={}", r.size);
        println!("depth={}", r.depth);
    }
    Ok(true)
}

fn write_artifacts(dir: &Path, f: &Circuit, report: &mut RunReport) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let put = |report: &mut RunReport, kind: &str, name: &str, text: &str| {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
        report.artifact(kind, path.display().to_string());
        Ok::<(), String>(())
    };
    for mode in [Mode::Per, Mode::Ham, Mode::Matching] {
        let p = formula_to_clique_pipeline(f, mode.graph_mode()).map_err(core)?;
        let name = p.mode.name();
        if mode == Mode::Per {
            put(report, "lbs", "program.lbs", &p.program.to_string())?;
            put(report, "skew6", "skew6.circuit", &write_circuit(&p.skew))?;
        }
        put(
            report,
            &format!("{name}.graph"),
            &format!("{name}.graph"),
            &graph_text(&p.graph)?,
        )?;
        put(
            report,
            &format!("{name}.term"),
            &format!("{name}.term"),
            &write_term(&p.term),
        )?;
    }
    Ok(())
}

fn roundtrip_cmd(a: RoundtripArgs) -> Run {
    let mut caps = OracleCaps::default();
    if !a.capped {
        caps = OracleCaps::unlimited();
        caps.frontier_states = 2_000_000;
    }
    if let Some(path) = &a.formula {
        let (f, d) = load(path, parse_circuit)?;
        let mut r = in_file(path, roundtrip(&f, &caps))?;
        r.input("formula", d);
        if let Some(dir) = &a.emit {
            write_artifacts(dir, &f, &mut r)?;
        }
        print!("{r}");
        return Ok(r.ok());
    }
    let formulas: Vec<Circuit> = {
        let mut r = rng(a.seed);
        (0..a.trials)
            .map(|_| random_formula(&mut r, a.size, a.vars))
            .collect()
    };
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(formulas.len().max(1));
    let mut results: Vec<Option<Result<RunReport, String>>> = vec![None; formulas.len()];
    std::thread::scope(|s| {
        for (w, chunk) in results
            .chunks_mut(formulas.len().div_ceil(workers).max(1))
            .enumerate()
        {
            let formulas = &formulas;
            let caps = &caps;
            s.spawn(move || {
                let base = w * formulas.len().div_ceil(workers).max(1);
                for (i, slot) in chunk.iter_mut().enumerate() {
                    *slot = Some(roundtrip(&formulas[base + i], caps).map_err(core));
                }
            });
        }
    });
    let mut ok = true;
    for (i, (f, res)) in formulas.iter().zip(results).enumerate() {
        let mut r = res.expect("every trial ran")?;
        r.input("seed", a.seed.to_string());
        r.input("trial", i.to_string());
        r.input("formula", digest(&write_circuit(f)));
        if i > 0 {
            println!();
        }
        print!("{r}");
        ok &= r.ok();
    }
    Ok(ok)
}

fn dot(a: GraphSource) -> Run {
    let g = if let Some(path) = &a.matrix {
        matrix_to_graph(&load(path, parse_matrix)?.0)
    } else {
        let path = a.term.as_ref().expect("clap enforces a source");
        let (t, _) = load(path, parse_term)?;
        in_file(path, t.eval_graph())?
    };
    print!("{}", g.to_dot());
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse() {
        let p = parse_point("x=1, y=-2/3").unwrap();
        assert_eq!(p["x"], polywidth::poly::rational(1));
        assert_eq!(p["y"], polywidth::poly::ratio(-2, 3));
        assert!(parse_point("x").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
