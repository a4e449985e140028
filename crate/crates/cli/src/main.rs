//! Command-line front end: design catalogs, circuit listings, randomisation
//! systems, unimodularity checks and block-effect analyses.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use circuitrand::analysis_sim::{analyse, lse_contrast_estimates, simulate_ab, AbParams, AbSummary};
use circuitrand::design_catalog::{
    anova_two_way, choice_k_of_2k, digraph_design, example_digraph, factorial_two_level,
    latin_square_blocks, LatinSquare,
};
use circuitrand::exact_linalg::IntMatrix;
use circuitrand::io::{
    format_blocks, format_matrix, format_rational, format_rational_tuple, parse_blocks, parse_edge_list,
    parse_latin_grid, parse_matrix, parse_rational_vector,
};
use circuitrand::randomisation::{first_violation, fmt_block, indicator};
use circuitrand::unimodular::{incidence_matrix, is_totally_unimodular};
use circuitrand::{
    binary_circuits, circuit_basis, enumerate_circuit_randomisations, nonnegative_circuits, par, to_contrast_form,
    Circuit, ContrastModel, DesignModel, DirectedGraph, EnumerateOptions, Error, RandomisationSystem,
};

const THREADS_VAR: &str = "CIRCUITRAND_THREADS";

#[derive(Parser)]
#[command(name = "circuitrand", version, about = "Circuit-based randomisation schemes for experimental designs")]
struct Cli {
    /// Output style.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    /// One JSON object.
    Records,
}

#[derive(Subcommand)]
enum Command {
    /// Write a design matrix from one of the built-in families.
    Catalog(CatalogArgs),
    /// List the circuits of a matrix.
    Circuits(CircuitsArgs),
    /// Enumerate or check randomisation systems of a design.
    Randomise(RandomiseArgs),
    /// Test a matrix for total unimodularity.
    Tu(TuArgs),
    /// Estimates, block bias, shift invariance and covariance comparison.
    Analyse(AnalyseArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Factorial,
    Anova2,
    Choice,
    Digraph,
    /// Block file of a Latin square (cells numbered row by row).
    Latin,
}

#[derive(Args)]
struct CatalogArgs {
    #[arg(value_enum)]
    family: Family,
    /// Number of factors (factorial) or half the attribute count (choice).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long = "I")]
    i: Option<usize>,
    #[arg(long = "J")]
    j: Option<usize>,
    /// Edge list for `digraph` (defaults to the 5-vertex example).
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Symbol grid for `latin`.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Write the transposed contrast matrix X1^T instead of X.
    #[arg(long)]
    contrast: bool,
    /// Write the vertex-edge incidence matrix (digraph only).
    #[arg(long)]
    incidence: bool,
    /// Also write run and parameter labels to this file.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct CircuitsArgs {
    matrix: PathBuf,
    #[arg(long)]
    nonnegative: bool,
    /// Only circuits with entries in {0, 1}.
    #[arg(long)]
    binary: bool,
    /// Use the transpose of the input.
    #[arg(long)]
    transpose: bool,
}

#[derive(Args)]
struct RandomiseArgs {
    /// Design matrix X (runs x parameters).
    design: PathBuf,
    #[arg(long)]
    enumerate: bool,
    /// Partition file to validate.
    #[arg(long, value_name = "FILE")]
    check: Option<PathBuf>,
    /// Also list the single block of all runs.
    #[arg(long)]
    include_full: bool,
    /// Only use circuits with this support size.
    #[arg(long)]
    block_size: Option<usize>,
    /// Print counts per block-size shape.
    #[arg(long)]
    shapes: bool,
    /// Print refinement covering edges (coarser finer, 1-based system numbers).
    #[arg(long)]
    lattice: bool,
}

#[derive(Args)]
struct TuArgs {
    matrix: PathBuf,
    /// Largest number of square submatrices to examine.
    #[arg(long, default_value_t = 10_000_000)]
    cap: u128,
}

#[derive(Args)]
struct AnalyseArgs {
    /// Design matrix X (not needed with --simulate).
    design: Option<PathBuf>,
    /// Blocks, one per line; each becomes an indicator column of Z.
    #[arg(long)]
    blocks: Option<PathBuf>,
    /// Responses (defaults to zeros).
    #[arg(long)]
    y: Option<PathBuf>,
    /// Block effects (defaults to ones).
    #[arg(long)]
    gamma: Option<PathBuf>,
    /// Run the randomised two-arm simulation instead.
    #[arg(long)]
    simulate: bool,
    #[arg(long, default_value_t = 10)]
    n1: usize,
    #[arg(long, default_value_t = 10)]
    n2: usize,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    theta1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta2: f64,
    #[arg(long, default_value_t = 1.0)]
    sd: f64,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

struct Failure {
    code: u8,
    msg: String,
    /// Report to print before failing.
    report: Option<String>,
}

impl Failure {
    fn new(code: u8, msg: impl Into<String>) -> Self {
        Failure { code, msg: msg.into(), report: None }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::JNotInColumnSpace => 3,
        Error::InvalidPartition(_) | Error::NotARandomisationVector(_) => 4,
        Error::TooLarge { .. } | Error::OutOfBudget { .. } => 5,
        _ => 2,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::new(exit_code(&e), e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(2, format!("cannot read {}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<IntMatrix, Failure> {
    parse_matrix(&read(path)?).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
}

fn int_json(x: &num_bigint::BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

fn matrix_json(m: &IntMatrix) -> Value {
    Value::Array(m.rows().map(|r| Value::Array(r.iter().map(int_json).collect())).collect())
}

fn rationals_json(v: &[BigRational]) -> Value {
    Value::Array(v.iter().map(|r| json!(format_rational(r))).collect())
}

fn records(v: Value) -> String {
    let mut s = v.to_string();
    s.push('\n');
    s
}

fn cmd_catalog(a: &CatalogArgs, fmt: Format) -> Outcome {
    let need = |v: Option<usize>, flag: &str| {
        v.ok_or_else(|| Failure::new(2, format!("this family needs --{flag}")))
    };
    let bad = |e: Error| Failure::new(2, e.to_string());
    if a.family == Family::Latin {
        let grid = a.grid.as_ref().ok_or_else(|| Failure::new(2, "latin needs --grid"))?;
        let cells = parse_latin_grid(&read(grid)?).map_err(bad)?;
        let sq = LatinSquare::new(cells).map_err(bad)?;
        let sys = latin_square_blocks(&sq);
        return Ok(match fmt {
            Format::Text => format_blocks(&sys.one_based_blocks()),
            Format::Records => records(json!({ "blocks": sys.one_based_blocks() })),
        });
    }
    let mut graph: Option<DirectedGraph> = None;
    let design: DesignModel = match a.family {
        Family::Factorial => factorial_two_level(need(a.k, "k")?).map_err(bad)?,
        Family::Anova2 => anova_two_way(need(a.i, "I")?, need(a.j, "J")?).map_err(bad)?,
        Family::Choice => choice_k_of_2k(need(a.k, "k")?).map_err(bad)?,
        Family::Digraph => {
            let g = match &a.edges {
                Some(p) => {
                    let (n, edges) = parse_edge_list(&read(p)?).map_err(bad)?;
                    DirectedGraph::from_one_based(n, &edges).map_err(bad)?
                }
                None => example_digraph(),
            };
            let d = digraph_design(&g).map_err(bad)?;
            graph = Some(g);
            d
        }
        Family::Latin => unreachable!(),
    };
    if a.incidence && graph.is_none() {
        return Err(Failure::new(2, "--incidence applies to the digraph family only"));
    }
    let (matrix, what) = if let Some(g) = graph.as_ref().filter(|_| a.incidence) {
        (incidence_matrix(g), "incidence")
    } else if a.contrast {
        (to_contrast_form(&design)?.x1().transpose(), "contrast_transpose")
    } else {
        (design.x().clone(), "design")
    };
    if let Some(path) = &a.labels {
        let text = format!("{}\n{}\n", design.run_labels().join(" "), design.param_labels().join(" "));
        fs::write(path, text).map_err(|e| Failure::new(2, format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(match fmt {
        Format::Text => format_matrix(&matrix),
        Format::Records => records(json!({
            "kind": what,
            "rows": matrix.n_rows(),
            "cols": matrix.n_cols(),
            "matrix": matrix_json(&matrix),
            "run_labels": design.run_labels(),
            "param_labels": design.param_labels(),
        })),
    })
}

fn cmd_circuits(a: &CircuitsArgs, fmt: Format) -> Outcome {
    let mut m = read_matrix(&a.matrix)?;
    if a.transpose {
        m = m.transpose();
    }
    if m.n_cols() > circuitrand::circuits::MAX_COLUMNS {
        return Err(Failure::new(
            5,
            format!("{} columns exceed the limit of {}", m.n_cols(), circuitrand::circuits::MAX_COLUMNS),
        ));
    }
    let basis = circuit_basis(&m);
    let nonneg = nonnegative_circuits(&basis);
    let binary = binary_circuits(&basis);
    let listed: Vec<&Circuit> = basis
        .circuits()
        .iter()
        .filter(|c| (!a.nonnegative || c.is_nonnegative()) && (!a.binary || c.is_binary()))
        .collect();
    Ok(match fmt {
        Format::Text => {
            let mut out = format!("{} {}\n", listed.len(), m.n_cols());
            for c in &listed {
                let line: Vec<String> = c.vector().iter().map(ToString::to_string).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
            out.push_str(&format!(
                "circuits={} nonnegative={} binary={}\n",
                basis.len(),
                nonneg.len(),
                binary.len()
            ));
            out
        }
        Format::Records => records(json!({
            "columns": m.n_cols(),
            "listed": listed.iter().map(|c| Value::Array(c.vector().iter().map(int_json).collect())).collect::<Vec<_>>(),
            "circuits": basis.len(),
            "nonnegative": nonneg.len(),
            "binary": binary.len(),
        })),
    })
}

fn load_model(path: &Path) -> Result<ContrastModel, Failure> {
    let x = read_matrix(path)?;
    Ok(to_contrast_form(&DesignModel::unlabelled(x))?)
}

fn cmd_randomise(a: &RandomiseArgs, fmt: Format) -> Outcome {
    if !a.enumerate && a.check.is_none() {
        return Err(Failure::new(2, "nothing to do: pass --enumerate and/or --check FILE"));
    }
    let m = load_model(&a.design)?;
    let n = m.n_runs();
    let mut text = String::new();
    let mut rec = serde_json::Map::new();
    if a.enumerate {
        if n > circuitrand::circuits::MAX_COLUMNS {
            return Err(Failure::new(5, format!("{n} runs exceed the limit of {}", circuitrand::circuits::MAX_COLUMNS)));
        }
        let cat = enumerate_circuit_randomisations(
            &m,
            EnumerateOptions { include_full: a.include_full, block_size: a.block_size },
        );
        for s in cat.systems() {
            text.push_str(&format!("{s}\n"));
        }
        text.push_str(&format!("systems={}\n", cat.len()));
        rec.insert(
            "systems".into(),
            json!(cat.systems().iter().map(RandomisationSystem::one_based_blocks).collect::<Vec<_>>()),
        );
        if a.shapes {
            for (shape, count) in cat.shape_counts() {
                text.push_str(&format!("{shape} {count}\n"));
            }
            rec.insert(
                "shapes".into(),
                json!(cat.shape_counts().iter().map(|(s, c)| json!([s.to_string(), c])).collect::<Vec<_>>()),
            );
        }
        if a.lattice {
            for (coarse, fine) in cat.refinement_edges() {
                text.push_str(&format!("{} {}\n", coarse + 1, fine + 1));
            }
            rec.insert(
                "lattice".into(),
                json!(cat.refinement_edges().iter().map(|(c, f)| [c + 1, f + 1]).collect::<Vec<_>>()),
            );
        }
    }
    if let Some(path) = &a.check {
        let blocks = parse_blocks(&read(path)?).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
        let sys = RandomisationSystem::from_one_based(n, &blocks)?;
        match first_violation(&m, &sys)? {
            None => {
                text.push_str("valid\n");
                rec.insert("valid".into(), json!(true));
            }
            Some(v) => {
                let block: Vec<usize> = v.block.iter().map(|i| i + 1).collect();
                text.push_str(&format!(
                    "invalid: block {} has inner product {} with contrast {}\n",
                    fmt_block(&v.block),
                    v.inner_product,
                    v.contrast + 1
                ));
                rec.insert("valid".into(), json!(false));
                rec.insert(
                    "violation".into(),
                    json!({ "block": block, "contrast": v.contrast + 1, "inner_product": int_json(&v.inner_product) }),
                );
                let report = match fmt {
                    Format::Text => text,
                    Format::Records => records(Value::Object(rec)),
                };
                return Err(Failure {
                    code: 4,
                    msg: "partition is not a valid randomisation system".into(),
                    report: Some(report),
                });
            }
        }
    }
    Ok(match fmt {
        Format::Text => text,
        Format::Records => records(Value::Object(rec)),
    })
}

fn cmd_tu(a: &TuArgs, fmt: Format) -> Outcome {
    let m = read_matrix(&a.matrix)?;
    match is_totally_unimodular(&m, a.cap) {
        Ok(tu) => Ok(match fmt {
            Format::Text => format!("totally unimodular: {}\n", if tu { "yes" } else { "no" }),
            Format::Records => records(json!({ "totally_unimodular": tu })),
        }),
        Err(Error::TooLarge { submatrices, cap }) => {
            let report = match fmt {
                Format::Text => format!("refused: {submatrices} square submatrices exceed the cap of {cap}\n"),
                Format::Records => records(json!({
                    "refused": true,
                    "submatrices": submatrices.to_string(),
                    "cap": cap.to_string(),
                })),
            };
            Err(Failure { code: 5, msg: "submatrix budget exceeded".into(), report: Some(report) })
        }
        Err(e) => Err(e.into()),
    }
}

fn read_rationals(path: &Path) -> Result<Vec<BigRational>, Failure> {
    parse_rational_vector(&read(path)?).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.12}")
}

fn simulation_text(s: &AbSummary) -> String {
    format!(
        "replications: {}\nmean: {}\nstd_error: {}\nmin: {}\nmax: {}\n",
        s.params.replications,
        fmt_f64(s.mean),
        fmt_f64(s.std_error),
        fmt_f64(s.min),
        fmt_f64(s.max)
    )
}

fn cmd_analyse(a: &AnalyseArgs, fmt: Format) -> Outcome {
    if a.simulate {
        let s = simulate_ab(&AbParams {
            n1: a.n1,
            n2: a.n2,
            theta: (a.theta1, a.theta2),
            confounder_sd: a.sd,
            replications: a.reps,
            seed: a.seed,
        })?;
        return Ok(match fmt {
            Format::Text => simulation_text(&s),
            Format::Records => records(json!({
                "replications": s.params.replications,
                "mean": fmt_f64(s.mean),
                "std_error": fmt_f64(s.std_error),
                "min": fmt_f64(s.min),
                "max": fmt_f64(s.max),
            })),
        });
    }
    let design = a.design.as_ref().ok_or_else(|| Failure::new(2, "a design file is required unless --simulate"))?;
    let m = load_model(design)?;
    let n = m.n_runs();
    let y = match &a.y {
        Some(p) => read_rationals(p)?,
        None => vec![BigRational::from_integer(0.into()); n],
    };
    let Some(bpath) = &a.blocks else {
        let est = lse_contrast_estimates(&m, &y)?;
        return Ok(match fmt {
            Format::Text => format!("estimates: {}\n", format_rational_tuple(&est)),
            Format::Records => records(json!({ "estimates": rationals_json(&est) })),
        });
    };
    let blocks = parse_blocks(&read(bpath)?).map_err(|e| Failure::new(2, format!("{}: {e}", bpath.display())))?;
    let mut cols = Vec::with_capacity(blocks.len());
    for b in &blocks {
        if b.iter().any(|&i| i == 0 || i > n) {
            return Err(Failure::new(2, format!("block {b:?} has a run outside 1..={n}")));
        }
        let zero_based: Vec<usize> = b.iter().map(|i| i - 1).collect();
        cols.push(indicator(n, &zero_based));
    }
    let z = IntMatrix::from_columns(n, &cols)?;
    let gamma = match &a.gamma {
        Some(p) => read_rationals(p)?,
        None => vec![BigRational::from_integer(1.into()); blocks.len()],
    };
    let r = analyse(&m, &z, &y, &gamma)?;
    let invariance = if r.invariant { "exact" } else { "broken" };
    Ok(match fmt {
        Format::Text => {
            let mut out = format!(
                "estimates: {}\nbias: {}\ninvariance: {invariance}\ncovariance: {}\n",
                format_rational_tuple(&r.phi_hat),
                format_rational_tuple(&r.bias),
                r.covariance_ordering
            );
            if r.confounded {
                out.push_str("confounded: yes\n");
            }
            out
        }
        Format::Records => records(json!({
            "estimates": rationals_json(&r.phi_hat),
            "bias": rationals_json(&r.bias),
            "invariance": invariance,
            "covariance": r.covariance_ordering.to_string(),
            "confounded": r.confounded,
        })),
    })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            par::init_global_threads(n);
            Ok(())
        }
        _ => Err(Failure::new(2, format!("{THREADS_VAR} must be a positive integer, got {raw:?}"))),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::new(2, format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    configure_threads()?;
    let result = match &cli.command {
        Command::Catalog(a) => cmd_catalog(a, cli.format),
        Command::Circuits(a) => cmd_circuits(a, cli.format),
        Command::Randomise(a) => cmd_randomise(a, cli.format),
        Command::Tu(a) => cmd_tu(a, cli.format),
        Command::Analyse(a) => cmd_analyse(a, cli.format),
    };
    match result {
        Ok(text) => emit(&cli.out, &text),
        Err(mut f) => {
            if let Some(report) = f.report.take() {
                emit(&cli.out, &report)?;
            }
            Err(f)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
