//! `domset`: two-stage dominating set pipeline over graph files.
//!
//! Exit codes: 0 success, 1 usage error, 2 input error, 3 internal
//! invariant violation.

use clap::{Args, Parser, Subcommand, ValueEnum};
use domset::bench::{
    csv_header, run_batch, to_csv, to_json_lines, BenchError, GenSpec, InstanceSource, RunConfig,
};
use domset::bounds::{bounds_report, ExactBudget};
use domset::graph::{is_dominating, Graph};
use domset::io::{parse_graph, GraphFormat, ParseError};
use domset::purify::{run_procedure, tighten, ProcedureId};
use domset::random::gen_random_graph;
use domset::stage1::greedy_dominating_set;
use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    " (tiebreak=lowest-id, repair=on)"
);

#[derive(Parser)]
#[command(name = "domset", version = VERSION, about = "Greedy + purification dominating set solver")]
struct Cli {
    /// More log output (-v info, -vv debug, -vvv trace).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the reduced set.
    Solve(SolveArgs),
    /// Run a batch of instances and emit CSV/JSON artifacts.
    Bench(BenchArgs),
    /// Print size bounds and the degree profile of one instance.
    Bounds(BoundsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Auto,
    Edgelist,
    Dimacs,
}

impl From<FormatArg> for GraphFormat {
    fn from(f: FormatArg) -> GraphFormat {
        match f {
            FormatArg::Auto => GraphFormat::Auto,
            FormatArg::Edgelist => GraphFormat::EdgeList,
            FormatArg::Dimacs => GraphFormat::Dimacs,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// Graph file; omit when generating with --gen.
    #[arg(value_name = "FILE", required_unless_present = "gen", conflicts_with = "gen")]
    input: Option<PathBuf>,
    /// Generate the instance instead: gnm:N:M:seedS or gnp:N:P:seedS.
    #[arg(long, value_name = "SPEC")]
    gen: Option<String>,
    /// Input format; auto sniffs the first meaningful line.
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    format: FormatArg,
}

fn parse_weight(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn parse_proc(s: &str) -> Result<ProcedureId, String> {
    ProcedureId::from_str(s).map_err(|e| e.to_string())
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Procedures to run (pp0..pp4, repeatable or comma separated);
    /// default all five.
    #[arg(long = "proc", value_name = "PROC", value_delimiter = ',', value_parser = parse_proc)]
    procs: Vec<ProcedureId>,
    /// Outer cover weight for PP2/PP3.
    #[arg(long, default_value_t = 1.0, value_parser = parse_weight)]
    alpha: f64,
    /// Inner cover weight for PP2/PP3.
    #[arg(long, default_value_t = 1.0, value_parser = parse_weight)]
    beta: f64,
    /// Extra minimalization sweep over each result.
    #[arg(long)]
    tighten: bool,
    /// Write per-procedure JSON records here (one line each).
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Write the greedy insertion trace here as JSON lines.
    #[arg(long, value_name = "PATH")]
    trace_out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance files (alternative to --glob / --gen).
    #[arg(value_name = "FILES")]
    files: Vec<PathBuf>,
    /// Shell-style pattern expanded internally; quote it.
    #[arg(long, value_name = "PATTERN")]
    glob: Option<String>,
    /// Generator spec, e.g. gnm:1000:1200:seed7.
    #[arg(long, value_name = "SPEC")]
    gen: Option<String>,
    /// How many instances to generate (seeds S, S+1, ...).
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Input format for files; auto sniffs each one.
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    format: FormatArg,
    /// Procedures to run; default all five.
    #[arg(long = "proc", value_name = "PROC", value_delimiter = ',', value_parser = parse_proc)]
    procs: Vec<ProcedureId>,
    /// Run every procedure (the default; kept for explicit scripts).
    #[arg(long, conflicts_with = "procs")]
    all_procs: bool,
    #[arg(long, default_value_t = 1.0, value_parser = parse_weight)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0, value_parser = parse_weight)]
    beta: f64,
    /// Extra minimalization sweep over each result.
    #[arg(long)]
    tighten: bool,
    /// Attempt the exact optimum up to this many vertices.
    #[arg(long, default_value_t = 25, value_name = "N")]
    exact_max_n: usize,
    /// Node budget for the exact search.
    #[arg(long, default_value_t = 5_000_000, value_name = "NODES")]
    exact_nodes: u64,
    /// Record wall times in the artifacts (breaks byte-reproducibility).
    #[arg(long)]
    timings: bool,
    /// CSV output path; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// JSON-lines output path (reports plus trailing aggregate).
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Also write the report as one JSON object.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Input(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> CliError {
        match e {
            BenchError::NoInstances => CliError::Input(e.to_string()),
            BenchError::BadGenSpec { .. } | BenchError::Gen(_) => CliError::Usage(e.to_string()),
            BenchError::Internal { .. } | BenchError::Purify(_) => {
                CliError::Internal(e.to_string())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_logging(cli.verbose);
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Bounds(args) => cmd_bounds(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn init_logging(verbosity: u8) {
    let level = match verbosity {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
}

fn load_graph(input: &InputArgs) -> Result<Graph, CliError> {
    if let Some(spec) = &input.gen {
        let spec: GenSpec = spec.parse().map_err(|e: BenchError| CliError::from(e))?;
        return gen_random_graph(spec.n, spec.model, spec.seed, true)
            .map_err(|e| CliError::Usage(e.to_string()));
    }
    let path = input.input.as_ref().expect("clap requires an input source");
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_graph(&text, input.format.into())
        .map_err(|e: ParseError| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let fail = |e: &dyn fmt::Display| CliError::Input(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| fail(&e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| fail(&e))?;
    tmp.persist(path).map_err(|e| fail(&e))?;
    Ok(())
}

fn requested(procs: &[ProcedureId]) -> Vec<ProcedureId> {
    if procs.is_empty() {
        ProcedureId::ALL.to_vec()
    } else {
        ProcedureId::ALL
            .into_iter()
            .filter(|p| procs.contains(p))
            .collect()
    }
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let g = load_graph(&args.input)?;
    let (s, forest, trace) = greedy_dominating_set(&g);
    if let Some(path) = &args.trace_out {
        write_atomic(path, &trace.to_json_lines())?;
    }

    let procs = requested(&args.procs);
    let mut lines = Vec::new();
    let mut logs = String::new();
    for &p in &procs {
        let mut result = run_procedure(&g, &s, &forest, p, args.alpha, args.beta)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        if args.tighten {
            tighten(&g, &s, &mut result);
        }
        if !is_dominating(&g, &result.s_star) {
            return Err(CliError::Internal(format!(
                "{p} returned a non-dominating set"
            )));
        }
        let mut ids: Vec<u64> = result.s_star.iter().map(|v| g.label(v)).collect();
        ids.sort_unstable();
        let ids = ids
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        let body = format!("S={} S*={}: {}", s.len(), result.s_star.len(), ids);
        lines.push(if procs.len() == 1 {
            body
        } else {
            format!("{p} {body}")
        });
        logs.push_str(&result.json_log(&g));
        logs.push('\n');
    }
    if let Some(path) = &args.json {
        write_atomic(path, &logs)?;
    }
    for line in lines {
        println!("{line}");
    }
    Ok(())
}

fn workers_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("DOMSET_WORKERS") {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("DOMSET_WORKERS must be a number, got `{s}`"))),
        Err(_) => Ok(None),
    }
}

fn bench_source(args: &BenchArgs) -> Result<InstanceSource, CliError> {
    let mut sources = 0;
    sources += usize::from(!args.files.is_empty());
    sources += usize::from(args.glob.is_some());
    sources += usize::from(args.gen.is_some());
    if sources != 1 {
        return Err(CliError::Usage(
            "exactly one instance source required: FILES, --glob or --gen".into(),
        ));
    }
    if let Some(pattern) = &args.glob {
        let mut files = Vec::new();
        let paths =
            glob::glob(pattern).map_err(|e| CliError::Usage(format!("bad pattern: {e}")))?;
        for entry in paths {
            match entry {
                Ok(p) if p.is_file() => files.push(p),
                Ok(_) => {}
                Err(e) => log::warn!("skipping unreadable match: {e}"),
            }
        }
        return Ok(InstanceSource::Files(files));
    }
    if let Some(spec) = &args.gen {
        if args.count == 0 {
            return Err(CliError::Usage("--count must be at least 1".into()));
        }
        let spec: GenSpec = spec.parse()?;
        return Ok(InstanceSource::Generated {
            spec,
            count: args.count,
        });
    }
    Ok(InstanceSource::Files(args.files.clone()))
}

fn format_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "n/a".into())
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let source = bench_source(&args)?;
    let config = RunConfig {
        procedures: requested(&args.procs),
        alpha: args.alpha,
        beta: args.beta,
        exact_max_n: args.exact_max_n,
        exact_budget: ExactBudget {
            max_nodes: args.exact_nodes,
            max_millis: None,
        },
        tighten: args.tighten,
        timings: args.timings,
    };
    let workers = workers_from_env()?;
    let outcome = run_batch(&source, &config, workers)?;
    if !outcome.skipped.is_empty() {
        log::warn!("skipped {} unreadable instance(s)", outcome.skipped.len());
    }

    let csv = to_csv(&outcome.reports);
    if let Some(path) = &args.json {
        write_atomic(path, &to_json_lines(&outcome.reports, &outcome.aggregate))?;
    }
    match &args.out {
        Some(path) => {
            write_atomic(path, &csv)?;
            let a = &outcome.aggregate;
            println!(
                "instances={} mean_best_improvement_vs_pp0={} optimal_hit_rate={} \
                 mean_abs_error_nonoptimal={:.2} mean_ratio_to_upper={}",
                a.instance_count,
                format_opt(a.mean_best_improvement_vs_pp0),
                format_opt(a.optimal_hit_rate),
                a.mean_abs_error_nonoptimal,
                format_opt(a.mean_ratio_to_upper),
            );
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_bounds(args: BoundsArgs) -> Result<(), CliError> {
    let g = load_graph(&args.input)?;
    let report = bounds_report(&g);
    if let Some(path) = &args.json {
        let json = serde_json::to_string(&report).expect("report serializes");
        write_atomic(path, &json)?;
    }
    println!(
        "n={} m={} delta={} Delta={} lower={} U={} ratio_cap={:.1}",
        report.n,
        report.m,
        report.delta,
        report.big_delta,
        report.lower,
        report.upper_u,
        report.ratio_cap,
    );
    Ok(())
}

// Keeps the fixed CSV schema visible from the binary for --help readers;
// also exercised by the integration tests.
#[allow(dead_code)]
fn csv_schema() -> &'static str {
    csv_header()
}
