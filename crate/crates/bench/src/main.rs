use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use subcons::bounds::BoundVariant;
use subcons::solvers::Enumeration;
use subcons::{GenKind, GenParams, InstanceSpec};
use subcons_bench::report::{merge, plot_data};
use subcons_bench::results::{write_csv, write_rows};
use subcons_bench::run::with_threads;
use subcons_bench::{
    solve, verify, Algo, Format, Problem, RunConfig, SolverParams, Sweep, VerifyOptions,
};

const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "subcons",
    version,
    about = "Submodular cover and knapsack benchmark harness"
)]
struct Cli {
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true, env = "SUBCONS_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded synthetic instance.
    Gen(GenArgs),
    /// Run algorithms over a sweep of budgets or cover levels.
    Solve(SolveArgs),
    /// Check function properties and solver guarantees against brute force.
    Verify(VerifyArgs),
    /// Merge result files into a CSV table and plot data.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    /// speech-like, speech-sat, modular-pair or hardness-pair.
    #[arg(long, value_parser = parse_kind)]
    kind: GenKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Saturation fraction of the saturated-sum coverage.
    #[arg(long)]
    saturation: Option<f64>,
    /// Zipf exponent of word frequencies.
    #[arg(long)]
    zipf: Option<f64>,
    /// Curvature of the hardness cost.
    #[arg(long)]
    kappa: Option<f64>,
    /// Hardness scale x²: alpha = floor(x sqrt(n)/5), beta = floor(x²/5).
    #[arg(long)]
    x2: Option<f64>,
    #[arg(long)]
    alpha: Option<usize>,
    #[arg(long)]
    beta: Option<usize>,
    /// Instance bound as a fraction of f(V).
    #[arg(long, conflicts_with = "cover_frac")]
    budget_frac: Option<f64>,
    /// Instance bound as a fraction of g(V).
    #[arg(long)]
    cover_frac: Option<f64>,
    #[arg(long)]
    name: Option<String>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = subcons::transforms::DEFAULT_EPS)]
    eps: f64,
    #[arg(long, default_value_t = subcons::solvers::iterative::DEFAULT_MAX_ITERS)]
    max_iters: usize,
    /// none or triples.
    #[arg(long, default_value = "none", value_parser = parse_enumeration)]
    enumeration: Enumeration,
    /// m1 or m2.
    #[arg(long, default_value = "m2", value_parser = parse_variant)]
    bound_variant: BoundVariant,
    /// Slopes in the surrogate sweep.
    #[arg(long, default_value_t = subcons::solvers::ea::DEFAULT_GRID)]
    grid_size: usize,
}

impl SolverArgs {
    fn params(&self) -> SolverParams {
        SolverParams {
            eps: self.eps,
            max_iters: self.max_iters,
            enumeration: self.enumeration,
            variant: self.bound_variant,
            grid_size: self.grid_size,
            seed: 0,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Algorithm tags, comma separated.
    #[arg(long = "algo", required = true, value_delimiter = ',')]
    algos: Vec<Algo>,
    /// Budgets as fractions of f(V).
    #[arg(long, value_delimiter = ',', group = "sweep")]
    budget_frac: Option<Vec<f64>>,
    /// Cover levels as fractions of g(V).
    #[arg(long, value_delimiter = ',', group = "sweep")]
    cover_frac: Option<Vec<f64>>,
    /// Absolute budgets.
    #[arg(long, value_delimiter = ',', group = "sweep")]
    budget: Option<Vec<f64>>,
    /// Absolute cover levels.
    #[arg(long, value_delimiter = ',', group = "sweep")]
    cover: Option<Vec<f64>>,
    /// Seeds for the randomized parts (default: the instance seed).
    #[arg(long = "seed", value_delimiter = ',')]
    seeds: Vec<u64>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Random sets per baseline row; 0 disables the baseline.
    #[arg(long, default_value_t = subcons_bench::run::DEFAULT_BASELINE_DRAWS)]
    baseline_draws: usize,
    /// Skip the exact optimum even on small instances.
    #[arg(long)]
    no_brute_force: bool,
    #[arg(long)]
    out: PathBuf,
    /// csv or json (default: from the output extension).
    #[arg(long, value_parser = parse_format)]
    format: Option<Format>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restrict to these algorithm tags.
    #[arg(long = "algo", value_delimiter = ',')]
    algos: Vec<Algo>,
    #[command(flatten)]
    solver: SolverArgs,
    /// JSON report file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Result files (JSON or CSV).
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Merged CSV table.
    #[arg(long)]
    out: PathBuf,
    /// Plot series JSON (default: the CSV path with extension .plot.json).
    #[arg(long)]
    plot_data: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<GenKind, String> {
    s.parse().map_err(|e: subcons::Error| e.to_string())
}

fn parse_enumeration(s: &str) -> Result<Enumeration, String> {
    match s {
        "none" => Ok(Enumeration::None),
        "triples" => Ok(Enumeration::Triples),
        _ => Err(format!("expected none or triples, got {s:?}")),
    }
}

fn parse_variant(s: &str) -> Result<BoundVariant, String> {
    match s {
        "m1" => Ok(BoundVariant::M1),
        "m2" => Ok(BoundVariant::M2),
        _ => Err(format!("expected m1 or m2, got {s:?}")),
    }
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err(format!("expected csv or json, got {s:?}")),
    }
}

fn write_out(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

fn cmd_gen(a: GenArgs) -> anyhow::Result<u8> {
    let params = GenParams {
        saturation: a.saturation,
        zipf: a.zipf,
        kappa: a.kappa,
        x2: a.x2,
        alpha: a.alpha,
        beta: a.beta,
        budget_frac: a.budget_frac,
        cover_frac: a.cover_frac,
    };
    let mut spec = subcons::generate(a.kind, a.n, a.seed, &params)?;
    spec.name = a.name;
    write_out(a.out.as_deref(), &subcons::json::to_string(&spec)?)?;
    Ok(0)
}

fn cmd_solve(a: SolveArgs, threads: Option<usize>) -> anyhow::Result<u8> {
    let spec = InstanceSpec::load(&a.instance)?;
    let sweep = match (a.budget_frac, a.cover_frac, a.budget, a.cover) {
        (Some(values), ..) => Some((Problem::Budget, values, true)),
        (_, Some(values), ..) => Some((Problem::Cover, values, true)),
        (_, _, Some(values), _) => Some((Problem::Budget, values, false)),
        (.., Some(values)) => Some((Problem::Cover, values, false)),
        _ => None,
    };
    let mut config = RunConfig::at_instance_bound(spec, a.algos);
    if let Some((problem, values, fractions)) = sweep {
        config.sweep = Sweep {
            problem,
            values,
            fractions,
        };
    }
    if !a.seeds.is_empty() {
        config.seeds = a.seeds;
    }
    config.params = a.solver.params();
    config.baseline_draws = a.baseline_draws;
    config.brute_force = !a.no_brute_force;
    let rows = with_threads(threads, || solve(&config))??;
    let format = a.format.unwrap_or_else(|| Format::from_path(&a.out));
    write_rows(&a.out, &rows, format)?;
    let failed: Vec<_> = rows.iter().filter(|r| r.error.is_some()).collect();
    for r in &failed {
        eprintln!(
            "{} at {} {}: {}",
            r.algorithm,
            r.problem.tag(),
            r.bound,
            r.error.as_deref().unwrap_or_default()
        );
    }
    eprintln!(
        "{} rows written to {} ({} errors)",
        rows.len(),
        a.out.display(),
        failed.len()
    );
    Ok(0)
}

fn cmd_verify(a: VerifyArgs, threads: Option<usize>) -> anyhow::Result<u8> {
    let spec = InstanceSpec::load(&a.instance)?;
    let mut opts = VerifyOptions {
        trials: a.trials,
        seed: a.seed,
        params: a.solver.params(),
        ..VerifyOptions::default()
    };
    if !a.algos.is_empty() {
        opts.algorithms = a.algos;
    }
    let report = with_threads(threads, || verify(&spec, &opts))??;
    write_out(a.out.as_deref(), &subcons::json::to_string(&report)?)?;
    if let Some(first) = report.failures.first() {
        eprintln!("verification failed: {}: {}", first.check, first.detail);
        return Ok(EXIT_VERIFY);
    }
    eprintln!("verification passed: {} trials", report.trials);
    Ok(0)
}

fn cmd_report(a: ReportArgs) -> anyhow::Result<u8> {
    let paths: Vec<&Path> = a.files.iter().map(PathBuf::as_path).collect();
    let rows = merge(&paths)?;
    if a.out.extension().is_some_and(|e| e == "json") {
        bail!("--out is the CSV table; use --plot-data for the JSON series");
    }
    let file =
        std::fs::File::create(&a.out).with_context(|| format!("writing {}", a.out.display()))?;
    write_csv(std::io::BufWriter::new(file), &rows)?;
    let plot = a
        .plot_data
        .unwrap_or_else(|| a.out.with_extension("plot.json"));
    write_out(Some(&plot), &subcons::json::to_string(&plot_data(&rows))?)?;
    eprintln!(
        "{} rows merged into {} and {}",
        rows.len(),
        a.out.display(),
        plot.display()
    );
    Ok(0)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    let infeasible = e.chain().any(|c| {
        c.downcast_ref::<subcons::Error>()
            .is_some_and(subcons::Error::is_infeasible)
    });
    if infeasible {
        EXIT_INFEASIBLE
    } else {
        EXIT_USAGE
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = cli.threads;
    let out = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a, threads),
        Command::Verify(a) => cmd_verify(a, threads),
        Command::Report(a) => cmd_report(a),
    };
    match out {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
