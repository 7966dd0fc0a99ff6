use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use epsdelta::catalog;
use epsdelta::manifold::{self, GridSpec};
use epsdelta::solver::{self, check_hypotheses, default_window, Solver};
use epsdelta::validate;
use epsdelta::{Error, Expression, RealFunction};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_ZERO_DERIVATIVE: u8 = 3;
const EXIT_BRACKET: u8 = 4;
const EXIT_WRITE: u8 = 5;
const EXIT_LAGRANGE: u8 = 6;
const EXIT_VALIDATION: u8 = 7;

/// Maximal δ for the ε–δ definition of continuity.
#[derive(Debug, Parser)]
#[command(name = "epsdelta", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for δ at a single (x, ε).
    Solve(SolveArgs),
    /// Sample δ over an (x, ε) grid.
    Manifold(ManifoldArgs),
    /// Report the sampled hypotheses at x.
    Check(CheckArgs),
    /// Compare the solver against the built-in closed forms and oracle.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct FunctionSpec {
    /// Catalog name (log, exp1, rational30, affine21, quad11) or an expression in y.
    #[arg(long = "fn", value_name = "SPEC")]
    function: Option<String>,
    /// Expression in one variable, never looked up in the catalog.
    #[arg(long, value_name = "EXPR")]
    expr: Option<String>,
}

impl FunctionSpec {
    fn resolve(&self) -> Result<RealFunction, String> {
        if let Some(name) = &self.function {
            if let Some(entry) = catalog::by_name(name) {
                return Ok(entry.function);
            }
            return parse_expression(name);
        }
        parse_expression(self.expr.as_deref().unwrap_or_default())
    }
}

fn parse_expression(source: &str) -> Result<RealFunction, String> {
    Expression::parse(source)
        .map(RealFunction::from_expression)
        .map_err(|e| format!("cannot parse {source:?}: {e}"))
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    function: FunctionSpec,
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = solver::DEFAULT_OMEGA_SOL)]
    omega_sol: f64,
    /// Half-width of the search window, shrunk to stay clear of poles.
    #[arg(long, default_value_t = 1.0)]
    window_radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct ManifoldArgs {
    #[command(flatten)]
    function: FunctionSpec,
    #[arg(long, allow_hyphen_values = true)]
    x_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    x_max: f64,
    #[arg(long, default_value_t = 50)]
    x_count: usize,
    #[arg(long, default_value_t = 0.02, allow_hyphen_values = true)]
    eps_min: f64,
    #[arg(long, default_value_t = 1.0)]
    eps_max: f64,
    #[arg(long, default_value_t = 50)]
    eps_count: usize,
    #[arg(long, default_value_t = solver::DEFAULT_OMEGA_SOL)]
    omega_sol: f64,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, env = "EPSDELTA_WORKERS")]
    workers: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    function: FunctionSpec,
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long, default_value_t = 1.0)]
    window_radius: f64,
    #[arg(long, default_value_t = 128)]
    samples: usize,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = solver::DEFAULT_OMEGA_SOL)]
    omega_sol: f64,
    /// Shift the exp1 closed form to check that validation can fail.
    #[arg(long, hide = true)]
    corrupt: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve(args) => run_solve(&args),
        Command::Manifold(args) => run_manifold(&args),
        Command::Check(args) => run_check(&args),
        Command::Validate(args) => run_validate(&args),
    };
    ExitCode::from(code)
}

fn config_error(message: impl std::fmt::Display) -> u8 {
    eprintln!("error: {message}");
    EXIT_CONFIG
}

fn exit_code(err: &Error) -> u8 {
    match err.reason() {
        "parse-error" | "invalid-input" | "outside-domain" | "coincident-points" => EXIT_CONFIG,
        "zero-derivative" => EXIT_ZERO_DERIVATIVE,
        "bracket-failure" => EXIT_BRACKET,
        _ => EXIT_FAILURE,
    }
}

fn report_error(err: &Error) -> u8 {
    eprintln!("error: {err}");
    if err.reason() == "zero-derivative" {
        eprintln!("hint: f'(x) vanishes here; try a slightly different x");
    }
    exit_code(err)
}

fn run_solve(args: &SolveArgs) -> u8 {
    let f = match args.function.resolve() {
        Ok(f) => f,
        Err(e) => return config_error(e),
    };
    let report = default_window(&f, args.x, args.window_radius)
        .and_then(|w| Solver::default().solve(&f, args.x, args.eps, args.omega_sol, w));
    match report {
        Ok(r) => {
            println!(
                "delta={} residual={:e} iters_binary={} iters_ternary={}",
                r.delta, r.residual, r.binary_iterations, r.ternary_iterations_total
            );
            0
        }
        Err(e) => report_error(&e),
    }
}

fn run_manifold(args: &ManifoldArgs) -> u8 {
    let f = match args.function.resolve() {
        Ok(f) => f,
        Err(e) => return config_error(e),
    };
    let grid = match GridSpec::new(
        args.x_min,
        args.x_max,
        args.x_count,
        args.eps_min,
        args.eps_max,
        args.eps_count,
    ) {
        Ok(g) => g,
        Err(e) => return config_error(e),
    };
    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let samples = match manifold::sample_manifold_with_workers(&f, &grid, args.omega_sol, workers) {
        Ok(s) => s,
        Err(e) => return config_error(e),
    };

    let written = match &args.output {
        Some(path) => File::create(path).and_then(|file| write_samples(&samples, args.format, BufWriter::new(file))),
        None => write_samples(&samples, args.format, io::stdout().lock()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_WRITE;
    }
    let skipped = samples.iter().filter(|s| !s.is_ok()).count();
    if skipped > 0 {
        eprintln!("{skipped} of {} grid points skipped", samples.len());
    }
    0
}

fn write_samples<W: Write>(samples: &[manifold::ManifoldSample], format: Format, out: W) -> io::Result<()> {
    match format {
        Format::Csv => manifold::write_csv(samples, out),
        Format::Json => manifold::write_json(samples, out),
    }
}

fn run_check(args: &CheckArgs) -> u8 {
    let f = match args.function.resolve() {
        Ok(f) => f,
        Err(e) => return config_error(e),
    };
    if args.samples < 64 {
        return config_error(format!("--samples must be at least 64, got {}", args.samples));
    }
    let window = match default_window(&f, args.x, args.window_radius) {
        Ok(w) => w,
        Err(e) => return report_error(&e),
    };
    let r = check_hypotheses(&f, args.x, window, args.samples);
    println!("f1_at_x={}", r.f1_at_x);
    println!("f2_at_x={}", r.f2_at_x);
    println!("lagrange_ok={}", r.lagrange_ok);
    println!("transversal_ok={}", r.transversal_ok);
    println!("unimodal_ok={}", r.unimodal_ok);
    for d in &r.diagnostics {
        println!("diagnostic={d}");
    }
    if r.lagrange_ok {
        0
    } else {
        EXIT_LAGRANGE
    }
}

fn run_validate(args: &ValidateArgs) -> u8 {
    if !(args.omega_sol > 0.0 && args.omega_sol.is_finite()) {
        return config_error(format!("--omega-sol must be positive, got {}", args.omega_sol));
    }
    let mut entries = catalog::all();
    if args.corrupt {
        for e in entries.iter_mut().filter(|e| e.name == "exp1") {
            *e = e.clone().with_closed_form(|x, eps| x + (eps + (-x).exp()).ln() + 1e-3);
        }
    }
    let report = validate::run_entries(&entries, args.omega_sol);
    for e in &report.entries {
        println!(
            "entry={} cases={} failures={} max_deviation={:e}",
            e.entry, e.cases, e.failures, e.max_deviation
        );
    }
    if report.passed() {
        return 0;
    }
    for c in report.cases.iter().filter(|c| !c.passed()) {
        match &c.error {
            Some(err) => eprintln!("FAIL {} x={} eps={}: {err}", c.entry, c.x, c.epsilon),
            None => eprintln!(
                "FAIL {} x={} eps={}: expected {} got {} (tolerance {:e})",
                c.entry, c.x, c.epsilon, c.expected, c.actual, c.tolerance
            ),
        }
    }
    EXIT_VALIDATION
}
