use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use resurgence::pipeline::{
    parse_coefficients, run_pipeline, Command, LambdaSpec, OperatorSource, PipelineOptions, ResumInput,
};

/// Newton polygons, formal bases, Borel-Padé-Laplace resummation and Stokes
/// jumps, emitted as a JSON report.
#[derive(Parser, Debug)]
#[command(name = "resurgence", version)]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 256)]
    precision: u32,
    /// Series truncation order.
    #[arg(long, global = true, default_value_t = 60)]
    order: usize,
    /// Quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print a plain-text digest to stderr as well.
    #[arg(long, global = true)]
    summary: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Polygon, formal basis, Borel operator and Stokes data of an operator.
    Analyze(AnalyzeArgs),
    /// Quadrature vs. truncated series vs. resummation of Z_{2j}(λ) for φ^{2k}.
    Partition(PartitionArgs),
    /// Borel-Padé-Laplace sum of a series read from a coefficient file.
    Resum(ResumArgs),
    /// The Airy equation at coordinate q.
    Airy {
        /// Rational (`1`, `4/9`) or complex `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct AnalyzeArgs {
    /// Governing operator of the φ^{2k} model.
    #[arg(long)]
    k: Option<usize>,
    /// Operator text, e.g. "x*theta^2 + theta - 1".
    #[arg(long)]
    op: Option<String>,
}

#[derive(Args, Debug)]
struct PartitionArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, conflicts_with = "lambda_grid", required_unless_present = "lambda_grid")]
    lambda: Option<f64>,
    /// `a:b:n`
    #[arg(long)]
    lambda_grid: Option<String>,
    /// Moment index (weight φ^{2j}).
    #[arg(long, default_value_t = 0)]
    j: usize,
}

#[derive(Args, Debug)]
struct ResumArgs {
    /// One rational or `re im` pair per line: coefficients a_n of x^β Σ a_n x^n.
    #[arg(long)]
    coeffs: PathBuf,
    /// Leading exponent β.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    beta: i64,
    /// Laplace ray direction θ.
    #[arg(long, allow_hyphen_values = true)]
    direction: f64,
    /// Evaluation point `re` or `re,im` in z = 1/x.
    #[arg(long, allow_hyphen_values = true)]
    z: String,
}

fn parse_point(text: &str) -> anyhow::Result<(f64, f64)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [re] => Ok((re.parse().context("bad --z")?, 0.0)),
        [re, im] => Ok((re.parse().context("bad --z")?, im.parse().context("bad --z")?)),
        _ => bail!("--z must be 're' or 're,im', got '{text}'"),
    }
}

fn command(cli: &Cli) -> anyhow::Result<Command> {
    Ok(match &cli.command {
        Cmd::Analyze(a) => match (&a.k, &a.op) {
            (Some(k), None) => Command::Analyze(OperatorSource::Ek(*k)),
            (None, Some(op)) => Command::Analyze(OperatorSource::Text(op.clone())),
            _ => bail!("give exactly one of --k and --op"),
        },
        Cmd::Partition(p) => {
            let lambdas = match (&p.lambda, &p.lambda_grid) {
                (Some(x), None) => LambdaSpec::Single(*x),
                (None, Some(g)) => LambdaSpec::parse_grid(g)?,
                _ => bail!("give exactly one of --lambda and --lambda-grid"),
            };
            Command::Partition { k: p.k, lambdas, j: p.j }
        }
        Cmd::Resum(r) => {
            let text = fs::read_to_string(&r.coeffs).with_context(|| format!("reading {}", r.coeffs.display()))?;
            let coeffs = parse_coefficients(&text, cli.precision)?;
            Command::Resum(ResumInput { coeffs, beta: r.beta, direction: r.direction, z: parse_point(&r.z)? })
        }
        Cmd::Airy { q } => Command::Airy { q: q.clone() },
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let cmd = match command(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let opts = PipelineOptions { precision: cli.precision, order: cli.order, tol: cli.tol };
    let report = run_pipeline(&cmd, &opts);
    let json = report.to_json();
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, json + "\n") {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => println!("{json}"),
    }
    if cli.summary {
        eprint!("{}", report.summary());
    }
    if report.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
