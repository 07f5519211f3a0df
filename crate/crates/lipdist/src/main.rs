use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lipdist::commands;
use lipdist::{CliError, RunConfig};
use lipdist_core::distance::Method;

#[derive(Parser)]
#[command(name = "lipdist", version, about = "Distance from Hölder functions to bmo-Sobolev spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Shared {
    /// key = value file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    jgrid: Option<u32>,
    #[arg(long, global = true)]
    s: Option<f64>,
    #[arg(long = "wavelet-p", global = true)]
    wavelet_p: Option<usize>,
    #[arg(long, global = true)]
    theta: Option<f64>,
    /// depth range for the Carleson profile, as `a..b`
    #[arg(long, global = true)]
    jrange: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    spec: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// All norms of a function and their ratios
    Seminorms(Shared),
    /// Bad set of one method at a threshold, with its Carleson profile
    Sets {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        eps: f64,
        /// read --eps as a multiple of the method's ε_hi
        #[arg(long)]
        relative: bool,
        #[arg(long, default_value = "secdiff")]
        method: String,
    },
    /// Critical thresholds under all three methods
    Distance(Shared),
    /// Run the acceptance suite
    Validate(Shared),
    /// Inclusion scan between two methods' sets
    Inclusion {
        #[command(flatten)]
        shared: Shared,
        #[arg(long, default_value = "wavelet")]
        source: String,
        #[arg(long, default_value = "secdiff")]
        target: String,
        /// thresholds as a multiple of each method's ε₀ bracket midpoint
        #[arg(long, default_value_t = 0.5)]
        frac: f64,
    },
}

fn config(shared: &Shared) -> Result<RunConfig, CliError> {
    let mut c = RunConfig::default();
    if let Some(p) = &shared.config {
        c.apply_file(p)?;
    }
    let flags: [(&str, Option<String>); 8] = [
        ("n", shared.n.map(|v| v.to_string())),
        ("jgrid", shared.jgrid.map(|v| v.to_string())),
        ("s", shared.s.map(|v| v.to_string())),
        ("wavelet-p", shared.wavelet_p.map(|v| v.to_string())),
        ("theta", shared.theta.map(|v| v.to_string())),
        ("jrange", shared.jrange.clone()),
        ("seed", shared.seed.map(|v| v.to_string())),
        ("out", shared.out.as_ref().map(|p| p.display().to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            c.set(k, &v)?;
        }
    }
    c.validate()?;
    Ok(c)
}

fn spec(shared: &Shared) -> Result<&str, CliError> {
    shared
        .spec
        .as_deref()
        .ok_or_else(|| CliError::Validation("--spec is required".into()))
}

fn method(text: &str) -> Result<Method, CliError> {
    Method::parse(text).ok_or_else(|| CliError::Validation(format!("unknown method {text:?}")))
}

fn print(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON value"));
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Seminorms(sh) => print(&commands::seminorms(spec(&sh)?, &config(&sh)?)?),
        Command::Sets {
            shared,
            eps,
            relative,
            method: m,
        } => print(&commands::sets(spec(&shared)?, &config(&shared)?, eps, relative, method(&m)?)?),
        Command::Distance(sh) => print(&commands::distance(spec(&sh)?, &config(&sh)?)?),
        Command::Inclusion {
            shared,
            source,
            target,
            frac,
        } => print(&commands::inclusion(
            spec(&shared)?,
            &config(&shared)?,
            frac,
            method(&source)?,
            method(&target)?,
        )?),
        Command::Validate(sh) => {
            let (passed, results) = commands::validate(&config(&sh)?)?;
            for r in &results {
                println!("{}", r.line());
                for d in r.details.iter().filter(|_| !r.passed) {
                    println!("    {d}");
                }
            }
            return Ok(passed);
        }
    }
    Ok(true)
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
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
