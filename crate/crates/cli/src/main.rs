use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use convpow::attractors::{evaluate_request, AttractorRequest};
use convpow::lattice::{power, LatticeFunction, PowerMethod};
use convpow::llt::{llt_error_curve_with, supnorm_fit, KBox, LltOptions};
use convpow::spectrum::{analyze, AnalyzeOptions};
use convpow::{fixtures, Error};

#[derive(Parser)]
#[command(name = "convpow", version, about = "Convolution powers on Z^d and their local limit attractors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for randomized checks. The current commands draw no random numbers.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Locate and classify the maximizers of |phi_hat|; writes the analysis as JSON.
    Analyze {
        #[command(flatten)]
        io: Io,
        /// Grid points per axis for the maximizer search.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Compute phi^(n); writes a lattice function as JSON.
    Power {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "fft")]
        method: PowerMethod,
    },
    /// Evaluate an attractor request (spec, t, points); writes values as JSON.
    Attractor {
        #[command(flatten)]
        io: Io,
        /// Renormalization tolerance, overriding the request.
        #[arg(long)]
        tol: Option<f64>,
        /// Angular chart nodes, overriding the request.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Scaled local limit errors over a ladder of n.
    ///
    /// CSV columns: n, scaled_error (n^mu max over the window of
    /// |phi^(n) - approximation|), supnorm (max |phi^(n)| over the window),
    /// scaled_supnorm (n^mu supnorm), window_points.
    Compare {
        #[command(flatten)]
        io: Io,
        /// Comma separated, strictly increasing.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        /// Base box K as lo:hi per axis, comma separated (default -3:3 on every axis).
        #[arg(long)]
        window: Option<KBox>,
        /// Tolerance of the attractor tables.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Fit log sup|phi^(n)| against log n.
    ///
    /// CSV columns: n, supnorm, log_n, log_supnorm. The fitted slope and
    /// residual go to stderr (or into the JSON output).
    Supnorm {
        #[command(flatten)]
        io: Io,
        /// At least four values, comma separated, strictly increasing.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Args)]
struct Io {
    /// JSON input file, or fixture:NAME for a built-in function.
    #[arg(long)]
    input: String,
    /// Output file (default: stdout).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Core(Error),
    Output(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn read_input(spec: &str) -> Result<String, Error> {
    if let Some(name) = spec.strip_prefix("fixture:") {
        let f = fixtures::by_name(name).ok_or_else(|| {
            Error::invalid(format!("unknown fixture '{name}'; known: {}", fixtures::NAMES.join(", ")))
        })?;
        return serde_json::to_string(&f).map_err(|e| Error::invalid(e.to_string()));
    }
    fs::read_to_string(spec).map_err(|e| Error::invalid(format!("cannot read {spec}: {e}")))
}

fn load_function(spec: &str) -> Result<LatticeFunction, Error> {
    let text = read_input(spec)?;
    serde_json::from_str(&text).map_err(|e| Error::invalid(format!("{spec}: {e}")))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Output(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, Error> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Error::invalid(format!("serialization: {e}")))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Analyze { io, grid } => {
            let f = load_function(&io.input)?;
            let mut options = AnalyzeOptions::default();
            if let Some(g) = grid {
                options.grid_per_axis = g;
            }
            let a = analyze(&f, &options)?;
            for w in &a.warnings {
                eprintln!("warning: {w}");
            }
            write_output(io.output.as_deref(), &json(&a)?)
        }
        Command::Power { io, n, method } => {
            let f = load_function(&io.input)?;
            write_output(io.output.as_deref(), &json(&power(&f, n, method)?)?)
        }
        Command::Attractor { io, tol, grid } => {
            let mut req = AttractorRequest::from_json(&read_input(&io.input)?)?;
            if tol.is_some() {
                req.tol = tol;
            }
            if grid.is_some() {
                req.nodes = grid;
            }
            write_output(io.output.as_deref(), &json(&evaluate_request(&req)?)?)
        }
        Command::Compare { io, n, window, tol, format } => {
            let f = load_function(&io.input)?;
            let a = analyze(&f, &AnalyzeOptions::default())?;
            let mut options = LltOptions {
                k_box: window,
                ..LltOptions::default()
            };
            if tol.is_some() {
                options.table_tol = tol;
            }
            let report = llt_error_curve_with(&a, &n, &options)?;
            let text = match format {
                Format::Csv => report.to_csv()?,
                Format::Json => json(&report)?,
            };
            write_output(io.output.as_deref(), &text)
        }
        Command::Supnorm { io, n, format } => {
            let f = load_function(&io.input)?;
            let fit = supnorm_fit(&f, &n)?;
            let text = match format {
                Format::Csv => {
                    eprintln!("slope {} intercept {} residual {}", fit.slope, fit.intercept, fit.residual);
                    fit.to_csv()?
                }
                Format::Json => json(&fit)?,
            };
            write_output(io.output.as_deref(), &text)
        }
    }
}

fn name(command: &Command) -> &'static str {
    match command {
        Command::Analyze { .. } => "analyze",
        Command::Power { .. } => "power",
        Command::Attractor { .. } => "attractor",
        Command::Compare { .. } => "compare",
        Command::Supnorm { .. } => "supnorm",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("convpow: cannot start {t} threads: {e}");
            return ExitCode::from(4);
        }
    }
    let _ = cli.seed;
    let label = name(&cli.command);
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("convpow {label}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Output(msg)) => {
            eprintln!("convpow {label}: {msg}");
            ExitCode::FAILURE
        }
    }
}
