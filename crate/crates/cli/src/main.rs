use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mubwit::io::{parse_run_config, OutputFormat, ReadingChoice, RunConfig};

mod commands;

const EXIT_CODES: &str = "\
Exit codes:
  0  clean result (PPT state, Bell-diagonal Hamiltonian, every family member positive)
  1  detection or violation (NPT state, off-diagonal Hamiltonian, negative family member)
  2  usage or input error";

#[derive(Debug, Parser)]
#[command(name = "mubwit", version, about = "PPT tests and entanglement witnesses for four-qubit Bell-diagonal states")]
#[command(after_help = EXIT_CODES)]
struct Cli {
    /// Seed for randomized verification paths.
    #[arg(long, global = true, env = "EW_SEED")]
    seed: Option<u64>,

    /// TOML run configuration; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write results here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a state given as 16 Bell-basis probabilities (JSON report by default).
    Ppt {
        /// JSON array or single CSV line of 16 numbers.
        file: PathBuf,
    },
    /// Envelope branches on the slice p_i = 0 (i >= 4), p3 = 1 - p1 - p2.
    Envelope(EnvelopeArgs),
    /// Witness trace and GHZ fidelity over a temperature sweep, with threshold temperatures.
    Thermal(ThermalArgs),
    /// GHZ fidelity of the coupling model over a temperature sweep.
    Fidelity(FidelityArgs),
    /// Bell-basis energies of a Hamiltonian given as Pauli terms.
    Hamiltonian {
        /// One "<coefficient> <PAULI>" term per line; '#' starts a comment.
        file: PathBuf,
    },
    /// Minimize the product-state trace of every witness family member.
    FamilyVerify(FamilyArgs),
}

#[derive(Debug, Args)]
struct EnvelopeArgs {
    #[arg(long, allow_hyphen_values = true)]
    p1_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    p1_max: Option<f64>,
    /// Number of p1 grid points (endpoints included).
    #[arg(long)]
    steps: Option<usize>,
    /// Mixing weight of the witness.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    a0: Option<i8>,
    /// Also emit N linear-witness lines, psi2 = pi/2 + k*pi/N.
    #[arg(long)]
    linear_family: Option<usize>,
}

#[derive(Debug, Args)]
struct ThermalArgs {
    /// Pair coupling; repeat for several sweeps.
    #[arg(long = "j", allow_hyphen_values = true)]
    j: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    h: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    a0: Option<i8>,
    #[arg(long, allow_hyphen_values = true)]
    a1: Option<i8>,
    #[arg(long, allow_hyphen_values = true)]
    t_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Append the J -> -infinity threshold from the reduced expression.
    #[arg(long)]
    with_limit: bool,
}

#[derive(Debug, Args)]
struct FidelityArgs {
    #[arg(long = "j", allow_hyphen_values = true)]
    j: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    h: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Reading {
    Deduplicated,
    Literal,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    reading: Option<Reading>,
    /// Random (p, psi1, psi2) draws per member.
    #[arg(long)]
    draws: Option<usize>,
    /// Random restarts per minimization.
    #[arg(long)]
    starts: Option<usize>,
}

/// Failure that maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

pub struct Outcome {
    pub text: String,
    pub exit: u8,
}

fn load_config(cli: &Cli) -> Result<RunConfig, UsageError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            parse_run_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(f) = cli.format {
        cfg.format = f.into();
    }
    if let Some(o) = &cli.output {
        cfg.output = Some(o.clone());
    }
    Ok(cfg)
}

fn read_input(path: &PathBuf) -> Result<String, UsageError> {
    fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(Outcome, Option<PathBuf>), UsageError> {
    let mut cfg = load_config(&cli)?;
    let outcome = match cli.command {
        Command::Ppt { file } => {
            let format = if cli.format.is_some() { cfg.format } else { OutputFormat::Json };
            commands::ppt(&read_input(&file)?, format)?
        }
        Command::Envelope(a) => {
            let e = &mut cfg.envelope;
            e.p1_min = a.p1_min.or(e.p1_min);
            e.p1_max = a.p1_max.or(e.p1_max);
            e.steps = a.steps.unwrap_or(e.steps);
            e.p = a.p.unwrap_or(e.p);
            e.a0 = a.a0.unwrap_or(e.a0);
            e.linear_family = a.linear_family.unwrap_or(e.linear_family);
            commands::envelope(&cfg.envelope, cfg.format)?
        }
        Command::Thermal(a) => {
            let t = &mut cfg.thermal;
            if !a.j.is_empty() {
                t.j = a.j;
            }
            t.h = a.h.unwrap_or(t.h);
            t.p = a.p.unwrap_or(t.p);
            t.a0 = a.a0.unwrap_or(t.a0);
            t.a1 = a.a1.unwrap_or(t.a1);
            t.t_min = a.t_min.unwrap_or(t.t_min);
            t.t_max = a.t_max.unwrap_or(t.t_max);
            t.steps = a.steps.unwrap_or(t.steps);
            commands::thermal(&cfg.thermal, a.with_limit, cfg.format)?
        }
        Command::Fidelity(a) => {
            let f = &mut cfg.fidelity;
            if !a.j.is_empty() {
                f.j = a.j;
            }
            f.h = a.h.unwrap_or(f.h);
            f.t_min = a.t_min.unwrap_or(f.t_min);
            f.t_max = a.t_max.unwrap_or(f.t_max);
            f.steps = a.steps.unwrap_or(f.steps);
            commands::fidelity(&cfg.fidelity, cfg.format)?
        }
        Command::Hamiltonian { file } => commands::hamiltonian(&read_input(&file)?, cfg.format)?,
        Command::FamilyVerify(a) => {
            let f = &mut cfg.family;
            if let Some(r) = a.reading {
                f.reading = match r {
                    Reading::Deduplicated => ReadingChoice::Deduplicated,
                    Reading::Literal => ReadingChoice::Literal,
                };
            }
            f.draws = a.draws.unwrap_or(f.draws);
            f.starts = a.starts.unwrap_or(f.starts);
            commands::family_verify(&cfg.family, cfg.seed, cfg.format)?
        }
    };
    Ok((outcome, cfg.output))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((outcome, output)) => {
            let written = match output {
                Some(path) => fs::write(&path, &outcome.text).map_err(|e| format!("{}: {e}", path.display())),
                None => std::io::stdout().write_all(outcome.text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => ExitCode::from(outcome.exit),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
