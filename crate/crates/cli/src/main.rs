//! `rach`: exact and simulated success statistics for a one-shot access
//! reservation frame (M tokens, K data slots, T users).
//!
//! Data goes to stdout (or `--output`); diagnostics go to stderr.
//! Exit status: 0 ok, 1 invalid parameters, 2 usage error, 3 float path
//! precision loss.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rach_core::simulator::simulated_sweep;
use rach_core::{
    compare_to_exact, estimate_pmf, frame_metrics, optimal_data_slots, success_pmf,
    success_pmf_float, sweep, DetectionMode, Error, SimParams, SweepAxis, SystemConfig,
};
use serde::Deserialize;

#[derive(Parser)]
#[command(
    name = "rach",
    version,
    about = "Success distribution of a one-shot two-phase access reservation frame"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact pmf of S_D, the number of successful users per frame:
    /// sum over (s singles, c collisions) of
    /// C(M,s)·T!/(T-s)!·C(M-s,c)·S2(T-s,c)·c!/M^T × C(s,d)·C(c,k-d)/C(s+c,k), k = min(s+c,K)
    Pmf {
        #[command(flatten)]
        frame: FrameArgs,
        /// Use the log-domain float path instead of exact rationals
        #[arg(long)]
        float: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Success rate σ = E[S_D]/T and efficiency ρ = E[S_D]/(K+1)
    Metrics {
        #[command(flatten)]
        frame: FrameArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// σ and ρ over a range of T or K (exact unless --iterations and --seed are given)
    Sweep(SweepArgs),
    /// Monte Carlo estimate P̂(S_D = d) = #{frames with S = d} / N
    Simulate {
        #[command(flatten)]
        frame: FrameArgs,
        #[command(flatten)]
        sim: SimArgs,
        /// Base station detection capability
        #[arg(long, value_enum, default_value_t = ModeArg::Binary)]
        mode: ModeArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Total variation distance ½Σ|P̂(d) − P(d)| between simulation and the exact pmf
    Compare {
        #[command(flatten)]
        frame: FrameArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// K* = argmax over K in 1..=k_max of ρ = E[S_D]/(K+1); ties go to the smaller K
    OptimizeK {
        /// Reservation tokens (M)
        #[arg(long)]
        tokens: u32,
        /// Contending users (T)
        #[arg(long)]
        users: u32,
        /// Largest number of data slots to try
        #[arg(long)]
        k_max: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct FrameArgs {
    /// Reservation tokens / preambles (M)
    #[arg(long)]
    tokens: u32,
    /// Data-phase resource slots (K)
    #[arg(long)]
    slots: u32,
    /// Contending users (T)
    #[arg(long)]
    users: u32,
}

impl FrameArgs {
    fn config(&self) -> Result<SystemConfig, Error> {
        SystemConfig::new(self.tokens, self.slots, self.users)
    }
}

#[derive(Args)]
struct SimArgs {
    /// Simulated frames (N)
    #[arg(long, default_value_t = 100_000)]
    iterations: u64,
    /// Generator seed
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, env = "RACH_FORMAT", default_value_t = Format::Csv)]
    format: Format,
    /// Write here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Binary,
    Ternary,
}

impl From<ModeArg> for DetectionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Binary => DetectionMode::Binary,
            ModeArg::Ternary => DetectionMode::Ternary,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum AxisArg {
    Users,
    DataSlots,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON file with any of: tokens, slots, users, axis, from, to, iterations, seed
    #[arg(long)]
    config: Option<PathBuf>,
    /// Reservation tokens (M)
    #[arg(long)]
    tokens: Option<u32>,
    /// Data-phase resource slots (K); ignored when sweeping data-slots
    #[arg(long)]
    slots: Option<u32>,
    /// Contending users (T); ignored when sweeping users
    #[arg(long)]
    users: Option<u32>,
    /// Parameter to vary
    #[arg(long, value_enum)]
    axis: Option<AxisArg>,
    /// First axis value
    #[arg(long)]
    from: Option<u32>,
    /// Last axis value (inclusive)
    #[arg(long)]
    to: Option<u32>,
    /// Simulate N frames per row instead of evaluating exactly (needs --seed)
    #[arg(long, requires = "seed")]
    iterations: Option<u64>,
    /// Generator seed for a simulated sweep
    #[arg(long, requires = "iterations")]
    seed: Option<u64>,
    #[command(flatten)]
    out: OutputArgs,
}

/// Sweep grid as read from `--config`; flags take precedence.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    tokens: Option<u32>,
    slots: Option<u32>,
    users: Option<u32>,
    axis: Option<AxisArg>,
    from: Option<u32>,
    to: Option<u32>,
    iterations: Option<u64>,
    seed: Option<u64>,
}

enum Failure {
    Invalid(String),
    Precision(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::PrecisionLoss { .. } => Failure::Precision(e.to_string()),
            e => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Precision(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Pmf { frame, float, out } => {
            let cfg = frame.config()?;
            let doc = if float {
                let pmf = success_pmf_float(&cfg)?;
                match out.format {
                    Format::Csv => pmf.to_csv(),
                    Format::Json => serde_json::to_string(&pmf).expect("pmf serializes"),
                }
            } else {
                let pmf = success_pmf(&cfg)?;
                match out.format {
                    Format::Csv => pmf.to_csv(),
                    Format::Json => pmf.to_json(),
                }
            };
            emit(&out, doc)
        }
        Command::Metrics { frame, out } => {
            let m = frame_metrics(&frame.config()?)?;
            let doc = match out.format {
                Format::Csv => format!(
                    "{}\n{}\n",
                    rach_core::metrics::METRICS_CSV_HEADER,
                    m.csv_row()
                ),
                Format::Json => serde_json::to_string(&m).expect("metrics serialize"),
            };
            emit(&out, doc)
        }
        Command::Sweep(args) => run_sweep(args),
        Command::Simulate {
            frame,
            sim,
            mode,
            out,
        } => {
            let params = SimParams::new(frame.config()?, sim.iterations, sim.seed, mode.into())?;
            let report = estimate_pmf(&params)?;
            let doc = match out.format {
                Format::Csv => report.to_csv(),
                Format::Json => report.to_json(),
            };
            emit(&out, doc)
        }
        Command::Compare { frame, sim, out } => {
            let params = SimParams::new(
                frame.config()?,
                sim.iterations,
                sim.seed,
                DetectionMode::Binary,
            )?;
            let cmp = compare_to_exact(&estimate_pmf(&params)?)?;
            let doc = match out.format {
                Format::Csv => cmp.to_csv(),
                Format::Json => cmp.to_json(),
            };
            emit(&out, doc)
        }
        Command::OptimizeK {
            tokens,
            users,
            k_max,
            out,
        } => {
            let best = optimal_data_slots(tokens, users, k_max)?;
            let doc = match out.format {
                Format::Csv => best.csv(),
                Format::Json => serde_json::to_string(&best).expect("optimum serializes"),
            };
            emit(&out, doc)
        }
    }
}

fn run_sweep(args: SweepArgs) -> Result<(), Failure> {
    let file = match &args.config {
        Some(path) => read_sweep_file(path)?,
        None => SweepFile::default(),
    };
    let missing =
        |name: &str| Failure::Invalid(format!("sweep needs --{name} (flag or config file)"));
    let axis = args.axis.or(file.axis).ok_or_else(|| missing("axis"))?;
    let tokens = args
        .tokens
        .or(file.tokens)
        .ok_or_else(|| missing("tokens"))?;
    let from = args.from.or(file.from).ok_or_else(|| missing("from"))?;
    let to = args.to.or(file.to).ok_or_else(|| missing("to"))?;
    let (axis, base) = match axis {
        AxisArg::Users => {
            let slots = args.slots.or(file.slots).ok_or_else(|| missing("slots"))?;
            (SweepAxis::Users, SystemConfig::new(tokens, slots, from)?)
        }
        AxisArg::DataSlots => {
            let users = args.users.or(file.users).ok_or_else(|| missing("users"))?;
            (
                SweepAxis::DataSlots,
                SystemConfig::new(tokens, from.max(1), users)?,
            )
        }
    };
    let simulated = match (args.iterations.or(file.iterations), args.seed.or(file.seed)) {
        (Some(n), Some(seed)) => Some((n, seed)),
        (None, None) => None,
        _ => {
            return Err(Failure::Invalid(
                "a simulated sweep needs both iterations and seed".into(),
            ))
        }
    };
    let report = match simulated {
        Some((n, seed)) => simulated_sweep(base, axis, from, to, n, seed, DetectionMode::Binary)?,
        None => sweep(base, axis, from, to)?,
    };
    let doc = match args.out.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    emit(&args.out, doc)
}

fn read_sweep_file(path: &Path) -> Result<SweepFile, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn emit(out: &OutputArgs, mut doc: String) -> Result<(), Failure> {
    if !doc.ends_with('\n') {
        doc.push('\n');
    }
    match &out.output {
        Some(path) => fs::write(path, doc)?,
        None => io::stdout().lock().write_all(doc.as_bytes())?,
    }
    Ok(())
}
