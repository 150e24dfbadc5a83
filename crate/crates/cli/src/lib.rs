//! Command-line front end: exact tables, enumeration, simulation,
//! convergence, and goodness-of-fit reports.

pub mod commands;
pub mod error;
pub mod report;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use pareto_records::montecarlo::{SimConfig, DEFAULT_KMAX};
use pareto_records::oracle::DEFAULT_CAP;

pub use commands::{build_rows, ReportRow};
pub use error::CliError;
pub use report::{Format, Report};

#[derive(Debug, Parser)]
#[command(name = "pareto-records", version, about = "Broken-record counts of iid sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args, Clone)]
pub struct SimArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    /// Master seed; a fresh one is drawn and printed when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_KMAX)]
    pub kmax: usize,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact probabilities at one horizon.
    Exact {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 5)]
        kmax: usize,
        /// Largest n for which the enumeration column is filled.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact laws by enumerating every ordering.
    Oracle {
        #[arg(long)]
        n: usize,
        /// Enumeration cap (at most 10).
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo law of B_n.
    Simulate {
        #[command(flatten)]
        sim: SimArgs,
        /// Also histogram B_t at t = n/4 and n/2.
        #[arg(long)]
        checkpoints: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Deviation from the geometric limit across horizons.
    Converge {
        /// Comma-separated horizons; `a..b` expands to an inclusive range.
        #[arg(long, value_parser = parse_n_list)]
        n_list: NList,
        #[arg(long, default_value_t = 5)]
        kmax: usize,
        /// Trials per horizon (0 = exact columns only).
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Total variation and chi-square fits of the simulated law.
    Gof {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the record-count identities on seeded trajectories.
    Audit {
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

impl Command {
    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Exact { output, .. }
            | Command::Oracle { output, .. }
            | Command::Simulate { output, .. }
            | Command::Converge { output, .. }
            | Command::Gof { output, .. }
            | Command::Audit { output, .. } => output,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NList(pub Vec<u64>);

pub fn parse_n_list(s: &str) -> Result<NList, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |v: &str| v.trim().parse::<u64>().map_err(|e| format!("{v:?}: {e}"));
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
                if a > b {
                    return Err(format!("empty range {part}"));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    if out.is_empty() {
        return Err("no horizons given".into());
    }
    Ok(NList(out))
}

/// Seed from the clock when none was given.
fn resolve_seed(seed: Option<u64>, notes: &mut Vec<String>) -> u64 {
    seed.unwrap_or_else(|| {
        let nanos = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0);
        // splitmix64 finalizer
        let mut z = nanos.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        let seed = z ^ (z >> 31);
        notes.push(format!("seed: {seed}"));
        seed
    })
}

fn sim_config(sim: &SimArgs, notes: &mut Vec<String>) -> SimConfig {
    SimConfig::new(sim.n, sim.trials, resolve_seed(sim.seed, notes))
        .with_kmax(sim.kmax)
        .with_workers(sim.workers)
}

/// Result of one invocation: the report plus lines meant for stderr.
pub struct Outcome {
    pub report: Report,
    pub notes: Vec<String>,
    pub output: OutputArgs,
}

pub fn execute(command: Command) -> Result<Outcome, CliError> {
    let mut notes = Vec::new();
    let (report, output) = match command {
        Command::Exact { n, kmax, cap, output } => (commands::cmd_exact(n, kmax, cap)?, output),
        Command::Oracle { n, cap, output } => (commands::cmd_oracle(n, cap)?, output),
        Command::Simulate {
            sim,
            checkpoints,
            output,
        } => {
            let cfg = sim_config(&sim, &mut notes).with_checkpoints(checkpoints);
            let (report, summary) = commands::cmd_simulate(&cfg)?;
            notes.push(summary);
            (report, output)
        }
        Command::Converge {
            n_list,
            kmax,
            trials,
            seed,
            workers,
            cap,
            output,
        } => {
            let seed = if trials > 0 {
                resolve_seed(seed, &mut notes)
            } else {
                seed.unwrap_or(0)
            };
            (
                commands::cmd_converge(&n_list.0, kmax, trials, seed, workers, cap)?,
                output,
            )
        }
        Command::Gof { sim, cap, output } => {
            (commands::cmd_gof(&sim_config(&sim, &mut notes), cap)?, output)
        }
        Command::Audit { sim, output } => {
            (commands::cmd_audit(&sim_config(&sim, &mut notes))?, output)
        }
    };
    Ok(Outcome {
        report,
        notes,
        output,
    })
}

fn create(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Write the report to `path` (CSV also gets a `.meta.json` sidecar).
pub fn write_report(report: &Report, format: Format, path: &Path) -> Result<(), CliError> {
    write_report_to(report, format, path, create(path)?)
}

fn write_report_to(report: &Report, format: Format, path: &Path, file: File) -> Result<(), CliError> {
    let mut w = BufWriter::new(file);
    report.write(format, &mut w)?;
    w.flush().map_err(CliError::io)?;
    if format == Format::Csv {
        let mut sidecar = path.as_os_str().to_owned();
        sidecar.push(".meta.json");
        let meta = serde_json::to_string_pretty(&report.meta_json()).map_err(CliError::io)?;
        std::fs::write(&sidecar, meta + "\n").map_err(CliError::io)?;
    }
    Ok(())
}

/// Run a parsed command line, writing output and notes. Returns the exit
/// code.
pub fn run(cli: Cli) -> i32 {
    // Fail on an unwritable destination before doing any work.
    let file = match cli.command.output().out.as_deref().map(create).transpose() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let outcome = match execute(cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    for note in &outcome.notes {
        eprint!("{note}");
        if !note.ends_with('\n') {
            eprintln!();
        }
    }
    let written = match (&outcome.output.out, file) {
        (Some(path), Some(file)) => write_report_to(&outcome.report, outcome.output.format, path, file),
        _ => outcome
            .report
            .write(outcome.output.format, std::io::stdout().lock()),
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
