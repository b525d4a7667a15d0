//! Command-line front end: algebra self-tests, memory load benchmarks,
//! sequence and focus demos, and the language-identification pipeline. Every
//! subcommand echoes its effective configuration into its JSON report and is
//! bit-reproducible from (inputs, seed), timing fields aside.

mod bench;
mod focusdemo;
mod lang;
mod selftest;
mod seqcmd;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use hyperdim::{CounterWidth, Dimension, Error, Result};

#[derive(Parser)]
#[command(
    name = "hyperdim",
    version,
    about = "High-dimensional binary vector toolkit: algebra self-tests, \
             distributed-memory benchmarks, sequence and focus demos, and \
             trigram language identification"
)]
struct Cli {
    /// Vector dimension. Commands that load a stored artifact take its
    /// dimension; giving --dim as well asserts the two agree.
    #[arg(long, global = true)]
    dim: Option<usize>,

    /// Run seed. Every random draw derives from it.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Worker thread count (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Where to write this command's output file: the JSON report, or for
    /// `langid train` the profile store.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the algebra and memory property suites.
    Selftest {
        /// Randomized cases per law.
        #[arg(long, default_value_t = 1000)]
        cases: usize,
    },
    /// Write random pairs into a distributed memory on a load grid and
    /// report recall quality at each point.
    SdmBench {
        #[arg(long, default_value_t = 10_000)]
        locations: usize,
        /// Activation probability the radius is chosen for.
        #[arg(long, default_value_t = 0.001)]
        target_p: f64,
        /// Largest item count on the load grid.
        #[arg(long, default_value_t = 2000)]
        items: usize,
        /// Independent repetitions averaged into the curve.
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 8)]
        counter_bits: u8,
    },
    /// Train, evaluate, apply, and cluster language profiles.
    Langid {
        #[command(subcommand)]
        cmd: lang::LangidCmd,
    },
    /// Record moment sequences into a distributed memory and query them.
    Seq {
        #[command(subcommand)]
        cmd: seqcmd::SeqCmd,
    },
    /// Replay a scripted channel scenario through the focus loop.
    FocusDemo {
        /// Scenario file: channels, per-tick symbol assignments, passes.
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        locations: usize,
        #[arg(long, default_value_t = 0.001)]
        target_p: f64,
        #[arg(long, default_value_t = 8)]
        counter_bits: u8,
        /// Novelty threshold: at or below is novel.
        #[arg(long, default_value_t = 0.6)]
        low: f64,
        /// Novelty threshold: at or above is known.
        #[arg(long, default_value_t = 0.9)]
        high: f64,
    },
}

/// Restore default SIGPIPE so `hyperdim ... | head` dies quietly instead of
/// panicking in the stdout writer.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .is_err()
        {
            eprintln!("warning: thread pool already initialized, --threads ignored");
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let started = Instant::now();
    match cli.cmd {
        Cmd::Selftest { cases } => {
            selftest::run(effective_dim(cli.dim)?, cli.seed, cases, cli.out.as_deref(), started)
        }
        Cmd::SdmBench {
            locations,
            target_p,
            items,
            trials,
            counter_bits,
        } => bench::run(
            bench::BenchArgs {
                dim: effective_dim(cli.dim)?,
                seed: cli.seed,
                locations,
                target_p,
                items,
                trials,
                counter_width: counter_width(counter_bits)?,
            },
            cli.out.as_deref(),
            started,
        ),
        Cmd::Langid { cmd } => lang::run(cmd, cli.dim, cli.seed, cli.out.as_deref(), started),
        Cmd::Seq { cmd } => seqcmd::run(cmd, cli.dim, cli.seed, cli.out.as_deref(), started),
        Cmd::FocusDemo {
            scenario,
            locations,
            target_p,
            counter_bits,
            low,
            high,
        } => focusdemo::run(
            focusdemo::DemoArgs {
                scenario,
                dim_flag: cli.dim,
                seed: cli.seed,
                locations,
                target_p,
                counter_width: counter_width(counter_bits)?,
                low,
                high,
            },
            cli.out.as_deref(),
            started,
        ),
    }
}

pub(crate) fn effective_dim(flag: Option<usize>) -> Result<Dimension> {
    match flag {
        Some(d) => Dimension::new(d),
        None => Ok(Dimension::DEFAULT),
    }
}

/// Flagged dimension vs the one found in a stored artifact.
pub(crate) fn check_stored_dim(flag: Option<usize>, stored: Dimension) -> Result<()> {
    match flag {
        Some(d) if d != stored.get() => Err(Error::DimensionMismatch {
            left: d,
            right: stored.get(),
        }),
        _ => Ok(()),
    }
}

pub(crate) fn counter_width(bits: u8) -> Result<CounterWidth> {
    match bits {
        8 => Ok(CounterWidth::W8),
        16 => Ok(CounterWidth::W16),
        32 => Ok(CounterWidth::W32),
        other => Err(Error::InvalidConfig(format!(
            "--counter-bits must be 8, 16, or 32, got {other}"
        ))),
    }
}

pub(crate) fn json_err(e: serde_json::Error) -> Error {
    Error::Format(e.to_string())
}

/// Write the report as pretty JSON if a path was given.
pub(crate) fn write_report(path: Option<&Path>, report: &serde_json::Value) -> Result<()> {
    if let Some(path) = path {
        let mut w = BufWriter::new(File::create(path)?);
        let text = serde_json::to_string_pretty(report).map_err(json_err)?;
        w.write_all(text.as_bytes())?;
        w.write_all(b"\n")?;
        w.flush()?;
    }
    Ok(())
}

pub(crate) fn open_reader(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

pub(crate) fn create_writer(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub(crate) fn read_json_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let r = open_reader(path)?;
    serde_json::from_reader(r).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}
