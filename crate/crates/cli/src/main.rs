use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};

use celldiv_cli::commands::{self, StatsArgs, StatsTest, EXIT_FAILED, EXIT_USAGE};

/// Simulate cell-division tessellations and check their laws.
#[derive(Parser)]
#[command(name = "celldiv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Seed of all random streams; replicate i uses stream (seed, i).
    #[arg(long)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Run replicates on all cores. Outputs are identical to a sequential run.
    #[arg(long)]
    parallel: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the division process in a window (or cut out of the whole space).
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Exit 0 even if a replicate hit the event cap.
        #[arg(long)]
        allow_truncation: bool,
    },
    /// Build backward zero-cell chains and run the explosion diagnostic.
    ZeroChain {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the fragmentation chain.
    Fragment {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Statistical tests on a sample file, or the acceptance suite.
    Stats {
        /// One number per line; '#' lines are comments.
        #[arg(long, required_unless_present = "preset")]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "cv")]
        test: TestKind,
        /// exp:RATE, gamma:SHAPE,RATE, uniform:LOW,HIGH or powermax:K.
        #[arg(long)]
        reference: Option<String>,
        /// Second sample file for a two-sample KS test.
        #[arg(long)]
        against: Option<PathBuf>,
        /// Mean for the Poisson count test.
        #[arg(long)]
        mean: Option<f64>,
        #[arg(long, default_value_t = celldiv::stats::DEFAULT_LEVEL)]
        level: f64,
        #[arg(long, value_enum, conflicts_with = "input")]
        preset: Option<Preset>,
        /// Criteria to run with --preset acceptance (default: all).
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<String>,
        /// Required with --preset.
        #[arg(long)]
        seed: Option<u64>,
        /// Report file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a 2-d event log as SVG.
    Render {
        #[arg(long)]
        events: PathBuf,
        /// Snapshot time (default: end of the log).
        #[arg(long)]
        time: Option<f64>,
        #[arg(long, default_value_t = 600.0)]
        width: f64,
        #[arg(long)]
        color_by_birth: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TestKind {
    Cv,
    Ks,
    Poisson,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Acceptance,
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Simulate { run, allow_truncation } => {
            let cfg = commands::load_config(&run.config, run.seed)?;
            commands::simulate(&cfg, run.seed, &run.out, run.parallel, allow_truncation)
        }
        Command::ZeroChain { run } => {
            let cfg = commands::load_config(&run.config, run.seed)?;
            commands::zero_chain(&cfg, run.seed, &run.out, run.parallel)
        }
        Command::Fragment { run } => {
            let cfg = commands::load_config(&run.config, run.seed)?;
            commands::fragment(&cfg, run.seed, &run.out, run.parallel)
        }
        Command::Stats {
            input,
            test,
            reference,
            against,
            mean,
            level,
            preset,
            criteria,
            seed,
            out,
        } => {
            let (code, report) = match (preset, input) {
                (Some(Preset::Acceptance), _) => {
                    let Some(seed) = seed else {
                        bail!("--preset acceptance needs --seed");
                    };
                    commands::acceptance(seed, &criteria)?
                }
                (None, Some(input)) => commands::stats(&StatsArgs {
                    input: &input,
                    test: match test {
                        TestKind::Cv => StatsTest::Cv,
                        TestKind::Ks => StatsTest::Ks,
                        TestKind::Poisson => StatsTest::Poisson,
                    },
                    reference: reference.as_deref(),
                    against: against.as_deref(),
                    mean,
                    level,
                })?,
                (None, None) => unreachable!("clap requires --input without --preset"),
            };
            if code != EXIT_USAGE {
                emit(out.as_ref(), &report)?;
            }
            Ok(code)
        }
        Command::Render {
            events,
            time,
            width,
            color_by_birth,
            out,
        } => {
            let svg = commands::render(&events, time, color_by_birth, width)?;
            std::fs::write(&out, svg)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILED as u8)
        }
    }
}
