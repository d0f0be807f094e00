mod config;
mod error;
mod output;
mod run;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Command, Flags};
use error::CliError;

/// Fat fractal percolation laboratory.
#[derive(Parser)]
#[command(name = "perc-lab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Almost-sure dimensions and expected measure.
    Dims(Flags),
    /// Survival and interior classification.
    Classify(Flags),
    /// Sample one realization.
    Generate(Flags),
    /// Render a level of a 2-D realization as PGM.
    Render(Flags),
    /// Monte Carlo expected Lebesgue measure.
    Measure(Flags),
    /// Monte Carlo survival probability.
    Survival(Flags),
    /// Box-counting dimension fit over surviving realizations.
    Boxdim(Flags),
    /// Build a witness for a (dimension, measure) target.
    Witness(Flags),
    /// Run one quantity over a parameter grid.
    Sweep(Flags),
    /// Run the command named in the `--config` file.
    Run(Flags),
}

impl Cmd {
    fn split(&self) -> (Option<Command>, &Flags) {
        match self {
            Cmd::Dims(f) => (Some(Command::Dims), f),
            Cmd::Classify(f) => (Some(Command::Classify), f),
            Cmd::Generate(f) => (Some(Command::Generate), f),
            Cmd::Render(f) => (Some(Command::Render), f),
            Cmd::Measure(f) => (Some(Command::Measure), f),
            Cmd::Survival(f) => (Some(Command::Survival), f),
            Cmd::Boxdim(f) => (Some(Command::Boxdim), f),
            Cmd::Witness(f) => (Some(Command::Witness), f),
            Cmd::Sweep(f) => (Some(Command::Sweep), f),
            Cmd::Run(f) => (None, f),
        }
    }
}

const THREADS_VAR: &str = "PERC_LAB_THREADS";

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot start {threads} threads: {e}")))
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let (command, flags) = cli.command.split();
    let cfg = config::resolve(command, flags)?;
    run::run(&cfg)
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => return fail(CliError::Config(e.render().to_string().trim_end().to_string())),
    };
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}
