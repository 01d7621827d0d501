//! `popgrid`: generate levels, run episodes and cross-play tournaments,
//! measure behavioural diversity, fit ratings and run the statistics.
//!
//! Exit status: 0 on success, 2 for configuration or input errors, 3 when
//! level generation gives up, 4 for other runtime failures.

mod commands;
mod error;
mod files;
mod manifest;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use popgrid::eval::EloConfig;
use popgrid::parallel::{with_workers, workers_from_env, WORKERS_ENV};
use popgrid::EnvKind;

use crate::error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "popgrid", version, about = "Multi-agent gridworld populations: levels, cross-play, diversity, ratings")]
struct Cli {
    /// Worker threads for parallel episodes and matches. Defaults to the
    /// POPGRID_WORKERS environment variable, then to one per core.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a nested training set or the held-out set of levels.
    Gen(GenArgs),
    /// Summarize level features (min, median, max).
    Features(FeaturesArgs),
    /// Play one episode and print per-seat returns.
    Run(RunArgs),
    /// Write a population of randomly parameterized scripted policies.
    GenPop(GenPopArgs),
    /// Run the cross-play grid described by a manifest.
    Eval(EvalArgs),
    /// Compute expected action variation for populations.
    Eav(EavArgs),
    /// Fit Elo ratings to a match log.
    Elo(EloArgs),
    /// One-way ANOVA with Tukey HSD, and Holm-Bonferroni adjustment.
    Stats(StatsArgs),
}

fn parse_env(s: &str) -> Result<EnvKind, String> {
    EnvKind::from_id(s).map_err(|e| e.to_string())
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_parser = parse_env)]
    env: EnvKind,
    /// Number of levels L; defaults to 100 with --held-out.
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Draw from the held-out namespace instead of the training one.
    #[arg(long)]
    held_out: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FeaturesArgs {
    #[arg(long, value_parser = parse_env)]
    env: EnvKind,
    /// Number of levels to generate.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Summarize existing level files instead of generating.
    #[arg(long)]
    from: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    level: PathBuf,
    /// Population file; seats are drawn from it with replacement.
    #[arg(long)]
    population: Option<PathBuf>,
    /// Registry policy for every seat when no population is given.
    #[arg(long, default_value = "uniform_random")]
    policy: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    horizon: Option<usize>,
    /// Write the trajectory log here.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct GenPopArgs {
    #[arg(long, value_parser = parse_env)]
    env: EnvKind,
    #[arg(long)]
    pop_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    id: String,
    /// Restrict members to one scripted archetype.
    #[arg(long)]
    archetype: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Matches per pairing (overrides the manifest).
    #[arg(long)]
    matches: Option<usize>,
    /// Output directory (overrides the manifest).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EavArgs {
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Level file or directory (without a manifest).
    #[arg(long)]
    levels: Option<PathBuf>,
    /// Population file; repeat for several populations.
    #[arg(long = "population")]
    populations: Vec<PathBuf>,
    /// Episodes per population (E).
    #[arg(long = "eav-E")]
    episodes: Option<usize>,
    /// States sampled per episode (J).
    #[arg(long = "eav-J")]
    states: Option<usize>,
    /// Action samples per state (R).
    #[arg(long = "eav-R")]
    samples: Option<usize>,
    /// Use each policy's exact action distribution instead of R samples.
    #[arg(long)]
    exact: bool,
    /// Sum |p - q| without the 1/2 factor (range [0, 2]).
    #[arg(long)]
    raw_tvd: bool,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EloArgs {
    /// Match log (one JSON match result per line).
    #[arg(long)]
    log: PathBuf,
    #[arg(long, default_value_t = popgrid::eval::DEFAULT_K)]
    k: f64,
    #[arg(long, default_value_t = popgrid::eval::DEFAULT_INITIAL_RATING)]
    init: f64,
    #[arg(long, default_value_t = popgrid::eval::DEFAULT_TOLERANCE)]
    tol: f64,
    #[arg(long, default_value_t = popgrid::eval::DEFAULT_MAX_SWEEPS)]
    max_sweeps: usize,
}

#[derive(Args)]
struct StatsArgs {
    /// File of `label value` rows, one observation per line.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Comma-separated p-values to adjust.
    #[arg(long)]
    holm: Option<String>,
    /// Emit machine-readable JSON instead of tables.
    #[arg(long)]
    json: bool,
}

fn dispatch(command: Command) -> CliResult<String> {
    match command {
        Command::Gen(a) => commands::gen(&commands::GenOptions {
            env: a.env,
            count: a.levels,
            seed: a.seed,
            held_out: a.held_out,
            out: a.out,
        }),
        Command::Features(a) => commands::features(a.env, a.samples, a.seed, a.from.as_deref()),
        Command::Run(a) => commands::run(&commands::RunOptions {
            level: a.level,
            population: a.population,
            policy: a.policy,
            seed: a.seed,
            horizon: a.horizon,
            log: a.log,
        }),
        Command::GenPop(a) => commands::gen_pop(a.env, a.pop_size, a.seed, &a.id, a.archetype.as_deref(), &a.out),
        Command::Eval(a) => commands::eval(&a.manifest, a.matches, a.out.as_deref()),
        Command::Eav(a) => commands::eav(&commands::EavOptions {
            manifest: a.manifest,
            levels: a.levels,
            populations: a.populations,
            episodes: a.episodes,
            states_per_episode: a.states,
            action_samples: a.samples,
            exact: a.exact,
            raw_tvd: a.raw_tvd,
            horizon: a.horizon,
            seed: a.seed,
            out: a.out,
        }),
        Command::Elo(a) => {
            commands::elo(&a.log, &EloConfig { k: a.k, initial: a.init, tolerance: a.tol, max_sweeps: a.max_sweeps })
        }
        Command::Stats(a) => commands::stats(a.input.as_deref(), a.holm.as_deref(), a.json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { error::EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let result = (|| {
        let workers = match cli.workers {
            Some(n) => Some(n),
            None => workers_from_env().map_err(|e| CliError::config(format!("{e} (from {WORKERS_ENV})")))?,
        };
        with_workers(workers, || dispatch(cli.command))?
    })();
    match result {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("popgrid: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
