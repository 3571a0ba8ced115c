use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use molfact::providers::{CacheMode, ReplayStore};
use molfact::run::{Failure, MANIFEST};
use molfact::{Command, Error, RunConfig};
use serde_json::json;

/// Claim decomposition, decontextualization and verification experiments.
#[derive(Parser)]
#[command(name = "molfact", version)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, short, global = true, default_value = "molfact.toml")]
    config: PathBuf,

    /// Answer every model request from the replay store; never call a provider.
    #[arg(long, global = true)]
    replay_only: bool,

    /// Run seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory; overrides the config file.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Split fact-check responses into atomic claims.
    Decompose,
    /// Revise claims with every configured strategy.
    Revise,
    /// Run the controlled minimality experiment.
    Minimality,
    /// Judge revisions against ambiguous evidence and report accuracy.
    AmbigEval,
    /// Measure bidirectional-entailment overlap between strategies.
    Overlap,
    /// Recompute report tables from stored outputs, offline.
    Report,
    /// Inspect or fill the replay store.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    /// Print entry counts and the content hash.
    Inspect,
    /// Run a stage in live-record mode to fill the store.
    Record {
        #[arg(value_enum)]
        stage: Stage,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Stage {
    Decompose,
    Revise,
    Minimality,
    AmbigEval,
    Overlap,
}

impl From<Stage> for Command {
    fn from(s: Stage) -> Command {
        match s {
            Stage::Decompose => Command::Decompose,
            Stage::Revise => Command::Revise,
            Stage::Minimality => Command::Minimality,
            Stage::AmbigEval => Command::AmbigEval,
            Stage::Overlap => Command::Overlap,
        }
    }
}

fn load_config(cli: &Cli) -> molfact::Result<RunConfig> {
    let mut config = RunConfig::load(&cli.config)?;
    if let Some(seed) = cli.seed {
        config.seed = Some(seed);
    }
    if let Some(dir) = &cli.output_dir {
        config.output_dir = std::env::current_dir()
            .map_err(|e| Error::Config(format!("current directory: {e}")))?
            .join(dir);
    }
    if cli.replay_only {
        config.cache_mode = CacheMode::ReplayOnly;
    }
    Ok(config)
}

fn fail(command: Option<Command>, error: &Error) -> ExitCode {
    let summary = match command {
        Some(c) => serde_json::to_value(Failure::new(c, error)).expect("failure serializes"),
        None => json!({ "kind": error.kind(), "message": error.to_string() }),
    };
    eprintln!("{summary}");
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let mut config = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => return fail(None, &e),
    };
    let command = match cli.command {
        Cmd::Decompose => Command::Decompose,
        Cmd::Revise => Command::Revise,
        Cmd::Minimality => Command::Minimality,
        Cmd::AmbigEval => Command::AmbigEval,
        Cmd::Overlap => Command::Overlap,
        Cmd::Report => Command::Report,
        Cmd::Cache { action: CacheAction::Inspect } => {
            let inspect = || -> molfact::Result<serde_json::Value> {
                let store = ReplayStore::open(config.resolve(&config.replay_dir), CacheMode::ReplayOnly)?;
                Ok(json!({
                    "dir": store.dir(),
                    "content_hash": store.content_hash()?,
                    "summary": store.summary()?,
                }))
            };
            return match inspect() {
                Ok(v) => {
                    println!("{}", serde_json::to_string_pretty(&v).expect("summary serializes"));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(None, &e),
            };
        }
        Cmd::Cache { action: CacheAction::Record { stage } } => {
            config.cache_mode = CacheMode::LiveRecord;
            stage.into()
        }
    };
    match molfact::run(&config, command) {
        Ok(manifest) => {
            let dir = config.resolve(&config.output_dir);
            println!(
                "{}",
                json!({
                    "command": command.as_str(),
                    "manifest": dir.join(MANIFEST),
                    "summary": manifest.summary,
                })
            );
            ExitCode::SUCCESS
        }
        Err(e) => fail(Some(command), &e),
    }
}
