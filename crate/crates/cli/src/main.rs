//! `cyclicity <command> --config path.json [--out dir] [--threads K]`
//!
//! Exit status: 0 on success, 2 for invalid input, 3 for numeric failure,
//! 1 for I/O problems writing results.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use crate::commands::Command;
use crate::config::{ExperimentConfig, SCHEMA_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] cyclicity_core::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Core(e) if e.is_numeric() => 3,
            CliError::Core(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cyclicity", version, about = "Cyclicity experiments on spaces of holomorphic functions")]
struct Cli {
    command: Command,
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory for `<command>.json` and `<command>.csv`; JSON goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; overrides CYCLICITY_THREADS.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn thread_count(cli: &Cli, cfg: &ExperimentConfig) -> Result<Option<usize>, CliError> {
    if let Some(k) = cli.threads {
        return Ok(Some(k));
    }
    if let Ok(v) = std::env::var("CYCLICITY_THREADS") {
        return v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Validation(format!("CYCLICITY_THREADS must be a positive integer, got `{v}`")));
    }
    Ok(cfg.threads)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", cli.config.display())))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(k) = thread_count(cli, &cfg)? {
        if k == 0 {
            return Err(CliError::Validation("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Io(format!("cannot start thread pool: {e}")))?;
    }
    let out = commands::run(cli.command, &mut cfg)?;
    cfg.schema_version = Some(SCHEMA_VERSION);
    let doc = json!({
        "schemaVersion": SCHEMA_VERSION,
        "command": cli.command.name(),
        "config": serde_json::to_value(&cfg).map_err(|e| CliError::Io(e.to_string()))?,
        "result": out.result,
    });
    let mut body = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
    body.push('\n');
    match &cli.out {
        None => print!("{body}"),
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            let name = cli.command.name();
            let json_path = dir.join(format!("{name}.json"));
            std::fs::write(&json_path, body).map_err(|e| CliError::Io(format!("{}: {e}", json_path.display())))?;
            log::info!("wrote {}", json_path.display());
            if let Some(csv) = out.csv {
                let csv_path = dir.join(format!("{name}.csv"));
                std::fs::write(&csv_path, csv).map_err(|e| CliError::Io(format!("{}: {e}", csv_path.display())))?;
                log::info!("wrote {}", csv_path.display());
            }
        }
    }
    Ok(())
}
