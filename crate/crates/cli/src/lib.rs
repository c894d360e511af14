//! Command-line orchestration of the citation analytics pipeline.

pub mod config;
pub mod output;
pub mod stages;

use std::path::{Path, PathBuf};

pub use config::PipelineConfig;
pub use stages::{Outcome, Pipeline, Stage, StageManifest, Summary, PIPELINE};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(
        "`{needed_by}` needs the output of {} (not found under {}); run {} first",
        quoted(stages, ""),
        out.display(),
        quoted(stages, "rm-metrics ")
    )]
    Missing {
        stages: Vec<&'static str>,
        needed_by: &'static str,
        out: PathBuf,
    },
    #[error("`{needed_by}` needs the output of `{stage}`, which was produced under a different configuration; rerun `rm-metrics {stage}`")]
    Stale {
        stage: &'static str,
        needed_by: &'static str,
    },
    #[error("missing artifacts:\n  {}", .0.join("\n  "))]
    MissingArtifacts(Vec<String>),
    #[error(transparent)]
    Data(#[from] rm_metrics_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

fn quoted(names: &[&str], prefix: &str) -> String {
    names
        .iter()
        .map(|n| format!("`{prefix}{n}`"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl CliError {
    /// 1 for configuration and ordering problems, 2 for bad data.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_)
            | CliError::Missing { .. }
            | CliError::Stale { .. }
            | CliError::MissingArtifacts(_) => 1,
            CliError::Data(_) | CliError::Io(_) => 2,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Stage(Stage),
    All,
}

/// Run a subcommand against `out`.
pub fn run(command: Command, cfg: PipelineConfig, out: &Path) -> Result<(), CliError> {
    cfg.validate()?;
    let mut p = Pipeline::new(cfg, out);
    match command {
        Command::Stage(s) => {
            p.run(s)?;
        }
        Command::All => {
            for &s in PIPELINE {
                p.run(s)?;
            }
        }
    }
    Ok(())
}
