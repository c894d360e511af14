use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rm_metrics::{run, CliError, Command, PipelineConfig, Stage};

#[derive(Parser)]
#[command(name = "rm-metrics", version, about = "Citation-network analytics pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Flat `key = value` config file.
    #[arg(long, global = true, env = "RM_METRICS_CONFIG")]
    config: Option<PathBuf>,
    /// Master seed; overrides the `seed` key.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// field292 or discipline19.
    #[arg(long, global = true)]
    level: Option<String>,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Override one config key.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Parse the input corpus and build the binary cache.
    Ingest,
    /// Specialization scores and research styles.
    Styles,
    /// Team composition records.
    Teams,
    /// Cohort trends and style stability.
    Trends,
    /// Disruption scores and top-percentile flags.
    Disrupt,
    /// Atypicality scores against the randomized null model.
    Atypical,
    /// Logistic regression table.
    Regress,
    /// Binned curves with bootstrap intervals.
    Curves,
    /// Generate a synthetic corpus with planted ground truth.
    Synth,
    /// Assemble the report bundle.
    Report,
    /// Every stage from ingest to report.
    All,
}

impl Cmd {
    fn command(self) -> Command {
        let s = match self {
            Cmd::All => return Command::All,
            Cmd::Ingest => Stage::Ingest,
            Cmd::Styles => Stage::Styles,
            Cmd::Teams => Stage::Teams,
            Cmd::Trends => Stage::Trends,
            Cmd::Disrupt => Stage::Disrupt,
            Cmd::Atypical => Stage::Atypical,
            Cmd::Regress => Stage::Regress,
            Cmd::Curves => Stage::Curves,
            Cmd::Synth => Stage::Synth,
            Cmd::Report => Stage::Report,
        };
        Command::Stage(s)
    }
}

fn configure(cli: &Cli) -> Result<PipelineConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    for kv in &cli.set {
        cfg.apply_override(kv)?;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(l) = &cli.level {
        cfg.set("level", l).map_err(CliError::Validation)?;
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(format!("--threads: {e}")))?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure(&cli).and_then(|cfg| run(cli.command.command(), cfg, &cli.out));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
