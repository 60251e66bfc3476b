use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use infodelta::pipeline::config::parse_sources;
use infodelta::pipeline::{cmd_analyze, cmd_ingest, cmd_report, PipelineError, RunConfig};
use infodelta::Window;

/// Weekly information supply versus demand analytics.
#[derive(Debug, Parser)]
#[command(name = "infodelta", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Read posts, search-interest exports and news volume into weekly series.
    Ingest(Common),
    /// Compute deltas, episodes, lag correlations and engagement statistics.
    Analyze(Common),
    /// Render SVG charts with CSV twins from the analysis bundles.
    Report(Common),
    /// ingest, analyze and report in one go.
    Run(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Override the analysis window, `YYYY-MM-DD..YYYY-MM-DD` (Mondays).
    #[arg(long, value_name = "RANGE")]
    window: Option<String>,
    #[arg(long, value_name = "WEEKS")]
    max_lag: Option<usize>,
    #[arg(long, value_name = "WEEKS")]
    min_episode_len: Option<usize>,
    /// Comma-separated supply sources: facebook, instagram, gdelt.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    sources: Option<Vec<String>>,
    #[arg(long, value_name = "DIR")]
    output_dir: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, PipelineError> {
        let mut config = RunConfig::load(&self.config)?;
        if let Some(w) = &self.window {
            config.window = w
                .parse::<Window>()
                .map_err(|e| PipelineError::Config(format!("--window: {e}")))?;
        }
        if let Some(n) = self.max_lag {
            config.max_lag = n;
        }
        if let Some(n) = self.min_episode_len {
            config.min_episode_len = n;
        }
        if let Some(s) = &self.sources {
            config.sources = parse_sources(s)?;
        }
        if let Some(dir) = &self.output_dir {
            config.output_dir = dir.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

fn ingest(config: &RunConfig) -> Result<(), PipelineError> {
    let out = cmd_ingest(config)?;
    let m = &out.manifest;
    let complete = m.subtopics.iter().filter(|s| s.complete).count();
    println!(
        "ingest: {} subtopics ({complete} complete), {} warnings -> {}",
        m.subtopics.len(),
        m.warnings.len(),
        config.output_dir.join("ingest").display()
    );
    Ok(())
}

fn analyze(config: &RunConfig) -> Result<(), PipelineError> {
    let out = cmd_analyze(config)?;
    let s = &out.summary.overall;
    let r = s
        .mean_lag0_r
        .map(|r| infodelta::fmt::fixed6(r.0))
        .unwrap_or_else(|| "undefined".into());
    let lag = s
        .modal_peak_lag
        .map(|l| l.to_string())
        .unwrap_or_else(|| "undefined".into());
    println!(
        "analyze: {} bundles, {} failures, mean lag-0 r {r}, modal peak lag {lag} -> {}",
        out.bundles.len(),
        out.failures.len(),
        config.output_dir.join("analysis").display()
    );
    Ok(())
}

fn report(config: &RunConfig) -> Result<(), PipelineError> {
    let out = cmd_report(config)?;
    println!(
        "report: {} files, {} charts omitted -> {}",
        out.files.len(),
        out.omitted.len(),
        config.output_dir.join("report").display()
    );
    Ok(())
}

fn run(command: &Command) -> Result<(), PipelineError> {
    match command {
        Command::Ingest(c) => ingest(&c.load()?),
        Command::Analyze(c) => analyze(&c.load()?),
        Command::Report(c) => report(&c.load()?),
        Command::Run(c) => {
            let config = c.load()?;
            ingest(&config)?;
            analyze(&config)?;
            report(&config)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("infodelta: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
