use std::path::PathBuf;

use clap::Args;
use percussim_core::performance::parse_command_script;
use percussim_core::{run, PerformanceConfig};

use crate::common::{read_text, write_log, LibraryArgs, RenderArgs};
use crate::error::CliError;

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Base configuration (JSON). Flags below override its fields.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Simulated seconds.
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub bpm: Option<f64>,
    /// Standard deviation of per-stroke timing error, seconds.
    #[arg(long)]
    pub jitter_sigma: Option<f64>,
    /// Command script: one JSON record per line, same shape as the command
    /// records of an event log.
    #[arg(long, value_name = "FILE")]
    pub script: Option<PathBuf>,
    /// Write the event log (NDJSON).
    #[arg(long, value_name = "FILE")]
    pub out_log: Option<PathBuf>,
    #[command(flatten)]
    pub library: LibraryArgs,
    #[command(flatten)]
    pub render: RenderArgs,
}

impl RunArgs {
    pub fn config(&self) -> Result<PerformanceConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => serde_json::from_str(&read_text(p)?)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))?,
            None => PerformanceConfig::default(),
        };
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.duration {
            cfg.duration = v;
        }
        if let Some(v) = self.bpm {
            cfg.bpm = v;
        }
        if let Some(v) = self.jitter_sigma {
            cfg.jitter.per_stroke_sigma = v;
        }
        cfg.validate()
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        Ok(cfg)
    }
}

pub fn execute(args: &RunArgs) -> Result<(), CliError> {
    let cfg = args.config()?;
    let library = args.library.load()?;
    let commands = match &args.script {
        Some(p) => parse_command_script(&read_text(p)?)
            .map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))?,
        None => Vec::new(),
    };
    let log = run(&cfg, &library, &commands).map_err(|e| CliError::Invalid(e.to_string()))?;
    if let Some(path) = &args.out_log {
        write_log(&log, path)?;
    }
    args.render.render(&log)?;
    eprintln!(
        "simulated {} s: {} records, {} sounds",
        cfg.duration,
        log.records.len(),
        log.sounds().count()
    );
    Ok(())
}
