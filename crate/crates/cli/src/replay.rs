use std::path::PathBuf;

use clap::Args;
use percussim_core::events::SimEvent;
use percussim_core::{
    run, EventLog, LogRecord, PatternLibrary, PerformanceConfig, Record, TimedCommand,
};

use crate::common::{read_text, LibraryArgs, RenderArgs};
use crate::error::CliError;

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Event log written by `run` or `serve`.
    pub log: PathBuf,
    /// Re-simulate from the recorded configuration and commands and check
    /// that every record matches.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub library: LibraryArgs,
    #[command(flatten)]
    pub render: RenderArgs,
}

pub fn execute(args: &ReplayArgs) -> Result<(), CliError> {
    let text = read_text(&args.log)?;
    if args.verify {
        let n = verify(&text, &args.library)?;
        eprintln!("verified {n} records");
    }
    let log = EventLog::parse_ndjson(&text)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", args.log.display())))?;
    args.render.render(&log)
}

/// Inputs recovered from a possibly damaged log.
struct Recovered {
    config: PerformanceConfig,
    digest: String,
    library: String,
    commands: Vec<TimedCommand>,
}

fn recover(lines: &[&str]) -> Option<Recovered> {
    let first: LogRecord = serde_json::from_str(lines.first()?).ok()?;
    let Record::Sim(SimEvent::Start {
        config,
        library,
        library_digest,
        ..
    }) = first.record
    else {
        return None;
    };
    let config = serde_json::from_value(config).ok()?;
    // Commands come from whichever command lines still parse.
    let commands = lines
        .iter()
        .filter_map(|l| serde_json::from_str::<LogRecord>(l).ok())
        .filter_map(|r| match r.record {
            Record::Command(c) => Some(TimedCommand {
                at: c.submitted.unwrap_or(r.t),
                command: c.command,
            }),
            _ => None,
        })
        .collect();
    Some(Recovered {
        config,
        digest: library_digest,
        library,
        commands,
    })
}

fn pick_library(rec: &Recovered, args: &LibraryArgs) -> Result<PatternLibrary, CliError> {
    let bundled = PatternLibrary::bundled();
    if args.patterns.is_none() && bundled.digest() == rec.digest {
        return Ok(bundled);
    }
    let lib = args.load()?;
    if lib.digest() != rec.digest {
        return Err(CliError::Invalid(format!(
            "log was recorded with pattern library `{}` (digest {}); pass it with --patterns",
            rec.library, rec.digest
        )));
    }
    Ok(lib)
}

/// Returns the number of records checked, or the first divergence.
fn verify(text: &str, args: &LibraryArgs) -> Result<usize, CliError> {
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let Some(rec) = recover(&lines) else {
        return Err(CliError::Mismatch(
            "diverged at seq 0: first record is not a readable start record".into(),
        ));
    };
    let library = pick_library(&rec, args)?;
    let expected =
        run(&rec.config, &library, &rec.commands).map_err(|e| CliError::Invalid(e.to_string()))?;
    for (i, want) in expected.records.iter().enumerate() {
        let want_line = want.to_json();
        match lines.get(i) {
            Some(got) if *got == want_line => {}
            Some(_) => {
                return Err(CliError::Mismatch(format!(
                    "diverged at seq {} (line {})",
                    want.seq,
                    i + 1
                )))
            }
            None => {
                return Err(CliError::Mismatch(format!(
                    "diverged at seq {}: log ends after {} records",
                    want.seq,
                    lines.len()
                )))
            }
        }
    }
    if lines.len() > expected.records.len() {
        return Err(CliError::Mismatch(format!(
            "diverged after seq {}: log has {} extra records",
            expected.records.len().saturating_sub(1),
            lines.len() - expected.records.len()
        )));
    }
    Ok(lines.len())
}
