use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use percussim_core::render::RenderError;
use percussim_core::{
    load_library_file, to_audio, to_midi, EventLog, PatternLibrary, SampleBank, ToneMap,
};

use crate::error::CliError;

/// Environment variable naming the default pattern library.
pub const PATTERNS_ENV: &str = "PERCUSSIM_PATTERNS";

#[derive(Debug, Clone, Default, Args)]
pub struct LibraryArgs {
    /// Pattern library (TOML). Defaults to the bundled library.
    #[arg(long, value_name = "FILE", env = PATTERNS_ENV)]
    pub patterns: Option<PathBuf>,
}

impl LibraryArgs {
    pub fn load(&self) -> Result<PatternLibrary, CliError> {
        match &self.patterns {
            Some(p) => Ok(load_library_file(p)?),
            None => Ok(PatternLibrary::bundled()),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct RenderArgs {
    /// Write a standard MIDI file.
    #[arg(long, value_name = "FILE")]
    pub out_midi: Option<PathBuf>,
    /// Write a 48 kHz mono WAV file.
    #[arg(long, value_name = "FILE")]
    pub out_wav: Option<PathBuf>,
    /// Directory holding bass.wav, slap.wav and jingle.wav. Defaults to
    /// built-in synthesized samples.
    #[arg(long, value_name = "DIR")]
    pub samples: Option<PathBuf>,
    /// Tone map (TOML) overriding the default percussion keys.
    #[arg(long, value_name = "FILE")]
    pub tone_map: Option<PathBuf>,
}

impl RenderArgs {
    pub fn render(&self, log: &EventLog) -> Result<(), CliError> {
        if let Some(path) = &self.out_midi {
            let map = match &self.tone_map {
                Some(p) => ToneMap::from_toml(&read_text(p)?).map_err(render_err)?,
                None => ToneMap::default(),
            };
            let bytes = to_midi(log, &map).map_err(render_err)?;
            std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))?;
        }
        if let Some(path) = &self.out_wav {
            let bank = match &self.samples {
                Some(dir) => SampleBank::from_dir(dir).map_err(render_err)?,
                None => SampleBank::synthesized(),
            };
            let audio = to_audio(log, &bank).map_err(render_err)?;
            let file = File::create(path).map_err(|e| CliError::io(path, e))?;
            audio.write_wav(BufWriter::new(file)).map_err(|e| match e {
                RenderError::Io(io) => CliError::io(path, io),
                other => render_err(other),
            })?;
        }
        Ok(())
    }
}

fn render_err(e: RenderError) -> CliError {
    match e {
        RenderError::Io(io) => CliError::Io {
            path: String::new(),
            source: io,
        },
        other => CliError::Invalid(other.to_string()),
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_log(log: &EventLog, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    log.write_ndjson(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}
