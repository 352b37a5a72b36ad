//! TOML pattern-library format.
//!
//! ```toml
//! name = "example"
//! description = "optional free text"
//!
//! [note_values]
//! long = 1.0
//! short = 0.5
//! shortest = 0.25
//!
//! [transitions]
//! even_slow = ["even_slow", "uneven_slow"]
//!
//! [[patterns]]
//! id = "pulse"
//! evenness = "even"
//! speed = "slow"
//! origin = "authored"
//! events = [
//!   { onset = 0.0, note = "long", stroke = "single" },
//!   { onset = 1.0, note = "long", stroke = "double", bounce = 0.5, rebound = 0.6 },
//! ]
//! ```
//!
//! The full schema lives in `docs/pattern-library.md`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    Beats, Category, CompatibilityMatrix, Evenness, LibraryError, NoteKind, NoteValues, Origin,
    Pattern, PatternEvent, PatternLibrary, Speed, StrokeKind, DEFAULT_BOUNCE_FRACTION,
    DEFAULT_REBOUND_INTENSITY,
};

/// Source text of the bundled 25-pattern library.
pub const DEFAULT_LIBRARY_TOML: &str = include_str!("../../assets/default_library.toml");

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LibraryFile {
    #[serde(default)]
    name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    description: String,
    #[serde(default)]
    note_values: NoteValuesRecord,
    transitions: BTreeMap<String, Vec<String>>,
    patterns: Vec<PatternRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoteValuesRecord {
    long: f64,
    short: f64,
    shortest: f64,
}

impl Default for NoteValuesRecord {
    fn default() -> Self {
        let v = NoteValues::default();
        NoteValuesRecord {
            long: v.long.as_f64(),
            short: v.short.as_f64(),
            shortest: v.shortest.as_f64(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternRecord {
    id: String,
    evenness: Evenness,
    speed: Speed,
    #[serde(default)]
    origin: Origin,
    events: Vec<EventRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum StrokeName {
    #[default]
    Single,
    Double,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventRecord {
    onset: f64,
    note: NoteKind,
    #[serde(default)]
    stroke: StrokeName,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    rest: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bounce: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rebound: Option<f64>,
}

/// Parses and validates a pattern library from TOML text.
pub fn load_library(source: &str) -> Result<PatternLibrary, LibraryError> {
    let file: LibraryFile =
        toml::from_str(source).map_err(|e| LibraryError::Parse(e.to_string()))?;
    from_record(file)
}

/// Reads a pattern library from disk.
pub fn load_library_file(path: impl AsRef<Path>) -> Result<PatternLibrary, LibraryError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| LibraryError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    load_library(&text)
}

fn note_value(note: &str, beats: f64) -> Result<Beats, LibraryError> {
    match Beats::from_f64(beats) {
        Some(b) if b.ticks() > 0 => Ok(b),
        _ => Err(LibraryError::BadNoteValue {
            note: note.to_string(),
            beats,
        }),
    }
}

fn from_record(file: LibraryFile) -> Result<PatternLibrary, LibraryError> {
    let note_values = NoteValues {
        long: note_value("long", file.note_values.long)?,
        short: note_value("short", file.note_values.short)?,
        shortest: note_value("shortest", file.note_values.shortest)?,
    };

    let mut transitions = CompatibilityMatrix::new();
    for (from, tos) in &file.transitions {
        let from: Category = from.parse().map_err(LibraryError::UnknownCategory)?;
        for to in tos {
            let to: Category = to.parse().map_err(LibraryError::UnknownCategory)?;
            transitions.allow(from, to);
        }
    }

    let mut patterns = Vec::with_capacity(file.patterns.len());
    for rec in file.patterns {
        let mut events = Vec::with_capacity(rec.events.len());
        for (index, ev) in rec.events.into_iter().enumerate() {
            let onset = Beats::from_f64(ev.onset).ok_or_else(|| LibraryError::OffGrid {
                id: rec.id.clone(),
                index,
                onset: ev.onset,
            })?;
            let stroke = match ev.stroke {
                StrokeName::Single => StrokeKind::Single,
                StrokeName::Double => StrokeKind::Double {
                    bounce: ev.bounce.unwrap_or(DEFAULT_BOUNCE_FRACTION),
                    rebound: ev.rebound.unwrap_or(DEFAULT_REBOUND_INTENSITY),
                },
            };
            events.push(PatternEvent {
                onset,
                note: ev.note,
                duration: note_values.duration(ev.note),
                stroke,
                rest: ev.rest,
            });
        }
        patterns.push(Pattern {
            id: rec.id,
            evenness: rec.evenness,
            speed: rec.speed,
            origin: rec.origin,
            events,
        });
    }

    PatternLibrary::new(
        file.name,
        file.description,
        note_values,
        transitions,
        patterns,
    )
}

fn to_record(lib: &PatternLibrary) -> LibraryFile {
    let nv = lib.note_values();
    let transitions = lib
        .transitions()
        .entries()
        .map(|(from, tos)| {
            (
                from.to_string(),
                tos.iter().map(|c| c.to_string()).collect(),
            )
        })
        .collect();
    let patterns = lib
        .patterns()
        .iter()
        .map(|p| PatternRecord {
            id: p.id.clone(),
            evenness: p.evenness,
            speed: p.speed,
            origin: p.origin,
            events: p
                .events
                .iter()
                .map(|e| {
                    let (stroke, bounce, rebound) = match e.stroke {
                        StrokeKind::Single => (StrokeName::Single, None, None),
                        StrokeKind::Double { bounce, rebound } => {
                            (StrokeName::Double, Some(bounce), Some(rebound))
                        }
                    };
                    EventRecord {
                        onset: e.onset.as_f64(),
                        note: e.note,
                        stroke,
                        rest: e.rest,
                        bounce,
                        rebound,
                    }
                })
                .collect(),
        })
        .collect();
    LibraryFile {
        name: lib.name().to_string(),
        description: lib.description().to_string(),
        note_values: NoteValuesRecord {
            long: nv.long.as_f64(),
            short: nv.short.as_f64(),
            shortest: nv.shortest.as_f64(),
        },
        transitions,
        patterns,
    }
}

impl PatternLibrary {
    /// Serializes the library back to the TOML file format.
    pub fn to_toml(&self) -> String {
        toml::to_string(&to_record(self)).expect("library records always serialize")
    }
}
