//! Rhythm patterns, their category taxonomy, and pattern libraries.
//!
//! A [`Pattern`] is an ordered run of note events (strokes and rests) that
//! tiles the fixed four-beat pattern window. Each pattern carries two
//! category tags, evenness and speed, and a [`CompatibilityMatrix`] says
//! which categories may follow which. Libraries are loaded from a TOML file
//! (see [`load_library`]) and validated before use; after loading they are
//! immutable.

mod file;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use file::{load_library, load_library_file, DEFAULT_LIBRARY_TOML};

/// Sub-beat resolution of pattern positions. Divisible by 2, 3, 4, 5, 6, 8,
/// 12, 16, 32 and 64, so ordinary and tuplet note values land on the grid.
pub const TICKS_PER_BEAT: u32 = 960;

/// Beats in one pattern window.
pub const WINDOW_BEATS: u32 = 4;

/// A beat position or duration on the [`TICKS_PER_BEAT`] grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Beats(u32);

impl Beats {
    pub const ZERO: Beats = Beats(0);
    pub const WINDOW: Beats = Beats(WINDOW_BEATS * TICKS_PER_BEAT);

    pub const fn from_ticks(ticks: u32) -> Self {
        Beats(ticks)
    }

    pub const fn whole(beats: u32) -> Self {
        Beats(beats * TICKS_PER_BEAT)
    }

    /// Converts a fractional beat count, rejecting values that are negative
    /// or do not fall on the tick grid.
    pub fn from_f64(beats: f64) -> Option<Self> {
        if !beats.is_finite() || beats < 0.0 {
            return None;
        }
        let scaled = beats * f64::from(TICKS_PER_BEAT);
        let rounded = scaled.round();
        if (scaled - rounded).abs() > 1e-6 || rounded > f64::from(u32::MAX) {
            return None;
        }
        Some(Beats(rounded as u32))
    }

    pub const fn ticks(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / f64::from(TICKS_PER_BEAT)
    }

    pub fn checked_add(self, other: Beats) -> Option<Beats> {
        self.0.checked_add(other.0).map(Beats)
    }
}

impl std::ops::Add for Beats {
    type Output = Beats;

    fn add(self, rhs: Beats) -> Beats {
        Beats(self.0 + rhs.0)
    }
}

impl fmt::Display for Beats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_f64())
    }
}

/// Qualitative note length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoteKind {
    Long,
    Short,
    Shortest,
}

/// Durations assigned to each [`NoteKind`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoteValues {
    pub long: Beats,
    pub short: Beats,
    pub shortest: Beats,
}

impl Default for NoteValues {
    fn default() -> Self {
        NoteValues {
            long: Beats::whole(1),
            short: Beats::from_ticks(TICKS_PER_BEAT / 2),
            shortest: Beats::from_ticks(TICKS_PER_BEAT / 4),
        }
    }
}

impl NoteValues {
    pub fn duration(&self, kind: NoteKind) -> Beats {
        match kind {
            NoteKind::Long => self.long,
            NoteKind::Short => self.short,
            NoteKind::Shortest => self.shortest,
        }
    }
}

/// Default bounce delay of a double stroke, as a fraction of the host note.
pub const DEFAULT_BOUNCE_FRACTION: f64 = 0.5;
/// Default intensity of the rebound hit relative to the first hit.
pub const DEFAULT_REBOUND_INTENSITY: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum StrokeKind {
    #[default]
    Single,
    /// One motion, two sounds. `bounce` is the delay of the second hit as a
    /// fraction of the host note's duration; `rebound` scales its intensity.
    Double { bounce: f64, rebound: f64 },
}

impl StrokeKind {
    pub fn double() -> Self {
        StrokeKind::Double {
            bounce: DEFAULT_BOUNCE_FRACTION,
            rebound: DEFAULT_REBOUND_INTENSITY,
        }
    }

    pub fn is_double(&self) -> bool {
        matches!(self, StrokeKind::Double { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            StrokeKind::Single => "single",
            StrokeKind::Double { .. } => "double",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternEvent {
    pub onset: Beats,
    pub note: NoteKind,
    /// Resolved from the library's note-value mapping.
    pub duration: Beats,
    pub stroke: StrokeKind,
    pub rest: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evenness {
    Even,
    Uneven,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Speed {
    Quick,
    Slow,
}

/// An (evenness, speed) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Category {
    pub evenness: Evenness,
    pub speed: Speed,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::new(Evenness::Even, Speed::Quick),
        Category::new(Evenness::Even, Speed::Slow),
        Category::new(Evenness::Uneven, Speed::Quick),
        Category::new(Evenness::Uneven, Speed::Slow),
    ];

    pub const fn new(evenness: Evenness, speed: Speed) -> Self {
        Category { evenness, speed }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = match self.evenness {
            Evenness::Even => "even",
            Evenness::Uneven => "uneven",
        };
        let s = match self.speed {
            Speed::Quick => "quick",
            Speed::Slow => "slow",
        };
        write!(f, "{e}_{s}")
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (e, sp) = s
            .split_once('_')
            .ok_or_else(|| format!("category `{s}` is not of the form <evenness>_<speed>"))?;
        let evenness = match e {
            "even" => Evenness::Even,
            "uneven" => Evenness::Uneven,
            _ => return Err(format!("unknown evenness `{e}` in category `{s}`")),
        };
        let speed = match sp {
            "quick" => Speed::Quick,
            "slow" => Speed::Slow,
            _ => return Err(format!("unknown speed `{sp}` in category `{s}`")),
        };
        Ok(Category { evenness, speed })
    }
}

/// Where a pattern came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    /// Written down note-for-note from a musician's description.
    Transcribed,
    /// Composed for this library to fill out the category taxonomy.
    #[default]
    Authored,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub id: String,
    pub evenness: Evenness,
    pub speed: Speed,
    pub origin: Origin,
    pub events: Vec<PatternEvent>,
}

impl Pattern {
    pub fn category(&self) -> Category {
        Category::new(self.evenness, self.speed)
    }

    /// Total length of one pass through the pattern.
    pub fn length(&self) -> Beats {
        self.events
            .iter()
            .fold(Beats::ZERO, |acc, e| acc + e.duration)
    }

    /// How many times the pattern repeats to fill one window. Only meaningful
    /// for validated patterns.
    pub fn repeats_per_window(&self) -> u32 {
        Beats::WINDOW
            .ticks()
            .checked_div(self.length().ticks())
            .unwrap_or(0)
    }

    pub fn stroke_count(&self) -> usize {
        self.events.iter().filter(|e| !e.rest).count()
    }
}

/// Evenness derived from note values alone.
pub fn derive_evenness(events: &[PatternEvent]) -> Evenness {
    let mut durations = events.iter().map(|e| e.duration);
    match durations.next() {
        Some(first) if durations.all(|d| d == first) => Evenness::Even,
        Some(_) => Evenness::Uneven,
        None => Evenness::Even,
    }
}

/// Speed derived from note values: a strict majority of events at or under
/// half a beat is quick, a strict majority at or over one beat is slow.
pub fn derive_speed(events: &[PatternEvent]) -> Option<Speed> {
    let half = Beats::from_ticks(TICKS_PER_BEAT / 2);
    let one = Beats::whole(1);
    let n = events.len();
    let quick = events.iter().filter(|e| e.duration <= half).count();
    let slow = events.iter().filter(|e| e.duration >= one).count();
    if 2 * quick > n {
        Some(Speed::Quick)
    } else if 2 * slow > n {
        Some(Speed::Slow)
    } else {
        None
    }
}

/// Which categories may follow which.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CompatibilityMatrix {
    entries: BTreeMap<Category, BTreeSet<Category>>,
}

impl CompatibilityMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every category may follow every other.
    pub fn all_pairs() -> Self {
        let mut m = Self::new();
        for from in Category::ALL {
            for to in Category::ALL {
                m.allow(from, to);
            }
        }
        m
    }

    /// Moves that keep at least one of the two tags.
    pub fn one_tag_at_a_time() -> Self {
        let mut m = Self::new();
        for from in Category::ALL {
            for to in Category::ALL {
                if from.evenness == to.evenness || from.speed == to.speed {
                    m.allow(from, to);
                }
            }
        }
        m
    }

    pub fn allow(&mut self, from: Category, to: Category) {
        self.entries.entry(from).or_default().insert(to);
    }

    pub fn next_categories(&self, from: Category) -> impl Iterator<Item = Category> + '_ {
        self.entries.get(&from).into_iter().flatten().copied()
    }

    pub fn allows(&self, from: Category, to: Category) -> bool {
        self.entries.get(&from).is_some_and(|s| s.contains(&to))
    }

    pub fn entries(&self) -> impl Iterator<Item = (Category, &BTreeSet<Category>)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    /// Categories reachable from `from` in any number of moves (including
    /// zero), restricted to `within`.
    pub fn closure_from(&self, from: Category, within: &BTreeSet<Category>) -> BTreeSet<Category> {
        let mut seen = BTreeSet::from([from]);
        let mut frontier = vec![from];
        while let Some(c) = frontier.pop() {
            for next in self.next_categories(c) {
                if within.contains(&next) && seen.insert(next) {
                    frontier.push(next);
                }
            }
        }
        seen
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LibraryError {
    #[error("cannot read pattern file {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("malformed pattern file: {0}")]
    Parse(String),
    #[error("library contains no patterns")]
    Empty,
    #[error("duplicate pattern id `{0}`")]
    DuplicateId(String),
    #[error("note value `{note}` has invalid duration {beats}")]
    BadNoteValue { note: String, beats: f64 },
    #[error("pattern `{id}` has no events")]
    NoEvents { id: String },
    #[error("pattern `{id}` event {index}: onset {onset} is not on the beat grid")]
    OffGrid {
        id: String,
        index: usize,
        onset: f64,
    },
    #[error("pattern `{id}` event {index}: onset {found} overlaps or leaves a gap (expected {expected})")]
    NotContiguous {
        id: String,
        index: usize,
        expected: f64,
        found: f64,
    },
    #[error(
        "pattern `{id}` event {index}: double stroke parameter {name} = {value} outside (0, 1)"
    )]
    BadDouble {
        id: String,
        index: usize,
        name: &'static str,
        value: f64,
    },
    #[error("pattern `{id}` lasts {beats} beats and does not tile 4-beat window")]
    DoesNotTile { id: String, beats: f64 },
    #[error("pattern `{id}` is tagged {declared:?} but its note values make it {derived:?}")]
    EvennessMismatch {
        id: String,
        declared: Evenness,
        derived: Evenness,
    },
    #[error("pattern `{id}` is tagged {declared:?} but its note values make it {derived:?}")]
    SpeedMismatch {
        id: String,
        declared: Speed,
        derived: Option<Speed>,
    },
    #[error("transition table names unknown category: {0}")]
    UnknownCategory(String),
    #[error("category {0} has no outgoing transition to a populated category (dead end)")]
    DeadEnd(Category),
    #[error("category {to} cannot be reached from {from} (dead end)")]
    Unreachable { from: Category, to: Category },
}

/// A validated, immutable set of patterns plus their transition rules.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternLibrary {
    name: String,
    description: String,
    note_values: NoteValues,
    transitions: CompatibilityMatrix,
    patterns: Vec<Pattern>,
    index: BTreeMap<String, usize>,
}

impl PatternLibrary {
    /// Validates and assembles a library.
    pub fn new(
        name: impl Into<String>,
        description: impl Into<String>,
        note_values: NoteValues,
        transitions: CompatibilityMatrix,
        patterns: Vec<Pattern>,
    ) -> Result<Self, LibraryError> {
        if patterns.is_empty() {
            return Err(LibraryError::Empty);
        }
        let mut index = BTreeMap::new();
        for (i, p) in patterns.iter().enumerate() {
            if index.insert(p.id.clone(), i).is_some() {
                return Err(LibraryError::DuplicateId(p.id.clone()));
            }
            validate_pattern(p)?;
        }
        let populated: BTreeSet<Category> = patterns.iter().map(Pattern::category).collect();
        for &c in &populated {
            if !transitions
                .next_categories(c)
                .any(|n| populated.contains(&n))
            {
                return Err(LibraryError::DeadEnd(c));
            }
            let reach = transitions.closure_from(c, &populated);
            if let Some(&missing) = populated.difference(&reach).next() {
                return Err(LibraryError::Unreachable {
                    from: c,
                    to: missing,
                });
            }
        }
        Ok(PatternLibrary {
            name: name.into(),
            description: description.into(),
            note_values,
            transitions,
            patterns,
            index,
        })
    }

    /// The library shipped with the crate.
    pub fn bundled() -> Self {
        load_library(DEFAULT_LIBRARY_TOML).expect("bundled library is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn note_values(&self) -> &NoteValues {
        &self.note_values
    }

    pub fn transitions(&self) -> &CompatibilityMatrix {
        &self.transitions
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Pattern> {
        self.index.get(id).map(|&i| &self.patterns[i])
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn categories(&self) -> BTreeSet<Category> {
        self.patterns.iter().map(Pattern::category).collect()
    }

    /// Hex SHA-256 of the canonical serialization; identifies a library in
    /// event logs.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let hash = Sha256::digest(self.to_toml().as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn validate_pattern(p: &Pattern) -> Result<(), LibraryError> {
    if p.events.is_empty() {
        return Err(LibraryError::NoEvents { id: p.id.clone() });
    }
    let mut expected = Beats::ZERO;
    for (index, e) in p.events.iter().enumerate() {
        if e.onset != expected {
            return Err(LibraryError::NotContiguous {
                id: p.id.clone(),
                index,
                expected: expected.as_f64(),
                found: e.onset.as_f64(),
            });
        }
        if let StrokeKind::Double { bounce, rebound } = e.stroke {
            for (name, value) in [("bounce", bounce), ("rebound", rebound)] {
                if !(value > 0.0 && value < 1.0) {
                    return Err(LibraryError::BadDouble {
                        id: p.id.clone(),
                        index,
                        name,
                        value,
                    });
                }
            }
        }
        expected = expected + e.duration;
    }
    let len = p.length();
    if len.ticks() == 0 || len > Beats::WINDOW || !Beats::WINDOW.ticks().is_multiple_of(len.ticks())
    {
        return Err(LibraryError::DoesNotTile {
            id: p.id.clone(),
            beats: len.as_f64(),
        });
    }
    let evenness = derive_evenness(&p.events);
    if evenness != p.evenness {
        return Err(LibraryError::EvennessMismatch {
            id: p.id.clone(),
            declared: p.evenness,
            derived: evenness,
        });
    }
    let speed = derive_speed(&p.events);
    if speed != Some(p.speed) {
        return Err(LibraryError::SpeedMismatch {
            id: p.id.clone(),
            declared: p.speed,
            derived: speed,
        });
    }
    Ok(())
}

/// Builds a pattern from note kinds laid end to end. Handy for tests and
/// programmatic libraries; onsets and durations come from `values`.
pub fn pattern_from_notes(
    id: &str,
    values: &NoteValues,
    notes: &[(NoteKind, StrokeKind, bool)],
) -> Pattern {
    let mut onset = Beats::ZERO;
    let events: Vec<PatternEvent> = notes
        .iter()
        .map(|&(note, stroke, rest)| {
            let duration = values.duration(note);
            let e = PatternEvent {
                onset,
                note,
                duration,
                stroke,
                rest,
            };
            onset = onset + duration;
            e
        })
        .collect();
    Pattern {
        id: id.to_string(),
        evenness: derive_evenness(&events),
        speed: derive_speed(&events).unwrap_or(Speed::Quick),
        origin: Origin::Authored,
        events,
    }
}
