//! Rendering an event log to a MIDI file or a mixed WAV file.

mod audio;
mod midi;

use serde::{Deserialize, Serialize};

pub use audio::{to_audio, AudioBuffer, SampleBank, SAMPLE_RATE};
pub use midi::{PERCUSSION_CHANNEL, PPQ};

use crate::arena::Tone;
use crate::events::SoundEvent;
use crate::performance::{EventLog, Record};
use midi::Message;

/// Length of each rendered note, in ticks.
pub const NOTE_TICKS: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToneEntry {
    pub key: u8,
    #[serde(default = "unit")]
    pub velocity_scale: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToneMap {
    pub bass: ToneEntry,
    pub slap: ToneEntry,
    pub jingle: ToneEntry,
    /// Extra velocity factor for accidental hits.
    pub accidental_scale: f64,
}

impl Default for ToneMap {
    fn default() -> Self {
        ToneMap {
            bass: ToneEntry {
                key: 41,
                velocity_scale: 1.0,
            },
            slap: ToneEntry {
                key: 38,
                velocity_scale: 1.0,
            },
            jingle: ToneEntry {
                key: 54,
                velocity_scale: 1.0,
            },
            accidental_scale: 0.5,
        }
    }
}

impl ToneMap {
    pub fn from_toml(text: &str) -> Result<Self, RenderError> {
        let map: ToneMap = toml::from_str(text).map_err(|e| RenderError::ToneMap(e.to_string()))?;
        map.validate()?;
        Ok(map)
    }

    pub fn validate(&self) -> Result<(), RenderError> {
        for tone in Tone::ALL {
            let e = self.entry(tone);
            if e.key > 127 {
                return Err(RenderError::ToneMap(format!(
                    "{} key {} is not a MIDI key",
                    tone.name(),
                    e.key
                )));
            }
            if !(e.velocity_scale > 0.0 && e.velocity_scale <= 1.0) {
                return Err(RenderError::ToneMap(format!(
                    "{} velocity_scale must lie in (0, 1]",
                    tone.name()
                )));
            }
        }
        if !(self.accidental_scale > 0.0 && self.accidental_scale <= 1.0) {
            return Err(RenderError::ToneMap(
                "accidental_scale must lie in (0, 1]".into(),
            ));
        }
        Ok(())
    }

    pub fn entry(&self, tone: Tone) -> ToneEntry {
        match tone {
            Tone::Bass => self.bass,
            Tone::Slap => self.slap,
            Tone::Jingle => self.jingle,
        }
    }

    /// MIDI key and velocity for one sound.
    pub fn note(&self, s: &SoundEvent) -> (u8, u8) {
        let e = self.entry(s.tone);
        let scale = if s.purposeful {
            1.0
        } else {
            self.accidental_scale
        };
        let v = (s.intensity * e.velocity_scale * scale * 127.0).round();
        (e.key, v.clamp(1.0, 127.0) as u8)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("record seq {seq}: {reason}")]
    BadRecord { seq: u64, reason: String },
    #[error("no sample for tone `{0}`")]
    MissingSample(&'static str),
    #[error("sample for tone `{tone}`: {reason}")]
    BadSample { tone: &'static str, reason: String },
    #[error("tone map: {0}")]
    ToneMap(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Tempo recorded in the log's opening record, or 60 BPM.
pub fn log_bpm(log: &EventLog) -> f64 {
    log.start_config()
        .and_then(|c| c.get("bpm"))
        .and_then(|v| v.as_f64())
        .filter(|b| b.is_finite() && *b > 0.0)
        .unwrap_or(60.0)
}

/// Sound records of `log`, checked for sane values.
pub(crate) fn checked_sounds(log: &EventLog) -> Result<Vec<&SoundEvent>, RenderError> {
    let mut out = Vec::new();
    for r in &log.records {
        if let Record::Sound(s) = &r.record {
            let bad = |reason: &str| RenderError::BadRecord {
                seq: r.seq,
                reason: reason.to_string(),
            };
            if s.time < crate::time::SimTime::ZERO {
                return Err(bad("negative time"));
            }
            if !(s.intensity > 0.0 && s.intensity <= 1.0) {
                return Err(bad("intensity outside (0, 1]"));
            }
            out.push(s);
        }
    }
    Ok(out)
}

/// Renders every sound in `log` as a note on the percussion channel of a
/// format-0 file at 480 ticks per beat.
pub fn to_midi(log: &EventLog, map: &ToneMap) -> Result<Vec<u8>, RenderError> {
    let bpm = log_bpm(log);
    let ticks_per_second = bpm / 60.0 * f64::from(PPQ);
    let mut events = Vec::new();
    for s in checked_sounds(log)? {
        let tick = (s.time.as_secs_f64() * ticks_per_second).round();
        if tick > f64::from(u32::MAX - NOTE_TICKS) {
            return Err(RenderError::BadRecord {
                seq: 0,
                reason: "sound too late for a MIDI file".into(),
            });
        }
        let tick = tick as u32;
        let (key, velocity) = map.note(s);
        events.push((tick, Message::NoteOn { key, velocity }));
        events.push((tick + NOTE_TICKS, Message::NoteOff { key }));
    }
    let mpq = (60_000_000.0 / bpm).round() as u32;
    Ok(midi::write_smf(mpq, events))
}
