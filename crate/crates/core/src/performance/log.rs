//! The event log: one JSON record per line, each carrying a sequence
//! number, a simulation timestamp in seconds, a kind and a payload.
//!
//! ```text
//! {"seq":7,"t":1.0,"kind":"sound","payload":{...}}
//! ```
//!
//! Command scripts use the same line shape restricted to `command`
//! records; `seq` may be omitted.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::command::{ControlCommand, TimedCommand};
use crate::events::{CommandEvent, LightEvent, SimEvent, SoundEvent};
use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Record {
    Sound(SoundEvent),
    Light(LightEvent),
    Command(CommandEvent),
    Sim(SimEvent),
}

impl Record {
    pub fn kind(&self) -> &'static str {
        match self {
            Record::Sound(_) => "sound",
            Record::Light(_) => "light",
            Record::Command(_) => "command",
            Record::Sim(_) => "sim",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub seq: u64,
    pub t: SimTime,
    #[serde(flatten)]
    pub record: Record,
}

impl LogRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("log records always serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogError {
    #[error("line {line}{}: {reason}", seq_suffix(*.seq))]
    Malformed {
        line: usize,
        seq: Option<u64>,
        reason: String,
    },
    #[error("record seq {seq}: sequence numbers must strictly increase")]
    SeqOrder { seq: u64 },
    #[error("record seq {seq}: timestamps must not decrease")]
    TimeOrder { seq: u64 },
}

fn seq_suffix(seq: Option<u64>) -> String {
    seq.map(|s| format!(" (record seq {s})"))
        .unwrap_or_default()
}

impl LogError {
    pub fn seq(&self) -> Option<u64> {
        match self {
            LogError::Malformed { seq, .. } => *seq,
            LogError::SeqOrder { seq } | LogError::TimeOrder { seq } => Some(*seq),
        }
    }
}

/// Best-effort recovery of the `seq` field from a line that failed to parse.
fn salvage_seq(line: &str) -> Option<u64> {
    let v: serde_json::Value = serde_json::from_str(line).ok()?;
    v.get("seq")?.as_u64()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    pub records: Vec<LogRecord>,
}

impl EventLog {
    pub fn to_ndjson(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            s.push_str(&r.to_json());
            s.push('\n');
        }
        s
    }

    pub fn write_ndjson<W: Write>(&self, mut w: W) -> io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        w.flush()
    }

    /// Parses and checks a log: every line must be a record, sequence
    /// numbers strictly increase and timestamps never decrease.
    pub fn parse_ndjson(text: &str) -> Result<EventLog, LogError> {
        let mut records: Vec<LogRecord> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec: LogRecord = serde_json::from_str(line).map_err(|e| LogError::Malformed {
                line: i + 1,
                seq: salvage_seq(line),
                reason: e.to_string(),
            })?;
            if let Some(prev) = records.last() {
                if rec.seq <= prev.seq {
                    return Err(LogError::SeqOrder { seq: rec.seq });
                }
                if rec.t < prev.t {
                    return Err(LogError::TimeOrder { seq: rec.seq });
                }
            }
            records.push(rec);
        }
        Ok(EventLog { records })
    }

    pub fn sounds(&self) -> impl Iterator<Item = (SimTime, &SoundEvent)> {
        self.records.iter().filter_map(|r| match &r.record {
            Record::Sound(s) => Some((r.t, s)),
            _ => None,
        })
    }

    pub fn lights(&self) -> impl Iterator<Item = (SimTime, &LightEvent)> {
        self.records.iter().filter_map(|r| match &r.record {
            Record::Light(l) => Some((r.t, l)),
            _ => None,
        })
    }

    pub fn sim_events(&self) -> impl Iterator<Item = (SimTime, &SimEvent)> {
        self.records.iter().filter_map(|r| match &r.record {
            Record::Sim(e) => Some((r.t, e)),
            _ => None,
        })
    }

    pub fn command_events(&self) -> impl Iterator<Item = (SimTime, &CommandEvent)> {
        self.records.iter().filter_map(|r| match &r.record {
            Record::Command(c) => Some((r.t, c)),
            _ => None,
        })
    }

    /// The configuration recorded in the opening record, if any.
    pub fn start_config(&self) -> Option<&serde_json::Value> {
        self.sim_events().find_map(|(_, e)| match e {
            SimEvent::Start { config, .. } => Some(config),
            _ => None,
        })
    }

    /// Commands in submission order, stamped with their submission time.
    pub fn commands(&self) -> Vec<TimedCommand> {
        self.command_events()
            .map(|(t, c)| TimedCommand {
                at: c.submitted.unwrap_or(t),
                command: c.command,
            })
            .collect()
    }
}

#[derive(Deserialize)]
struct ScriptLine {
    t: SimTime,
    kind: String,
    #[serde(default)]
    payload: serde_json::Value,
}

/// Reads a command script. Lines of other kinds are ignored, so a slice of
/// an event log is itself a valid script.
pub fn parse_command_script(text: &str) -> Result<Vec<TimedCommand>, LogError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let malformed = |reason: String| LogError::Malformed {
            line: i + 1,
            seq: salvage_seq(line),
            reason,
        };
        let sl: ScriptLine = serde_json::from_str(trimmed).map_err(|e| malformed(e.to_string()))?;
        if sl.kind != "command" {
            continue;
        }
        let ev: CommandEvent =
            serde_json::from_value(sl.payload).map_err(|e| malformed(e.to_string()))?;
        out.push(TimedCommand {
            at: ev.submitted.unwrap_or(sl.t),
            command: ev.command,
        });
    }
    Ok(out)
}

/// Serializes commands in the script format.
pub fn command_script(commands: &[TimedCommand]) -> String {
    #[derive(Serialize)]
    struct Payload {
        command: ControlCommand,
    }
    #[derive(Serialize)]
    struct Line {
        t: SimTime,
        kind: &'static str,
        payload: Payload,
    }
    let mut s = String::new();
    for c in commands {
        let line = Line {
            t: c.at,
            kind: "command",
            payload: Payload { command: c.command },
        };
        s.push_str(&serde_json::to_string(&line).expect("commands always serialize"));
        s.push('\n');
    }
    s
}
