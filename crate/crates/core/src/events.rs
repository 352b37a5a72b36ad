//! Records emitted by the simulation. These are the payloads of the event
//! log and of the live bridge.

use serde::{Deserialize, Serialize};

use crate::arena::{InstrumentKind, Mode, Tone};
use crate::command::ControlCommand;
use crate::composer::Role;
use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoundEvent {
    pub time: SimTime,
    pub robot: usize,
    pub wall: usize,
    pub instrument: InstrumentKind,
    pub tone: Tone,
    pub intensity: f64,
    pub purposeful: bool,
    /// 1 for the first hit of a stroke, 2 for the rebound hit of a double.
    pub stroke_index: u8,
    /// Distance of the impact from the wall midpoint, inches.
    pub offset: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_index: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LightCause {
    Tick,
    SetColor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightEvent {
    pub robot: usize,
    pub hue: f64,
    pub base: f64,
    pub cause: LightCause,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandEvent {
    pub command: ControlCommand,
    #[serde(default)]
    pub target: Target,
    #[serde(default = "default_accepted")]
    pub accepted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// When the command was submitted, if different from when it was applied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub submitted: Option<SimTime>,
}

fn default_accepted() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    #[default]
    All,
}

/// One planned stroke as recorded at selection time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedStroke {
    pub event_index: u32,
    pub nominal: SimTime,
    pub scheduled: SimTime,
    pub stroke: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum SimEvent {
    Start {
        config: serde_json::Value,
        library: String,
        library_digest: String,
        patterns: usize,
    },
    Selection {
        robot: usize,
        role: Role,
        window: u64,
        window_start: SimTime,
        pattern: String,
        previous: Option<String>,
        leader: Option<String>,
        candidates: usize,
        strokes: Vec<PlannedStroke>,
    },
    Window {
        robot: usize,
        window: u64,
        start: SimTime,
        pattern: Option<String>,
        rest: bool,
    },
    StrokeSkipped {
        robot: usize,
        window: u64,
        event_index: u32,
        reason: String,
    },
    EarlyPowerCut {
        robot: usize,
        window: u64,
        event_index: u32,
    },
    TurnAround {
        robot: usize,
        silent_for: f64,
    },
    Mode {
        robot: usize,
        from: Mode,
        to: Mode,
    },
    Rejected {
        robot: usize,
        command: ControlCommand,
        reason: String,
    },
    End {
        steps: u64,
    },
}

impl SimEvent {
    pub fn robot(&self) -> Option<usize> {
        match self {
            SimEvent::Selection { robot, .. }
            | SimEvent::Window { robot, .. }
            | SimEvent::StrokeSkipped { robot, .. }
            | SimEvent::EarlyPowerCut { robot, .. }
            | SimEvent::TurnAround { robot, .. }
            | SimEvent::Mode { robot, .. }
            | SimEvent::Rejected { robot, .. } => Some(*robot),
            SimEvent::Start { .. } | SimEvent::End { .. } => None,
        }
    }
}
