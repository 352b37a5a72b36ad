//! The live control vocabulary: one light command and six motion commands,
//! always addressed to the whole ensemble.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ControlCommand {
    /// Switch every robot's light to palette entry `index`.
    SetColor {
        index: usize,
    },
    Spin,
    Circle,
    SwitchInstrument,
    Recenter,
    Stop,
    Restart,
}

/// Motion behaviors a single robot can be asked to perform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionBehavior {
    Spin,
    Circle,
    Recenter,
    SwitchInstrument,
    Stop,
    Restart,
}

impl ControlCommand {
    pub const ALL_KINDS: [&'static str; 7] = [
        "set_color",
        "spin",
        "circle",
        "switch_instrument",
        "recenter",
        "stop",
        "restart",
    ];

    pub fn behavior(&self) -> Option<MotionBehavior> {
        Some(match self {
            ControlCommand::SetColor { .. } => return None,
            ControlCommand::Spin => MotionBehavior::Spin,
            ControlCommand::Circle => MotionBehavior::Circle,
            ControlCommand::SwitchInstrument => MotionBehavior::SwitchInstrument,
            ControlCommand::Recenter => MotionBehavior::Recenter,
            ControlCommand::Stop => MotionBehavior::Stop,
            ControlCommand::Restart => MotionBehavior::Restart,
        })
    }
}

impl fmt::Display for ControlCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ControlCommand::SetColor { index } => write!(f, "set_color({index})"),
            other => {
                let b = other.behavior().expect("motion command");
                write!(f, "{}", serde_json::to_value(b).unwrap().as_str().unwrap())
            }
        }
    }
}

/// A command stamped with the simulation time it was submitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimedCommand {
    pub at: SimTime,
    pub command: ControlCommand,
}

impl TimedCommand {
    pub fn new(at_secs: f64, command: ControlCommand) -> Self {
        TimedCommand {
            at: SimTime::from_secs_f64(at_secs),
            command,
        }
    }
}
