//! Deterministic simulator for a generative four-robot percussion quartet.
//!
//! Four spherical robots each live in a small square arena whose walls are
//! frame drums and tambourines. They play rhythm patterns by driving into
//! their drum, pick the next pattern under leader-follower rules, follow a
//! shared metronome with a little timing error, and respond to a small set
//! of live commands. Everything is driven by a seeded random stream, so a
//! configuration plus a list of timed commands fully determines the
//! resulting event log.
//!
//! ```
//! use percussim_core::{run, PatternLibrary, PerformanceConfig};
//!
//! let config = PerformanceConfig { seed: 7, duration: 8.0, ..Default::default() };
//! let log = run(&config, &PatternLibrary::bundled(), &[]).unwrap();
//! assert!(log.sounds().count() > 0);
//! ```

pub mod arena;
pub mod bridge;
pub mod command;
pub mod composer;
pub mod events;
pub mod patterns;
pub mod performance;
pub mod render;
pub mod rng;
pub mod time;
pub mod timing;

pub use arena::{
    impact_tone, Arena, Instrument, InstrumentKind, Kinematics, Mode, RobotState, Tone, Vec2,
};
pub use command::{ControlCommand, MotionBehavior, TimedCommand};
pub use composer::{candidate_set, select_next, Role, SelectionContext, SelectionError};
pub use events::{CommandEvent, LightEvent, SimEvent, SoundEvent};
pub use patterns::{
    load_library, load_library_file, Category, CompatibilityMatrix, LibraryError, Pattern,
    PatternLibrary,
};
pub use performance::{
    run, ConfigError, EventLog, LogRecord, Performance, PerformanceConfig, Record,
};
pub use render::{to_audio, to_midi, SampleBank, ToneMap};
pub use time::SimTime;
pub use timing::{schedule_window, JitterModel, MetronomeClock, StrokePlan};
