//! The quartet: one clock, four robots in four arenas, the composer, the
//! lights and the command queue, stepped together at a fixed rate.
//!
//! Within a step at time `t` the order is fixed: robots advance over
//! `(t - dt, t]` in id order, lights tick on whole seconds, queued commands
//! due by `t` are applied, selections and window records are made, and
//! finally the fail-safe is checked. The step's records are then sorted by
//! timestamp (stably) and numbered.

mod lights;
mod log;

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

pub use lights::{normalize_hue, LightConfig, LightState};
pub use log::{command_script, parse_command_script, EventLog, LogError, LogRecord, Record};

use crate::arena::{Arena, Kinematics, Mode, RobotEnv, RobotState, Vec2};
use crate::command::{ControlCommand, TimedCommand};
use crate::composer::{candidate_set, select_next, Role, SelectionContext};
use crate::events::{CommandEvent, PlannedStroke, SimEvent, Target};
use crate::patterns::{Beats, PatternLibrary};
use crate::rng::{robot_stream, SimRng};
use crate::time::SimTime;
use crate::timing::{schedule_window, JitterModel, MetronomeClock};

pub const ROBOTS: usize = 4;
/// Beats of silence after which a performing robot turns around.
pub const FAILSAFE_BEATS: u32 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerformanceConfig {
    pub seed: u64,
    pub bpm: f64,
    /// Seconds of simulated time.
    pub duration: f64,
    /// Integration step, seconds.
    pub dt: f64,
    pub jitter: JitterModel,
    pub kinematics: Kinematics,
    /// Base hue of each robot, degrees.
    pub colors: [f64; ROBOTS],
    /// Hues selectable with the set-color command, degrees.
    pub palette: Vec<f64>,
    pub lights: LightConfig,
    /// Placement of each arena in room coordinates, inches.
    pub arenas: [Vec2; ROBOTS],
    pub leader: usize,
    /// How long before a window starts its patterns are chosen, in beats.
    pub selection_lead_beats: f64,
    /// Robots whose strokes are all dropped.
    pub suppressed: Vec<usize>,
}

impl Default for PerformanceConfig {
    fn default() -> Self {
        PerformanceConfig {
            seed: 0,
            bpm: 60.0,
            duration: 60.0,
            dt: 0.001,
            jitter: JitterModel::default(),
            kinematics: Kinematics::default(),
            colors: [0.0, 90.0, 180.0, 270.0],
            palette: (0..8).map(|i| f64::from(i) * 45.0).collect(),
            lights: LightConfig::default(),
            arenas: [
                Vec2::new(0.0, 14.0),
                Vec2::new(14.0, 14.0),
                Vec2::new(0.0, 0.0),
                Vec2::new(14.0, 0.0),
            ],
            leader: 0,
            selection_lead_beats: 1.0,
            suppressed: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(pub String);

impl PerformanceConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: &str| Err(ConfigError(m.to_string()));
        if !(self.bpm.is_finite() && self.bpm > 0.0 && self.bpm <= 600.0) {
            return fail("bpm must lie in (0, 600]");
        }
        if !(self.duration.is_finite() && (0.0..=86_400.0).contains(&self.duration)) {
            return fail("duration must lie in [0, 86400] seconds");
        }
        let dt = self.dt_time();
        if !(self.dt.is_finite() && dt > SimTime::ZERO && dt <= crate::arena::MAX_STEP) {
            return fail("dt must lie in (0, 0.01] seconds");
        }
        let j = &self.jitter;
        if !(j.per_stroke_sigma.is_finite() && j.per_stroke_sigma >= 0.0) {
            return fail("jitter.per_stroke_sigma must be non-negative");
        }
        if !j.drift_per_stroke.is_finite() {
            return fail("jitter.drift_per_stroke must be finite");
        }
        if !(0.0..=1.0).contains(&j.early_power_cut_prob) {
            return fail("jitter.early_power_cut_prob must lie in [0, 1]");
        }
        self.kinematics
            .validate(crate::arena::ARENA_SIDE)
            .map_err(|m| ConfigError(format!("kinematics: {m}")))?;
        self.lights.validate().map_err(ConfigError)?;
        let hues: Vec<f64> = self.colors.iter().map(|&h| normalize_hue(h)).collect();
        if self.colors.iter().any(|h| !h.is_finite()) {
            return fail("colors must be finite");
        }
        for i in 0..ROBOTS {
            for k in i + 1..ROBOTS {
                if hues[i] == hues[k] {
                    return Err(ConfigError(format!(
                        "robots {i} and {k} share color {}",
                        hues[i]
                    )));
                }
            }
        }
        if self.palette.is_empty() || self.palette.iter().any(|h| !h.is_finite()) {
            return fail("palette must hold at least one finite hue");
        }
        if self.leader >= ROBOTS {
            return fail("leader must be a robot id in 0..4");
        }
        if self.suppressed.iter().any(|&r| r >= ROBOTS) {
            return fail("suppressed robots must be ids in 0..4");
        }
        if !(self.selection_lead_beats.is_finite()
            && (0.0..f64::from(crate::patterns::WINDOW_BEATS)).contains(&self.selection_lead_beats))
        {
            return fail("selection_lead_beats must lie in [0, 4)");
        }
        Ok(())
    }

    pub fn dt_time(&self) -> SimTime {
        SimTime::from_secs_f64(self.dt)
    }

    pub fn clock(&self) -> MetronomeClock {
        MetronomeClock::new(self.bpm)
    }

    /// A configuration with every source of randomness in timing and
    /// aiming switched off.
    pub fn exact(seed: u64, duration: f64) -> Self {
        PerformanceConfig {
            seed,
            duration,
            jitter: JitterModel::none(),
            kinematics: Kinematics {
                heading_sigma_deg: 0.0,
                ..Kinematics::default()
            },
            ..PerformanceConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotSnapshot {
    pub id: usize,
    pub role: Role,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub speed: f64,
    pub mode: Mode,
    pub phase: String,
    pub primary_wall: usize,
    pub hue: f64,
    pub base: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    pub arena: Vec2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: SimTime,
    pub bpm: f64,
    pub window: u64,
    /// Position within the current window, in [0, 1).
    pub window_phase: f64,
    pub robots: Vec<RobotSnapshot>,
}

fn robot_env<'a>(arena: &'a Arena, cfg: &'a PerformanceConfig) -> RobotEnv<'a> {
    RobotEnv {
        arena,
        kin: &cfg.kinematics,
        early_power_cut_prob: cfg.jitter.early_power_cut_prob,
    }
}

/// A steppable performance. Each call to [`Performance::step`] returns the
/// records produced by that step; the first call covers time zero.
#[derive(Debug, Clone)]
pub struct Performance {
    config: PerformanceConfig,
    library: PatternLibrary,
    clock: MetronomeClock,
    arenas: Vec<Arena>,
    robots: Vec<RobotState>,
    rngs: Vec<SimRng>,
    lights: Vec<LightState>,
    own_previous: Vec<Option<String>>,
    /// Pattern per window, `None` for a rest window.
    assigned: Vec<BTreeMap<u64, Option<String>>>,
    next_selection: Vec<u64>,
    rest_pending: Vec<Option<u64>>,
    next_window_record: u64,
    next_light_tick: u64,
    queue: VecDeque<TimedCommand>,
    now: SimTime,
    dt: SimTime,
    end: SimTime,
    steps: u64,
    seq: u64,
    started: bool,
    finished: bool,
}

impl Performance {
    pub fn new(config: PerformanceConfig, library: PatternLibrary) -> Result<Self, ConfigError> {
        config.validate()?;
        if library.is_empty() {
            return Err(ConfigError("pattern library is empty".into()));
        }
        let arenas: Vec<Arena> = config.arenas.iter().map(|&p| Arena::standard(p)).collect();
        let robots = (0..ROBOTS)
            .map(|id| {
                let role = if id == config.leader {
                    Role::Leader
                } else {
                    Role::Follower
                };
                let mut r = RobotState::new(id, role, &arenas[id]);
                r.suppressed = config.suppressed.contains(&id);
                r
            })
            .collect();
        Ok(Performance {
            clock: config.clock(),
            rngs: (0..ROBOTS)
                .map(|id| robot_stream(config.seed, id))
                .collect(),
            lights: (0..ROBOTS)
                .map(|id| LightState::new(id, config.colors[id]))
                .collect(),
            own_previous: vec![None; ROBOTS],
            assigned: vec![BTreeMap::new(); ROBOTS],
            next_selection: vec![0; ROBOTS],
            rest_pending: vec![None; ROBOTS],
            next_window_record: 0,
            next_light_tick: 1,
            queue: VecDeque::new(),
            now: SimTime::ZERO,
            dt: config.dt_time(),
            end: SimTime::from_secs_f64(config.duration),
            steps: 0,
            seq: 0,
            started: false,
            finished: false,
            arenas,
            robots,
            config,
            library,
        })
    }

    pub fn config(&self) -> &PerformanceConfig {
        &self.config
    }

    pub fn library(&self) -> &PatternLibrary {
        &self.library
    }

    pub fn clock(&self) -> &MetronomeClock {
        &self.clock
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn dt(&self) -> SimTime {
        self.dt
    }

    pub fn robots(&self) -> &[RobotState] {
        &self.robots
    }

    pub fn lights(&self) -> &[LightState] {
        &self.lights
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    /// Queues a command; it is applied at the first step at or after its
    /// timestamp, after every command queued before it.
    pub fn submit(&mut self, command: TimedCommand) {
        self.queue.push_back(command);
    }

    /// Queues a command for the next step.
    pub fn submit_now(&mut self, command: ControlCommand) {
        self.submit(TimedCommand {
            at: self.now,
            command,
        });
    }

    pub fn snapshot(&self) -> Snapshot {
        let window = self.clock.window_index(self.now);
        let start = self.clock.window_start(window);
        let len = self.clock.window();
        Snapshot {
            t: self.now,
            bpm: self.config.bpm,
            window,
            window_phase: ((self.now - start).as_secs_f64() / len.as_secs_f64()).clamp(0.0, 1.0),
            robots: self
                .robots
                .iter()
                .map(|r| RobotSnapshot {
                    id: r.id,
                    role: r.role,
                    x: r.position.x,
                    y: r.position.y,
                    heading: r.heading,
                    speed: r.speed,
                    mode: r.mode,
                    phase: r.phase().to_string(),
                    primary_wall: r.primary_wall,
                    hue: self.lights[r.id].hue,
                    base: self.lights[r.id].base,
                    pattern: self.assigned[r.id].get(&window).cloned().flatten(),
                    arena: self.arenas[r.id].position,
                })
                .collect(),
        }
    }

    /// Runs one step and returns its records.
    pub fn step(&mut self) -> Vec<LogRecord> {
        let mut batch: Vec<(SimTime, Record)> = Vec::new();
        if self.finished {
            return Vec::new();
        }
        if !self.started {
            self.started = true;
            batch.push((
                SimTime::ZERO,
                Record::Sim(SimEvent::Start {
                    config: serde_json::to_value(&self.config).expect("config serializes"),
                    library: self.library.name().to_string(),
                    library_digest: self.library.digest(),
                    patterns: self.library.len(),
                }),
            ));
            self.apply_commands(&mut batch);
            self.schedule(&mut batch);
        } else {
            let t = (self.now + self.dt).min(self.end);
            self.steps += 1;
            self.advance_robots(t, &mut batch);
            self.tick_lights(t, &mut batch);
            self.now = t;
            self.apply_commands(&mut batch);
            self.schedule(&mut batch);
            self.failsafe(&mut batch);
        }
        if self.now >= self.end {
            self.finished = true;
            batch.push((self.now, Record::Sim(SimEvent::End { steps: self.steps })));
        }
        batch.sort_by_key(|(t, _)| *t);
        batch
            .into_iter()
            .map(|(t, record)| {
                let seq = self.seq;
                self.seq += 1;
                LogRecord { seq, t, record }
            })
            .collect()
    }

    fn advance_robots(&mut self, t: SimTime, batch: &mut Vec<(SimTime, Record)>) {
        for (i, robot) in self.robots.iter_mut().enumerate() {
            let env = robot_env(&self.arenas[i], &self.config);
            let out = robot.advance_to(&env, t, &mut self.rngs[i]);
            let mut recs: Vec<(SimTime, Record)> = out
                .sounds
                .into_iter()
                .map(|s| (s.time, Record::Sound(s)))
                .chain(out.events.into_iter().map(|(t, e)| (t, Record::Sim(e))))
                .collect();
            recs.sort_by_key(|(t, _)| *t);
            batch.extend(recs);
        }
    }

    fn tick_lights(&mut self, t: SimTime, batch: &mut Vec<(SimTime, Record)>) {
        let last = self.config.duration.floor() as u64;
        while self.next_light_tick <= last {
            let at = SimTime::from_millis(self.next_light_tick as i64 * 1000);
            if at > t {
                break;
            }
            for light in &mut self.lights {
                batch.push((at, Record::Light(light.tick(&self.config.lights, at))));
            }
            self.next_light_tick += 1;
        }
    }

    fn apply_commands(&mut self, batch: &mut Vec<(SimTime, Record)>) {
        while self.queue.front().is_some_and(|c| c.at <= self.now) {
            let c = self.queue.pop_front().expect("front exists");
            self.apply_command(c, batch);
        }
    }

    fn apply_command(&mut self, tc: TimedCommand, batch: &mut Vec<(SimTime, Record)>) {
        let now = self.now;
        let submitted = (tc.at != now).then_some(tc.at);
        let event = |accepted: bool, reason: Option<String>| {
            Record::Command(CommandEvent {
                command: tc.command,
                target: Target::All,
                accepted,
                reason,
                submitted,
            })
        };
        let Some(behavior) = tc.command.behavior() else {
            let ControlCommand::SetColor { index } = tc.command else {
                unreachable!("only set_color lacks a motion behavior")
            };
            match self.config.palette.get(index).copied() {
                Some(hue) => {
                    batch.push((now, event(true, None)));
                    for light in &mut self.lights {
                        batch.push((now, Record::Light(light.set_base(hue, now))));
                    }
                }
                None => batch.push((
                    now,
                    event(
                        false,
                        Some(format!(
                            "palette index {index} out of range (palette has {} colors)",
                            self.config.palette.len()
                        )),
                    ),
                )),
            }
            return;
        };

        let window = self.clock.window();
        let current = self.clock.window_index(now);
        let next_boundary = self.clock.window_start(current + 1);
        let mut results = Vec::with_capacity(ROBOTS);
        for (i, robot) in self.robots.iter_mut().enumerate() {
            let env = robot_env(&self.arenas[i], &self.config);
            results.push(robot.apply_behavior(&env, behavior, window, next_boundary));
        }
        let accepted = results.iter().any(Result::is_ok);
        let reason = (!accepted)
            .then(|| results.iter().find_map(|r| r.clone().err()))
            .flatten();
        batch.push((now, event(accepted, reason)));
        for (i, result) in results.into_iter().enumerate() {
            match result {
                Ok(events) => {
                    if self.robots[i].pending.is_empty() {
                        self.assigned[i].retain(|&w, _| w <= current);
                    }
                    batch.extend(events.into_iter().map(|(t, e)| (t, Record::Sim(e))));
                }
                Err(reason) => batch.push((
                    now,
                    Record::Sim(SimEvent::Rejected {
                        robot: i,
                        command: tc.command,
                        reason,
                    }),
                )),
            }
        }
    }

    fn selection_order(&self) -> impl Iterator<Item = usize> {
        let leader = self.config.leader;
        std::iter::once(leader).chain((0..ROBOTS).filter(move |&r| r != leader))
    }

    fn schedule(&mut self, batch: &mut Vec<(SimTime, Record)>) {
        let lead =
            SimTime::from_secs_f64(self.config.selection_lead_beats * self.clock.beat_seconds());
        loop {
            let w = *self.next_selection.iter().min().expect("four robots");
            let start = self.clock.window_start(w);
            if start >= self.end || self.now < start - lead {
                break;
            }
            let mut progressed = false;
            let order: Vec<usize> = self.selection_order().collect();
            for r in order {
                if self.next_selection[r] == w && self.select(r, w, batch) {
                    self.next_selection[r] = w + 1;
                    progressed = true;
                }
            }
            if !progressed {
                break;
            }
        }

        loop {
            let w = self.next_window_record;
            let start = self.clock.window_start(w);
            if start >= self.end || start > self.now {
                break;
            }
            for r in 0..ROBOTS {
                let slot = self.assigned[r].get(&w);
                batch.push((
                    start,
                    Record::Sim(SimEvent::Window {
                        robot: r,
                        window: w,
                        start,
                        pattern: slot.cloned().flatten(),
                        rest: slot.is_some_and(Option::is_none),
                    }),
                ));
                self.assigned[r].retain(|&k, _| k + 2 >= w);
            }
            self.next_window_record += 1;
        }
    }

    /// Chooses robot `r`'s pattern for window `w`. Returns false when the
    /// choice has to wait (the robot may still resume before `w` starts).
    fn select(&mut self, r: usize, w: u64, batch: &mut Vec<(SimTime, Record)>) -> bool {
        let start = self.clock.window_start(w);
        if self.rest_pending[r] == Some(w) {
            self.rest_pending[r] = None;
            self.assigned[r].insert(w, None);
            return true;
        }
        if !self.robots[r].performing_at(start) {
            return self.now >= start;
        }
        let role = self.robots[r].role;
        let leader = self.config.leader;
        let leader_pattern = match role {
            Role::Leader => None,
            Role::Follower => self.assigned[leader]
                .get(&w)
                .cloned()
                .flatten()
                .or_else(|| self.own_previous[leader].clone()),
        };
        let previous = self.own_previous[r].clone();
        let ctx = match &leader_pattern {
            Some(l) => SelectionContext::follower(previous.as_deref(), l),
            None => SelectionContext::leader(previous.as_deref()),
        };
        let candidates = candidate_set(&self.library, &ctx)
            .expect("validated library always has candidates")
            .len();
        let pattern = select_next(&self.library, &ctx, &mut self.rngs[r])
            .expect("validated library always has candidates");
        let plans = schedule_window(
            pattern,
            &self.clock,
            &self.config.jitter,
            r,
            w,
            &mut self.rngs[r],
        );
        let strokes = plans
            .iter()
            .map(|p| PlannedStroke {
                event_index: p.event_index,
                nominal: p.nominal,
                scheduled: p.scheduled,
                stroke: p.stroke.name().to_string(),
            })
            .collect();
        let id = pattern.id.clone();
        let env = robot_env(&self.arenas[r], &self.config);
        self.robots[r].assign_plans(&env, plans);
        batch.push((
            self.now,
            Record::Sim(SimEvent::Selection {
                robot: r,
                role,
                window: w,
                window_start: start,
                pattern: id.clone(),
                previous,
                leader: leader_pattern,
                candidates,
                strokes,
            }),
        ));
        self.own_previous[r] = Some(id.clone());
        self.assigned[r].insert(w, Some(id));
        true
    }

    fn failsafe(&mut self, batch: &mut Vec<(SimTime, Record)>) {
        let threshold = self.clock.beats_to_time(Beats::whole(FAILSAFE_BEATS));
        let current = self.clock.window_index(self.now);
        for r in 0..ROBOTS {
            let env = robot_env(&self.arenas[r], &self.config);
            if let Some(ev) = self.robots[r].failsafe_check(&env, self.now, threshold, current) {
                batch.push((self.now, Record::Sim(ev)));
                let resting = self.assigned[r].get(&current).is_some_and(Option::is_none);
                if self.rest_pending[r].is_none() && !resting {
                    self.rest_pending[r] = Some(self.next_selection[r]);
                }
            }
        }
    }
}

/// Runs a whole performance offline.
pub fn run(
    config: &PerformanceConfig,
    library: &PatternLibrary,
    commands: &[TimedCommand],
) -> Result<EventLog, ConfigError> {
    let mut perf = Performance::new(config.clone(), library.clone())?;
    let mut commands = commands.to_vec();
    commands.sort_by_key(|c| c.at);
    for c in commands {
        perf.submit(c);
    }
    let mut log = EventLog::default();
    while !perf.is_finished() {
        log.records.extend(perf.step());
    }
    Ok(log)
}
