//! One robot in its arena.
//!
//! Motion is piecewise analytic: the robot is always in exactly one phase
//! (holding, driving in a straight line, pressing into a drum, rebounding,
//! spinning or circling) and every phase change happens at an exact
//! microsecond. `step` walks the phase changes that fall inside the step,
//! so collision times and tones do not depend on the step length.

use std::collections::VecDeque;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{impact_tone, Arena, Kinematics, Vec2};
use crate::command::MotionBehavior;
use crate::composer::Role;
use crate::events::{SimEvent, SoundEvent};
use crate::patterns::{StrokeKind, DEFAULT_BOUNCE_FRACTION, DEFAULT_REBOUND_INTENSITY};
use crate::time::SimTime;
use crate::timing::{Aim, StrokePlan};

/// Largest step `RobotState::step` accepts.
pub const MAX_STEP: SimTime = SimTime::from_millis(10);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Performing,
    Spinning,
    Circling,
    Stopped,
    Recentering,
}

/// What a robot needs to know about its surroundings while stepping.
#[derive(Debug, Clone, Copy)]
pub struct RobotEnv<'a> {
    pub arena: &'a Arena,
    pub kin: &'a Kinematics,
    pub early_power_cut_prob: f64,
}

#[derive(Debug, Default, Clone, PartialEq)]
pub struct StepOutput {
    pub sounds: Vec<SoundEvent>,
    pub events: Vec<(SimTime, SimEvent)>,
}

impl StepOutput {
    pub fn append(&mut self, mut other: StepOutput) {
        self.sounds.append(&mut other.sounds);
        self.events.append(&mut other.events);
    }
}

#[derive(Debug, Clone, PartialEq)]
enum DriveKind {
    Approach { plan: StrokePlan, wall: usize },
    Retreat,
    Recenter,
    ToCircle,
}

#[derive(Debug, Clone, PartialEq)]
enum Motion {
    Hold {
        pos: Vec2,
    },
    Drive {
        origin: Vec2,
        dir: Vec2,
        start: SimTime,
        end: SimTime,
        length: f64,
        kind: DriveKind,
    },
    Press {
        pos: Vec2,
        until: SimTime,
    },
    /// Ballistic bounce off a wall after power was cut at impact.
    Rebound {
        contact: Vec2,
        away: Vec2,
        start: SimTime,
        end: SimTime,
        v0: f64,
        second: SoundEvent,
    },
    Spin {
        pos: Vec2,
        start: SimTime,
        heading0: f64,
    },
    Circle {
        start: SimTime,
        theta0: f64,
    },
}

#[derive(Debug, Clone, Copy)]
enum Transition {
    Resume,
    BehaviorEnd,
    MotionEnd,
    Depart,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotState {
    pub id: usize,
    pub role: Role,
    pub position: Vec2,
    pub heading: f64,
    pub speed: f64,
    pub mode: Mode,
    pub primary_wall: usize,
    /// Upcoming strokes, earliest first.
    pub pending: VecDeque<StrokePlan>,
    pub last_collision: SimTime,
    /// When a stopped robot returns to performing.
    pub resume_at: Option<SimTime>,
    /// When the current spin or circle ends.
    pub behavior_until: Option<SimTime>,
    /// Drop every stroke instead of playing it. Used to exercise the fail-safe.
    pub suppressed: bool,
    now: SimTime,
    motion: Motion,
}

fn wrap_angle(a: f64) -> f64 {
    (a + PI).rem_euclid(TAU) - PI
}

fn travel_time(dist: f64, speed: f64) -> SimTime {
    SimTime::from_secs_f64(dist / speed)
}

impl RobotState {
    /// A robot at the arena center facing its primary wall (North).
    pub fn new(id: usize, role: Role, arena: &Arena) -> Self {
        let c = arena.center();
        RobotState {
            id,
            role,
            position: c,
            heading: FRAC_PI_2,
            speed: 0.0,
            mode: Mode::Performing,
            primary_wall: super::NORTH,
            pending: VecDeque::new(),
            last_collision: SimTime::ZERO,
            resume_at: None,
            behavior_until: None,
            suppressed: false,
            now: SimTime::ZERO,
            motion: Motion::Hold { pos: c },
        }
    }

    /// Time up to which the state has been advanced.
    pub fn now(&self) -> SimTime {
        self.now
    }

    /// True while the robot is (or is about to be) playing its patterns.
    pub fn will_perform(&self) -> bool {
        self.mode == Mode::Performing || self.resume_at.is_some()
    }

    /// Whether the robot will be performing at `t`, given no further commands.
    pub fn performing_at(&self, t: SimTime) -> bool {
        match self.mode {
            Mode::Performing => true,
            Mode::Stopped => self.resume_at.is_some_and(|r| r <= t),
            Mode::Spinning | Mode::Circling => self.behavior_until.is_some_and(|u| u <= t),
            Mode::Recentering => false,
        }
    }

    /// Short label for the current motion phase.
    pub fn phase(&self) -> &'static str {
        match &self.motion {
            Motion::Hold { .. } => "hold",
            Motion::Drive { kind, .. } => match kind {
                DriveKind::Approach { .. } => "approach",
                DriveKind::Retreat => "retreat",
                DriveKind::Recenter => "recenter",
                DriveKind::ToCircle => "to_circle",
            },
            Motion::Press { .. } => "press",
            Motion::Rebound { .. } => "rebound",
            Motion::Spin { .. } => "spin",
            Motion::Circle { .. } => "circle",
        }
    }

    pub fn position_at(&self, env: &RobotEnv, t: SimTime) -> Vec2 {
        let raw = match &self.motion {
            Motion::Hold { pos } | Motion::Press { pos, .. } | Motion::Spin { pos, .. } => *pos,
            Motion::Drive {
                origin,
                dir,
                start,
                length,
                ..
            } => {
                let s = ((t - *start).as_secs_f64() * env.kin.speed).clamp(0.0, *length);
                *origin + *dir * s
            }
            Motion::Rebound {
                contact,
                away,
                start,
                end,
                v0,
                ..
            } => {
                let period = (*end - *start).as_secs_f64();
                let tau = (t - *start).as_secs_f64().clamp(0.0, period);
                let s = if period > 0.0 {
                    v0 * tau - v0 / period * tau * tau
                } else {
                    0.0
                };
                *contact + *away * s.max(0.0)
            }
            Motion::Circle { start, theta0 } => {
                let (r, omega) = circle_params(env.kin);
                let theta = theta0 + omega * (t - *start).as_secs_f64();
                env.arena.center() + Vec2::from_angle(theta) * r
            }
        };
        env.arena.contain(raw, env.kin.robot_radius)
    }

    fn heading_at(&self, env: &RobotEnv, t: SimTime) -> f64 {
        match &self.motion {
            Motion::Drive { dir, .. } => dir.angle(),
            Motion::Spin {
                start, heading0, ..
            } => wrap_angle(heading0 + TAU * env.kin.spin_rate * (t - *start).as_secs_f64()),
            Motion::Circle { start, theta0 } => {
                let (_, omega) = circle_params(env.kin);
                wrap_angle(theta0 + omega * (t - *start).as_secs_f64() + FRAC_PI_2)
            }
            _ => self.heading,
        }
    }

    fn speed_now(&self, env: &RobotEnv) -> f64 {
        match &self.motion {
            Motion::Drive { .. } | Motion::Circle { .. } => env.kin.speed,
            Motion::Rebound { start, end, v0, .. } => {
                let period = (*end - *start).as_secs_f64();
                let tau = (self.now - *start).as_secs_f64();
                if period > 0.0 {
                    (v0 - 2.0 * v0 / period * tau).abs()
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    }

    fn sync(&mut self, env: &RobotEnv) {
        self.position = self.position_at(env, self.now);
        self.heading = self.heading_at(env, self.now);
        self.speed = self.speed_now(env);
    }

    /// Robot-center position at which the planned stroke meets the drum.
    pub fn stroke_target(&self, env: &RobotEnv, plan: &StrokePlan) -> Vec2 {
        let offset = match plan.aim {
            Aim::Center => 0.0,
            Aim::Edge => env.kin.edge_aim,
        };
        env.arena
            .contact_point(self.primary_wall, env.kin.robot_radius, offset)
    }

    /// Adds newly scheduled strokes and re-plans a retreat in progress.
    pub fn assign_plans(&mut self, env: &RobotEnv, plans: Vec<StrokePlan>) {
        self.pending.extend(plans);
        self.pending.make_contiguous().sort_by_key(|p| p.scheduled);
        if let Motion::Drive {
            kind: DriveKind::Retreat,
            ..
        } = self.motion
        {
            self.start_retreat(env, self.now);
            self.sync(env);
        }
    }

    /// Advances the robot by `dt`, which must lie in (0, 10 ms].
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        env: &RobotEnv,
        dt: SimTime,
        rng: &mut R,
    ) -> StepOutput {
        assert!(
            dt > SimTime::ZERO && dt <= MAX_STEP,
            "step must lie in (0, 10 ms], got {dt}"
        );
        self.advance_to(env, self.now + dt, rng)
    }

    /// Advances the robot to time `to`, processing every phase change on
    /// the way in time order.
    pub fn advance_to<R: Rng + ?Sized>(
        &mut self,
        env: &RobotEnv,
        to: SimTime,
        rng: &mut R,
    ) -> StepOutput {
        let mut out = StepOutput::default();
        while let Some((t, tr)) = self.next_transition(env, &mut out) {
            if t > to {
                break;
            }
            self.now = self.now.max(t);
            self.fire(env, tr, rng, &mut out);
        }
        self.now = self.now.max(to);
        self.sync(env);
        out
    }

    fn next_transition(
        &mut self,
        env: &RobotEnv,
        out: &mut StepOutput,
    ) -> Option<(SimTime, Transition)> {
        let mut best: Option<(SimTime, Transition)> = None;
        let mut consider = |t: SimTime, tr: Transition| {
            if best.is_none_or(|(b, _)| t < b) {
                best = Some((t, tr));
            }
        };
        if let Some(t) = self.resume_at {
            consider(t, Transition::Resume);
        }
        if let Some(t) = self.behavior_until {
            consider(t, Transition::BehaviorEnd);
        }
        match &self.motion {
            Motion::Drive { end, .. } | Motion::Rebound { end, .. } => {
                consider(*end, Transition::MotionEnd)
            }
            Motion::Press { until, .. } => consider(*until, Transition::MotionEnd),
            Motion::Hold { pos } if self.will_perform() => {
                let pos = *pos;
                if let Some(dep) = self.next_departure(env, pos, out) {
                    consider(dep, Transition::Depart);
                }
            }
            _ => {}
        }
        best
    }

    /// Departure time of the next playable stroke, skipping the ones that
    /// can no longer be reached.
    fn next_departure(
        &mut self,
        env: &RobotEnv,
        pos: Vec2,
        out: &mut StepOutput,
    ) -> Option<SimTime> {
        let r = env.kin.robot_radius;
        while let Some(plan) = self.pending.front() {
            if env.arena.clearance(self.primary_wall, pos, r) < env.kin.min_standoff {
                let plan = self.pending.pop_front().expect("front exists");
                self.skip(&plan, "no room", out);
                self.start_retreat(env, self.now);
                if !matches!(self.motion, Motion::Hold { .. }) {
                    return None;
                }
                continue;
            }
            let target = self.stroke_target(env, plan);
            let dist = match (target - pos).normalized() {
                Some(dir) => env.arena.cast(pos, dir, r).1,
                None => 0.0,
            };
            let dep = plan.scheduled - travel_time(dist, env.kin.speed);
            if dep < self.now {
                let plan = self.pending.pop_front().expect("front exists");
                self.skip(&plan, "unreachable", out);
                continue;
            }
            return Some(dep);
        }
        None
    }

    fn skip(&self, plan: &StrokePlan, reason: &str, out: &mut StepOutput) {
        out.events.push((
            self.now,
            SimEvent::StrokeSkipped {
                robot: self.id,
                window: plan.window,
                event_index: plan.event_index,
                reason: reason.to_string(),
            },
        ));
    }

    fn set_mode(&mut self, to: Mode, events: &mut Vec<(SimTime, SimEvent)>) {
        if self.mode != to {
            events.push((
                self.now,
                SimEvent::Mode {
                    robot: self.id,
                    from: self.mode,
                    to,
                },
            ));
            self.mode = to;
        }
    }

    fn fire<R: Rng + ?Sized>(
        &mut self,
        env: &RobotEnv,
        tr: Transition,
        rng: &mut R,
        out: &mut StepOutput,
    ) {
        let t = self.now;
        match tr {
            Transition::Resume => {
                self.resume_at = None;
                self.last_collision = t;
                self.set_mode(Mode::Performing, &mut out.events);
            }
            Transition::BehaviorEnd => {
                self.heading = self.heading_at(env, t);
                let pos = self.position_at(env, t);
                self.motion = Motion::Hold { pos };
                self.behavior_until = None;
                self.last_collision = t;
                self.set_mode(Mode::Performing, &mut out.events);
            }
            Transition::Depart => self.depart(env, rng, out),
            Transition::MotionEnd => {
                let motion =
                    std::mem::replace(&mut self.motion, Motion::Hold { pos: self.position });
                match motion {
                    Motion::Drive {
                        origin,
                        dir,
                        length,
                        kind,
                        ..
                    } => {
                        let end = env
                            .arena
                            .contain(origin + dir * length, env.kin.robot_radius);
                        self.heading = dir.angle();
                        match kind {
                            DriveKind::Approach { plan, wall } => {
                                self.impact(env, &plan, wall, dir, end, rng, out)
                            }
                            DriveKind::Retreat => self.motion = Motion::Hold { pos: end },
                            DriveKind::Recenter => {
                                self.motion = Motion::Hold { pos: end };
                                self.set_mode(Mode::Stopped, &mut out.events);
                            }
                            DriveKind::ToCircle => {
                                let theta0 = (end - env.arena.center()).angle();
                                self.motion = Motion::Circle { start: t, theta0 };
                            }
                        }
                    }
                    Motion::Press { pos, .. } => {
                        self.motion = Motion::Hold { pos };
                        self.start_retreat(env, t);
                    }
                    Motion::Rebound {
                        contact, second, ..
                    } => {
                        self.motion = Motion::Hold { pos: contact };
                        self.last_collision = t;
                        out.sounds.push(second);
                        self.start_retreat(env, t);
                    }
                    other => self.motion = other,
                }
            }
        }
    }

    fn depart<R: Rng + ?Sized>(&mut self, env: &RobotEnv, rng: &mut R, out: &mut StepOutput) {
        let Some(plan) = self.pending.pop_front() else {
            return;
        };
        if self.suppressed {
            self.skip(&plan, "suppressed", out);
            return;
        }
        let pos = match self.motion {
            Motion::Hold { pos } => pos,
            _ => self.position_at(env, self.now),
        };
        let target = self.stroke_target(env, &plan);
        let nominal = (target - pos)
            .normalized()
            .unwrap_or_else(|| Arena::outward_normal(self.primary_wall));
        let z: f64 = rng.sample(StandardNormal);
        let dir = nominal.rotated(env.kin.heading_sigma_rad() * z);
        let (wall, length) = env.arena.cast(pos, dir, env.kin.robot_radius);
        self.heading = dir.angle();
        self.motion = Motion::Drive {
            origin: pos,
            dir,
            start: self.now,
            end: self.now + travel_time(length, env.kin.speed),
            length,
            kind: DriveKind::Approach { plan, wall },
        };
    }

    #[allow(clippy::too_many_arguments)]
    fn impact<R: Rng + ?Sized>(
        &mut self,
        env: &RobotEnv,
        plan: &StrokePlan,
        wall: usize,
        dir: Vec2,
        contact: Vec2,
        rng: &mut R,
        out: &mut StepOutput,
    ) {
        let t = self.now;
        let normal = Arena::outward_normal(wall);
        let intensity = dir.dot(normal).abs().clamp(env.kin.min_intensity, 1.0);
        let offset = env.arena.wall_offset(wall, contact);
        let instrument = env.arena.walls[wall];
        let first = SoundEvent {
            time: t,
            robot: self.id,
            wall,
            instrument: instrument.kind,
            tone: impact_tone(&instrument, offset, env.kin.bass_zone),
            intensity,
            purposeful: wall == self.primary_wall && self.mode == Mode::Performing,
            stroke_index: 1,
            offset,
            window: Some(plan.window),
            event_index: Some(plan.event_index),
        };
        out.sounds.push(first.clone());
        self.last_collision = t;

        let bounce = match plan.stroke {
            StrokeKind::Double { bounce, rebound } => Some((bounce, rebound)),
            StrokeKind::Single => {
                let u: f64 = rng.random();
                (u < env.early_power_cut_prob).then(|| {
                    out.events.push((
                        t,
                        SimEvent::EarlyPowerCut {
                            robot: self.id,
                            window: plan.window,
                            event_index: plan.event_index,
                        },
                    ));
                    (DEFAULT_BOUNCE_FRACTION, DEFAULT_REBOUND_INTENSITY)
                })
            }
        };
        match bounce {
            Some((bounce, rebound)) => {
                let gap = SimTime::from_secs_f64(bounce * plan.note.as_secs_f64())
                    .max(SimTime::from_micros(1));
                let end = t + gap;
                let second = SoundEvent {
                    time: end,
                    intensity: intensity * rebound,
                    stroke_index: 2,
                    ..first
                };
                self.motion = Motion::Rebound {
                    contact,
                    away: -normal,
                    start: t,
                    end,
                    v0: env.kin.restitution * env.kin.speed,
                    second,
                };
            }
            None => {
                self.motion = Motion::Press {
                    pos: contact,
                    until: t + SimTime::from_secs_f64(env.kin.press_time),
                };
            }
        }
    }

    /// Backs away toward the center, only as far as still leaves time to
    /// reach the next stroke.
    fn start_retreat(&mut self, env: &RobotEnv, t: SimTime) {
        let p = self.position_at(env, t);
        let to_center = env.arena.center() - p;
        let room = to_center.length();
        let v = env.kin.speed;
        let k = match self.pending.front() {
            Some(plan) if self.will_perform() => {
                let g = (plan.scheduled - t).as_secs_f64();
                let d = (self.stroke_target(env, plan) - p).length();
                ((g * v - d) / 2.0 - 1e-3).clamp(0.0, room)
            }
            _ => room,
        };
        self.motion = match to_center.normalized() {
            Some(dir) if k > 1e-9 => Motion::Drive {
                origin: p,
                dir,
                start: t,
                end: t + travel_time(k, v),
                length: k,
                kind: DriveKind::Retreat,
            },
            _ => Motion::Hold { pos: p },
        };
    }

    /// Turns a silent performing robot around once no collision has
    /// happened for longer than `threshold`. Strokes left in windows up to
    /// `current_window` are abandoned.
    pub fn failsafe_check(
        &mut self,
        env: &RobotEnv,
        now: SimTime,
        threshold: SimTime,
        current_window: u64,
    ) -> Option<SimEvent> {
        if self.mode != Mode::Performing {
            return None;
        }
        let gap = now - self.last_collision;
        if gap <= threshold {
            return None;
        }
        let pos = self.position_at(env, now);
        self.heading = wrap_angle(self.heading_at(env, now) + PI);
        self.motion = Motion::Hold { pos };
        self.pending.retain(|p| p.window > current_window);
        self.last_collision = now;
        self.sync(env);
        Some(SimEvent::TurnAround {
            robot: self.id,
            silent_for: gap.as_secs_f64(),
        })
    }

    /// Applies a motion behavior at the current time. `window` is one
    /// window's duration and `next_boundary` the first window boundary
    /// after now. Illegal transitions return the reason.
    pub fn apply_behavior(
        &mut self,
        env: &RobotEnv,
        behavior: MotionBehavior,
        window: SimTime,
        next_boundary: SimTime,
    ) -> Result<Vec<(SimTime, SimEvent)>, String> {
        let now = self.now;
        let pos = self.position_at(env, now);
        let heading = self.heading_at(env, now);
        let mut events = Vec::new();
        match behavior {
            MotionBehavior::Spin | MotionBehavior::Circle => {
                if !matches!(
                    self.mode,
                    Mode::Performing | Mode::Spinning | Mode::Circling
                ) {
                    return Err(format!(
                        "cannot {} while {}",
                        behavior_name(behavior),
                        mode_name(self.mode)
                    ));
                }
                self.pending.clear();
                self.behavior_until = Some(now + window);
                self.heading = heading;
                if behavior == MotionBehavior::Spin {
                    self.motion = Motion::Spin {
                        pos,
                        start: now,
                        heading0: heading,
                    };
                    self.set_mode(Mode::Spinning, &mut events);
                } else {
                    let (r, _) = circle_params(env.kin);
                    let c = env.arena.center();
                    let out = (pos - c)
                        .normalized()
                        .unwrap_or_else(|| Vec2::from_angle(heading));
                    let target = c + out * r;
                    let leg = target - pos;
                    self.motion = match leg.normalized() {
                        Some(dir) if leg.length() > 1e-9 => Motion::Drive {
                            origin: pos,
                            dir,
                            start: now,
                            end: now + travel_time(leg.length(), env.kin.speed),
                            length: leg.length(),
                            kind: DriveKind::ToCircle,
                        },
                        _ => Motion::Circle {
                            start: now,
                            theta0: out.angle(),
                        },
                    };
                    self.set_mode(Mode::Circling, &mut events);
                }
            }
            MotionBehavior::Recenter => {
                if self.mode == Mode::Recentering {
                    return Err("already recentering".into());
                }
                self.clear_plans();
                self.heading = heading;
                let leg = env.arena.center() - pos;
                self.set_mode(Mode::Recentering, &mut events);
                match leg.normalized() {
                    Some(dir) => {
                        self.motion = Motion::Drive {
                            origin: pos,
                            dir,
                            start: now,
                            end: now + travel_time(leg.length(), env.kin.speed),
                            length: leg.length(),
                            kind: DriveKind::Recenter,
                        }
                    }
                    None => {
                        self.motion = Motion::Hold {
                            pos: env.arena.center(),
                        };
                        self.set_mode(Mode::Stopped, &mut events);
                    }
                }
            }
            MotionBehavior::Stop => {
                if self.mode == Mode::Stopped && self.resume_at.is_none() {
                    return Err("already stopped".into());
                }
                self.clear_plans();
                self.heading = heading;
                self.motion = Motion::Hold { pos };
                self.set_mode(Mode::Stopped, &mut events);
            }
            MotionBehavior::Restart => {
                if self.mode != Mode::Stopped {
                    return Err(format!("cannot restart while {}", mode_name(self.mode)));
                }
                if self.resume_at.is_some() {
                    return Err("restart already pending".into());
                }
                self.resume_at = Some(next_boundary);
            }
            MotionBehavior::SwitchInstrument => {
                self.primary_wall = (self.primary_wall + 1) % 4;
                self.heading = wrap_angle(heading + FRAC_PI_2);
            }
        }
        self.sync(env);
        Ok(events)
    }

    fn clear_plans(&mut self) {
        self.pending.clear();
        self.resume_at = None;
        self.behavior_until = None;
    }

    /// True while the given stroke is pending or still being played.
    fn involves(&self, window: u64, event_index: u32) -> bool {
        let matches = |p: &StrokePlan| p.window == window && p.event_index == event_index;
        self.pending.iter().any(matches)
            || match &self.motion {
                Motion::Drive {
                    kind: DriveKind::Approach { plan, .. },
                    ..
                } => matches(plan),
                Motion::Rebound { second, .. } => {
                    second.window == Some(window) && second.event_index == Some(event_index)
                }
                Motion::Press { .. } => true,
                _ => false,
            }
    }
}

fn circle_params(kin: &Kinematics) -> (f64, f64) {
    let r = kin.circle_radius;
    let omega = if r > 0.0 { kin.speed / r } else { 0.0 };
    (r, omega)
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Performing => "performing",
        Mode::Spinning => "spinning",
        Mode::Circling => "circling",
        Mode::Stopped => "stopped",
        Mode::Recentering => "recentering",
    }
}

fn behavior_name(b: MotionBehavior) -> &'static str {
    match b {
        MotionBehavior::Spin => "spin",
        MotionBehavior::Circle => "circle",
        MotionBehavior::Recenter => "recenter",
        MotionBehavior::SwitchInstrument => "switch instrument",
        MotionBehavior::Stop => "stop",
        MotionBehavior::Restart => "restart",
    }
}

/// Plays one stroke from start to finish, stepping by `dt` until the
/// stroke has been struck (or skipped) and the robot has left the drum.
pub fn execute_stroke<R: Rng + ?Sized>(
    robot: &mut RobotState,
    env: &RobotEnv,
    plan: StrokePlan,
    dt: SimTime,
    rng: &mut R,
) -> StepOutput {
    let (window, event_index) = (plan.window, plan.event_index);
    let deadline = plan.scheduled + plan.note + SimTime::from_millis(2000);
    robot.assign_plans(env, vec![plan]);
    let mut out = StepOutput::default();
    while robot.now() < deadline && robot.involves(window, event_index) {
        out.append(robot.step(env, dt, rng));
    }
    out
}
