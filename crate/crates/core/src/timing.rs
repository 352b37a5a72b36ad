//! Metronome clock and per-window stroke scheduling.
//!
//! Every robot follows one global clock. Within a window each stroke picks
//! up a small random timing error that accumulates from stroke to stroke;
//! at the next window boundary the error resets to zero. Two robots playing
//! the same pattern therefore drift apart inside a window and snap back
//! together at the boundary.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::patterns::{Beats, Pattern, StrokeKind, TICKS_PER_BEAT, WINDOW_BEATS};
use crate::rng::truncated_normal;
use crate::time::SimTime;

/// Per-stroke errors are truncated at this many standard deviations.
pub const JITTER_TRUNCATION: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetronomeClock {
    pub bpm: f64,
    pub epoch: SimTime,
    pub window_beats: u32,
}

impl Default for MetronomeClock {
    fn default() -> Self {
        MetronomeClock::new(60.0)
    }
}

impl MetronomeClock {
    pub fn new(bpm: f64) -> Self {
        MetronomeClock {
            bpm,
            epoch: SimTime::ZERO,
            window_beats: WINDOW_BEATS,
        }
    }

    pub fn beat_seconds(&self) -> f64 {
        60.0 / self.bpm
    }

    pub fn beat(&self) -> SimTime {
        SimTime::from_secs_f64(self.beat_seconds())
    }

    pub fn window_seconds(&self) -> f64 {
        f64::from(self.window_beats) * self.beat_seconds()
    }

    pub fn window(&self) -> SimTime {
        SimTime::from_secs_f64(self.window_seconds())
    }

    /// Offset of a beat position from its window start.
    pub fn beats_to_time(&self, beats: Beats) -> SimTime {
        let us = f64::from(beats.ticks()) * 60e6 / (self.bpm * f64::from(TICKS_PER_BEAT));
        SimTime::from_micros(us.round() as i64)
    }

    /// Start of window `k`.
    pub fn window_start(&self, k: u64) -> SimTime {
        let us = k as f64 * self.window_seconds() * 1e6;
        self.epoch + SimTime::from_micros(us.round() as i64)
    }

    /// Index of the window containing `t` (windows are half-open).
    pub fn window_index(&self, t: SimTime) -> u64 {
        if t <= self.epoch {
            return 0;
        }
        let approx = ((t - self.epoch).micros() as f64 / (self.window_seconds() * 1e6)).floor();
        let mut k = approx.max(0.0) as u64;
        while k > 0 && self.window_start(k) > t {
            k -= 1;
        }
        while self.window_start(k + 1) <= t {
            k += 1;
        }
        k
    }

    /// Smallest window boundary at or after `t`.
    pub fn window_boundary(&self, t: SimTime) -> SimTime {
        let k = self.window_index(t);
        let start = self.window_start(k);
        if start >= t {
            start
        } else {
            self.window_start(k + 1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JitterModel {
    /// Standard deviation of each stroke's timing error, seconds.
    pub per_stroke_sigma: f64,
    /// Deterministic lag added per stroke, seconds.
    pub drift_per_stroke: f64,
    /// Chance that a single stroke cuts power too early and bounces.
    pub early_power_cut_prob: f64,
}

impl Default for JitterModel {
    fn default() -> Self {
        JitterModel {
            per_stroke_sigma: 0.05,
            drift_per_stroke: 0.0,
            early_power_cut_prob: 0.05,
        }
    }
}

impl JitterModel {
    pub fn none() -> Self {
        JitterModel {
            per_stroke_sigma: 0.0,
            drift_per_stroke: 0.0,
            early_power_cut_prob: 0.0,
        }
    }
}

/// Where on the primary drum a stroke is aimed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aim {
    /// Drum center, for a bass tone.
    Center,
    /// Near the rim, for a slap tone.
    Edge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrokePlan {
    pub robot_id: usize,
    pub window: u64,
    pub scheduled: SimTime,
    pub nominal: SimTime,
    pub stroke: StrokeKind,
    pub pattern_id: String,
    /// Position of the event in the window, counting repeats and rests.
    pub event_index: u32,
    /// Position among the window's strokes (rests skipped).
    pub stroke_number: u32,
    pub note: SimTime,
    pub aim: Aim,
}

/// Plans every stroke of `pattern` in window `window`, repeating the pattern
/// to fill the window and accumulating jitter from the boundary onward.
pub fn schedule_window<R: Rng + ?Sized>(
    pattern: &Pattern,
    clock: &MetronomeClock,
    jitter: &JitterModel,
    robot_id: usize,
    window: u64,
    rng: &mut R,
) -> Vec<StrokePlan> {
    let start = clock.window_start(window);
    let len = pattern.length();
    let mut plans =
        Vec::with_capacity(pattern.stroke_count() * pattern.repeats_per_window() as usize);
    let mut offset = 0.0;
    let mut event_index = 0u32;
    let mut stroke_number = 0u32;
    let mut last: Option<SimTime> = None;
    for rep in 0..pattern.repeats_per_window() {
        for e in &pattern.events {
            let idx = event_index;
            event_index += 1;
            if e.rest {
                continue;
            }
            offset += truncated_normal(rng, jitter.per_stroke_sigma, JITTER_TRUNCATION)
                + jitter.drift_per_stroke;
            let pos = Beats::from_ticks(rep * len.ticks() + e.onset.ticks());
            let nominal = start + clock.beats_to_time(pos);
            let mut scheduled = nominal + SimTime::from_secs_f64(offset);
            if let Some(prev) = last {
                if scheduled <= prev {
                    scheduled = prev + SimTime::from_micros(1);
                }
            }
            last = Some(scheduled);
            plans.push(StrokePlan {
                robot_id,
                window,
                scheduled,
                nominal,
                stroke: e.stroke,
                pattern_id: pattern.id.clone(),
                event_index: idx,
                stroke_number,
                note: clock.beats_to_time(e.duration),
                aim: if stroke_number.is_multiple_of(2) {
                    Aim::Center
                } else {
                    Aim::Edge
                },
            });
            stroke_number += 1;
        }
    }
    plans
}
