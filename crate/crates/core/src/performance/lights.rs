//! Robot lights: a base hue per robot, nudged once per second along a
//! triangle wave that stays within a neighborhood of the base.

use serde::{Deserialize, Serialize};

use crate::events::{LightCause, LightEvent};
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LightConfig {
    /// Hue change per tick, degrees.
    pub step_deg: f64,
    /// Largest distance from the base hue, degrees.
    pub span_deg: f64,
}

impl Default for LightConfig {
    fn default() -> Self {
        LightConfig {
            step_deg: 7.0,
            span_deg: 21.0,
        }
    }
}

impl LightConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.step_deg.is_nan() || self.step_deg <= 0.0 {
            return Err("lights.step_deg must be positive".into());
        }
        if self.span_deg.is_nan() || self.span_deg < self.step_deg {
            return Err("lights.span_deg must be at least step_deg".into());
        }
        Ok(())
    }

    /// Offset from the base after `n` ticks.
    pub fn offset(&self, n: u64) -> f64 {
        let m = ((self.span_deg / self.step_deg).floor() as u64).max(1);
        let k = n % (4 * m);
        let steps = if k <= m {
            k as f64
        } else if k <= 3 * m {
            (2 * m) as f64 - k as f64
        } else {
            k as f64 - (4 * m) as f64
        };
        steps * self.step_deg
    }
}

pub fn normalize_hue(h: f64) -> f64 {
    let h = h.rem_euclid(360.0);
    if h >= 360.0 {
        0.0
    } else {
        h
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightState {
    pub robot: usize,
    pub base: f64,
    pub hue: f64,
    pub last_shift: SimTime,
    ticks: u64,
}

impl LightState {
    pub fn new(robot: usize, base: f64) -> Self {
        let base = normalize_hue(base);
        LightState {
            robot,
            base,
            hue: base,
            last_shift: SimTime::ZERO,
            ticks: 0,
        }
    }

    pub fn tick(&mut self, cfg: &LightConfig, now: SimTime) -> LightEvent {
        self.ticks += 1;
        self.hue = normalize_hue(self.base + cfg.offset(self.ticks));
        self.last_shift = now;
        self.event(LightCause::Tick)
    }

    pub fn set_base(&mut self, base: f64, now: SimTime) -> LightEvent {
        self.base = normalize_hue(base);
        self.hue = self.base;
        self.ticks = 0;
        self.last_shift = now;
        self.event(LightCause::SetColor)
    }

    fn event(&self, cause: LightCause) -> LightEvent {
        LightEvent {
            robot: self.robot,
            hue: self.hue,
            base: self.base,
            cause,
        }
    }
}
