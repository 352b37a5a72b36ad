//! Arenas and the robots that play them.
//!
//! An arena is a ten-inch square whose four walls are instruments: two
//! frame drums facing each other and two tambourines facing each other.
//! Coordinates are inches with the origin in the south-west corner; walls
//! are indexed North, East, South, West.

mod robot;

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

pub use robot::{execute_stroke, Mode, RobotEnv, RobotState, StepOutput, MAX_STEP};

pub const NORTH: usize = 0;
pub const EAST: usize = 1;
pub const SOUTH: usize = 2;
pub const WEST: usize = 3;

/// Arena side length, inches.
pub const ARENA_SIDE: f64 = 10.0;
/// Instrument diameter, inches.
pub const INSTRUMENT_DIAMETER: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn from_angle(radians: f64) -> Self {
        Vec2::new(radians.cos(), radians.sin())
    }

    pub fn length(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Unit vector, or `None` for a (near) zero vector.
    pub fn normalized(self) -> Option<Vec2> {
        let len = self.length();
        (len > 1e-12).then(|| Vec2::new(self.x / len, self.y / len))
    }

    /// Rotates counter-clockwise by `radians`.
    pub fn rotated(self, radians: f64) -> Vec2 {
        let (s, c) = radians.sin_cos();
        Vec2::new(self.x * c - self.y * s, self.x * s + self.y * c)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstrumentKind {
    FrameDrum,
    Tambourine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Instrument {
    pub kind: InstrumentKind,
    pub diameter: f64,
}

impl Instrument {
    pub const fn frame_drum() -> Self {
        Instrument {
            kind: InstrumentKind::FrameDrum,
            diameter: INSTRUMENT_DIAMETER,
        }
    }

    pub const fn tambourine() -> Self {
        Instrument {
            kind: InstrumentKind::Tambourine,
            diameter: INSTRUMENT_DIAMETER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tone {
    Bass,
    Slap,
    Jingle,
}

impl Tone {
    pub const ALL: [Tone; 3] = [Tone::Bass, Tone::Slap, Tone::Jingle];

    pub fn name(self) -> &'static str {
        match self {
            Tone::Bass => "bass",
            Tone::Slap => "slap",
            Tone::Jingle => "jingle",
        }
    }
}

/// Fraction of a frame drum's half-width around its center that sounds bass.
pub const DEFAULT_BASS_ZONE: f64 = 0.3;

/// Tone produced by striking `wall` at `offset` inches from its midpoint.
/// Frame drums sound bass within `bass_zone` of their half-width and slap
/// beyond it; tambourines always jingle.
pub fn impact_tone(wall: &Instrument, offset: f64, bass_zone: f64) -> Tone {
    match wall.kind {
        InstrumentKind::Tambourine => Tone::Jingle,
        InstrumentKind::FrameDrum => {
            if offset.abs() <= bass_zone * wall.diameter / 2.0 {
                Tone::Bass
            } else {
                Tone::Slap
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArenaError {
    #[error("arena needs exactly two frame drums and two tambourines")]
    InstrumentCount,
    #[error("opposite walls {0} and {1} hold different instruments")]
    OppositeMismatch(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arena {
    pub side: f64,
    /// North, East, South, West.
    pub walls: [Instrument; 4],
    /// Placement in room coordinates, inches; used only for display.
    pub position: Vec2,
}

impl Default for Arena {
    fn default() -> Self {
        Arena::standard(Vec2::default())
    }
}

impl Arena {
    /// Frame drums north and south, tambourines east and west.
    pub fn standard(position: Vec2) -> Self {
        Arena {
            side: ARENA_SIDE,
            walls: [
                Instrument::frame_drum(),
                Instrument::tambourine(),
                Instrument::frame_drum(),
                Instrument::tambourine(),
            ],
            position,
        }
    }

    pub fn validate(&self) -> Result<(), ArenaError> {
        let drums = self
            .walls
            .iter()
            .filter(|w| w.kind == InstrumentKind::FrameDrum)
            .count();
        if drums != 2 {
            return Err(ArenaError::InstrumentCount);
        }
        for w in 0..2 {
            if self.walls[w].kind != self.walls[w + 2].kind {
                return Err(ArenaError::OppositeMismatch(w, w + 2));
            }
        }
        Ok(())
    }

    pub fn center(&self) -> Vec2 {
        Vec2::new(self.side / 2.0, self.side / 2.0)
    }

    /// Unit normal of `wall` pointing out of the arena.
    pub fn outward_normal(wall: usize) -> Vec2 {
        match wall % 4 {
            NORTH => Vec2::new(0.0, 1.0),
            EAST => Vec2::new(1.0, 0.0),
            SOUTH => Vec2::new(0.0, -1.0),
            _ => Vec2::new(-1.0, 0.0),
        }
    }

    /// Unit vector along `wall`, clockwise when viewed from above.
    pub fn tangent(wall: usize) -> Vec2 {
        Arena::outward_normal(wall).rotated(-std::f64::consts::FRAC_PI_2)
    }

    /// Robot-center position at which a robot of `radius` touches `wall`
    /// at `offset` inches from the wall midpoint.
    pub fn contact_point(&self, wall: usize, radius: f64, offset: f64) -> Vec2 {
        let c = self.center();
        let reach = self.side / 2.0 - radius;
        c + Arena::outward_normal(wall) * reach + Arena::tangent(wall) * offset
    }

    /// Signed distance along `wall` from its midpoint to the contact point
    /// of a robot centered at `pos`.
    pub fn wall_offset(&self, wall: usize, pos: Vec2) -> f64 {
        (pos - self.center()).dot(Arena::tangent(wall))
    }

    /// Distance from `pos` to the plane where a robot of `radius` touches
    /// `wall`.
    pub fn clearance(&self, wall: usize, pos: Vec2, radius: f64) -> f64 {
        (self.side / 2.0 - radius) - (pos - self.center()).dot(Arena::outward_normal(wall))
    }

    /// Casts a robot of `radius` from `origin` along unit `dir`, returning
    /// the first wall its leading edge meets and the distance travelled.
    pub fn cast(&self, origin: Vec2, dir: Vec2, radius: f64) -> (usize, f64) {
        let mut best = (NORTH, f64::INFINITY);
        for wall in [NORTH, EAST, SOUTH, WEST] {
            let closing = dir.dot(Arena::outward_normal(wall));
            if closing <= 1e-12 {
                continue;
            }
            let dist = (self.clearance(wall, origin, radius) / closing).max(0.0);
            if dist < best.1 {
                best = (wall, dist);
            }
        }
        best
    }

    /// Clamps a robot center into the reachable square.
    pub fn contain(&self, pos: Vec2, radius: f64) -> Vec2 {
        let lo = radius;
        let hi = self.side - radius;
        Vec2::new(pos.x.clamp(lo, hi), pos.y.clamp(lo, hi))
    }

    pub fn contains(&self, pos: Vec2, radius: f64) -> bool {
        let eps = 1e-9;
        let lo = radius - eps;
        let hi = self.side - radius + eps;
        (lo..=hi).contains(&pos.x) && (lo..=hi).contains(&pos.y)
    }
}

/// Physical constants of the robots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Kinematics {
    /// Sphere radius, inches.
    pub robot_radius: f64,
    /// Travel speed, inches per second.
    pub speed: f64,
    /// Standard deviation of heading error per departure, degrees.
    pub heading_sigma_deg: f64,
    /// Velocity kept after a power-cut impact.
    pub restitution: f64,
    /// How long a single stroke keeps pressing into the drum, seconds.
    pub press_time: f64,
    /// Offset from the drum midpoint used for edge (slap) strokes, inches.
    pub edge_aim: f64,
    /// Closest a robot may start a stroke from its drum, inches.
    pub min_standoff: f64,
    /// Radius of the circling path around the arena center, inches.
    pub circle_radius: f64,
    /// Spin rate, revolutions per second.
    pub spin_rate: f64,
    /// Bass zone as a fraction of the drum half-width.
    pub bass_zone: f64,
    /// Lower bound on impact intensity.
    pub min_intensity: f64,
}

impl Default for Kinematics {
    fn default() -> Self {
        Kinematics {
            robot_radius: 1.45,
            speed: 20.0,
            heading_sigma_deg: 2.0,
            restitution: 0.4,
            press_time: 0.02,
            edge_aim: 3.2,
            min_standoff: 0.25,
            circle_radius: 2.5,
            spin_rate: 1.0,
            bass_zone: DEFAULT_BASS_ZONE,
            min_intensity: 0.05,
        }
    }
}

impl Kinematics {
    pub fn validate(&self, side: f64) -> Result<(), String> {
        let half = side / 2.0;
        let checks: [(bool, &str); 9] = [
            (
                self.robot_radius > 0.0 && self.robot_radius < half,
                "robot_radius must lie in (0, side/2)",
            ),
            (self.speed > 0.0, "speed must be positive"),
            (
                self.heading_sigma_deg >= 0.0,
                "heading_sigma_deg must be non-negative",
            ),
            (
                (0.0..1.0).contains(&self.restitution) && self.restitution > 0.0,
                "restitution must lie in (0, 1)",
            ),
            (self.press_time >= 0.0, "press_time must be non-negative"),
            (
                self.edge_aim >= 0.0 && self.edge_aim <= half - self.robot_radius,
                "edge_aim must keep the robot inside the arena",
            ),
            (
                self.circle_radius >= 0.0 && self.circle_radius + self.robot_radius <= half,
                "circle_radius must keep the robot inside the arena",
            ),
            (
                (0.0..=1.0).contains(&self.bass_zone),
                "bass_zone must lie in [0, 1]",
            ),
            (
                self.min_intensity > 0.0 && self.min_intensity <= 1.0,
                "min_intensity must lie in (0, 1]",
            ),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err((*msg).to_string()),
            None => Ok(()),
        }
    }

    pub fn heading_sigma_rad(&self) -> f64 {
        self.heading_sigma_deg.to_radians()
    }
}
