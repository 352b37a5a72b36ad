//! Next-pattern selection under leader-follower rules.
//!
//! The leader chooses among patterns whose category the compatibility
//! matrix allows after its own previous pattern. A follower additionally
//! keeps only patterns sharing the leader's evenness, falling back to the
//! leader rule alone and then to the whole library when the intersection
//! is empty. Selection is a uniform draw from the caller's random stream.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::patterns::{Pattern, PatternLibrary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Leader,
    Follower,
}

/// Inputs to one selection. `leader_current` must be `None` exactly when
/// `role` is [`Role::Leader`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectionContext<'a> {
    pub role: Role,
    pub own_previous: Option<&'a str>,
    pub leader_current: Option<&'a str>,
}

impl<'a> SelectionContext<'a> {
    pub fn leader(own_previous: Option<&'a str>) -> Self {
        SelectionContext {
            role: Role::Leader,
            own_previous,
            leader_current: None,
        }
    }

    pub fn follower(own_previous: Option<&'a str>, leader_current: &'a str) -> Self {
        SelectionContext {
            role: Role::Follower,
            own_previous,
            leader_current: Some(leader_current),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SelectionError {
    #[error("pattern library is empty")]
    EmptyLibrary,
    #[error("unknown pattern id `{0}`")]
    UnknownPattern(String),
    #[error("a leader has no leader pattern to follow")]
    LeaderWithLeaderInput,
    #[error("a follower needs the leader's current pattern")]
    FollowerWithoutLeader,
}

fn lookup<'l>(lib: &'l PatternLibrary, id: &str) -> Result<&'l Pattern, SelectionError> {
    lib.get(id)
        .ok_or_else(|| SelectionError::UnknownPattern(id.to_string()))
}

/// Patterns the selecting robot may choose next, in library order.
pub fn candidate_set<'l>(
    lib: &'l PatternLibrary,
    ctx: &SelectionContext<'_>,
) -> Result<Vec<&'l Pattern>, SelectionError> {
    if lib.is_empty() {
        return Err(SelectionError::EmptyLibrary);
    }
    let own = ctx.own_previous.map(|id| lookup(lib, id)).transpose()?;
    let leader = ctx.leader_current.map(|id| lookup(lib, id)).transpose()?;
    match (ctx.role, leader) {
        (Role::Leader, Some(_)) => return Err(SelectionError::LeaderWithLeaderInput),
        (Role::Follower, None) => return Err(SelectionError::FollowerWithoutLeader),
        _ => {}
    }

    let Some(own) = own else {
        return Ok(lib.patterns().iter().collect());
    };

    let matrix = lib.transitions();
    let reachable: Vec<&Pattern> = lib
        .patterns()
        .iter()
        .filter(|p| matrix.allows(own.category(), p.category()))
        .collect();

    let set = match leader {
        None => {
            let without_own: Vec<&Pattern> = reachable
                .iter()
                .copied()
                .filter(|p| p.id != own.id)
                .collect();
            if without_own.is_empty() {
                reachable
            } else {
                without_own
            }
        }
        Some(leader) => {
            let leader_rule: Vec<&Pattern> = lib
                .patterns()
                .iter()
                .filter(|p| p.evenness == leader.evenness)
                .collect();
            let both: Vec<&Pattern> = leader_rule
                .iter()
                .copied()
                .filter(|p| matrix.allows(own.category(), p.category()))
                .collect();
            if !both.is_empty() {
                both
            } else {
                leader_rule
            }
        }
    };
    if set.is_empty() {
        Ok(lib.patterns().iter().collect())
    } else {
        Ok(set)
    }
}

/// Uniform draw over [`candidate_set`].
pub fn select_next<'l, R: Rng + ?Sized>(
    lib: &'l PatternLibrary,
    ctx: &SelectionContext<'_>,
    rng: &mut R,
) -> Result<&'l Pattern, SelectionError> {
    let candidates = candidate_set(lib, ctx)?;
    Ok(candidates[rng.random_range(0..candidates.len())])
}

/// Weighted draw over [`candidate_set`]. Falls back to a uniform draw when
/// every weight is zero.
pub fn select_next_weighted<'l, R, W>(
    lib: &'l PatternLibrary,
    ctx: &SelectionContext<'_>,
    rng: &mut R,
    weight: W,
) -> Result<&'l Pattern, SelectionError>
where
    R: Rng + ?Sized,
    W: Fn(&Pattern) -> f64,
{
    let candidates = candidate_set(lib, ctx)?;
    let weights: Vec<f64> = candidates.iter().map(|p| weight(p).max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Ok(candidates[rng.random_range(0..candidates.len())]);
    }
    let mut x = rng.random::<f64>() * total;
    for (p, w) in candidates.iter().zip(&weights) {
        if x < *w {
            return Ok(p);
        }
        x -= w;
    }
    Ok(candidates[candidates.len() - 1])
}
