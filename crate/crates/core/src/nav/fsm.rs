//! Wall-following finite-state machine.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NavError {
    #[error("invalid navigation config: {0}")]
    InvalidConfig(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FsmConfig {
    /// m/s.
    pub v_max: f64,
    /// rad/s.
    pub omega_max: f64,
    /// Contact threshold on |S_p|, counts.
    pub contact_threshold: f64,
    /// Lower edge of the standoff band, m.
    pub d_min: f64,
    /// Upper edge of the standoff band, m.
    pub d_max: f64,
    /// |d_l − d_r| above which the drone turns, m.
    pub turn_deadband: f64,
    pub hover_ticks: u32,
    pub follow_ticks: u32,
    pub retreat_ticks: u32,
    /// Ticks without any contact before wall following ends.
    pub resume_ticks: u32,
}

impl Default for FsmConfig {
    fn default() -> Self {
        Self {
            v_max: 0.20,
            omega_max: 0.5,
            contact_threshold: 20.0,
            d_min: 0.060,
            d_max: 0.100,
            turn_deadband: 0.01,
            hover_ticks: 100,
            follow_ticks: 100,
            retreat_ticks: 50,
            resume_ticks: 25,
        }
    }
}

impl FsmConfig {
    pub fn validate(&self) -> Result<(), NavError> {
        if !(self.d_min > 0.0 && self.d_min < self.d_max) {
            return Err(NavError::InvalidConfig("need 0 < d_min < d_max"));
        }
        if !(self.v_max > 0.0) {
            return Err(NavError::InvalidConfig("v_max must be positive"));
        }
        if !(self.omega_max > 0.0) {
            return Err(NavError::InvalidConfig("omega_max must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MissionState {
    Hovering,
    FlyingForward,
    WallFollowing,
    ResumeForward,
    Landing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WallSubstate {
    FlySideways,
    FlyForward,
    FlyBackward,
    TurnLeft,
    TurnRight,
}

/// Lateral sweep direction while following a wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Sweep {
    #[default]
    Left,
    Right,
}

impl Sweep {
    pub fn sign(&self) -> f64 {
        match self {
            Sweep::Left => 1.0,
            Sweep::Right => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NavState {
    pub mission: MissionState,
    /// Present only while wall following.
    pub sub: Option<WallSubstate>,
    pub sweep: Sweep,
    /// Ticks spent in the current mission state.
    pub ticks: u32,
    /// Consecutive ticks without any whisker contact.
    pub clear_ticks: u32,
}

impl Default for NavState {
    fn default() -> Self {
        Self {
            mission: MissionState::Hovering,
            sub: None,
            sweep: Sweep::Left,
            ticks: 0,
            clear_ticks: 0,
        }
    }
}

/// Body-frame velocity command; `v_side` is positive to the left.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VelocityCmd {
    pub v_forward: f64,
    pub v_side: f64,
    pub yaw_rate: f64,
}

impl VelocityCmd {
    pub const ZERO: VelocityCmd = VelocityCmd {
        v_forward: 0.0,
        v_side: 0.0,
        yaw_rate: 0.0,
    };

    pub fn forward(v: f64) -> Self {
        Self {
            v_forward: v,
            ..Self::ZERO
        }
    }

    pub fn side(v: f64) -> Self {
        Self {
            v_side: v,
            ..Self::ZERO
        }
    }

    pub fn turn(rate: f64) -> Self {
        Self {
            yaw_rate: rate,
            ..Self::ZERO
        }
    }

    /// Clamps each component to the configured limits.
    pub fn saturate(self, v_max: f64, omega_max: f64) -> Self {
        let c = |v: f64, m: f64| if v.is_finite() { v.clamp(-m, m) } else { 0.0 };
        Self {
            v_forward: c(self.v_forward, v_max),
            v_side: c(self.v_side, v_max),
            yaw_rate: c(self.yaw_rate, omega_max),
        }
    }
}

/// Per-tick sensing seen by the state machine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FsmInput {
    /// Estimated depths, NaN when unknown. A depth without contact is a
    /// coasting estimate.
    pub d_l: f64,
    pub d_r: f64,
    pub contact_l: bool,
    pub contact_r: bool,
    pub target_reached: bool,
}

impl Default for FsmInput {
    fn default() -> Self {
        Self {
            d_l: f64::NAN,
            d_r: f64::NAN,
            contact_l: false,
            contact_r: false,
            target_reached: false,
        }
    }
}

impl FsmInput {
    pub fn any_contact(&self) -> bool {
        self.contact_l || self.contact_r
    }
}

/// Wall-following substate and command from the current depths.
///
/// Priority: too close, then misalignment, then too far, then sweep.
/// A whisker out of contact uses its depth if one is supplied (a coasting
/// estimate) and otherwise counts as beyond reach, which turns the drone
/// toward the touching side. With no contact at all the drone keeps sliding
/// until the obstacle is cleared.
pub fn wall_follow_command(input: &FsmInput, sweep: Sweep, cfg: &FsmConfig) -> (WallSubstate, VelocityCmd) {
    if !input.any_contact() {
        return (WallSubstate::FlySideways, VelocityCmd::side(sweep.sign() * cfg.v_max));
    }
    let effective = |contact: bool, d: f64| match (contact, d.is_nan()) {
        (true, true) => 0.0,
        (false, true) => f64::INFINITY,
        _ => d,
    };
    let d_l = effective(input.contact_l, input.d_l);
    let d_r = effective(input.contact_r, input.d_r);
    if d_l.min(d_r) < cfg.d_min {
        (WallSubstate::FlyBackward, VelocityCmd::forward(-0.5 * cfg.v_max))
    } else if (d_l - d_r).abs() > cfg.turn_deadband {
        if d_l > d_r {
            (WallSubstate::TurnRight, VelocityCmd::turn(-cfg.omega_max))
        } else {
            (WallSubstate::TurnLeft, VelocityCmd::turn(cfg.omega_max))
        }
    } else if d_l.max(d_r) > cfg.d_max {
        (WallSubstate::FlyForward, VelocityCmd::forward(0.5 * cfg.v_max))
    } else {
        (WallSubstate::FlySideways, VelocityCmd::side(sweep.sign() * cfg.v_max))
    }
}

/// One control tick of the navigation state machine.
pub fn fsm_step(state: &NavState, input: &FsmInput, cfg: &FsmConfig) -> (NavState, VelocityCmd) {
    let mut next = *state;
    next.ticks = state.ticks.saturating_add(1);
    next.clear_ticks = if input.any_contact() {
        0
    } else {
        state.clear_ticks.saturating_add(1)
    };
    let enter = |s: &mut NavState, m: MissionState| {
        if s.mission != m {
            s.mission = m;
            s.ticks = 0;
        }
        if m != MissionState::WallFollowing {
            s.sub = None;
        }
    };

    if input.target_reached || state.mission == MissionState::Landing {
        enter(&mut next, MissionState::Landing);
        return (next, VelocityCmd::ZERO);
    }

    let cmd = match state.mission {
        MissionState::Hovering => {
            if next.ticks >= cfg.hover_ticks {
                enter(&mut next, MissionState::FlyingForward);
            }
            VelocityCmd::ZERO
        }
        MissionState::FlyingForward | MissionState::ResumeForward => {
            if input.any_contact() {
                enter(&mut next, MissionState::WallFollowing);
                let (sub, cmd) = wall_follow_command(input, next.sweep, cfg);
                next.sub = Some(sub);
                cmd
            } else {
                VelocityCmd::forward(cfg.v_max)
            }
        }
        MissionState::WallFollowing => {
            if next.clear_ticks >= cfg.resume_ticks {
                enter(&mut next, MissionState::ResumeForward);
                VelocityCmd::forward(cfg.v_max)
            } else {
                let (sub, cmd) = wall_follow_command(input, next.sweep, cfg);
                next.sub = Some(sub);
                cmd
            }
        }
        MissionState::Landing => VelocityCmd::ZERO,
    };
    if next.mission != MissionState::WallFollowing {
        next.sub = None;
    }
    (next, cmd.saturate(cfg.v_max, cfg.omega_max))
}
