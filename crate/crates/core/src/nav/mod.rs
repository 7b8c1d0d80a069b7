//! Control layer: wall-following state machine and exploration mission.

pub mod explore;
pub mod fsm;

pub use explore::{surface_point, ExploreAction, ExploreConfig, ExploreOutcome, Explorer, Leg, Phase, SensorFrame};
pub use fsm::{
    fsm_step, wall_follow_command, FsmConfig, FsmInput, MissionState, NavError, NavState, Sweep, VelocityCmd,
    WallSubstate,
};
