//! Deterministic planar simulator: worlds, kinematic drone, whisker sensing
//! and full mission episodes.

pub mod drone;
pub mod episode;
pub mod sensors;
pub mod telemetry;
pub mod world;

pub use drone::{DroneModel, DroneParams};
pub use episode::{
    run_episode, run_episode_with, EpisodeConfig, EpisodeMetrics, EpisodeResult, MissionKind, Termination,
};
pub use sensors::{
    free_flight_trace, synth_range, whisker_contact, BarometricSensor, FreeFlightTrace, SensorMode, SensorNoise,
    Side, WhiskerContact,
};
pub use episode::reconstruction_error;
pub use telemetry::{telemetry_bytes, write_telemetry, TelemetryRow};
pub use world::{Bounds, World};

use crate::geom::{GeomError, Pose2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("collision at ({}, {})", .0.x, .0.y)]
    Collision(Pose2),
    #[error("tick budget of {0} exhausted")]
    TickBudgetExceeded(u64),
    #[error("dt must be positive")]
    BadTimeStep,
    #[error("barometric sensing needs a depth model")]
    MissingModel,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("world file: {0}")]
    WorldFile(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Simulated time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimClock {
    pub tick: u64,
    pub dt: f64,
}

impl Default for SimClock {
    fn default() -> Self {
        Self { tick: 0, dt: 0.02 }
    }
}

impl SimClock {
    pub fn new(dt: f64) -> Result<Self, SimError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SimError::BadTimeStep);
        }
        Ok(Self { tick: 0, dt })
    }

    pub fn time(&self) -> f64 {
        self.tick as f64 * self.dt
    }

    pub fn advance(&mut self) {
        self.tick += 1;
    }
}
