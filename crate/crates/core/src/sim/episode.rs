//! Full closed-loop missions: sense, estimate, decide, command at 50 Hz.

use super::drone::{DroneModel, DroneParams};
use super::sensors::{synth_range, whisker_contact, BarometricSensor, SensorMode, SensorNoise, Side, WhiskerContact};
use super::telemetry::TelemetryRow;
use super::world::World;
use super::{SimClock, SimError};
use crate::depth::{DepthModel, PairFusion};
use crate::geom::{Point2, Pose2};
use crate::gpis::GpisSnapshot;
use crate::nav::{fsm_step, surface_point, ExploreConfig, Explorer, FsmInput, MissionState, NavState, SensorFrame};
use crate::rng::derive_seed;
use crate::signal::{PipelineConfig, WhiskerPipeline};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MissionKind {
    /// Reactive wall following toward a goal distance along the start heading.
    Navigate,
    /// GPIS-driven exploration of an enclosed room.
    Explore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EpisodeConfig {
    pub mission: MissionKind,
    /// Navigation, mapping and fusion settings; `explore.fsm` and
    /// `explore.fusion` also drive `Navigate`.
    pub explore: ExploreConfig,
    pub sensor: SensorNoise,
    pub drone: DroneParams,
    pub pipeline: PipelineConfig,
    pub start: Pose2,
    /// Navigate only: land once this far along the start heading, m.
    pub goal_distance: f64,
    pub max_ticks: u64,
    pub dt: f64,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            mission: MissionKind::Explore,
            explore: ExploreConfig::default(),
            sensor: SensorNoise::default(),
            drone: DroneParams::default(),
            pipeline: PipelineConfig::default(),
            start: Pose2::default(),
            goal_distance: 2.5,
            max_ticks: 60_000,
            dt: 0.02,
        }
    }
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |e: &dyn std::fmt::Display| SimError::InvalidConfig(e.to_string());
        self.explore.validate().map_err(|e| bad(&e))?;
        self.explore.fusion.validate().map_err(|e| bad(&e))?;
        self.drone.validate()?;
        self.pipeline.validate().map_err(|e| bad(&e))?;
        SimClock::new(self.dt)?;
        if !self.sensor.is_valid() {
            return Err(SimError::InvalidConfig("sensor noise parameters".into()));
        }
        let f = &self.explore.fusion;
        let m = self.drone.mounts[0];
        if (f.spacing - self.drone.spacing()).abs() > 1e-12 || (f.mount_forward - m.x).abs() > 1e-12 {
            return Err(SimError::InvalidConfig("fusion mounts differ from drone mounts".into()));
        }
        let fsm = &self.explore.fsm;
        if fsm.v_max > self.drone.v_max || fsm.omega_max > self.drone.omega_max {
            return Err(SimError::InvalidConfig("controller limits exceed the drone's".into()));
        }
        if self.sensor.mode == SensorMode::Barometric && fsm.hover_ticks < self.pipeline.window as u32 {
            return Err(SimError::InvalidConfig("hover too short to fill the drift window".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Landed,
    Collision,
    TickBudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMetrics {
    pub exit_found: bool,
    pub travel_m: f64,
    /// Error of estimated contact points against the true walls; `None`
    /// when no contact point was estimated.
    pub recon_mae_m: Option<f64>,
    pub recon_rmse_m: Option<f64>,
    pub ticks: u64,
}

#[derive(Debug, Clone)]
pub struct EpisodeResult {
    pub telemetry: Vec<TelemetryRow>,
    pub snapshots: Vec<GpisSnapshot>,
    pub metrics: EpisodeMetrics,
    pub termination: Termination,
    /// Estimated contact points used for the reconstruction error.
    pub contacts: Vec<Point2>,
    pub final_pose: Pose2,
}

impl EpisodeResult {
    /// The termination as an error, `Ok` after a landing.
    pub fn status(&self) -> Result<(), SimError> {
        match self.termination {
            Termination::Landed => Ok(()),
            Termination::Collision => Err(SimError::Collision(self.final_pose)),
            Termination::TickBudgetExceeded => Err(SimError::TickBudgetExceeded(self.metrics.ticks)),
        }
    }
}

/// Minimum point-to-wall distance of each point; MAE and RMSE.
pub fn reconstruction_error(world: &World, points: &[Point2]) -> Option<(f64, f64)> {
    if points.is_empty() || world.segments.is_empty() {
        return None;
    }
    let errs: Vec<f64> = points.iter().map(|p| world.clearance(*p)).collect();
    let n = errs.len() as f64;
    let mae = errs.iter().sum::<f64>() / n;
    let rmse = (errs.iter().map(|e| e * e).sum::<f64>() / n).sqrt();
    Some((mae, rmse))
}

/// Produces per-whisker depth readings for the estimator.
enum Sensing<'a> {
    Range { sigma: f64, seed: u64 },
    Baro {
        sensors: [BarometricSensor; 2],
        pipelines: [WhiskerPipeline; 2],
        model: &'a DepthModel,
    },
}

impl Sensing<'_> {
    fn read(&mut self, tick: u64, truth: &[Option<WhiskerContact>; 2]) -> Result<[Option<f64>; 2], SimError> {
        match self {
            Sensing::Range { sigma, seed } => Ok([0, 1].map(|i| {
                synth_range(truth[i].map(|c| c.depth), *sigma, *seed, i as u64, tick)
            })),
            Sensing::Baro {
                sensors,
                pipelines,
                model,
            } => {
                let mut out = [None, None];
                for i in 0..2 {
                    let sample = sensors[i].sample(truth[i].map(|c| c.depth));
                    if !pipelines[i].is_calibrated() {
                        pipelines[i]
                            .hover(&sample)
                            .map_err(|e| SimError::InvalidConfig(e.to_string()))?;
                        continue;
                    }
                    let step = pipelines[i]
                        .step(&sample)
                        .map_err(|e| SimError::InvalidConfig(e.to_string()))?;
                    if step.contact {
                        out[i] = Some(model.predict(&step.s_c));
                    }
                }
                Ok(out)
            }
        }
    }
}

/// [`run_episode_with`] without a depth model (IdealRange sensing).
pub fn run_episode(world: &World, cfg: &EpisodeConfig, seed: u64) -> Result<EpisodeResult, SimError> {
    run_episode_with(world, cfg, seed, None)
}

/// Runs one mission to landing, collision or tick budget. Only invalid
/// configuration is an error; the way the episode ended is in the result.
pub fn run_episode_with(
    world: &World,
    cfg: &EpisodeConfig,
    seed: u64,
    model: Option<&DepthModel>,
) -> Result<EpisodeResult, SimError> {
    cfg.validate()?;
    let mut clock = SimClock::new(cfg.dt)?;
    let mut drone = DroneModel::new(cfg.start, cfg.drone);
    let sensor_seed = derive_seed(seed, "sensor", 0);
    let mut sensing = match cfg.sensor.mode {
        SensorMode::IdealRange => Sensing::Range {
            sigma: cfg.sensor.range_sigma,
            seed: sensor_seed,
        },
        SensorMode::Barometric => {
            let model = model.ok_or(SimError::MissingModel)?;
            let mk = |i: u64| BarometricSensor::new(cfg.sensor, cfg.drone.whisker, sensor_seed, i, cfg.dt);
            let pipe = || WhiskerPipeline::new(cfg.pipeline).map_err(|e| SimError::InvalidConfig(e.to_string()));
            Sensing::Baro {
                sensors: [mk(0), mk(1)],
                pipelines: [pipe()?, pipe()?],
                model,
            }
        }
    };

    let fsm = cfg.explore.fsm;
    let mut explorer = match cfg.mission {
        MissionKind::Explore => {
            Some(Explorer::new(cfg.explore.clone(), cfg.start).map_err(|e| SimError::InvalidConfig(e.to_string()))?)
        }
        MissionKind::Navigate => None,
    };
    let mut nav = NavState::default();
    let mut fusion = PairFusion::new(cfg.explore.fusion).map_err(|e| SimError::InvalidConfig(e.to_string()))?;
    let mut nav_contacts = Vec::new();

    let mut telemetry = Vec::new();
    let mut snapshots = Vec::new();
    let mut travel = 0.0;
    let mut crossings = 0usize;
    let termination = loop {
        if clock.tick >= cfg.max_ticks {
            break Termination::TickBudgetExceeded;
        }
        let pose = drone.pose;
        let truth = Side::BOTH.map(|s| whisker_contact(world, &drone, s));
        let m = sensing.read(clock.tick, &truth)?;

        let (cmd, state, sub, fused) = match explorer.as_mut() {
            Some(ex) => {
                let act = ex.step(&SensorFrame {
                    pose,
                    m_l: m[0],
                    m_r: m[1],
                });
                if let Some(s) = act.snapshot {
                    snapshots.push(GpisSnapshot { tick: clock.tick, ..s });
                }
                (act.cmd, act.phase.to_string(), act.sub, act.fused)
            }
            None => {
                let fused = fusion.step(pose, m[0], m[1]);
                let along = (pose.position() - cfg.start.position()).dot(cfg.start.forward());
                let input = FsmInput {
                    d_l: fused.d_l.unwrap_or(f64::NAN),
                    d_r: fused.d_r.unwrap_or(f64::NAN),
                    contact_l: m[0].is_some(),
                    contact_r: m[1].is_some(),
                    target_reached: along >= cfg.goal_distance,
                };
                if input.contact_l && input.contact_r {
                    if let Some(p) = surface_point(&pose, &fused, &cfg.explore.fusion) {
                        nav_contacts.push(p);
                    }
                }
                let (next, cmd) = fsm_step(&nav, &input, &fsm);
                nav = next;
                (cmd, format!("{:?}", nav.mission), nav.sub, fused)
            }
        };

        telemetry.push(TelemetryRow {
            tick: clock.tick,
            t: clock.time(),
            x: pose.x,
            y: pose.y,
            yaw: pose.yaw,
            state,
            substate: sub.map(|s| format!("{s:?}")),
            m_l: m[0],
            m_r: m[1],
            d_l: fused.d_l,
            d_r: fused.d_r,
            v_forward: cmd.v_forward,
            v_side: cmd.v_side,
            yaw_rate: cmd.yaw_rate,
            seg_l: truth[0].map(|c| c.segment),
            seg_r: truth[1].map(|c| c.segment),
        });

        let landed = match &explorer {
            Some(ex) => ex.is_done(),
            None => nav.mission == MissionState::Landing,
        };
        if landed {
            clock.advance();
            break Termination::Landed;
        }
        match drone.step(world, &cmd, clock.dt) {
            Ok(next) => {
                travel += next.pose.position().distance(pose.position());
                crossings += world.exit_crossings(pose.position(), next.pose.position());
                drone = next;
            }
            Err(SimError::Collision(_)) => {
                clock.advance();
                break Termination::Collision;
            }
            Err(e) => return Err(e),
        }
        clock.advance();
    };

    let contacts = match &explorer {
        Some(ex) => ex.contacts().to_vec(),
        None => nav_contacts,
    };
    let recon = reconstruction_error(world, &contacts);
    let metrics = EpisodeMetrics {
        exit_found: crossings % 2 == 1,
        travel_m: travel,
        recon_mae_m: recon.map(|r| r.0),
        recon_rmse_m: recon.map(|r| r.1),
        ticks: clock.tick,
    };
    Ok(EpisodeResult {
        telemetry,
        snapshots,
        metrics,
        termination,
        contacts,
        final_pose: drone.pose,
    })
}
