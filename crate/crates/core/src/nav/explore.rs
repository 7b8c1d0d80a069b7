//! Active tactile exploration: bootstrap sorties, wall-follow sampling,
//! GPIS refits and variance-seeking target pursuit.

use super::fsm::{wall_follow_command, FsmConfig, FsmInput, Sweep, VelocityCmd, WallSubstate};
use super::NavError;
use crate::depth::{FusedDepths, FusionConfig, PairFusion};
use crate::geom::{angle_difference, normalize_angle, Point2, Pose2};
use crate::gpis::{analyze_excluding, GpisAnalysis, GpisSnapshot, MapConfig, INTERIOR_LABEL, SURFACE_LABEL};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExploreConfig {
    pub fsm: FsmConfig,
    pub map: MapConfig,
    pub fusion: FusionConfig,
    /// Sortie headings relative to the start yaw, degrees.
    pub bootstrap_headings_deg: Vec<f64>,
    /// Surface points kept per wall follow.
    pub samples_per_follow: u32,
    /// Outbound distance without contact after which a sortie ends, m.
    pub sortie_range: f64,
    /// Distance flown past a target without contact that counts as leaving
    /// through an opening, m.
    pub exit_width: f64,
    /// Points closer than this to the drone are never evicted, m.
    pub roi_radius: f64,
    /// A known contact this close beside the drone in the sweep direction
    /// stops the sweep, m.
    pub side_clearance: f64,
    /// Candidates this close to an earlier target are not pursued again, m.
    pub revisit_radius: f64,
    pub max_plans: u32,
    /// Yaw error accepted when turning in place, rad.
    pub heading_tolerance: f64,
    /// Distance at which the start point counts as reached, m.
    pub arrive_tolerance: f64,
}

impl Default for ExploreConfig {
    fn default() -> Self {
        Self {
            fsm: FsmConfig::default(),
            map: MapConfig::default(),
            fusion: FusionConfig::default(),
            bootstrap_headings_deg: vec![0.0, 90.0, 180.0, 270.0],
            samples_per_follow: 4,
            sortie_range: 2.5,
            exit_width: 0.8,
            roi_radius: 0.5,
            side_clearance: 0.25,
            revisit_radius: 0.15,
            max_plans: 60,
            heading_tolerance: 0.02,
            arrive_tolerance: 0.05,
        }
    }
}

impl ExploreConfig {
    pub fn validate(&self) -> Result<(), NavError> {
        self.fsm.validate()?;
        if self.bootstrap_headings_deg.is_empty() {
            return Err(NavError::InvalidConfig("need at least one bootstrap heading"));
        }
        if self.samples_per_follow == 0 || self.samples_per_follow > self.fsm.follow_ticks {
            return Err(NavError::InvalidConfig("samples_per_follow must be in 1..=follow_ticks"));
        }
        let per_cycle = self.samples_per_follow as usize + 1;
        if self.map.hyper.cap < per_cycle {
            return Err(NavError::InvalidConfig("GPIS cap smaller than one collection cycle"));
        }
        if !(self.sortie_range > 0.0 && self.exit_width > 0.0 && self.side_clearance >= 0.0) {
            return Err(NavError::InvalidConfig("ranges must be positive"));
        }
        Ok(())
    }
}

/// What a straight flight leg is for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Leg {
    Sortie,
    Pursue { target: Point2 },
    Home { to: Point2 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Phase {
    Hover { ticks: u32 },
    Turn { heading: f64, leg: Leg },
    Outbound { origin: Point2, heading: f64, limit: f64, leg: Leg },
    Follow {
        ticks: u32,
        collected: u32,
        sweep: Sweep,
        reversed: bool,
    },
    Retreat { ticks: u32 },
    Landed,
}

impl Phase {
    pub fn label(&self) -> &'static str {
        match self {
            Phase::Hover { .. } => "hover",
            Phase::Turn { .. } => "turn",
            Phase::Outbound { leg: Leg::Home { .. }, .. } => "return",
            Phase::Outbound { .. } => "outbound",
            Phase::Follow { .. } => "follow",
            Phase::Retreat { .. } => "retreat",
            Phase::Landed => "landed",
        }
    }
}

/// Sensing for one tick. A measurement is present only while its whisker
/// is in contact.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SensorFrame {
    pub pose: Pose2,
    pub m_l: Option<f64>,
    pub m_r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExploreAction {
    pub cmd: VelocityCmd,
    pub phase: &'static str,
    pub sub: Option<WallSubstate>,
    pub fused: FusedDepths,
    pub snapshot: Option<GpisSnapshot>,
}

/// Why the mission stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExploreOutcome {
    /// Flew past a target into unobstructed space.
    ExitDeclared,
    NoTarget,
    PlanLimit,
    MapFailure,
}

/// Mission memory of the exploration controller.
#[derive(Debug, Clone)]
pub struct Explorer {
    cfg: ExploreConfig,
    phase: Phase,
    start: Pose2,
    sortie: usize,
    bootstrapping: bool,
    fusion: PairFusion,
    points: Vec<Point2>,
    labels: Vec<f64>,
    order: Vec<u64>,
    next_id: u64,
    contacts: Vec<Point2>,
    analysis: Option<GpisAnalysis>,
    plans: u32,
    visited: Vec<Point2>,
    outcome: Option<ExploreOutcome>,
}

impl Explorer {
    pub fn new(cfg: ExploreConfig, start: Pose2) -> Result<Self, NavError> {
        cfg.validate()?;
        let fusion = PairFusion::new(cfg.fusion).map_err(|_| NavError::InvalidConfig("fusion config"))?;
        Ok(Self {
            cfg,
            phase: Phase::Hover { ticks: 0 },
            start,
            sortie: 0,
            bootstrapping: true,
            fusion,
            points: Vec::new(),
            labels: Vec::new(),
            order: Vec::new(),
            next_id: 0,
            contacts: Vec::new(),
            analysis: None,
            plans: 0,
            visited: Vec::new(),
            outcome: None,
        })
    }

    pub fn config(&self) -> &ExploreConfig {
        &self.cfg
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Current GPIS training set.
    pub fn training(&self) -> (&[Point2], &[f64]) {
        (&self.points, &self.labels)
    }

    /// Every surface point ever collected, evicted ones included.
    pub fn contacts(&self) -> &[Point2] {
        &self.contacts
    }

    pub fn analysis(&self) -> Option<&GpisAnalysis> {
        self.analysis.as_ref()
    }

    pub fn outcome(&self) -> Option<ExploreOutcome> {
        self.outcome
    }

    pub fn is_done(&self) -> bool {
        self.phase == Phase::Landed
    }

    /// Heading of bootstrap sortie `k`.
    pub fn sortie_heading(&self, k: usize) -> f64 {
        normalize_angle(self.start.yaw + self.cfg.bootstrap_headings_deg[k].to_radians())
    }

    /// One control tick.
    pub fn step(&mut self, frame: &SensorFrame) -> ExploreAction {
        let fused = self.fusion.step(frame.pose, frame.m_l, frame.m_r);
        let mut snapshot = None;
        let mut sub = None;
        let fsm = self.cfg.fsm;
        let pose = frame.pose;
        let contact = frame.m_l.is_some() || frame.m_r.is_some();

        let cmd = match self.phase {
            Phase::Hover { ticks } => {
                let ticks = ticks + 1;
                self.phase = if ticks >= fsm.hover_ticks {
                    Phase::Turn {
                        heading: self.sortie_heading(0),
                        leg: Leg::Sortie,
                    }
                } else {
                    Phase::Hover { ticks }
                };
                VelocityCmd::ZERO
            }
            Phase::Turn { heading, leg } => {
                let err = angle_difference(heading, pose.yaw);
                if err.abs() <= self.cfg.heading_tolerance {
                    let limit = match leg {
                        Leg::Sortie => self.cfg.sortie_range,
                        Leg::Pursue { target } => pose.position().distance(target) + self.cfg.exit_width,
                        Leg::Home { to } => pose.position().distance(to),
                    };
                    self.phase = Phase::Outbound {
                        origin: pose.position(),
                        heading,
                        limit,
                        leg,
                    };
                    VelocityCmd::ZERO
                } else {
                    VelocityCmd::turn(err / 0.1).saturate(fsm.v_max, fsm.omega_max)
                }
            }
            Phase::Outbound {
                origin,
                heading,
                limit,
                leg,
            } => {
                let travelled = pose.position().distance(origin);
                if contact && !matches!(leg, Leg::Home { .. }) {
                    self.fusion.reset();
                    let sweep = self.choose_sweep(&pose);
                    self.phase = Phase::Follow {
                        ticks: 0,
                        collected: 0,
                        sweep,
                        reversed: false,
                    };
                    VelocityCmd::ZERO
                } else if let Leg::Home { to } = leg {
                    if pose.position().distance(to) <= self.cfg.arrive_tolerance || travelled >= limit {
                        self.next_sortie_or_plan(&pose, &mut snapshot)
                    } else {
                        steer(&pose, heading, fsm.v_max, &fsm)
                    }
                } else if travelled >= limit {
                    self.land(ExploreOutcome::ExitDeclared)
                } else {
                    steer(&pose, heading, fsm.v_max, &fsm)
                }
            }
            Phase::Follow {
                ticks,
                collected,
                mut sweep,
                mut reversed,
            } => {
                let ticks = ticks + 1;
                let mut collected = collected;
                let mut blocked = self.side_blocked(&pose, sweep);
                if blocked && !reversed {
                    sweep = match sweep {
                        Sweep::Left => Sweep::Right,
                        Sweep::Right => Sweep::Left,
                    };
                    reversed = true;
                    blocked = self.side_blocked(&pose, sweep);
                }
                let every = (fsm.follow_ticks / self.cfg.samples_per_follow).max(1);
                if ticks % every == 0 && collected < self.cfg.samples_per_follow {
                    if let Some(p) = surface_point(&pose, &fused, &self.cfg.fusion) {
                        self.add_point(p, SURFACE_LABEL, pose.position());
                        self.contacts.push(p);
                        collected += 1;
                    }
                }
                if ticks >= fsm.follow_ticks || blocked {
                    if collected == 0 {
                        if let Some(p) = surface_point(&pose, &fused, &self.cfg.fusion) {
                            self.add_point(p, SURFACE_LABEL, pose.position());
                            self.contacts.push(p);
                        }
                    }
                    self.phase = Phase::Retreat { ticks: 0 };
                    VelocityCmd::ZERO
                } else {
                    self.phase = Phase::Follow {
                        ticks,
                        collected,
                        sweep,
                        reversed,
                    };
                    let input = FsmInput {
                        d_l: fused.d_l.unwrap_or(f64::NAN),
                        d_r: fused.d_r.unwrap_or(f64::NAN),
                        contact_l: frame.m_l.is_some(),
                        contact_r: frame.m_r.is_some(),
                        target_reached: false,
                    };
                    let (s, c) = wall_follow_command(&input, sweep, &fsm);
                    sub = Some(s);
                    c.saturate(fsm.v_max, fsm.omega_max)
                }
            }
            Phase::Retreat { ticks } => {
                let ticks = ticks + 1;
                if ticks >= fsm.retreat_ticks {
                    self.add_point(pose.position(), INTERIOR_LABEL, pose.position());
                    if self.bootstrapping {
                        let to = self.start.position();
                        let heading = (to - pose.position()).angle();
                        self.phase = Phase::Turn {
                            heading,
                            leg: Leg::Home { to },
                        };
                        VelocityCmd::ZERO
                    } else {
                        self.plan(&pose, &mut snapshot)
                    }
                } else {
                    self.phase = Phase::Retreat { ticks };
                    VelocityCmd::forward(-fsm.v_max)
                }
            }
            Phase::Landed => VelocityCmd::ZERO,
        };
        ExploreAction {
            cmd,
            phase: self.phase.label(),
            sub,
            fused,
            snapshot,
        }
    }

    fn land(&mut self, outcome: ExploreOutcome) -> VelocityCmd {
        self.outcome = Some(outcome);
        self.phase = Phase::Landed;
        VelocityCmd::ZERO
    }

    fn next_sortie_or_plan(&mut self, pose: &Pose2, snapshot: &mut Option<GpisSnapshot>) -> VelocityCmd {
        self.sortie += 1;
        if self.sortie < self.cfg.bootstrap_headings_deg.len() {
            self.phase = Phase::Turn {
                heading: self.sortie_heading(self.sortie),
                leg: Leg::Sortie,
            };
            VelocityCmd::ZERO
        } else {
            self.bootstrapping = false;
            self.plan(pose, snapshot)
        }
    }

    /// Refits the map and heads for the next target.
    fn plan(&mut self, pose: &Pose2, snapshot: &mut Option<GpisSnapshot>) -> VelocityCmd {
        self.bootstrapping = false;
        if self.plans >= self.cfg.max_plans {
            return self.land(ExploreOutcome::PlanLimit);
        }
        self.plans += 1;
        let analysis = match analyze_excluding(
            &self.points,
            &self.labels,
            &self.cfg.map,
            &self.visited,
            self.cfg.revisit_radius,
        ) {
            Ok(a) => a,
            Err(_) => return self.land(ExploreOutcome::MapFailure),
        };
        *snapshot = Some(GpisSnapshot::from_analysis(self.plans as u64, &analysis));
        let target = analysis.target.map(|t| t.point);
        self.analysis = Some(analysis);
        match target {
            None => self.land(ExploreOutcome::NoTarget),
            Some(target) => {
                self.visited.push(target);
                self.phase = Phase::Turn {
                    heading: (target - pose.position()).angle(),
                    leg: Leg::Pursue { target },
                };
                VelocityCmd::ZERO
            }
        }
    }

    /// Slides toward the side of the wall with the larger map variance.
    fn choose_sweep(&self, pose: &Pose2) -> Sweep {
        let Some(a) = &self.analysis else {
            return Sweep::Left;
        };
        let ahead = pose.position() + pose.forward() * 0.2;
        let left = a.model.variance(ahead + pose.left() * 0.4);
        let right = a.model.variance(ahead - pose.left() * 0.4);
        if right > left {
            Sweep::Right
        } else {
            Sweep::Left
        }
    }

    /// Whether a known contact lies beside the drone, level with its body
    /// rather than on the wall ahead, within `side_clearance` toward `sweep`.
    fn side_blocked(&self, pose: &Pose2, sweep: Sweep) -> bool {
        let c = self.cfg.side_clearance;
        let ahead = self.cfg.fusion.mounts()[0].x;
        self.contacts.iter().any(|p| {
            let r = *p - pose.position();
            let fwd = r.dot(pose.forward());
            let side = r.dot(pose.left()) * sweep.sign();
            side > 0.0 && side <= c && fwd < ahead + self.cfg.fsm.d_min / 2.0
        })
    }

    /// Appends a training point, evicting one first when at the cap.
    fn add_point(&mut self, p: Point2, label: f64, drone: Point2) {
        let cap = self.cfg.map.hyper.cap;
        if self.points.len() >= cap {
            let victim = self.eviction_candidate(drone);
            self.points.remove(victim);
            self.labels.remove(victim);
            self.order.remove(victim);
        }
        self.points.push(p);
        self.labels.push(label);
        self.order.push(self.next_id);
        self.next_id += 1;
    }

    /// Oldest surface point outside the region of interest, else the oldest
    /// point. Entries are kept in insertion order.
    fn eviction_candidate(&self, drone: Point2) -> usize {
        self.labels
            .iter()
            .zip(&self.points)
            .position(|(&l, p)| l == SURFACE_LABEL && p.distance(drone) > self.cfg.roi_radius)
            .unwrap_or(0)
    }
}

/// Heading-hold forward flight.
fn steer(pose: &Pose2, heading: f64, v: f64, fsm: &FsmConfig) -> VelocityCmd {
    let err = angle_difference(heading, pose.yaw);
    VelocityCmd {
        v_forward: v,
        v_side: 0.0,
        yaw_rate: err / 0.1,
    }
    .saturate(fsm.v_max, fsm.omega_max)
}

/// Estimated wall contact in the world frame: each whisker's mount point
/// pushed forward by its fused depth, averaged over available whiskers.
pub fn surface_point(pose: &Pose2, fused: &FusedDepths, fusion: &FusionConfig) -> Option<Point2> {
    let mounts = fusion.mounts();
    let pts: Vec<Point2> = [fused.d_l, fused.d_r]
        .iter()
        .zip(mounts)
        .filter_map(|(d, m)| d.map(|d| pose.body_to_world(m) + pose.forward() * d))
        .collect();
    if pts.is_empty() {
        return None;
    }
    let sum = pts.iter().fold(Point2::ZERO, |acc, p| acc + *p);
    Some(sum * (1.0 / pts.len() as f64))
}
