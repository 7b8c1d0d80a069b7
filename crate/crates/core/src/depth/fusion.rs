//! Left/right whisker fusion around a shared wall estimate.

use super::kalman::{kf_predict, kf_step, KfState};
use super::process::{
    process_predict, wall_angle_from_depths, wall_drone_angle, OdomDelta, WallState,
};
use super::DepthError;
use crate::geom::{Point2, Pose2};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FusionVariant {
    /// Sensor-model output only.
    MeasurementOnly,
    /// Kalman fusion assuming the wall is perpendicular to the heading.
    Simplified,
    /// Kalman fusion with the wall angle estimated from both depths.
    Full,
}

impl FusionVariant {
    pub const ALL: [FusionVariant; 3] = [
        FusionVariant::MeasurementOnly,
        FusionVariant::Simplified,
        FusionVariant::Full,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            FusionVariant::MeasurementOnly => "mlp",
            FusionVariant::Simplified => "mlp_kf_simplified",
            FusionVariant::Full => "mlp_kf_full",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FusionConfig {
    pub variant: FusionVariant,
    /// Process noise variance, m².
    pub q: f64,
    /// Measurement noise variance, m².
    pub r: f64,
    /// Lateral distance between the whisker mounts, m.
    pub spacing: f64,
    /// Forward offset of the mounts from the body origin, m.
    pub mount_forward: f64,
    /// A whisker that has been out of contact this many ticks is reset.
    pub max_coast_ticks: u32,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            variant: FusionVariant::Full,
            q: 1e-3 * 1e-3,
            r: 5e-3 * 5e-3,
            spacing: 0.05,
            mount_forward: 0.05,
            max_coast_ticks: 50,
        }
    }
}

impl FusionConfig {
    pub fn with_variant(variant: FusionVariant) -> Self {
        Self {
            variant,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), DepthError> {
        if !(self.q > 0.0 && self.r > 0.0) {
            return Err(DepthError::InvalidParameter("q and r must be positive"));
        }
        if !(self.spacing > 0.0) {
            return Err(DepthError::InvalidParameter("whisker spacing must be positive"));
        }
        Ok(())
    }

    /// Body-frame mount points, left then right.
    pub fn mounts(&self) -> [Point2; 2] {
        [
            Point2::new(self.mount_forward, 0.5 * self.spacing),
            Point2::new(self.mount_forward, -0.5 * self.spacing),
        ]
    }
}

/// Estimator memory carried between ticks.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PairState {
    pub left: Option<KfState>,
    pub right: Option<KfState>,
    pub wall: WallState,
    /// Whether `wall` has been estimated from contact at least once.
    pub wall_valid: bool,
    pub coast: [u32; 2],
}

impl PairState {
    pub fn side(&self, i: usize) -> Option<KfState> {
        if i == 0 {
            self.left
        } else {
            self.right
        }
    }

    fn side_mut(&mut self, i: usize) -> &mut Option<KfState> {
        if i == 0 {
            &mut self.left
        } else {
            &mut self.right
        }
    }
}

/// Fused estimates after one tick.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FusedDepths {
    pub d_l: Option<f64>,
    pub d_r: Option<f64>,
    pub wall: WallState,
}

/// Advances the pair estimator from `pose_k` by `odom` and fuses the new
/// measurements (`None` when the whisker is not in contact).
pub fn fuse_pair(
    state: &PairState,
    pose_k: &Pose2,
    odom: &OdomDelta,
    m_l: Option<f64>,
    m_r: Option<f64>,
    cfg: &FusionConfig,
) -> (PairState, FusedDepths) {
    let pose_k1 = odom.apply(pose_k);
    let mut next = *state;
    let meas = [m_l, m_r];
    let mounts = cfg.mounts();

    for i in 0..2 {
        let current = next.side(i);
        let mut updated = if cfg.variant == FusionVariant::MeasurementOnly {
            meas[i].map(|m| KfState::from_measurement(m, cfg.q, cfg.r))
        } else {
            match (current, meas[i]) {
                (None, None) => None,
                (None, Some(m)) => Some(KfState::from_measurement(m, cfg.q, cfg.r)),
                (Some(kf), m) => {
                    let wall = match cfg.variant {
                        FusionVariant::Full => state.wall,
                        _ => WallState::from_drone_angle(state.wall.d_wall, 0.0, pose_k.yaw),
                    };
                    let from = pose_k.offset(mounts[i]);
                    let to = pose_k1.offset(mounts[i]);
                    let d_pred = process_predict(kf.d, &wall, &from, &to).unwrap_or(kf.d);
                    Some(match m {
                        Some(m) => kf_step(&kf, d_pred, m),
                        None => kf_predict(&kf, d_pred),
                    })
                }
            }
        };
        if meas[i].is_some() {
            next.coast[i] = 0;
        } else if updated.is_some() {
            next.coast[i] += 1;
            if next.coast[i] > cfg.max_coast_ticks {
                updated = None;
                next.coast[i] = 0;
            }
        }
        *next.side_mut(i) = updated;
    }

    let yaw = pose_k1.yaw;
    match (next.left, next.right) {
        (Some(l), Some(r)) => {
            let theta = match cfg.variant {
                FusionVariant::Simplified => 0.0,
                _ => wall_angle_from_depths(l.d, r.d, cfg.spacing),
            };
            let d_wall = 0.5 * (l.d + r.d) * theta.cos();
            next.wall = WallState::from_drone_angle(d_wall.max(0.0), theta, yaw);
            next.wall_valid = true;
        }
        (Some(one), None) | (None, Some(one)) => {
            let theta = if next.wall_valid && cfg.variant == FusionVariant::Full {
                wall_drone_angle(state.wall.theta_wall_w, yaw)
            } else {
                0.0
            };
            let d_wall = (one.d * theta.cos()).max(0.0);
            next.wall = WallState::from_drone_angle(d_wall, theta, yaw);
            next.wall_valid = true;
        }
        (None, None) => {
            next.wall_valid = false;
        }
    }

    let fused = FusedDepths {
        d_l: next.left.map(|s| s.d),
        d_r: next.right.map(|s| s.d),
        wall: next.wall,
    };
    (next, fused)
}

/// Stateful wrapper around [`fuse_pair`] that tracks the previous pose.
#[derive(Debug, Clone)]
pub struct PairFusion {
    cfg: FusionConfig,
    state: PairState,
    pose: Option<Pose2>,
}

impl PairFusion {
    pub fn new(cfg: FusionConfig) -> Result<Self, DepthError> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            state: PairState::default(),
            pose: None,
        })
    }

    pub fn config(&self) -> &FusionConfig {
        &self.cfg
    }

    pub fn state(&self) -> &PairState {
        &self.state
    }

    pub fn reset(&mut self) {
        self.state = PairState::default();
        self.pose = None;
    }

    pub fn step(&mut self, pose: Pose2, m_l: Option<f64>, m_r: Option<f64>) -> FusedDepths {
        let prev = self.pose.unwrap_or(pose);
        let odom = OdomDelta::between(&prev, &pose);
        let (next, fused) = fuse_pair(&self.state, &prev, &odom, m_l, m_r, &self.cfg);
        self.state = next;
        self.pose = Some(pose);
        fused
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coasting_whisker_grows_variance_then_resets() {
        let cfg = FusionConfig::default();
        let mut f = PairFusion::new(cfg).unwrap();
        let pose = Pose2::new(0.0, 0.0, 0.0);
        f.step(pose, Some(0.08), Some(0.08));
        f.step(pose, Some(0.08), Some(0.08));
        let mut last = f.state().right.unwrap().p;
        for _ in 0..cfg.max_coast_ticks {
            let out = f.step(pose, Some(0.08), None);
            assert!(out.d_r.is_some());
            let p = f.state().right.unwrap().p;
            assert!(p > last);
            last = p;
        }
        let out = f.step(pose, Some(0.08), None);
        assert!(out.d_r.is_none());
    }

    #[test]
    fn measurement_only_passes_through() {
        let mut f = PairFusion::new(FusionConfig::with_variant(FusionVariant::MeasurementOnly)).unwrap();
        let out = f.step(Pose2::default(), Some(0.07), None);
        assert_eq!(out.d_l, Some(0.07));
        assert_eq!(out.d_r, None);
    }

    #[test]
    fn wall_angle_tracks_depth_difference() {
        let mut f = PairFusion::new(FusionConfig::default()).unwrap();
        let out = f.step(Pose2::default(), Some(0.10), Some(0.06));
        assert!((out.wall.theta_wall_d - 0.8f64.atan()).abs() < 1e-12);
    }

    #[test]
    fn invalid_noise_rejected() {
        let cfg = FusionConfig {
            q: 0.0,
            ..FusionConfig::default()
        };
        assert!(PairFusion::new(cfg).is_err());
    }
}
