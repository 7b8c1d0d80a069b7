//! Wall-relative process model for forward tactile depth.
//!
//! Depth `d` is measured from a whisker mount point along the drone heading
//! to a locally planar wall. The wall is described in the drone frame by
//! `theta_wall_D`, the angle from the wall normal (pointing into the wall)
//! to the heading, and in the world frame by `theta_wall_W`, the direction
//! of the wall line obtained by rotating that normal by −90°.

use super::DepthError;
use crate::geom::{normalize_angle, Pose2};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WallState {
    /// Perpendicular distance to the wall, m.
    pub d_wall: f64,
    pub theta_wall_d: f64,
    pub theta_wall_w: f64,
}

impl WallState {
    /// Wall seen at drone-frame angle `theta_wall_d` from a drone with yaw `yaw`.
    pub fn from_drone_angle(d_wall: f64, theta_wall_d: f64, yaw: f64) -> Self {
        Self {
            d_wall,
            theta_wall_d: normalize_angle(theta_wall_d),
            theta_wall_w: wall_world_angle(theta_wall_d, yaw),
        }
    }
}

/// World direction of the wall line for a drone-frame wall angle.
pub fn wall_world_angle(theta_wall_d: f64, yaw: f64) -> f64 {
    normalize_angle(yaw - theta_wall_d - FRAC_PI_2)
}

/// Drone-frame wall angle seen at yaw `yaw` for a wall line direction.
pub fn wall_drone_angle(theta_wall_w: f64, yaw: f64) -> f64 {
    normalize_angle(yaw - theta_wall_w - FRAC_PI_2)
}

/// Drone displacement between two control ticks, world frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OdomDelta {
    pub dx: f64,
    pub dy: f64,
    pub dpsi: f64,
}

impl OdomDelta {
    pub fn between(a: &Pose2, b: &Pose2) -> Self {
        Self {
            dx: b.x - a.x,
            dy: b.y - a.y,
            dpsi: normalize_angle(b.yaw - a.yaw),
        }
    }

    pub fn apply(&self, pose: &Pose2) -> Pose2 {
        Pose2::new(pose.x + self.dx, pose.y + self.dy, pose.yaw + self.dpsi)
    }

    pub fn is_finite(&self) -> bool {
        self.dx.is_finite() && self.dy.is_finite() && self.dpsi.is_finite()
    }
}

/// `atan((d_l − d_r)/s)`: positive when the left whisker reads deeper.
pub fn wall_angle_from_depths(d_l: f64, d_r: f64, s: f64) -> f64 {
    ((d_l - d_r) / s).atan()
}

/// Predicted depth after moving from `pose_k` to `pose_k1`.
///
/// Both poses are those of the point the depth is measured from.
pub fn process_predict(
    d_k: f64,
    wall: &WallState,
    pose_k: &Pose2,
    pose_k1: &Pose2,
) -> Result<f64, DepthError> {
    let theta_k1 = wall_drone_angle(wall.theta_wall_w, pose_k1.yaw);
    let cos_k1 = theta_k1.cos();
    if cos_k1.abs() <= 1e-6 {
        return Err(DepthError::GrazingAngle);
    }
    let dx = pose_k1.x - pose_k.x;
    let dy = pose_k1.y - pose_k.y;
    let dp = dx.hypot(dy);
    let shift = if dp > 0.0 {
        dp * (wall.theta_wall_w - dy.atan2(dx)).sin()
    } else {
        0.0
    };
    Ok((shift + d_k * wall.theta_wall_d.cos()) / cos_k1)
}
