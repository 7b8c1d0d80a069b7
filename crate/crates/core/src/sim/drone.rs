//! Kinematic quadrotor with two forward whiskers.

use super::world::World;
use super::SimError;
use crate::geom::{Point2, Pose2};
use crate::mechanics::WhiskerSpec;
use crate::nav::VelocityCmd;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DroneParams {
    /// Left and right whisker mounts, body frame.
    pub mounts: [Point2; 2],
    pub whisker: WhiskerSpec,
    pub v_max: f64,
    pub omega_max: f64,
    /// Collision radius of the body, m.
    pub radius: f64,
}

impl Default for DroneParams {
    fn default() -> Self {
        Self {
            mounts: [Point2::new(0.05, 0.025), Point2::new(0.05, -0.025)],
            whisker: WhiskerSpec::default(),
            v_max: 0.20,
            omega_max: 0.5,
            radius: 0.025,
        }
    }
}

impl DroneParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let [l, r] = self.mounts;
        if !((l.x - r.x).abs() < 1e-12 && (l.y + r.y).abs() < 1e-12 && l.y > 0.0) {
            return Err(SimError::InvalidConfig("whisker mounts must be symmetric, left first".into()));
        }
        self.whisker
            .validate()
            .map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        if !(self.v_max > 0.0 && self.omega_max > 0.0 && self.radius >= 0.0) {
            return Err(SimError::InvalidConfig("limits must be positive".into()));
        }
        Ok(())
    }

    /// Lateral spacing between the whiskers.
    pub fn spacing(&self) -> f64 {
        self.mounts[0].y - self.mounts[1].y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DroneModel {
    pub pose: Pose2,
    pub params: DroneParams,
}

impl DroneModel {
    pub fn new(pose: Pose2, params: DroneParams) -> Self {
        Self { pose, params }
    }

    /// Forward-Euler step of the body-frame command. A step that would bring
    /// the body within `radius` of a wall is refused and reported.
    pub fn step(&self, world: &World, cmd: &VelocityCmd, dt: f64) -> Result<DroneModel, SimError> {
        if !(dt > 0.0) {
            return Err(SimError::BadTimeStep);
        }
        let cmd = cmd.saturate(self.params.v_max, self.params.omega_max);
        let v_world = self.pose.forward() * cmd.v_forward + self.pose.left() * cmd.v_side;
        let p = self.pose.position() + v_world * dt;
        let pose = Pose2::new(p.x, p.y, self.pose.yaw + cmd.yaw_rate * dt);
        if world.clearance(p) < self.params.radius {
            return Err(SimError::Collision(self.pose));
        }
        Ok(DroneModel { pose, ..*self })
    }

    /// World pose of whisker mount `i` (0 left, 1 right).
    pub fn mount_pose(&self, i: usize) -> Pose2 {
        self.pose.offset(self.params.mounts[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_command_keeps_pose() {
        let w = World::empty(5.0);
        let d = DroneModel::new(Pose2::new(0.3, -0.2, 1.0), DroneParams::default());
        assert_eq!(d.step(&w, &VelocityCmd::ZERO, 0.02).unwrap().pose, d.pose);
    }

    #[test]
    fn euler_step() {
        let w = World::empty(5.0);
        let d = DroneModel::new(Pose2::default(), DroneParams::default());
        let n = d.step(&w, &VelocityCmd::forward(0.2), 0.02).unwrap();
        assert!((n.pose.x - 0.004).abs() < 1e-15);
        assert_eq!(n.pose.y, 0.0);
    }

    #[test]
    fn full_rotation_returns_to_start() {
        let w = World::empty(5.0);
        let omega = 0.5;
        let dt = 2.0 * PI / omega / 1000.0;
        let mut d = DroneModel::new(Pose2::new(0.0, 0.0, 0.4), DroneParams::default());
        for _ in 0..1000 {
            d = d.step(&w, &VelocityCmd::turn(omega), dt).unwrap();
        }
        assert!((d.pose.yaw - 0.4).abs() < 1e-9);
    }

    #[test]
    fn wall_stops_the_body() {
        let w = World::straight_wall(0.032, 1.0, 0.0).unwrap();
        let d = DroneModel::new(Pose2::default(), DroneParams::default());
        let n = d.step(&w, &VelocityCmd::forward(0.2), 0.02).unwrap();
        assert!(matches!(n.step(&w, &VelocityCmd::forward(0.2), 0.02), Err(SimError::Collision(p)) if p == n.pose));
        assert!(DroneModel::new(Pose2::default(), DroneParams::default())
            .step(&w, &VelocityCmd::ZERO, 0.0)
            .is_err());
    }
}
