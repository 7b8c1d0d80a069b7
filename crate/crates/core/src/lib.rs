//! Whisker-based tactile navigation for micro aerial vehicles.
//!
//! The crate is organised as a pipeline:
//!
//! * [`signal`]: drift compensation, bandpass filtering and contact detection
//!   on raw barometer counts.
//! * [`mechanics`]: pseudo-rigid-body beam model of a whisker.
//! * [`depth`]: sensor model (normalizer + MLP), wall-relative process model
//!   and Kalman fusion.
//! * [`gpis`]: Gaussian-process implicit surfaces, contours, corners and
//!   acquisition.
//! * [`nav`]: wall-following state machine and the exploration mission.
//! * [`sim`]: deterministic planar simulator.

pub mod depth;
pub mod geom;
pub mod gpis;
pub mod mechanics;
pub mod nav;
pub mod rng;
pub mod signal;
pub mod sim;

pub use geom::{Point2, Pose2, Segment2};
