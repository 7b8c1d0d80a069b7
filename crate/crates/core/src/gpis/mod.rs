//! Gaussian-process implicit surfaces for sparse tactile mapping.
//!
//! Training points carry label 0 on surfaces and −1 in free space, so the
//! zero level set of the posterior mean is the reconstructed wall.

pub mod acquisition;
pub mod contour;
pub mod corners;
pub mod kernel;
pub mod linalg;
pub mod model;
pub mod snapshot;

pub use acquisition::{acquisition, corner_penalty, select_target, AcquisitionChoice};
pub use contour::{marching_squares, Contour};
pub use corners::{detect_corners, merge_wraparound, CornerSet};
pub use kernel::{imq_kernel, ImqKernel};
pub use model::{curvature, GpisHyper, GpisModel, SurfaceQuery};
pub use snapshot::{analyze, analyze_excluding, free_region, GpisAnalysis, GpisSnapshot, MapConfig};

use crate::geom::GeomError;
use thiserror::Error;

/// Label of a point on a surface.
pub const SURFACE_LABEL: f64 = 0.0;
/// Label of a point known to be free space.
pub const INTERIOR_LABEL: f64 = -1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GpisError {
    #[error("kernel matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("training set of {got} points exceeds the cap of {cap}")]
    CapExceeded { cap: usize, got: usize },
    #[error("no training data")]
    NoTrainingData,
    #[error("{0} points but {1} labels")]
    LabelMismatch(usize, usize),
    #[error("hyperparameters must satisfy c > 0, beta > 0, sigma2 >= 0")]
    InvalidHyper,
    #[error("gradient vanishes; curvature undefined")]
    ZeroGradient,
    #[error("level set is empty on this grid")]
    EmptyContour,
    #[error("no candidate points")]
    NoCandidates,
    #[error(transparent)]
    Grid(#[from] GeomError),
}
