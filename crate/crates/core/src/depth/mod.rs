//! Tactile depth estimation: sensor model, process model and Kalman fusion.

pub mod fusion;
pub mod kalman;
pub mod mlp;
pub mod model_io;
pub mod normalizer;
pub mod process;

pub use fusion::{fuse_pair, FusedDepths, FusionConfig, FusionVariant, PairFusion, PairState};
pub use kalman::{kf_predict, kf_step, KfState};
pub use mlp::{mlp_train, Layer, MlpModel, TrainConfig, TrainOutcome};
pub use model_io::DepthModel;
pub use normalizer::Normalizer;
pub use process::{process_predict, wall_angle_from_depths, OdomDelta, WallState};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DepthError {
    #[error("normalizer sigma must be positive (channel {0})")]
    ZeroSigma(usize),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimMismatch { expected: usize, actual: usize },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("wall is nearly parallel to the heading; depth undefined")]
    GrazingAngle,
    #[error("invalid fusion parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("model file: {0}")]
    ModelFile(String),
}
