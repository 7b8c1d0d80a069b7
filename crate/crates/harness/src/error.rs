use std::path::PathBuf;
use thiserror::Error;
use whisker_core::depth::DepthError;
use whisker_core::geom::GeomError;
use whisker_core::gpis::GpisError;
use whisker_core::mechanics::MechanicsError;
use whisker_core::signal::SignalError;
use whisker_core::sim::SimError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("file not found: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("flight {0} never touched the wall")]
    NoContact(u32),
    #[error("dataset has no ground truth in row {0}")]
    MissingGroundTruth(usize),
    #[error("dataset has no {0} rows")]
    EmptySplit(&'static str),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Depth(#[from] DepthError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Gpis(#[from] GpisError),
    #[error(transparent)]
    Mechanics(#[from] MechanicsError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

impl HarnessError {
    /// Stable machine-readable error kind.
    pub fn code(&self) -> &'static str {
        match self {
            HarnessError::InvalidConfig(_) => "invalid_config",
            HarnessError::MissingFile(_) => "missing_file",
            HarnessError::NoContact(_) => "no_contact",
            HarnessError::MissingGroundTruth(_) => "missing_ground_truth",
            HarnessError::EmptySplit(_) => "empty_split",
            HarnessError::Io(_) => "io",
            HarnessError::Json(_) => "json",
            HarnessError::Csv(_) => "csv",
            HarnessError::Sim(_) => "sim",
            HarnessError::Depth(_) => "depth",
            HarnessError::Signal(_) => "signal",
            HarnessError::Gpis(_) => "gpis",
            HarnessError::Mechanics(_) => "mechanics",
            HarnessError::Geom(_) => "geometry",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.code(), "message": self.to_string() }).to_string()
    }
}
