//! Trained sensor model: normalizer plus network, stored as JSON.

use super::mlp::MlpModel;
use super::normalizer::Normalizer;
use super::DepthError;
use crate::signal::CHANNELS;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const MODEL_FORMAT: &str = "whisker-depth-mlp/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthModel {
    pub format: String,
    pub architecture: Vec<usize>,
    pub normalizer: Normalizer,
    pub mlp: MlpModel,
}

impl DepthModel {
    pub fn new(normalizer: Normalizer, mlp: MlpModel) -> Result<Self, DepthError> {
        if mlp.input_dim() != CHANNELS {
            return Err(DepthError::DimMismatch {
                expected: CHANNELS,
                actual: mlp.input_dim(),
            });
        }
        Ok(Self {
            format: MODEL_FORMAT.to_string(),
            architecture: mlp.architecture(),
            normalizer,
            mlp,
        })
    }

    /// Depth in meters from filtered signals.
    pub fn predict(&self, s_p: &[f64; CHANNELS]) -> f64 {
        let x = self.normalizer.normalize(s_p);
        // Width was checked at construction.
        self.mlp.forward(&x).unwrap_or(f64::NAN)
    }

    pub fn to_json(&self) -> Result<String, DepthError> {
        serde_json::to_string_pretty(self).map_err(|e| DepthError::ModelFile(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, DepthError> {
        let m: DepthModel =
            serde_json::from_str(text).map_err(|e| DepthError::ModelFile(e.to_string()))?;
        if m.format != MODEL_FORMAT {
            return Err(DepthError::ModelFile(format!("unknown format {:?}", m.format)));
        }
        if m.architecture != m.mlp.architecture() {
            return Err(DepthError::ModelFile(
                "architecture header disagrees with layers".into(),
            ));
        }
        Self::new(m.normalizer, m.mlp)
    }

    pub fn save(&self, path: &Path) -> Result<(), DepthError> {
        std::fs::write(path, self.to_json()?).map_err(|e| DepthError::ModelFile(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, DepthError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| DepthError::ModelFile(e.to_string()))?;
        Self::from_json(&text)
    }
}
