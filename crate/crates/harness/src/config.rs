//! Experiment configuration shared by every subcommand.

use crate::campaign::RoomConfig;
use crate::dataset::SweepConfig;
use crate::evaluate::ModelConfig;
use crate::prbm::PrbmGridConfig;
use crate::signalbench::SignalBenchConfig;
use crate::HarnessError;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use whisker_core::depth::{FusionConfig, FusionVariant};
use whisker_core::sim::EpisodeConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Sweepdata,
    Train,
    Evaldepth,
    Navigate,
    Explore,
    Prbmgrid,
    Signalbench,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::Sweepdata => "sweepdata",
            Kind::Train => "train",
            Kind::Evaldepth => "evaldepth",
            Kind::Navigate => "navigate",
            Kind::Explore => "explore",
            Kind::Prbmgrid => "prbmgrid",
            Kind::Signalbench => "signalbench",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub kind: Kind,
    /// World JSON; each kind falls back to its built-in world.
    pub world: Option<PathBuf>,
    /// Root seeds. Campaigns run all of them; other kinds use the first.
    pub seeds: Vec<u64>,
    /// Evaluate one estimator variant; all three when unset.
    pub variant: Option<FusionVariant>,
    pub out: PathBuf,
    pub embedded_parity: bool,
    /// Sweep dataset read by `train` and `evaldepth`; defaults to
    /// `<out>/dataset.csv`.
    pub dataset: Option<PathBuf>,
    /// Depth model read by `evaldepth` and barometric missions; defaults to
    /// `<out>/model.json` for `evaldepth`.
    pub model: Option<PathBuf>,
    pub sweep: SweepConfig,
    pub training: ModelConfig,
    pub fusion: FusionConfig,
    pub episode: EpisodeConfig,
    pub room: RoomConfig,
    pub signal: SignalBenchConfig,
    pub prbm: PrbmGridConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: Kind::Navigate,
            world: None,
            seeds: vec![0],
            variant: None,
            out: PathBuf::from("out"),
            embedded_parity: false,
            dataset: None,
            model: None,
            sweep: SweepConfig::default(),
            training: ModelConfig::default(),
            fusion: FusionConfig::default(),
            episode: EpisodeConfig::default(),
            room: RoomConfig::default(),
            signal: SignalBenchConfig::default(),
            prbm: PrbmGridConfig::default(),
        }
    }
}

fn must_exist(p: &Path) -> Result<(), HarnessError> {
    if p.is_file() {
        Ok(())
    } else {
        Err(HarnessError::MissingFile(p.to_path_buf()))
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        must_exist(path)?;
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn root_seed(&self) -> u64 {
        self.seeds.first().copied().unwrap_or(0)
    }

    pub fn dataset_path(&self) -> PathBuf {
        self.dataset.clone().unwrap_or_else(|| self.out.join("dataset.csv"))
    }

    pub fn model_path(&self) -> Option<PathBuf> {
        match (self.kind, &self.model) {
            (_, Some(p)) => Some(p.clone()),
            (Kind::Evaldepth, None) => Some(self.out.join("model.json")),
            _ => None,
        }
    }

    /// Files the run will read, for validation and the manifest.
    pub fn inputs(&self) -> Vec<PathBuf> {
        let mut v: Vec<PathBuf> = self.world.iter().cloned().collect();
        if matches!(self.kind, Kind::Train | Kind::Evaldepth) {
            v.push(self.dataset_path());
        }
        v.extend(self.model_path());
        v
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.seeds.is_empty() {
            return Err(HarnessError::InvalidConfig("seed list is empty".into()));
        }
        for p in self.inputs() {
            must_exist(&p)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let cfg = ExperimentConfig {
            kind: Kind::Explore,
            seeds: vec![0, 1, 2],
            variant: Some(FusionVariant::Full),
            ..ExperimentConfig::default()
        };
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("\"kind\":\"explore\""));
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn partial_json_takes_defaults() {
        let cfg: ExperimentConfig = serde_json::from_str(r#"{"kind":"prbmgrid","seeds":[4]}"#).unwrap();
        assert_eq!(cfg.kind, Kind::Prbmgrid);
        assert_eq!(cfg.root_seed(), 4);
        assert_eq!(cfg.episode, EpisodeConfig::default());
    }

    #[test]
    fn empty_seeds_rejected() {
        let cfg = ExperimentConfig {
            seeds: Vec::new(),
            ..ExperimentConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(HarnessError::InvalidConfig(_))));
    }

    #[test]
    fn missing_world_rejected() {
        let cfg = ExperimentConfig {
            world: Some("/nonexistent/world.json".into()),
            ..ExperimentConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(HarnessError::MissingFile(_))));
    }

    #[test]
    fn evaldepth_needs_a_model() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("dataset.csv"), "x").unwrap();
        let cfg = ExperimentConfig {
            kind: Kind::Evaldepth,
            out: dir.path().to_path_buf(),
            ..ExperimentConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(HarnessError::MissingFile(p)) if p.ends_with("model.json")));
    }
}
