//! Sensor-model training and table-style depth metrics.

use crate::dataset::{split_rows, Split, SweepRow};
use crate::HarnessError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use whisker_core::depth::{
    mlp_train, wall_angle_from_depths, DepthModel, FusionConfig, FusionVariant, Normalizer, PairFusion,
    TrainConfig, TrainOutcome,
};
use whisker_core::geom::Point2;
use whisker_core::rng::derive_seed;
use whisker_core::signal::CHANNELS;
use whisker_core::sim::Side;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub architecture: Vec<usize>,
    pub train: TrainConfig,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            architecture: vec![CHANNELS, 32, 32, 1],
            train: TrainConfig {
                epochs: 400,
                lr: 3e-3,
                batch_size: 32,
                target_mse: 0.0,
                ..TrainConfig::default()
            },
        }
    }
}

/// Fits the normalizer and network on both whiskers of the training split.
/// Weight initialization and batch order derive from `seed`.
pub fn train_depth_model(
    rows: &[SweepRow],
    cfg: &ModelConfig,
    seed: u64,
) -> Result<(DepthModel, TrainOutcome), HarnessError> {
    let train = split_rows(rows, Split::Train);
    if train.is_empty() {
        return Err(HarnessError::EmptySplit("train"));
    }
    let mut raw = Vec::with_capacity(2 * train.len());
    let mut targets = Vec::with_capacity(2 * train.len());
    for r in &train {
        for side in Side::BOTH {
            raw.push(r.channels(side));
            targets.push(r.truth(side));
        }
    }
    let normalizer = Normalizer::fit(&raw)?;
    let inputs: Vec<[f64; CHANNELS]> = raw.iter().map(|x| normalizer.normalize(x)).collect();
    let train_cfg = TrainConfig {
        seed: derive_seed(seed, "mlp", 0),
        ..cfg.train.clone()
    };
    let (mlp, outcome) = mlp_train(&inputs, &targets, &cfg.architecture, &train_cfg)?;
    Ok((DepthModel::new(normalizer, mlp)?, outcome))
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorStat {
    pub mae: f64,
    pub rmse: f64,
    pub n: usize,
}

impl ErrorStat {
    pub fn from_errors(errors: &[f64]) -> Self {
        if errors.is_empty() {
            return Self::default();
        }
        let n = errors.len() as f64;
        Self {
            mae: errors.iter().map(|e| e.abs()).sum::<f64>() / n,
            rmse: (errors.iter().map(|e| e * e).sum::<f64>() / n).sqrt(),
            n: errors.len(),
        }
    }
}

/// One estimator row: depth errors in mm, orientation in degrees,
/// reconstruction in mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariantMetrics {
    pub variant: FusionVariant,
    pub left_mm: ErrorStat,
    pub right_mm: ErrorStat,
    pub orientation_deg: ErrorStat,
    pub reconstruction_mm: ErrorStat,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricsReport {
    pub variants: Vec<VariantMetrics>,
}

impl MetricsReport {
    pub fn get(&self, v: FusionVariant) -> Option<&VariantMetrics> {
        self.variants.iter().find(|m| m.variant == v)
    }

    /// Tidy CSV: variant, category, mae, rmse, n.
    pub fn to_csv(&self) -> Result<Vec<u8>, HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["variant", "category", "mae", "rmse", "n"])?;
        for m in &self.variants {
            for (cat, s) in [
                ("whisker_left_mm", m.left_mm),
                ("whisker_right_mm", m.right_mm),
                ("orientation_deg", m.orientation_deg),
                ("reconstruction_mm", m.reconstruction_mm),
            ] {
                w.write_record([
                    m.variant.label().to_string(),
                    cat.to_string(),
                    s.mae.to_string(),
                    s.rmse.to_string(),
                    s.n.to_string(),
                ])?;
            }
        }
        w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))
    }
}

/// Runs `variant` over every test flight with measurements from `predict`.
pub fn eval_depth_with<F>(
    rows: &[SweepRow],
    predict: F,
    variant: FusionVariant,
    fusion: &FusionConfig,
) -> Result<VariantMetrics, HarnessError>
where
    F: Fn(&SweepRow, Side) -> f64,
{
    let test = split_rows(rows, Split::Test);
    if test.is_empty() {
        return Err(HarnessError::EmptySplit("test"));
    }
    let mut flights: BTreeMap<u32, Vec<&SweepRow>> = BTreeMap::new();
    for r in &test {
        flights.entry(r.episode).or_default().push(r);
    }
    let cfg = FusionConfig { variant, ..*fusion };
    let mounts = cfg.mounts();
    let mut errs = [Vec::new(), Vec::new()];
    let mut orient = Vec::new();
    let mut recon = Vec::new();
    for flight in flights.values() {
        let mut fusion = PairFusion::new(cfg)?;
        for r in flight {
            let pose = r.pose();
            let out = fusion.step(pose, Some(predict(r, Side::Left)), Some(predict(r, Side::Right)));
            let (Some(d_l), Some(d_r)) = (out.d_l, out.d_r) else {
                continue;
            };
            errs[0].push((d_l - r.d_l_gt) * 1e3);
            errs[1].push((d_r - r.d_r_gt) * 1e3);
            let est = wall_angle_from_depths(d_l, d_r, cfg.spacing);
            let truth = wall_angle_from_depths(r.d_l_gt, r.d_r_gt, cfg.spacing);
            orient.push((est - truth).to_degrees());
            let wall = r.wall()?;
            for (d, m) in [d_l, d_r].iter().zip(mounts) {
                let p: Point2 = pose.body_to_world(m) + pose.forward() * *d;
                recon.push(wall.distance_to(p) * 1e3);
            }
        }
    }
    Ok(VariantMetrics {
        variant,
        left_mm: ErrorStat::from_errors(&errs[0]),
        right_mm: ErrorStat::from_errors(&errs[1]),
        orientation_deg: ErrorStat::from_errors(&orient),
        reconstruction_mm: ErrorStat::from_errors(&recon),
    })
}

pub fn eval_depth(
    rows: &[SweepRow],
    model: &DepthModel,
    variant: FusionVariant,
    fusion: &FusionConfig,
) -> Result<VariantMetrics, HarnessError> {
    eval_depth_with(rows, |r, s| model.predict(&r.channels(s)), variant, fusion)
}

/// All three estimator variants.
pub fn eval_all(rows: &[SweepRow], model: &DepthModel, fusion: &FusionConfig) -> Result<MetricsReport, HarnessError> {
    let variants = FusionVariant::ALL
        .iter()
        .map(|v| eval_depth(rows, model, *v, fusion))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MetricsReport { variants })
}
