//! Variance-seeking target selection with a repulsive corner penalty.

use super::corners::CornerSet;
use super::model::GpisModel;
use super::GpisError;
use crate::geom::Point2;
use serde::{Deserialize, Serialize};

/// `min_k −exp(−‖x − c_k‖² / (2 c_pen²))`, or 0 without corners.
pub fn corner_penalty(x: Point2, corners: &CornerSet, c_pen: f64) -> f64 {
    corners
        .clusters
        .iter()
        .map(|c| -(-(x - *c).norm_squared() / (2.0 * c_pen * c_pen)).exp())
        .fold(0.0, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionChoice {
    pub index: usize,
    pub point: Point2,
    pub variance: f64,
    pub penalty: f64,
    pub score: f64,
}

/// Picks the candidate maximizing `variance + penalty`; ties go to the
/// lowest index.
pub fn select_target(
    candidates: &[Point2],
    variances: &[f64],
    corners: &CornerSet,
    c_pen: f64,
) -> Result<AcquisitionChoice, GpisError> {
    if candidates.is_empty() {
        return Err(GpisError::NoCandidates);
    }
    assert_eq!(candidates.len(), variances.len(), "variance per candidate");
    let mut best: Option<AcquisitionChoice> = None;
    for (index, (&point, &variance)) in candidates.iter().zip(variances).enumerate() {
        let penalty = corner_penalty(point, corners, c_pen);
        let score = variance + penalty;
        if best.is_none_or(|b| score > b.score) {
            best = Some(AcquisitionChoice {
                index,
                point,
                variance,
                penalty,
                score,
            });
        }
    }
    best.ok_or(GpisError::NoCandidates)
}

/// [`select_target`] with variances taken from the model posterior.
pub fn acquisition(
    model: &GpisModel,
    corners: &CornerSet,
    candidates: &[Point2],
    c_pen: f64,
) -> Result<AcquisitionChoice, GpisError> {
    let variances: Vec<f64> = candidates.iter().map(|p| model.variance(*p)).collect();
    select_target(candidates, &variances, corners, c_pen)
}
