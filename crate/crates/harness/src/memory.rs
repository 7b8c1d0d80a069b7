//! Working-set accounting for the embedded build.

use serde::{Deserialize, Serialize};
use whisker_core::gpis::{GpisSnapshot, MapConfig};
use whisker_core::signal::CHANNELS;

/// Memory set aside for mapping and estimation on the target.
pub const EMBEDDED_BUDGET_BYTES: usize = 34_000;

/// 32-bit floats on the target.
pub const SCALAR_BYTES: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryItem {
    pub component: String,
    pub scalars: usize,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryReport {
    pub training_points: usize,
    pub grid_n: usize,
    pub scalar_bytes: usize,
    pub items: Vec<MemoryItem>,
    pub gpis_bytes: usize,
    pub estimator_bytes: usize,
    pub total_bytes: usize,
    pub budget_bytes: usize,
    pub within_budget: bool,
    /// Largest training set and contour seen in a run, when one was given.
    pub observed_points: Option<usize>,
    pub observed_contour_vertices: Option<usize>,
}

/// What the estimator keeps resident per whisker pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorFootprint {
    pub architecture: Vec<usize>,
    /// Drift window length in samples.
    pub window: usize,
}

impl Default for EstimatorFootprint {
    fn default() -> Self {
        Self {
            architecture: vec![CHANNELS, 32, 32, 1],
            window: 100,
        }
    }
}

/// Upper bound on marching-squares vertices over an `n`×`n` grid: one per
/// crossed cell edge.
pub fn max_contour_vertices(grid_n: usize) -> usize {
    2 * grid_n * grid_n.saturating_sub(1)
}

/// Peak resident scalars for one map update plus the estimator, at the
/// sizes in `map` (training cap, grid) and `est`.
pub fn memory_report(map: &MapConfig, est: &EstimatorFootprint) -> MemoryReport {
    let n = map.hyper.cap;
    let g = map.grid_n;
    let v = max_contour_vertices(g);
    let gpis = [
        ("gpis.points", 2 * n),
        ("gpis.labels", n),
        ("gpis.cholesky", n * n),
        ("gpis.alpha", n),
        ("gpis.query_scratch", 2 * n),
        ("gpis.grid", g * g),
        ("gpis.contours", 2 * v),
        ("gpis.curvature", v),
        ("gpis.candidates", 2 * v),
    ];
    let params: usize = est.architecture.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
    let activations: usize = est.architecture.iter().sum();
    let estimator = [
        ("mlp.params", params),
        ("mlp.activations", activations),
        ("mlp.normalizer", 2 * CHANNELS),
        ("kf.state", 2 * 2),
        ("kf.wall", 4),
        ("signal.drift_windows", 2 * CHANNELS * est.window * 2),
        ("signal.drift_fits", 2 * CHANNELS * 2),
        ("signal.filters", 2 * CHANNELS * 2),
    ];
    let item = |(c, s): (&str, usize)| MemoryItem {
        component: c.to_string(),
        scalars: s,
        bytes: s * SCALAR_BYTES,
    };
    let gpis_bytes: usize = gpis.iter().map(|(_, s)| s * SCALAR_BYTES).sum();
    let estimator_bytes: usize = estimator.iter().map(|(_, s)| s * SCALAR_BYTES).sum();
    let total = gpis_bytes + estimator_bytes;
    MemoryReport {
        training_points: n,
        grid_n: g,
        scalar_bytes: SCALAR_BYTES,
        items: gpis.into_iter().chain(estimator).map(item).collect(),
        gpis_bytes,
        estimator_bytes,
        total_bytes: total,
        budget_bytes: EMBEDDED_BUDGET_BYTES,
        within_budget: total <= EMBEDDED_BUDGET_BYTES,
        observed_points: None,
        observed_contour_vertices: None,
    }
}

impl MemoryReport {
    /// Records the largest training set and contour among `snapshots`.
    pub fn with_observed(mut self, snapshots: &[GpisSnapshot]) -> Self {
        self.observed_points = snapshots.iter().map(|s| s.points.len()).max();
        self.observed_contour_vertices = snapshots
            .iter()
            .map(|s| s.contours.iter().map(|c| c.points.len()).sum())
            .max();
        self
    }

    /// Observed sizes, when present, fit the accounted ones.
    pub fn observed_within_bounds(&self) -> bool {
        self.observed_points.is_none_or(|p| p <= self.training_points)
            && self
                .observed_contour_vertices
                .is_none_or(|v| v <= max_contour_vertices(self.grid_n))
    }
}
