//! One full mapping pass: fit, contour, corners, target, and its JSON export.

use super::acquisition::{select_target, AcquisitionChoice};
use super::contour::{marching_squares, Contour};
use super::corners::{detect_corners, CornerSet};
use super::model::{GpisHyper, GpisModel};
use super::{GpisError, INTERIOR_LABEL};
use crate::geom::{Grid2, Point2};
use std::collections::VecDeque;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MapConfig {
    pub hyper: GpisHyper,
    /// Lower-left corner of the mapped workspace.
    pub lo: Point2,
    /// Upper-right corner of the mapped workspace.
    pub hi: Point2,
    /// Nodes per side of the evaluation grid.
    pub grid_n: usize,
    /// Corner curvature threshold q (negative), 1/m.
    pub q: f64,
    /// Penalty length scale; `None` uses the kernel scale c.
    pub c_pen: Option<f64>,
    /// Only contour points within this distance of a training point are
    /// candidates for the next target.
    pub support_radius: f64,
    /// Restrict candidates to the boundary of the below-level region that
    /// holds the interior training points.
    pub free_region_only: bool,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self {
            hyper: GpisHyper::default(),
            lo: Point2::new(-1.5, -1.5),
            hi: Point2::new(1.5, 1.5),
            grid_n: 40,
            q: -5.0,
            c_pen: None,
            support_radius: 0.6,
            free_region_only: true,
        }
    }
}

impl MapConfig {
    pub fn penalty_scale(&self) -> f64 {
        self.c_pen.unwrap_or(self.hyper.c)
    }

    /// Constrained settings for the embedded memory budget.
    pub fn embedded(self) -> Self {
        Self {
            grid_n: 10,
            hyper: GpisHyper {
                cap: 50,
                ..self.hyper
            },
            ..self
        }
    }
}

/// Everything derived from one fit.
#[derive(Debug, Clone)]
pub struct GpisAnalysis {
    pub model: GpisModel,
    pub grid: Grid2,
    pub contours: Vec<Contour>,
    /// Curvature per contour point, NaN where undefined.
    pub curvature: Vec<Vec<f64>>,
    pub corners: CornerSet,
    pub candidates: Vec<Point2>,
    pub target: Option<AcquisitionChoice>,
}

/// Fits the model (with jitter fallback) and runs the mapping pipeline.
/// An empty level set is not an error here: contours and target are empty.
pub fn analyze(points: &[Point2], labels: &[f64], cfg: &MapConfig) -> Result<GpisAnalysis, GpisError> {
    analyze_excluding(points, labels, cfg, &[], 0.0)
}

/// [`analyze`] with candidates within `radius` of any `exclude` point
/// removed before target selection.
pub fn analyze_excluding(
    points: &[Point2],
    labels: &[f64],
    cfg: &MapConfig,
    exclude: &[Point2],
    radius: f64,
) -> Result<GpisAnalysis, GpisError> {
    let model = GpisModel::fit_with_jitter(points, labels, cfg.hyper)?;
    let n = cfg.grid_n.max(2);
    let grid = Grid2::spanning(cfg.lo, cfg.hi, n, |p| model.mean(p))?;
    let center = |p: Point2| model.mean(p);
    let contours = match marching_squares(&grid, 0.0, Some(&center)) {
        Ok(c) => c,
        Err(GpisError::EmptyContour) => Vec::new(),
        Err(e) => return Err(e),
    };
    let mut curvature = Vec::with_capacity(contours.len());
    let mut sets = Vec::with_capacity(contours.len());
    for c in &contours {
        let k: Vec<f64> = c
            .points
            .iter()
            .map(|p| model.query(*p).curvature().unwrap_or(f64::NAN))
            .collect();
        sets.push(detect_corners(&c.points, &k, cfg.q, c.closed));
        curvature.push(k);
    }
    let corners = CornerSet::merge_all(sets, cfg.q);
    let interior: Vec<Point2> = points
        .iter()
        .zip(labels)
        .filter(|(_, l)| **l == INTERIOR_LABEL)
        .map(|(p, _)| *p)
        .collect();
    let region = if cfg.free_region_only && !interior.is_empty() {
        Some(free_region(&grid, 0.0, &interior))
    } else {
        None
    };
    let candidates: Vec<Point2> = contours
        .iter()
        .flat_map(|c| c.points.iter().copied())
        .filter(|p| points.iter().any(|x| x.distance(*p) <= cfg.support_radius))
        .filter(|p| region.as_ref().is_none_or(|r| touches_region(&grid, r, *p)))
        .filter(|p| exclude.iter().all(|x| x.distance(*p) > radius))
        .collect();
    let target = if candidates.is_empty() {
        None
    } else {
        let variances: Vec<f64> = candidates.iter().map(|p| model.variance(*p)).collect();
        Some(select_target(&candidates, &variances, &corners, cfg.penalty_scale())?)
    };
    Ok(GpisAnalysis {
        model,
        grid,
        contours,
        curvature,
        corners,
        candidates,
        target,
    })
}

/// Grid nodes below `level` that are 4-connected to the node nearest any
/// seed point.
pub fn free_region(grid: &Grid2, level: f64, seeds: &[Point2]) -> Vec<bool> {
    let mut inside = vec![false; grid.values.len()];
    let mut queue = VecDeque::new();
    for s in seeds {
        let (i, j) = nearest_node(grid, *s);
        let k = j * grid.nx + i;
        if grid.values[k] < level && !inside[k] {
            inside[k] = true;
            queue.push_back((i, j));
        }
    }
    while let Some((i, j)) = queue.pop_front() {
        let mut visit = |i: usize, j: usize| {
            let k = j * grid.nx + i;
            if !inside[k] && grid.values[k] < level {
                inside[k] = true;
                queue.push_back((i, j));
            }
        };
        if i > 0 {
            visit(i - 1, j);
        }
        if i + 1 < grid.nx {
            visit(i + 1, j);
        }
        if j > 0 {
            visit(i, j - 1);
        }
        if j + 1 < grid.ny {
            visit(i, j + 1);
        }
    }
    inside
}

fn nearest_node(grid: &Grid2, p: Point2) -> (usize, usize) {
    let f = |v: f64, n: usize| (v / grid.spacing).round().clamp(0.0, (n - 1) as f64) as usize;
    (f(p.x - grid.origin.x, grid.nx), f(p.y - grid.origin.y, grid.ny))
}

/// Whether any corner of the grid cell holding `p` is in `region`.
fn touches_region(grid: &Grid2, region: &[bool], p: Point2) -> bool {
    let f = |v: f64, n: usize| (v / grid.spacing).floor().clamp(0.0, (n - 2) as f64) as usize;
    let i = f(p.x - grid.origin.x, grid.nx);
    let j = f(p.y - grid.origin.y, grid.ny);
    [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)]
        .iter()
        .any(|&(a, b)| region[b * grid.nx + a])
}

/// Serializable record of one mapping pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpisSnapshot {
    pub tick: u64,
    pub points: Vec<Point2>,
    pub labels: Vec<f64>,
    pub hyper: GpisHyper,
    pub grid: Grid2,
    pub contours: Vec<Contour>,
    pub corners: Vec<Point2>,
    pub target: Option<Point2>,
}

impl GpisSnapshot {
    pub fn from_analysis(tick: u64, a: &GpisAnalysis) -> Self {
        Self {
            tick,
            points: a.model.points().to_vec(),
            labels: a.model.labels().to_vec(),
            hyper: *a.model.hyper(),
            grid: a.grid.clone(),
            contours: a.contours.clone(),
            corners: a.corners.clusters.clone(),
            target: a.target.map(|t| t.point),
        }
    }
}
