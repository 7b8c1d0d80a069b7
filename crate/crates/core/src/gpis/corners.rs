//! Clustering of high negative curvature contour points.

use crate::geom::Point2;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CornerSet {
    pub clusters: Vec<Point2>,
    /// Curvature threshold q, 1/m.
    pub threshold: f64,
}

impl CornerSet {
    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    /// Concatenates corner sets from several contours.
    pub fn merge_all(sets: impl IntoIterator<Item = CornerSet>, threshold: f64) -> CornerSet {
        CornerSet {
            clusters: sets.into_iter().flat_map(|s| s.clusters).collect(),
            threshold,
        }
    }
}

/// Groups maximal runs of consecutive points with `κ < q` and returns their
/// centroids. On a closed contour a run touching the first point and a run
/// touching the last point are the same corner; their centroids are averaged.
/// Non-finite curvature never counts as a corner.
pub fn detect_corners(points: &[Point2], kappa: &[f64], q: f64, closed: bool) -> CornerSet {
    assert_eq!(points.len(), kappa.len(), "curvature per contour point");
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start: Option<usize> = None;
    for (i, &k) in kappa.iter().enumerate() {
        let hot = k < q;
        match (hot, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, kappa.len() - 1));
    }

    let centroid = |(s, e): (usize, usize)| -> Point2 {
        let sum = points[s..=e].iter().fold(Point2::ZERO, |acc, p| acc + *p);
        sum * (1.0 / (e - s + 1) as f64)
    };
    let mut clusters: Vec<Point2> = runs.iter().map(|&r| centroid(r)).collect();

    if closed && runs.len() >= 2 {
        let first = runs[0];
        let last = runs[runs.len() - 1];
        if first.0 == 0 && last.1 == kappa.len() - 1 {
            let merged = merge_wraparound(clusters[0], clusters[clusters.len() - 1]);
            clusters.pop();
            clusters[0] = merged;
        }
    }
    CornerSet {
        clusters,
        threshold: q,
    }
}

/// `(c_1 + c_m) / 2`.
pub fn merge_wraparound(c1: Point2, cm: Point2) -> Point2 {
    (c1 + cm) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(n: usize) -> Vec<Point2> {
        (0..n).map(|i| Point2::new(i as f64, 0.0)).collect()
    }

    #[test]
    fn no_hot_points() {
        let c = detect_corners(&pts(5), &[0.0, -1.0, -4.9, 3.0, f64::NAN], -5.0, true);
        assert!(c.is_empty());
    }

    #[test]
    fn single_cluster_centroid() {
        let p = vec![Point2::new(5.0, 5.0), Point2::new(0.0, 0.0), Point2::new(0.0, 2.0), Point2::new(9.0, 9.0)];
        let c = detect_corners(&p, &[0.0, -10.0, -10.0, 0.0], -5.0, false);
        assert_eq!(c.clusters, vec![Point2::new(0.0, 1.0)]);
    }

    #[test]
    fn wraparound_merge() {
        let p = vec![Point2::new(0.0, 0.0), Point2::new(7.0, 7.0), Point2::new(2.0, 2.0)];
        let k = [-9.0, 0.0, -9.0];
        let closed = detect_corners(&p, &k, -5.0, true);
        assert_eq!(closed.clusters, vec![Point2::new(1.0, 1.0)]);
        let open = detect_corners(&p, &k, -5.0, false);
        assert_eq!(open.len(), 2);
    }

    #[test]
    fn runs_are_maximal() {
        let k = [-6.0, -7.0, 0.0, -8.0, 1.0, -9.0, -9.0, -9.0];
        let c = detect_corners(&pts(8), &k, -5.0, false);
        assert_eq!(
            c.clusters,
            vec![Point2::new(0.5, 0.0), Point2::new(3.0, 0.0), Point2::new(6.0, 0.0)]
        );
    }
}
