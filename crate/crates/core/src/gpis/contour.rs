//! Marching squares with directed segments chained into polylines.
//!
//! Every emitted segment keeps the region at or above the level on its left,
//! so chained loops have a consistent winding.

use super::GpisError;
use crate::geom::{Grid2, Point2};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// One connected piece of the level set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub points: Vec<Point2>,
    pub closed: bool,
}

impl Contour {
    /// Shoelace area; positive for counterclockwise loops.
    pub fn signed_area(&self) -> f64 {
        let n = self.points.len();
        if n < 3 {
            return 0.0;
        }
        let mut s = 0.0;
        for i in 0..n {
            let a = self.points[i];
            let b = self.points[(i + 1) % n];
            s += a.cross(b);
        }
        0.5 * s
    }

    pub fn length(&self) -> f64 {
        let mut l: f64 = self.points.windows(2).map(|w| w[0].distance(w[1])).sum();
        if self.closed && self.points.len() > 2 {
            l += self.points[self.points.len() - 1].distance(self.points[0]);
        }
        l
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Edge {
    B,
    R,
    T,
    L,
}

/// Segments for each of the 16 corner configurations, as (from, to) edges.
/// Bits: bottom-left 1, bottom-right 2, top-right 4, top-left 8.
fn cell_segments(case: u8, center_above: bool) -> &'static [(Edge, Edge)] {
    use Edge::*;
    match case {
        0 | 15 => &[],
        1 => &[(B, L)],
        2 => &[(R, B)],
        3 => &[(R, L)],
        4 => &[(T, R)],
        5 if center_above => &[(B, R), (T, L)],
        5 => &[(B, L), (T, R)],
        6 => &[(T, B)],
        7 => &[(T, L)],
        8 => &[(L, T)],
        9 => &[(B, T)],
        10 if center_above => &[(L, B), (R, T)],
        10 => &[(R, B), (L, T)],
        11 => &[(R, T)],
        12 => &[(L, R)],
        13 => &[(B, R)],
        14 => &[(L, B)],
        _ => unreachable!("case index is 4 bits"),
    }
}

/// Extracts the `level` set of `grid`. Ambiguous saddle cells are resolved
/// with `center`, evaluated at the cell center; when absent the mean of the
/// four corners is used.
pub fn marching_squares(
    grid: &Grid2,
    level: f64,
    center: Option<&dyn Fn(Point2) -> f64>,
) -> Result<Vec<Contour>, GpisError> {
    let (nx, ny) = (grid.nx, grid.ny);
    let h_count = ny * (nx - 1);
    let edge_id = |i: usize, j: usize, e: Edge| -> usize {
        match e {
            Edge::B => j * (nx - 1) + i,
            Edge::T => (j + 1) * (nx - 1) + i,
            Edge::L => h_count + j * nx + i,
            Edge::R => h_count + j * nx + i + 1,
        }
    };
    let crossing = |i: usize, j: usize, e: Edge| -> Point2 {
        let (a, b) = match e {
            Edge::B => ((i, j), (i + 1, j)),
            Edge::T => ((i, j + 1), (i + 1, j + 1)),
            Edge::L => ((i, j), (i, j + 1)),
            Edge::R => ((i + 1, j), (i + 1, j + 1)),
        };
        let va = grid.value(a.0, a.1);
        let vb = grid.value(b.0, b.1);
        let t = if (vb - va).abs() > 0.0 {
            ((level - va) / (vb - va)).clamp(0.0, 1.0)
        } else {
            0.5
        };
        let pa = grid.point(a.0, a.1);
        let pb = grid.point(b.0, b.1);
        pa + (pb - pa) * t
    };

    // segment index -> (from edge, to edge)
    let mut segs: Vec<(usize, usize)> = Vec::new();
    let mut point_of: HashMap<usize, Point2> = HashMap::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let bl = grid.value(i, j);
            let br = grid.value(i + 1, j);
            let tr = grid.value(i + 1, j + 1);
            let tl = grid.value(i, j + 1);
            let case = (bl >= level) as u8
                | ((br >= level) as u8) << 1
                | ((tr >= level) as u8) << 2
                | ((tl >= level) as u8) << 3;
            if case == 0 || case == 15 {
                continue;
            }
            let center_above = if case == 5 || case == 10 {
                let c = grid.point(i, j) + Point2::new(0.5, 0.5) * grid.spacing;
                let v = match center {
                    Some(f) => f(c),
                    None => 0.25 * (bl + br + tr + tl),
                };
                v >= level
            } else {
                false
            };
            for &(from, to) in cell_segments(case, center_above) {
                let a = edge_id(i, j, from);
                let b = edge_id(i, j, to);
                point_of.entry(a).or_insert_with(|| crossing(i, j, from));
                point_of.entry(b).or_insert_with(|| crossing(i, j, to));
                segs.push((a, b));
            }
        }
    }
    if segs.is_empty() {
        return Err(GpisError::EmptyContour);
    }

    let mut outgoing: HashMap<usize, usize> = HashMap::with_capacity(segs.len());
    let mut has_incoming: HashMap<usize, bool> = HashMap::with_capacity(segs.len());
    for (k, &(a, b)) in segs.iter().enumerate() {
        outgoing.insert(a, k);
        has_incoming.insert(b, true);
    }
    let mut used = vec![false; segs.len()];
    let mut contours = Vec::new();

    let follow = |start: usize, used: &mut Vec<bool>| -> (Vec<usize>, bool) {
        let mut edges = vec![segs[start].0];
        let mut k = start;
        loop {
            used[k] = true;
            let next_edge = segs[k].1;
            match outgoing.get(&next_edge) {
                Some(&n) if !used[n] => {
                    edges.push(next_edge);
                    k = n;
                }
                Some(&n) if n == start => return (edges, true),
                _ => {
                    edges.push(next_edge);
                    return (edges, false);
                }
            }
        }
    };

    // Open paths start at edges nobody enters.
    for k in 0..segs.len() {
        if !used[k] && !has_incoming.contains_key(&segs[k].0) {
            let (edges, closed) = follow(k, &mut used);
            contours.push((edges, closed));
        }
    }
    for k in 0..segs.len() {
        if !used[k] {
            let (edges, closed) = follow(k, &mut used);
            contours.push((edges, closed));
        }
    }

    Ok(contours
        .into_iter()
        .map(|(edges, closed)| {
            let mut points: Vec<Point2> = Vec::with_capacity(edges.len());
            for e in edges {
                let p = point_of[&e];
                if points.last().is_none_or(|q| q.distance(p) > 1e-12) {
                    points.push(p);
                }
            }
            if closed && points.len() > 1 && points[0].distance(points[points.len() - 1]) <= 1e-12 {
                points.pop();
            }
            Contour { points, closed }
        })
        .filter(|c| !c.points.is_empty())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_field_gives_vertical_line() {
        let g = Grid2::from_fn(Point2::ZERO, 0.1, 11, 11, |p| p.x - 0.55).unwrap();
        let cs = marching_squares(&g, 0.0, None).unwrap();
        assert_eq!(cs.len(), 1);
        assert!(!cs[0].closed);
        assert_eq!(cs[0].points.len(), 11);
        for p in &cs[0].points {
            assert!((p.x - 0.55).abs() < 1e-12);
        }
        // Region x ≥ 0.55 lies on the left, so the path runs downward.
        assert!(cs[0].points[0].y > cs[0].points[10].y);
    }

    #[test]
    fn empty_field_errors() {
        let g = Grid2::from_fn(Point2::ZERO, 0.1, 5, 5, |_| 1.0).unwrap();
        assert_eq!(marching_squares(&g, 0.0, None), Err(GpisError::EmptyContour));
    }

    #[test]
    fn saddle_uses_center_sample() {
        // Corners: bl=+1, br=-1, tr=+1, tl=-1 (case 5).
        let g = Grid2::new(Point2::ZERO, 1.0, 2, 2, vec![1.0, -1.0, -1.0, 1.0]).unwrap();
        let above = |_: Point2| 1.0;
        let below = |_: Point2| -1.0;
        let joined = marching_squares(&g, 0.0, Some(&above)).unwrap();
        let split = marching_squares(&g, 0.0, Some(&below)).unwrap();
        let mid = |c: &Contour| (c.points[0] + c.points[1]) * 0.5;
        // Center above: the above-level corners connect through the middle,
        // so the cut segments hug the below-level corners (1,0) and (0,1).
        let mut m: Vec<Point2> = joined.iter().map(mid).collect();
        m.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());
        assert_eq!(m, vec![Point2::new(0.25, 0.75), Point2::new(0.75, 0.25)]);
        let mut m: Vec<Point2> = split.iter().map(mid).collect();
        m.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());
        assert_eq!(m, vec![Point2::new(0.25, 0.25), Point2::new(0.75, 0.75)]);
    }
}
