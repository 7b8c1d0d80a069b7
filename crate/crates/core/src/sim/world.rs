//! Polygonal environments.

use super::SimError;
use crate::geom::{Point2, Segment2};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: Point2,
    pub hi: Point2,
}

impl Bounds {
    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.lo.x && p.x <= self.hi.x && p.y >= self.lo.y && p.y <= self.hi.y
    }
}

/// Walls plus the openings through which a room can be left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct World {
    pub segments: Vec<Segment2>,
    #[serde(default)]
    pub exits: Vec<Segment2>,
    pub bounds: Bounds,
}

impl World {
    pub fn empty(half: f64) -> Self {
        Self {
            segments: Vec::new(),
            exits: Vec::new(),
            bounds: Bounds {
                lo: Point2::new(-half, -half),
                hi: Point2::new(half, half),
            },
        }
    }

    /// Square room of side `side` centred on the origin with a gap of
    /// `exit_width` in the middle of the +x wall, rotated by `rotation`.
    pub fn square_room(side: f64, exit_width: f64, rotation: f64) -> Result<Self, SimError> {
        if !(side > 0.0 && exit_width >= 0.0 && exit_width < side) {
            return Err(SimError::InvalidConfig("need 0 <= exit_width < side".into()));
        }
        let h = side / 2.0;
        let g = exit_width / 2.0;
        let r = |x: f64, y: f64| Point2::new(x, y).rotate(rotation);
        let mut segments = vec![
            Segment2::new(r(h, g), r(h, h))?,
            Segment2::new(r(h, h), r(-h, h))?,
            Segment2::new(r(-h, h), r(-h, -h))?,
            Segment2::new(r(-h, -h), r(h, -h))?,
            Segment2::new(r(h, -h), r(h, -g))?,
        ];
        let mut exits = Vec::new();
        if exit_width > 0.0 {
            exits.push(Segment2::new(r(h, -g), r(h, g))?);
        } else {
            segments[0] = Segment2::new(r(h, -h), r(h, h))?;
            segments.pop();
        }
        let m = h * std::f64::consts::SQRT_2 + 1.0;
        Ok(Self {
            segments,
            exits,
            bounds: Bounds {
                lo: Point2::new(-m, -m),
                hi: Point2::new(m, m),
            },
        })
    }

    /// One wall of `length` whose closest point lies `distance` ahead of the
    /// origin along +x, tilted by `tilt` from perpendicular.
    pub fn straight_wall(distance: f64, length: f64, tilt: f64) -> Result<Self, SimError> {
        let c = Point2::new(distance, 0.0);
        let dir = Point2::new(0.0, 1.0).rotate(tilt);
        let seg = Segment2::new(c - dir * (length / 2.0), c + dir * (length / 2.0))?;
        let m = distance.abs() + length + 1.0;
        Ok(Self {
            segments: vec![seg],
            exits: Vec::new(),
            bounds: Bounds {
                lo: Point2::new(-m, -m),
                hi: Point2::new(m, m),
            },
        })
    }

    /// Three staggered baffles across the +x direction, each offset further
    /// to the left so a drone sliding left clears one and meets the next.
    pub fn baffles() -> Result<Self, SimError> {
        let spec = [(0.6, -0.4, 0.3), (1.3, 0.0, 0.8), (2.0, 0.5, 1.3)];
        let mut segments = Vec::new();
        for (x, y0, y1) in spec {
            segments.push(Segment2::new(Point2::new(x, y0), Point2::new(x, y1))?);
        }
        Ok(Self {
            segments,
            exits: Vec::new(),
            bounds: Bounds {
                lo: Point2::new(-1.0, -2.0),
                hi: Point2::new(4.0, 3.0),
            },
        })
    }

    pub fn from_json(text: &str) -> Result<Self, SimError> {
        serde_json::from_str(text).map_err(|e| SimError::WorldFile(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("world serializes")
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::WorldFile(e.to_string()))?;
        Self::from_json(&text)
    }

    /// Distance from `p` to the nearest wall, infinite without walls.
    pub fn clearance(&self, p: Point2) -> f64 {
        self.segments
            .iter()
            .map(|s| s.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Number of times the straight move `a -> b` crosses an exit segment.
    pub fn exit_crossings(&self, a: Point2, b: Point2) -> usize {
        if a == b {
            return 0;
        }
        let Ok(step) = Segment2::new(a, b) else {
            return 0;
        };
        self.exits.iter().filter(|e| e.intersects(&step)).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_room_layout() {
        let w = World::square_room(2.0, 0.8, 0.0).unwrap();
        assert_eq!(w.segments.len(), 5);
        assert_eq!(w.exits.len(), 1);
        let wall: f64 = w.segments.iter().map(|s| s.length()).sum();
        assert!((wall - 7.2).abs() < 1e-12);
        assert!((w.exits[0].length() - 0.8).abs() < 1e-12);
        assert!((w.clearance(Point2::ZERO) - 1.0).abs() < 1e-12);
        assert_eq!(w.exit_crossings(Point2::ZERO, Point2::new(2.0, 0.0)), 1);
        assert_eq!(w.exit_crossings(Point2::ZERO, Point2::new(0.5, 0.0)), 0);
    }

    #[test]
    fn json_round_trip() {
        let w = World::square_room(2.0, 0.8, 0.7).unwrap();
        assert_eq!(World::from_json(&w.to_json()).unwrap(), w);
        assert!(World::from_json(r#"{"segments":[{"a":[0,0],"b":[0,0]}],"bounds":{"lo":[0,0],"hi":[1,1]}}"#).is_err());
    }
}
