//! Planar geometry shared by the estimator, the mapper and the simulator.
//!
//! The world frame is right-handed with yaw measured counterclockwise from
//! the +x axis. The body frame has +x forward and +y to the left.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// Minimum segment length accepted by [`Segment2::new`].
pub const MIN_SEGMENT_LENGTH: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("degenerate segment: endpoints closer than {MIN_SEGMENT_LENGTH} m")]
    DegenerateSegment,
    #[error("grid needs at least 2x2 nodes, got {nx}x{ny}")]
    GridTooSmall { nx: usize, ny: usize },
    #[error("grid spacing must be positive, got {0}")]
    BadSpacing(f64),
    #[error("grid expects {expected} values, got {actual}")]
    GridSize { expected: usize, actual: usize },
}

/// A point or displacement in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ZERO: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at `angle` radians.
    pub fn from_angle(angle: f64) -> Self {
        Self::new(angle.cos(), angle.sin())
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Rotates counterclockwise by `angle` radians.
    pub fn rotate(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(v: [f64; 2]) -> Self {
        Self::new(v[0], v[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn normalize_angle(angle: f64) -> f64 {
    let wrapped = angle.rem_euclid(2.0 * PI);
    if wrapped > PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

/// Signed smallest rotation taking `from` onto `to`, in `(-π, π]`.
pub fn angle_difference(to: f64, from: f64) -> f64 {
    normalize_angle(to - from)
}

/// Drone position and heading in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    /// Radians in `(-π, π]`.
    pub yaw: f64,
}

impl Pose2 {
    pub fn new(x: f64, y: f64, yaw: f64) -> Self {
        Self {
            x,
            y,
            yaw: normalize_angle(yaw),
        }
    }

    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    /// Unit vector along the body +x axis, in the world frame.
    pub fn forward(&self) -> Point2 {
        Point2::from_angle(self.yaw)
    }

    /// Unit vector along the body +y axis (left), in the world frame.
    pub fn left(&self) -> Point2 {
        Point2::from_angle(self.yaw + PI / 2.0)
    }

    pub fn set_yaw(&mut self, yaw: f64) {
        self.yaw = normalize_angle(yaw);
    }

    /// `R_d^T (p_world - p_drone)` with `R_d` the yaw rotation.
    pub fn world_to_body(&self, p_world: Point2) -> Point2 {
        (p_world - self.position()).rotate(-self.yaw)
    }

    pub fn body_to_world(&self, p_body: Point2) -> Point2 {
        self.position() + p_body.rotate(self.yaw)
    }

    /// Pose of a frame rigidly attached at `offset` (body frame) with the same heading.
    pub fn offset(&self, offset: Point2) -> Pose2 {
        let p = self.body_to_world(offset);
        Pose2 {
            x: p.x,
            y: p.y,
            yaw: self.yaw,
        }
    }
}

/// Transforms a world point into the drone frame.
pub fn world_to_body(p_world: Point2, pose: &Pose2) -> Point2 {
    pose.world_to_body(p_world)
}

pub fn body_to_world(p_body: Point2, pose: &Pose2) -> Point2 {
    pose.body_to_world(p_body)
}

/// A straight wall piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSegment")]
pub struct Segment2 {
    pub a: Point2,
    pub b: Point2,
}

#[derive(Deserialize)]
struct RawSegment {
    a: Point2,
    b: Point2,
}

impl TryFrom<RawSegment> for Segment2 {
    type Error = GeomError;
    fn try_from(raw: RawSegment) -> Result<Self, GeomError> {
        Segment2::new(raw.a, raw.b)
    }
}

impl Segment2 {
    pub fn new(a: Point2, b: Point2) -> Result<Self, GeomError> {
        if (b - a).norm() <= MIN_SEGMENT_LENGTH {
            return Err(GeomError::DegenerateSegment);
        }
        Ok(Self { a, b })
    }

    pub fn length(&self) -> f64 {
        (self.b - self.a).norm()
    }

    /// Orientation of `a -> b` in the world frame.
    pub fn angle(&self) -> f64 {
        (self.b - self.a).angle()
    }

    pub fn midpoint(&self) -> Point2 {
        (self.a + self.b) * 0.5
    }

    pub fn closest_point(&self, p: Point2) -> Point2 {
        let e = self.b - self.a;
        let t = ((p - self.a).dot(e) / e.norm_squared()).clamp(0.0, 1.0);
        self.a + e * t
    }

    pub fn distance_to(&self, p: Point2) -> f64 {
        self.closest_point(p).distance(p)
    }

    /// Proper intersection with another segment (shared endpoints count).
    pub fn intersects(&self, other: &Segment2) -> bool {
        let d1 = self.b - self.a;
        let d2 = other.b - other.a;
        let denom = d1.cross(d2);
        if denom.abs() < 1e-15 {
            return false;
        }
        let w = other.a - self.a;
        let t = w.cross(d2) / denom;
        let u = w.cross(d1) / denom;
        (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)
    }
}

/// Nearest wall struck by a ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub distance: f64,
    pub point: Point2,
    /// Orientation of the struck segment (`a -> b`), radians.
    pub wall_angle: f64,
    pub segment: usize,
}

/// Intersects the ray `origin + t·dir`, `t ≥ 0`, with every segment.
///
/// Ties on distance resolve to the lowest segment index. Rays parallel to a
/// segment never hit it.
pub fn ray_cast(origin: Point2, dir: Point2, world: &[Segment2]) -> Option<RayHit> {
    let mut best: Option<RayHit> = None;
    for (index, seg) in world.iter().enumerate() {
        let Some(distance) = ray_segment_distance(origin, dir, seg) else {
            continue;
        };
        if best.is_none_or(|b| distance < b.distance) {
            best = Some(RayHit {
                distance,
                point: origin + dir * distance,
                wall_angle: seg.angle(),
                segment: index,
            });
        }
    }
    best
}

/// Distance along `dir` from `origin` to `seg`, if the ray hits it.
pub fn ray_segment_distance(origin: Point2, dir: Point2, seg: &Segment2) -> Option<f64> {
    const EDGE_EPS: f64 = 1e-12;
    let e = seg.b - seg.a;
    let denom = dir.cross(e);
    if denom.abs() < 1e-12 * e.norm() {
        return None;
    }
    let w = seg.a - origin;
    let t = w.cross(e) / denom;
    let u = w.cross(dir) / denom;
    if t >= 0.0 && (-EDGE_EPS..=1.0 + EDGE_EPS).contains(&u) {
        Some(t)
    } else {
        None
    }
}

/// Regular grid of scalar samples; `values[j * nx + i]` sits at
/// `origin + (i, j) * spacing`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub origin: Point2,
    pub spacing: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl Grid2 {
    pub fn new(
        origin: Point2,
        spacing: f64,
        nx: usize,
        ny: usize,
        values: Vec<f64>,
    ) -> Result<Self, GeomError> {
        Self::check_shape(spacing, nx, ny)?;
        if values.len() != nx * ny {
            return Err(GeomError::GridSize {
                expected: nx * ny,
                actual: values.len(),
            });
        }
        Ok(Self {
            origin,
            spacing,
            nx,
            ny,
            values,
        })
    }

    /// Samples `f` at every node.
    pub fn from_fn(
        origin: Point2,
        spacing: f64,
        nx: usize,
        ny: usize,
        mut f: impl FnMut(Point2) -> f64,
    ) -> Result<Self, GeomError> {
        Self::check_shape(spacing, nx, ny)?;
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f(origin + Point2::new(i as f64, j as f64) * spacing));
            }
        }
        Ok(Self {
            origin,
            spacing,
            nx,
            ny,
            values,
        })
    }

    /// Square `n x n` grid spanning the box `[lo, hi]`.
    pub fn spanning(
        lo: Point2,
        hi: Point2,
        n: usize,
        f: impl FnMut(Point2) -> f64,
    ) -> Result<Self, GeomError> {
        let span = (hi.x - lo.x).max(hi.y - lo.y);
        let spacing = span / (n.max(2) - 1) as f64;
        Self::from_fn(lo, spacing, n, n, f)
    }

    fn check_shape(spacing: f64, nx: usize, ny: usize) -> Result<(), GeomError> {
        if nx < 2 || ny < 2 {
            return Err(GeomError::GridTooSmall { nx, ny });
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(GeomError::BadSpacing(spacing));
        }
        Ok(())
    }

    pub fn point(&self, i: usize, j: usize) -> Point2 {
        self.origin + Point2::new(i as f64, j as f64) * self.spacing
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }
}
