//! Gaussian-process regression over signed occupancy labels.

use super::kernel::ImqKernel;
use super::linalg::Cholesky;
use super::GpisError;
use crate::geom::{Grid2, Point2};
use serde::{Deserialize, Serialize};

/// Jitter added to the diagonal when the plain factorization fails.
pub const FALLBACK_JITTER: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GpisHyper {
    pub c: f64,
    pub beta: f64,
    /// Observation noise variance.
    pub sigma2: f64,
    /// Maximum number of training points.
    pub cap: usize,
}

impl Default for GpisHyper {
    fn default() -> Self {
        Self {
            c: 0.4,
            beta: 0.5,
            sigma2: 1e-4,
            cap: 50,
        }
    }
}

impl GpisHyper {
    pub fn kernel(&self) -> ImqKernel {
        ImqKernel::new(self.c, self.beta)
    }

    pub fn validate(&self) -> Result<(), GpisError> {
        if !(self.c > 0.0 && self.beta > 0.0 && self.sigma2 >= 0.0) {
            return Err(GpisError::InvalidHyper);
        }
        Ok(())
    }
}

/// Posterior quantities at one query point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceQuery {
    pub mean: f64,
    pub variance: f64,
    pub grad: [f64; 2],
    pub hessian: [[f64; 2]; 2],
}

impl SurfaceQuery {
    /// `[gᵀHg − |g|² tr H] / |g|³`.
    pub fn curvature(&self) -> Result<f64, GpisError> {
        curvature(self.grad, self.hessian)
    }
}

pub fn curvature(g: [f64; 2], h: [[f64; 2]; 2]) -> Result<f64, GpisError> {
    let gn2 = g[0] * g[0] + g[1] * g[1];
    let gn = gn2.sqrt();
    if !(gn >= 1e-9) {
        return Err(GpisError::ZeroGradient);
    }
    let ghg = g[0] * (h[0][0] * g[0] + h[0][1] * g[1]) + g[1] * (h[1][0] * g[0] + h[1][1] * g[1]);
    let tr = h[0][0] + h[1][1];
    Ok((ghg - gn2 * tr) / (gn2 * gn))
}

/// Fitted implicit-surface model. Immutable after fitting.
#[derive(Debug, Clone)]
pub struct GpisModel {
    points: Vec<Point2>,
    labels: Vec<f64>,
    hyper: GpisHyper,
    chol: Cholesky,
    alpha: Vec<f64>,
    jitter: f64,
}

impl GpisModel {
    /// Factors `K + σ²I`; fails on a singular kernel matrix.
    pub fn fit(points: &[Point2], labels: &[f64], hyper: GpisHyper) -> Result<Self, GpisError> {
        Self::fit_inner(points, labels, hyper, 0.0)
    }

    /// Like [`GpisModel::fit`] but retries once with a small diagonal jitter.
    pub fn fit_with_jitter(
        points: &[Point2],
        labels: &[f64],
        hyper: GpisHyper,
    ) -> Result<Self, GpisError> {
        match Self::fit_inner(points, labels, hyper, 0.0) {
            Err(GpisError::NotPositiveDefinite) => {
                Self::fit_inner(points, labels, hyper, FALLBACK_JITTER)
            }
            other => other,
        }
    }

    fn fit_inner(
        points: &[Point2],
        labels: &[f64],
        hyper: GpisHyper,
        jitter: f64,
    ) -> Result<Self, GpisError> {
        hyper.validate()?;
        if points.is_empty() {
            return Err(GpisError::NoTrainingData);
        }
        if points.len() != labels.len() {
            return Err(GpisError::LabelMismatch(points.len(), labels.len()));
        }
        if points.len() > hyper.cap {
            return Err(GpisError::CapExceeded {
                cap: hyper.cap,
                got: points.len(),
            });
        }
        let n = points.len();
        let k = hyper.kernel();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = k.value(points[i], points[j]);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
            a[i * n + i] += hyper.sigma2 + jitter;
        }
        let chol = Cholesky::factor(&a, n)?;
        let alpha = chol.solve(labels);
        Ok(Self {
            points: points.to_vec(),
            labels: labels.to_vec(),
            hyper,
            chol,
            alpha,
            jitter,
        })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn hyper(&self) -> &GpisHyper {
        &self.hyper
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Diagonal jitter that was needed to factor the kernel matrix.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Prior variance `k(x, x) = c^(−2β)`.
    pub fn prior_variance(&self) -> f64 {
        self.hyper.c.powf(-2.0 * self.hyper.beta)
    }

    pub fn mean(&self, x: Point2) -> f64 {
        let k = self.hyper.kernel();
        self.points
            .iter()
            .zip(&self.alpha)
            .map(|(p, a)| a * k.value(x, *p))
            .sum()
    }

    pub fn variance(&self, x: Point2) -> f64 {
        let k = self.hyper.kernel();
        let ks: Vec<f64> = self.points.iter().map(|p| k.value(x, *p)).collect();
        let v = self.chol.solve_lower(&ks);
        let explained: f64 = v.iter().map(|t| t * t).sum();
        (k.value(x, x) - explained).max(0.0)
    }

    pub fn query(&self, x: Point2) -> SurfaceQuery {
        let k = self.hyper.kernel();
        let mut grad = [0.0; 2];
        let mut hessian = [[0.0; 2]; 2];
        let mut mean = 0.0;
        for (p, a) in self.points.iter().zip(&self.alpha) {
            mean += a * k.value(x, *p);
            let g = k.grad(x, *p);
            let h = k.hessian(x, *p);
            for i in 0..2 {
                grad[i] += a * g[i];
                for j in 0..2 {
                    hessian[i][j] += a * h[i][j];
                }
            }
        }
        SurfaceQuery {
            mean,
            variance: self.variance(x),
            grad,
            hessian,
        }
    }

    /// Posterior mean on every grid node.
    pub fn mean_grid(&self, origin: Point2, spacing: f64, nx: usize, ny: usize) -> Result<Grid2, GpisError> {
        Grid2::from_fn(origin, spacing, nx, ny, |p| self.mean(p)).map_err(GpisError::Grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_interpolates() {
        let hyper = GpisHyper {
            sigma2: 0.0,
            ..GpisHyper::default()
        };
        let p = Point2::new(0.2, 0.1);
        let m = GpisModel::fit(&[p], &[0.0], hyper).unwrap();
        let q = m.query(p);
        assert_eq!(q.mean, 0.0);
        assert!(q.variance < 1e-12);
    }

    #[test]
    fn duplicate_points_need_jitter() {
        let hyper = GpisHyper {
            sigma2: 0.0,
            ..GpisHyper::default()
        };
        let p = Point2::new(0.2, 0.1);
        assert_eq!(
            GpisModel::fit(&[p, p], &[0.0, -1.0], hyper).unwrap_err(),
            GpisError::NotPositiveDefinite
        );
        let m = GpisModel::fit_with_jitter(&[p, p], &[0.0, -1.0], hyper).unwrap();
        assert_eq!(m.jitter(), FALLBACK_JITTER);
    }

    #[test]
    fn cap_enforced() {
        let hyper = GpisHyper {
            cap: 2,
            ..GpisHyper::default()
        };
        let pts = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        assert!(matches!(
            GpisModel::fit(&pts, &[0.0; 3], hyper),
            Err(GpisError::CapExceeded { cap: 2, got: 3 })
        ));
    }

    #[test]
    fn curvature_of_zero_gradient_is_an_error() {
        assert_eq!(curvature([0.0, 0.0], [[1.0, 0.0], [0.0, 1.0]]), Err(GpisError::ZeroGradient));
        // f = |x| - r has gradient n and Hessian (I - nnᵀ)/r, so κ = -1/r.
        let r = 0.5;
        let k = curvature([1.0, 0.0], [[0.0, 0.0], [0.0, 1.0 / r]]).unwrap();
        assert!((k + 1.0 / r).abs() < 1e-12);
    }
}
