use crate::geom::Point2;
use serde::{Deserialize, Serialize};

/// Inverse multiquadric kernel `(c² + r²)^(−β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImqKernel {
    pub c: f64,
    pub beta: f64,
}

impl Default for ImqKernel {
    fn default() -> Self {
        Self { c: 0.4, beta: 0.5 }
    }
}

impl ImqKernel {
    pub fn new(c: f64, beta: f64) -> Self {
        Self { c, beta }
    }

    pub fn value(&self, x: Point2, xi: Point2) -> f64 {
        imq_kernel(x, xi, self.c, self.beta)
    }

    /// Gradient with respect to `x`: `−2β u^(−β−1) Δ`, `u = c² + ‖Δ‖²`.
    pub fn grad(&self, x: Point2, xi: Point2) -> [f64; 2] {
        let d = x - xi;
        let u = self.c * self.c + d.norm_squared();
        let s = -2.0 * self.beta * u.powf(-self.beta - 1.0);
        [s * d.x, s * d.y]
    }

    /// Hessian with respect to `x`:
    /// `−2β u^(−β−1) I + 4β(β+1) u^(−β−2) Δ Δᵀ`.
    pub fn hessian(&self, x: Point2, xi: Point2) -> [[f64; 2]; 2] {
        let d = x - xi;
        let u = self.c * self.c + d.norm_squared();
        let a = -2.0 * self.beta * u.powf(-self.beta - 1.0);
        let b = 4.0 * self.beta * (self.beta + 1.0) * u.powf(-self.beta - 2.0);
        let off = b * d.x * d.y;
        [[a + b * d.x * d.x, off], [off, a + b * d.y * d.y]]
    }
}

pub fn imq_kernel(x: Point2, xi: Point2, c: f64, beta: f64) -> f64 {
    (c * c + (x - xi).norm_squared()).powf(-beta)
}
