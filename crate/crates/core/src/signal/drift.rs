//! Sliding-window linear drift estimation.

use super::SignalError;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Linear drift model `S(t) ≈ a·(t − origin) + b`.
///
/// `origin` is the tick of the first sample in the fitted window, so `b` is
/// the drift level at the start of that window.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DriftFit {
    /// Slope in counts per tick.
    pub a: f64,
    /// Intercept in counts.
    pub b: f64,
    pub origin: f64,
}

impl DriftFit {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b, origin: 0.0 }
    }

    pub fn at(&self, t: f64) -> f64 {
        self.a * (t - self.origin) + self.b
    }
}

/// Ordinary least-squares line through `(t, S_r)` pairs.
pub fn fit_drift(window: &[(f64, f64)]) -> Result<DriftFit, SignalError> {
    let n = window.len();
    if n < 2 {
        return Err(SignalError::WindowTooShort(n));
    }
    // Centering on the mean tick keeps the normal equations well conditioned
    // for large absolute tick values; the result is the same closed form.
    let nf = n as f64;
    let t_mean = window.iter().map(|&(t, _)| t).sum::<f64>() / nf;
    let s_mean = window.iter().map(|&(_, s)| s).sum::<f64>() / nf;
    let mut stt = 0.0;
    let mut sts = 0.0;
    for &(t, s) in window {
        let dt = t - t_mean;
        stt += dt * dt;
        sts += dt * (s - s_mean);
    }
    if stt <= f64::EPSILON * (1.0 + t_mean * t_mean) * nf {
        return Err(SignalError::DegenerateWindow);
    }
    let a = sts / stt;
    let b = s_mean - a * t_mean;
    Ok(DriftFit { a, b, origin: 0.0 })
}

/// `S_c = S_r − (a·t + b)` under the fit's time origin.
pub fn calibrate(s_r: f64, fit: &DriftFit, t: f64) -> f64 {
    s_r - fit.at(t)
}

/// Fixed-capacity history of the most recent raw samples.
#[derive(Debug, Clone)]
pub struct DriftWindow {
    capacity: usize,
    samples: VecDeque<(f64, f64)>,
}

impl DriftWindow {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            samples: VecDeque::with_capacity(capacity),
        }
    }

    pub fn push(&mut self, t: f64, s: f64) {
        if self.samples.len() == self.capacity {
            self.samples.pop_front();
        }
        self.samples.push_back((t, s));
    }

    pub fn is_full(&self) -> bool {
        self.samples.len() == self.capacity
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn clear(&mut self) {
        self.samples.clear();
    }

    /// Fits the window in window-local time (first sample at t = 0).
    pub fn fit(&self) -> Result<DriftFit, SignalError> {
        if !self.is_full() {
            return Err(SignalError::NotCalibrated);
        }
        let origin = self.samples[0].0;
        let local: Vec<(f64, f64)> = self.samples.iter().map(|&(t, s)| (t - origin, s)).collect();
        let mut fit = fit_drift(&local)?;
        fit.origin = origin;
        Ok(fit)
    }

    pub fn mean(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|&(_, s)| s).sum::<f64>() / self.samples.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_signal() {
        let w: Vec<_> = (0..100).map(|t| (t as f64, 5.0)).collect();
        let f = fit_drift(&w).unwrap();
        assert!(f.a.abs() < 1e-14);
        assert!((f.b - 5.0).abs() < 1e-12);
    }

    #[test]
    fn exact_line() {
        let w: Vec<_> = (0..100).map(|t| (t as f64, 2.0 * t as f64 + 3.0)).collect();
        let f = fit_drift(&w).unwrap();
        assert!((f.a - 2.0).abs() < 1e-12);
        assert!((f.b - 3.0).abs() < 1e-10);
        for t in 0..100 {
            let t = t as f64;
            assert!(calibrate(2.0 * t + 3.0, &f, t).abs() < 1e-10);
        }
    }

    #[test]
    fn calibrate_leaves_residual() {
        let f = DriftFit::new(2.0, 3.0);
        assert_eq!(calibrate(10.0, &DriftFit::new(0.0, 10.0), 4.0), 0.0);
        for t in 0..50 {
            let t = t as f64;
            let r = calibrate(2.0 * t + 3.0 + t.sin(), &f, t);
            assert!((r - t.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_and_short_windows() {
        assert_eq!(fit_drift(&[(1.0, 2.0)]), Err(SignalError::WindowTooShort(1)));
        assert_eq!(
            fit_drift(&[(3.0, 1.0), (3.0, 2.0), (3.0, 4.0)]),
            Err(SignalError::DegenerateWindow)
        );
    }

    #[test]
    fn window_uses_local_time() {
        let mut w = DriftWindow::new(10);
        for t in 0..25 {
            w.push(t as f64, 0.5 * t as f64 + 1.0);
        }
        let f = w.fit().unwrap();
        assert_eq!(f.origin, 15.0);
        assert!((f.a - 0.5).abs() < 1e-12);
        assert!((f.b - 8.5).abs() < 1e-12);
        assert!((f.at(30.0) - 16.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn residuals_are_orthogonal(ys in proptest::collection::vec(-1e3..1e3f64, 2..200),
                                    t0 in 0.0..1e5f64) {
            let w: Vec<_> = ys.iter().enumerate().map(|(i, &y)| (t0 + i as f64, y)).collect();
            let f = fit_drift(&w).unwrap();
            let scale: f64 = ys.iter().map(|y| y.abs()).sum::<f64>() + 1.0;
            let r0: f64 = w.iter().map(|&(t, y)| y - f.at(t)).sum();
            let r1: f64 = w.iter().map(|&(t, y)| (t - t0) * (y - f.at(t))).sum();
            prop_assert!(r0.abs() < 1e-6 * scale);
            prop_assert!(r1.abs() < 1e-6 * scale * w.len() as f64);
        }
    }
}
