//! Second-order IIR section in direct form II transposed.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandpassCoefficients {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Default for BandpassCoefficients {
    /// 0.05 to 1 Hz band at a 50 Hz sample rate.
    fn default() -> Self {
        Self {
            b0: 0.0564,
            b1: 0.0,
            b2: -0.0564,
            a1: -1.8865,
            a2: 0.8872,
        }
    }
}

/// Filter coefficients plus the two delay registers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiquadState {
    pub coeffs: BandpassCoefficients,
    pub z0: f64,
    pub z1: f64,
}

impl Default for BiquadState {
    fn default() -> Self {
        Self::new(BandpassCoefficients::default())
    }
}

impl BiquadState {
    pub fn new(coeffs: BandpassCoefficients) -> Self {
        Self {
            coeffs,
            z0: 0.0,
            z1: 0.0,
        }
    }

    pub fn reset(&mut self) {
        self.z0 = 0.0;
        self.z1 = 0.0;
    }

    pub fn step(&mut self, x: f64) -> f64 {
        bandpass_step(x, self)
    }

    pub fn filter(&mut self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.step(x)).collect()
    }
}

/// One filter update: `y = b0·x + z0`, then the registers shift.
pub fn bandpass_step(x: f64, state: &mut BiquadState) -> f64 {
    let c = &state.coeffs;
    let y = c.b0 * x + state.z0;
    state.z0 = c.b1 * x - c.a1 * y + state.z1;
    state.z1 = c.b2 * x - c.a2 * y;
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn impulse_response_head() {
        let mut f = BiquadState::default();
        let mut x = vec![0.0; 5];
        x[0] = 1.0;
        let y = f.filter(&x);
        assert_eq!(y[0], 0.0564);
        // y1 = -a1*y0, y2 = b2 - a1*y1 - a2*y0
        assert!((y[1] - 1.8865 * 0.0564).abs() < 1e-15);
        assert!((y[2] - (-0.0564 + 1.8865 * y[1] - 0.8872 * y[0])).abs() < 1e-15);
    }

    #[test]
    fn step_of_100_crosses_20_on_third_sample() {
        let mut f = BiquadState::default();
        let y = f.filter(&[100.0; 4]);
        assert!(y[1] < 20.0 && y[2] > 20.0, "{y:?}");
    }

    #[test]
    fn dc_rejection() {
        let mut f = BiquadState::default();
        let mut y = 0.0;
        for _ in 0..20_000 {
            y = f.step(123.0);
        }
        assert!(y.abs() < 1e-6 * 123.0);
    }

    proptest! {
        #[test]
        fn linear(xs in proptest::collection::vec(-100.0..100.0f64, 1..300), alpha in -10.0..10.0f64) {
            let y = BiquadState::default().filter(&xs);
            let scaled: Vec<f64> = xs.iter().map(|x| alpha * x).collect();
            let ys = BiquadState::default().filter(&scaled);
            for (a, b) in y.iter().zip(&ys) {
                prop_assert!((alpha * a - b).abs() < 1e-9 * (1.0 + b.abs()));
            }
        }
    }
}
