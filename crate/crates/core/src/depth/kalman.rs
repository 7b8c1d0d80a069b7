use serde::{Deserialize, Serialize};

/// Scalar Kalman filter state for one whisker's depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KfState {
    /// Fused depth, m.
    pub d: f64,
    /// Posterior variance, m².
    pub p: f64,
    /// Process noise variance, m².
    pub q: f64,
    /// Measurement noise variance, m².
    pub r: f64,
}

impl KfState {
    /// State initialized from a first measurement, with variance `r`.
    pub fn from_measurement(m: f64, q: f64, r: f64) -> Self {
        Self { d: m, p: r, q, r }
    }

    pub fn gain(&self) -> f64 {
        let p_prior = self.p + self.q;
        p_prior / (p_prior + self.r)
    }
}

/// Predict with the process output, then correct with the measurement.
pub fn kf_step(state: &KfState, d_pred: f64, m_meas: f64) -> KfState {
    let p_prior = state.p + state.q;
    let k = p_prior / (p_prior + state.r);
    KfState {
        d: d_pred + k * (m_meas - d_pred),
        p: (1.0 - k) * p_prior,
        ..*state
    }
}

/// Prediction without a measurement.
pub fn kf_predict(state: &KfState, d_pred: f64) -> KfState {
    KfState {
        d: d_pred,
        p: state.p + state.q,
        ..*state
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn equal_prior_and_noise_gives_midpoint() {
        let s = KfState { d: 0.0, p: 0.5, q: 0.5, r: 1.0 };
        assert_eq!(s.gain(), 0.5);
        let n = kf_step(&s, 0.06, 0.08);
        assert!((n.d - 0.07).abs() < 1e-15);
        assert_eq!(n.p, 0.5);
    }

    #[test]
    fn huge_noise_trusts_process() {
        let s = KfState { d: 0.0, p: 1e-6, q: 1e-6, r: 1e12 };
        let n = kf_step(&s, 0.06, 5.0);
        assert!((n.d - 0.06).abs() < 1e-16 * 5.0 + 1e-17);
    }

    #[test]
    fn coasting_grows_variance() {
        let mut s = KfState::from_measurement(0.08, 1e-6, 25e-6);
        let mut last = s.p;
        for _ in 0..20 {
            s = kf_predict(&s, s.d);
            assert!(s.p > last);
            last = s.p;
        }
    }

    proptest! {
        #[test]
        fn update_bounds(p in 1e-9..1.0f64, q in 1e-9..1.0f64, r in 1e-9..1.0f64,
                         pred in -1.0..1.0f64, m in -1.0..1.0f64) {
            let s = KfState { d: 0.0, p, q, r };
            let k = s.gain();
            prop_assert!(k > 0.0 && k < 1.0);
            let n = kf_step(&s, pred, m);
            prop_assert!(n.p > 0.0 && n.p <= p + q);
            prop_assert!(p + q > p);
            let lo = pred.min(m) - 1e-12;
            let hi = pred.max(m) + 1e-12;
            prop_assert!(n.d >= lo && n.d <= hi);
        }
    }
}
