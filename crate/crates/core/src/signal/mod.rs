//! Barometer signal preprocessing and contact detection.

pub mod biquad;
pub mod drift;
pub mod pipeline;
pub mod trace;

pub use biquad::{bandpass_step, BandpassCoefficients, BiquadState};
pub use drift::{calibrate, fit_drift, DriftFit, DriftWindow};
pub use pipeline::{PipelineConfig, PipelineMode, StepOutput, WhiskerPipeline};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Barometer channels per whisker.
pub const CHANNELS: usize = 3;

/// Sample rate of the barometers, Hz.
pub const SAMPLE_RATE_HZ: f64 = 50.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("drift window needs at least 2 samples, got {0}")]
    WindowTooShort(usize),
    #[error("drift window has no spread in time")]
    DegenerateWindow,
    #[error("pipeline used before the hover window was filled")]
    NotCalibrated,
    #[error("non-finite sample at tick {0}")]
    NonFinite(u64),
    #[error("thresholds must be positive")]
    BadThreshold,
    #[error("contact and ground-truth sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("no free-flight samples to compute a false-positive rate")]
    EmptyDenominator,
    #[error("trace csv: {0}")]
    Csv(String),
}

/// Raw counts of one whisker's three channels at tick `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSample {
    pub t: u64,
    pub channels: [f64; CHANNELS],
}

impl SignalSample {
    pub fn new(t: u64, channels: [f64; CHANNELS]) -> Self {
        Self { t, channels }
    }

    fn check(&self) -> Result<(), SignalError> {
        if self.channels.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(SignalError::NonFinite(self.t))
        }
    }
}

/// False-positive rate `FP / (FP + TN)` over samples marked free.
pub fn fpr(contacts: &[bool], ground_truth_free: &[bool]) -> Result<f64, SignalError> {
    if contacts.len() != ground_truth_free.len() {
        return Err(SignalError::LengthMismatch(
            contacts.len(),
            ground_truth_free.len(),
        ));
    }
    let mut fp = 0usize;
    let mut tn = 0usize;
    for (&c, &free) in contacts.iter().zip(ground_truth_free) {
        if free {
            if c {
                fp += 1;
            } else {
                tn += 1;
            }
        }
    }
    if fp + tn == 0 {
        return Err(SignalError::EmptyDenominator);
    }
    Ok(fp as f64 / (fp + tn) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fpr_counts() {
        let free = vec![true; 100];
        assert_eq!(fpr(&[false; 100], &free).unwrap(), 0.0);
        let mut c = vec![false; 100];
        c[..38].iter_mut().for_each(|v| *v = true);
        assert_eq!(fpr(&c, &free).unwrap(), 0.38);
    }

    #[test]
    fn fpr_ignores_contact_segments() {
        let c = [true, true, false, true];
        let free = [false, true, true, false];
        assert_eq!(fpr(&c, &free).unwrap(), 0.5);
        assert_eq!(fpr(&c, &[false; 4]), Err(SignalError::EmptyDenominator));
        assert!(matches!(fpr(&c, &[true]), Err(SignalError::LengthMismatch(4, 1))));
    }
}
