//! Per-whisker preprocessing: drift removal, bandpass, contact flag.

use super::biquad::{BandpassCoefficients, BiquadState};
use super::drift::{calibrate, DriftFit, DriftWindow};
use super::{SignalError, SignalSample, CHANNELS};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PipelineMode {
    /// Raw counts minus the hover-window mean; no filtering.
    Raw,
    /// Bandpass on raw counts, no drift model.
    Bandpass,
    /// Drift fitted once on the hover window, then bandpass.
    Tdoc,
    /// Drift re-fitted after every full contact-free window, then bandpass.
    Tdorc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub mode: PipelineMode,
    /// Drift window length n in samples.
    pub window: usize,
    /// Contact threshold T_c on |S_p|, counts.
    pub contact_threshold: f64,
    /// Quiet threshold T on |S_p| that a sample must respect to count
    /// towards a refit window.
    pub refit_threshold: f64,
    pub coefficients: BandpassCoefficients,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            mode: PipelineMode::Tdorc,
            window: 100,
            contact_threshold: 20.0,
            refit_threshold: 20.0,
            coefficients: BandpassCoefficients::default(),
        }
    }
}

impl PipelineConfig {
    pub fn with_mode(mode: PipelineMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        if self.window < 2 {
            return Err(SignalError::WindowTooShort(self.window));
        }
        if !(self.contact_threshold > 0.0 && self.refit_threshold > 0.0) {
            return Err(SignalError::BadThreshold);
        }
        Ok(())
    }
}

/// Result of one pipeline update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutput {
    pub s_c: [f64; CHANNELS],
    pub s_p: [f64; CHANNELS],
    pub contact: bool,
    /// The drift model was re-estimated after this sample.
    pub recalibrated: bool,
}

/// Streaming pipeline for one whisker's three channels.
#[derive(Debug, Clone)]
pub struct WhiskerPipeline {
    config: PipelineConfig,
    windows: [DriftWindow; CHANNELS],
    fits: Option<[DriftFit; CHANNELS]>,
    filters: [BiquadState; CHANNELS],
    clean_run: usize,
    refits: usize,
}

impl WhiskerPipeline {
    pub fn new(config: PipelineConfig) -> Result<Self, SignalError> {
        config.validate()?;
        Ok(Self {
            windows: std::array::from_fn(|_| DriftWindow::new(config.window)),
            fits: None,
            filters: [BiquadState::new(config.coefficients); CHANNELS],
            clean_run: 0,
            refits: 0,
            config,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn is_calibrated(&self) -> bool {
        self.fits.is_some()
    }

    pub fn fits(&self) -> Option<&[DriftFit; CHANNELS]> {
        self.fits.as_ref()
    }

    /// Number of recurrent refits performed so far.
    pub fn refit_count(&self) -> usize {
        self.refits
    }

    /// Feeds a hover sample used for the initial drift fit. Returns `true`
    /// once the pipeline is calibrated. Samples after that are ignored.
    pub fn hover(&mut self, sample: &SignalSample) -> Result<bool, SignalError> {
        sample.check()?;
        if self.fits.is_some() {
            return Ok(true);
        }
        let t = sample.t as f64;
        for (w, &s) in self.windows.iter_mut().zip(&sample.channels) {
            w.push(t, s);
        }
        if self.windows[0].is_full() {
            self.fits = Some(self.refit_all()?);
        }
        Ok(self.fits.is_some())
    }

    fn refit_all(&self) -> Result<[DriftFit; CHANNELS], SignalError> {
        let mut fits = [DriftFit::default(); CHANNELS];
        for (f, w) in fits.iter_mut().zip(&self.windows) {
            *f = match self.config.mode {
                PipelineMode::Raw => DriftFit {
                    a: 0.0,
                    b: w.mean(),
                    origin: 0.0,
                },
                PipelineMode::Bandpass => DriftFit::default(),
                PipelineMode::Tdoc | PipelineMode::Tdorc => w.fit()?,
            };
        }
        Ok(fits)
    }

    /// Processes one in-flight sample.
    pub fn step(&mut self, sample: &SignalSample) -> Result<StepOutput, SignalError> {
        sample.check()?;
        let fits = self.fits.ok_or(SignalError::NotCalibrated)?;
        let t = sample.t as f64;
        let mut s_c = [0.0; CHANNELS];
        let mut s_p = [0.0; CHANNELS];
        for c in 0..CHANNELS {
            let s_r = sample.channels[c];
            self.windows[c].push(t, s_r);
            s_c[c] = calibrate(s_r, &fits[c], t);
            s_p[c] = match self.config.mode {
                PipelineMode::Raw => s_c[c],
                _ => self.filters[c].step(s_c[c]),
            };
        }
        let peak = s_p.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let contact = peak > self.config.contact_threshold;

        let mut recalibrated = false;
        if self.config.mode == PipelineMode::Tdorc {
            if !contact && peak <= self.config.refit_threshold {
                self.clean_run += 1;
            } else {
                self.clean_run = 0;
            }
            if self.clean_run >= self.config.window {
                self.fits = Some(self.refit_all()?);
                self.clean_run = 0;
                self.refits += 1;
                recalibrated = true;
            }
        }
        Ok(StepOutput {
            s_c,
            s_p,
            contact,
            recalibrated,
        })
    }

    /// Hovers on the first `window` samples, then steps through the rest.
    pub fn run(&mut self, samples: &[SignalSample]) -> Result<Vec<StepOutput>, SignalError> {
        let mut out = Vec::with_capacity(samples.len());
        for s in samples {
            if self.is_calibrated() {
                out.push(self.step(s)?);
            } else {
                self.hover(s)?;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(t: u64, v: [f64; 3]) -> SignalSample {
        SignalSample { t, channels: v }
    }

    #[test]
    fn step_before_hover_is_rejected() {
        let mut p = WhiskerPipeline::new(PipelineConfig::default()).unwrap();
        assert_eq!(
            p.step(&sample(0, [0.0; 3])),
            Err(SignalError::NotCalibrated)
        );
    }

    #[test]
    fn zero_input_refits_every_window() {
        let mut p = WhiskerPipeline::new(PipelineConfig::default()).unwrap();
        for t in 0..100 {
            p.hover(&sample(t, [0.0; 3])).unwrap();
        }
        let mut refit_ticks = Vec::new();
        for t in 100..600 {
            let o = p.step(&sample(t, [0.0; 3])).unwrap();
            assert!(!o.contact);
            if o.recalibrated {
                refit_ticks.push(t);
                for f in p.fits().unwrap() {
                    assert_eq!((f.a, f.b), (0.0, 0.0));
                }
            }
        }
        assert_eq!(refit_ticks, vec![199, 299, 399, 499, 599]);
    }

    #[test]
    fn pure_ramp_has_no_contacts() {
        for mode in [PipelineMode::Tdoc, PipelineMode::Tdorc] {
            let mut p = WhiskerPipeline::new(PipelineConfig::with_mode(mode)).unwrap();
            let trace: Vec<_> = (0..3000)
                .map(|t| {
                    let v = 1000.0 + 2.0 * t as f64 / 50.0;
                    sample(t, [v, v + 5.0, v - 7.0])
                })
                .collect();
            let out = p.run(&trace).unwrap();
            assert!(out.iter().all(|o| !o.contact));
        }
    }

    #[test]
    fn step_triggers_contact_within_three_samples() {
        let mut p = WhiskerPipeline::new(PipelineConfig::default()).unwrap();
        for t in 0..100 {
            p.hover(&sample(t, [50.0; 3])).unwrap();
        }
        for t in 100..200 {
            assert!(!p.step(&sample(t, [50.0; 3])).unwrap().contact);
        }
        let first = (0..3)
            .position(|k| p.step(&sample(200 + k, [50.0, 150.0, 50.0])).unwrap().contact);
        assert_eq!(first, Some(2));
    }

    #[test]
    fn no_refit_while_in_contact() {
        let mut p = WhiskerPipeline::new(PipelineConfig::default()).unwrap();
        for t in 0..100 {
            p.hover(&sample(t, [0.0; 3])).unwrap();
        }
        let mut last_contact = None;
        for t in 100..1000u64 {
            let v = if (300..320).contains(&t) { 400.0 } else { 0.0 };
            let o = p.step(&sample(t, [v, 0.0, 0.0])).unwrap();
            if o.contact {
                last_contact = Some(t);
            }
            if o.recalibrated {
                if let Some(lc) = last_contact {
                    assert!(t >= lc + 100, "refit at {t} but contact at {lc}");
                }
            }
        }
    }

    #[test]
    fn raw_mode_subtracts_hover_mean() {
        let mut p = WhiskerPipeline::new(PipelineConfig::with_mode(PipelineMode::Raw)).unwrap();
        for t in 0..100 {
            p.hover(&sample(t, [10.0, 20.0, 30.0])).unwrap();
        }
        let o = p.step(&sample(100, [15.0, 20.0, 30.0])).unwrap();
        assert_eq!(o.s_p, [5.0, 0.0, 0.0]);
    }
}
