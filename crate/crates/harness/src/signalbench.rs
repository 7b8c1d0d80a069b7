//! False-positive rates of the four preprocessing modes on free flight.

use crate::HarnessError;
use serde::{Deserialize, Serialize};
use std::time::Instant;
use whisker_core::signal::{fpr, PipelineConfig, PipelineMode, SignalSample, StepOutput, WhiskerPipeline};
use whisker_core::sim::{free_flight_trace, SensorNoise};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SignalBenchConfig {
    pub seconds: f64,
    pub n_bursts: usize,
    pub noise: SensorNoise,
    /// Settings shared by every mode; `mode` itself is ignored.
    pub pipeline: PipelineConfig,
}

impl Default for SignalBenchConfig {
    fn default() -> Self {
        Self {
            seconds: 60.0,
            n_bursts: 10,
            noise: SensorNoise::default(),
            pipeline: PipelineConfig::default(),
        }
    }
}

impl SignalBenchConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(self.seconds.is_finite() && self.seconds > 0.0) {
            return Err(HarnessError::InvalidConfig("seconds must be positive".into()));
        }
        if !self.noise.is_valid() {
            return Err(HarnessError::InvalidConfig("sensor noise parameters".into()));
        }
        self.pipeline.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeResult {
    pub mode: PipelineMode,
    pub fpr: f64,
    pub refits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalBenchReport {
    pub seed: u64,
    pub samples: usize,
    pub bursts: Vec<f64>,
    pub modes: Vec<ModeResult>,
    /// Wall time of all four pipeline passes, s.
    pub runtime_s: f64,
}

impl SignalBenchReport {
    pub fn fpr(&self, mode: PipelineMode) -> Option<f64> {
        self.modes.iter().find(|m| m.mode == mode).map(|m| m.fpr)
    }
}

pub const MODES: [PipelineMode; 4] = [
    PipelineMode::Raw,
    PipelineMode::Bandpass,
    PipelineMode::Tdoc,
    PipelineMode::Tdorc,
];

/// Runs every mode on one synthetic trace. Returns the trace and the TDORC
/// outputs alongside the report.
pub fn signal_bench(
    cfg: &SignalBenchConfig,
    seed: u64,
) -> Result<(SignalBenchReport, Vec<SignalSample>, Vec<StepOutput>), HarnessError> {
    cfg.validate()?;
    let trace = free_flight_trace(seed, cfg.seconds, cfg.n_bursts, &cfg.noise);
    let start = Instant::now();
    let mut modes = Vec::with_capacity(MODES.len());
    let mut tdorc = Vec::new();
    for mode in MODES {
        let mut p = WhiskerPipeline::new(PipelineConfig { mode, ..cfg.pipeline })?;
        let out = p.run(&trace.samples)?;
        let contacts: Vec<bool> = out.iter().map(|o| o.contact).collect();
        let free = vec![true; contacts.len()];
        modes.push(ModeResult {
            mode,
            fpr: fpr(&contacts, &free)?,
            refits: p.refit_count(),
        });
        if mode == PipelineMode::Tdorc {
            tdorc = out;
        }
    }
    let report = SignalBenchReport {
        seed,
        samples: trace.samples.len(),
        bursts: trace.bursts,
        modes,
        runtime_s: start.elapsed().as_secs_f64(),
    };
    Ok((report, trace.samples, tdorc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_mode_reported() {
        let (r, samples, out) = signal_bench(&SignalBenchConfig::default(), 1).unwrap();
        assert_eq!(r.modes.len(), 4);
        assert_eq!(r.samples, 3000);
        assert_eq!(samples.len(), 3000);
        assert_eq!(out.len(), 3000 - 100);
    }

    #[test]
    fn bad_duration_rejected() {
        let cfg = SignalBenchConfig {
            seconds: 0.0,
            ..SignalBenchConfig::default()
        };
        assert!(matches!(signal_bench(&cfg, 0), Err(HarnessError::InvalidConfig(_))));
    }
}
