//! Per-tick flight log.

use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelemetryRow {
    pub tick: u64,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
    pub state: String,
    pub substate: Option<String>,
    /// Depth readings handed to the estimator.
    pub m_l: Option<f64>,
    pub m_r: Option<f64>,
    /// Fused depths.
    pub d_l: Option<f64>,
    pub d_r: Option<f64>,
    pub v_forward: f64,
    pub v_side: f64,
    pub yaw_rate: f64,
    /// Wall segment touched by each whisker (ground truth).
    pub seg_l: Option<usize>,
    pub seg_r: Option<usize>,
}

pub fn write_telemetry<W: Write>(writer: W, rows: &[TelemetryRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Telemetry as CSV bytes.
pub fn telemetry_bytes(rows: &[TelemetryRow]) -> Vec<u8> {
    let mut out = Vec::new();
    write_telemetry(&mut out, rows).expect("writing to memory");
    out
}
