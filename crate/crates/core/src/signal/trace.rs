//! CSV trace ingest and export.

use super::{SignalError, SignalSample, StepOutput};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

#[derive(Debug, Serialize, Deserialize)]
struct TraceRow {
    t: u64,
    ch1: f64,
    ch2: f64,
    ch3: f64,
}

#[derive(Debug, Serialize)]
struct ProcessedRow {
    t: u64,
    ch1: f64,
    ch2: f64,
    ch3: f64,
    sc1: f64,
    sc2: f64,
    sc3: f64,
    sp1: f64,
    sp2: f64,
    sp3: f64,
    contact: u8,
    recalibrated: u8,
}

fn csv_err(e: csv::Error) -> SignalError {
    SignalError::Csv(e.to_string())
}

/// Reads a trace with header `t,ch1,ch2,ch3`.
pub fn read_trace<R: Read>(reader: R) -> Result<Vec<SignalSample>, SignalError> {
    let mut rdr = csv::Reader::from_reader(reader);
    rdr.deserialize::<TraceRow>()
        .map(|row| {
            let r = row.map_err(csv_err)?;
            Ok(SignalSample::new(r.t, [r.ch1, r.ch2, r.ch3]))
        })
        .collect()
}

pub fn write_trace<W: Write>(writer: W, samples: &[SignalSample]) -> Result<(), SignalError> {
    let mut wtr = csv::Writer::from_writer(writer);
    for s in samples {
        wtr.serialize(TraceRow {
            t: s.t,
            ch1: s.channels[0],
            ch2: s.channels[1],
            ch3: s.channels[2],
        })
        .map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| SignalError::Csv(e.to_string()))
}

/// Writes raw counts alongside pipeline outputs. Hover samples that produced
/// no output are skipped; `outputs` aligns with the tail of `samples`.
pub fn write_processed<W: Write>(
    writer: W,
    samples: &[SignalSample],
    outputs: &[StepOutput],
) -> Result<(), SignalError> {
    let skip = samples.len().saturating_sub(outputs.len());
    let mut wtr = csv::Writer::from_writer(writer);
    for (s, o) in samples[skip..].iter().zip(outputs) {
        wtr.serialize(ProcessedRow {
            t: s.t,
            ch1: s.channels[0],
            ch2: s.channels[1],
            ch3: s.channels[2],
            sc1: o.s_c[0],
            sc2: o.s_c[1],
            sc3: o.s_c[2],
            sp1: o.s_p[0],
            sp2: o.s_p[1],
            sp3: o.s_p[2],
            contact: o.contact as u8,
            recalibrated: o.recalibrated as u8,
        })
        .map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| SignalError::Csv(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let samples = vec![
            SignalSample::new(0, [1.0, 2.5, -3.0]),
            SignalSample::new(1, [1.25, 2.0, 1e6]),
        ];
        let mut buf = Vec::new();
        write_trace(&mut buf, &samples).unwrap();
        assert!(buf.starts_with(b"t,ch1,ch2,ch3\n"));
        assert_eq!(read_trace(buf.as_slice()).unwrap(), samples);
    }

    #[test]
    fn malformed_rows_error() {
        let text = "t,ch1,ch2,ch3\n0,1,2\n";
        assert!(matches!(read_trace(text.as_bytes()), Err(SignalError::Csv(_))));
    }
}
