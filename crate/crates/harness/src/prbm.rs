//! Placement-angle study grid as tidy CSV.

use crate::HarnessError;
use serde::{Deserialize, Serialize};
use whisker_core::mechanics::{prbm_grid, PrbmGridRow, Validity, WhiskerSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PrbmGridConfig {
    pub alphas_deg: Vec<f64>,
    pub depths_m: Vec<f64>,
    pub whisker: WhiskerSpec,
    /// Extrapolate the spring fit outside its stated `n` window.
    pub extrapolate: bool,
}

impl Default for PrbmGridConfig {
    fn default() -> Self {
        Self {
            alphas_deg: (0..=30).map(|i| 15.0 + i as f64).collect(),
            depths_m: vec![0.010, 0.020, 0.030, 0.040, 0.050],
            whisker: WhiskerSpec::default(),
            extrapolate: true,
        }
    }
}

pub fn run_prbm_grid(cfg: &PrbmGridConfig) -> Result<Vec<PrbmGridRow>, HarnessError> {
    if cfg.alphas_deg.is_empty() || cfg.depths_m.is_empty() {
        return Err(HarnessError::InvalidConfig("empty PRBM grid".into()));
    }
    cfg.whisker.validate()?;
    let validity = if cfg.extrapolate {
        Validity::Extrapolate
    } else {
        Validity::Enforce
    };
    Ok(prbm_grid(&cfg.alphas_deg, &cfg.depths_m, &cfg.whisker, validity)?)
}

pub fn grid_csv(rows: &[PrbmGridRow]) -> Result<Vec<u8>, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let rows = run_prbm_grid(&PrbmGridConfig::default()).unwrap();
        assert_eq!(rows.len(), 31 * 5);
        let csv = String::from_utf8(grid_csv(&rows).unwrap()).unwrap();
        assert!(csv.starts_with("alpha_deg,d_m,n_force,theta_rad,n_ratio\n"));
        assert_eq!(csv.lines().count(), 1 + 31 * 5);
    }

    #[test]
    fn empty_axis_rejected() {
        let cfg = PrbmGridConfig {
            depths_m: Vec::new(),
            ..PrbmGridConfig::default()
        };
        assert!(run_prbm_grid(&cfg).is_err());
    }
}
