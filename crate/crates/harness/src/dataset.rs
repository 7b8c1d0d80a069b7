//! Synthetic wall-sweep flights for training and evaluating the depth
//! sensor model.

use crate::HarnessError;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use whisker_core::geom::{Point2, Pose2, Segment2};
use whisker_core::mechanics::WhiskerSpec;
use whisker_core::nav::VelocityCmd;
use whisker_core::rng::{derive_seed, Stream};
use whisker_core::signal::CHANNELS;
use whisker_core::sim::{
    whisker_contact, BarometricSensor, Bounds, DroneModel, DroneParams, SensorNoise, Side, World,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub n_flights: u32,
    /// Flights `0..n_train` form the training split.
    pub n_train: u32,
    /// Wall tilt magnitude range per flight, degrees. The sign is random.
    pub tilt_deg: (f64, f64),
    /// Forward depth at the middle of the sweep, m.
    pub mid_depth: (f64, f64),
    /// Yaw drift during the sweep, deg/s, drawn symmetric around zero.
    pub yaw_drift_deg_s: f64,
    pub approach_speed: f64,
    pub sweep_speed: f64,
    pub sweep_s: f64,
    /// Hover between reaching the start depth and sweeping, s.
    pub settle_s: f64,
    pub dt: f64,
    /// First-order signal lag per whisker (left, right), s.
    pub lag_tau_s: [f64; 2],
    /// White noise on every channel, counts.
    pub channel_noise: f64,
    pub noise: SensorNoise,
    pub whisker: WhiskerSpec,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n_flights: 12,
            n_train: 9,
            tilt_deg: (2.0, 6.0),
            mid_depth: (0.06, 0.08),
            yaw_drift_deg_s: 1.5,
            approach_speed: 0.2,
            sweep_speed: 0.2,
            sweep_s: 2.0,
            settle_s: 1.0,
            dt: 0.02,
            lag_tau_s: [0.15, 0.08],
            channel_noise: 6.0,
            noise: SensorNoise::default(),
            whisker: WhiskerSpec::default(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::InvalidConfig(m.into()));
        if self.n_flights == 0 || self.n_train == 0 || self.n_train >= self.n_flights {
            return bad("need 0 < n_train < n_flights");
        }
        if !(self.dt > 0.0 && self.sweep_s > 0.0 && self.approach_speed > 0.0) {
            return bad("dt, sweep_s and approach_speed must be positive");
        }
        if self.lag_tau_s.iter().any(|t| !(*t >= 0.0)) || !(self.channel_noise >= 0.0) {
            return bad("lags and noise must be non-negative");
        }
        if !(self.tilt_deg.0 <= self.tilt_deg.1 && self.mid_depth.0 <= self.mid_depth.1) {
            return bad("ranges must be ordered");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

/// One sweep tick. Channels are contact-response counts with drift
/// already removed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub episode: u32,
    pub split: Split,
    pub tick: u32,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
    pub l_s1: f64,
    pub l_s2: f64,
    pub l_s3: f64,
    pub r_s1: f64,
    pub r_s2: f64,
    pub r_s3: f64,
    pub d_l_gt: f64,
    pub d_r_gt: f64,
    pub wall_ax: f64,
    pub wall_ay: f64,
    pub wall_bx: f64,
    pub wall_by: f64,
}

impl SweepRow {
    pub fn pose(&self) -> Pose2 {
        Pose2::new(self.x, self.y, self.yaw)
    }

    pub fn channels(&self, side: Side) -> [f64; CHANNELS] {
        match side {
            Side::Left => [self.l_s1, self.l_s2, self.l_s3],
            Side::Right => [self.r_s1, self.r_s2, self.r_s3],
        }
    }

    pub fn truth(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.d_l_gt,
            Side::Right => self.d_r_gt,
        }
    }

    pub fn wall(&self) -> Result<Segment2, HarnessError> {
        Segment2::new(
            Point2::new(self.wall_ax, self.wall_ay),
            Point2::new(self.wall_bx, self.wall_by),
        )
        .map_err(HarnessError::from)
    }
}

/// Flies `cfg.n_flights` approach-settle-sweep flights against the first
/// segment of `base`, tilted by a random angle about its midpoint per
/// flight.
pub fn gen_sweep_dataset(base: &World, cfg: &SweepConfig, seed: u64) -> Result<Vec<SweepRow>, HarnessError> {
    cfg.validate()?;
    let target = *base
        .segments
        .first()
        .ok_or_else(|| HarnessError::InvalidConfig("world has no target wall".into()))?;
    let mut rows = Vec::new();
    for flight in 0..cfg.n_flights {
        rows.extend(fly(&target, cfg, seed, flight)?);
    }
    Ok(rows)
}

fn fly(target: &Segment2, cfg: &SweepConfig, seed: u64, flight: u32) -> Result<Vec<SweepRow>, HarnessError> {
    let mut rng = Stream::new(derive_seed(seed, "sweep", flight as u64), 0);
    let sign = if rng.uniform(0.0, 1.0) < 0.5 { -1.0 } else { 1.0 };
    let tilt = sign * rng.uniform(cfg.tilt_deg.0, cfg.tilt_deg.1).to_radians();
    let mid = rng.uniform(cfg.mid_depth.0, cfg.mid_depth.1);
    let drift = rng.uniform(-cfg.yaw_drift_deg_s, cfg.yaw_drift_deg_s).to_radians();
    let noise_seed = derive_seed(seed, "sweep-noise", flight as u64);

    let c = target.midpoint();
    let wall = Segment2::new(c + (target.a - c).rotate(tilt), c + (target.b - c).rotate(tilt))?;
    let world = World {
        segments: vec![wall],
        exits: Vec::new(),
        bounds: Bounds {
            lo: Point2::new(-10.0, -10.0),
            hi: Point2::new(10.0, 10.0),
        },
    };
    let params = DroneParams {
        whisker: cfg.whisker,
        ..DroneParams::default()
    };
    let mut drone = DroneModel::new(Pose2::default(), params);
    let sensor = BarometricSensor::new(cfg.noise, cfg.whisker, seed, 0, cfg.dt);
    let split = if flight < cfg.n_train { Split::Train } else { Split::Test };

    // Depth changes by sweep_distance * tan(tilt) over the sweep; start so
    // the sweep is centred on `mid`.
    let sweep_distance = cfg.sweep_speed * cfg.sweep_s;
    let start_depth = mid - 0.5 * sweep_distance * tilt.tan();

    let mut lag = [[0.0; CHANNELS]; 2];
    let alpha = cfg.lag_tau_s.map(|tau| if tau > 0.0 { 1.0 - (-cfg.dt / tau).exp() } else { 1.0 });
    let mut tick: u64 = 0;
    let advance = |drone: &DroneModel, lag: &mut [[f64; CHANNELS]; 2]| -> [Option<f64>; 2] {
        let depths = Side::BOTH.map(|s| whisker_contact(&world, drone, s).map(|c| c.depth));
        for (i, d) in depths.iter().enumerate() {
            let x = d.map(|d| sensor.contact_signal(d)).unwrap_or([0.0; CHANNELS]);
            for ch in 0..CHANNELS {
                lag[i][ch] += alpha[i] * (x[ch] - lag[i][ch]);
            }
        }
        depths
    };

    let max_approach = ((target.distance_to(Point2::ZERO) + 1.0) / (cfg.approach_speed * cfg.dt)) as u64;
    loop {
        let d = advance(&drone, &mut lag);
        if let [Some(l), Some(r)] = d {
            if 0.5 * (l + r) <= start_depth {
                break;
            }
        }
        if tick > max_approach {
            return Err(HarnessError::NoContact(flight));
        }
        drone = drone.step(&world, &VelocityCmd::forward(cfg.approach_speed), cfg.dt)?;
        tick += 1;
    }
    let settle = (cfg.settle_s / cfg.dt).round() as u64;
    for _ in 0..settle {
        advance(&drone, &mut lag);
        tick += 1;
    }

    let n = (cfg.sweep_s / cfg.dt).round() as u32;
    let cmd = VelocityCmd {
        v_forward: 0.0,
        v_side: -cfg.sweep_speed,
        yaw_rate: drift,
    };
    let mut rows = Vec::with_capacity(n as usize);
    for k in 0..n {
        drone = drone.step(&world, &cmd, cfg.dt)?;
        tick += 1;
        let d = advance(&drone, &mut lag);
        let [Some(d_l), Some(d_r)] = d else {
            return Err(HarnessError::NoContact(flight));
        };
        let mut s = lag;
        for (i, side) in s.iter_mut().enumerate() {
            for (ch, v) in side.iter_mut().enumerate() {
                let mut g = Stream::at_tick(noise_seed, (i * CHANNELS + ch) as u64, tick);
                *v += g.gaussian(0.0, cfg.channel_noise);
            }
        }
        let p = drone.pose;
        rows.push(SweepRow {
            episode: flight,
            split,
            tick: k,
            t: k as f64 * cfg.dt,
            x: p.x,
            y: p.y,
            yaw: p.yaw,
            l_s1: s[0][0],
            l_s2: s[0][1],
            l_s3: s[0][2],
            r_s1: s[1][0],
            r_s2: s[1][1],
            r_s3: s[1][2],
            d_l_gt: d_l,
            d_r_gt: d_r,
            wall_ax: wall.a.x,
            wall_ay: wall.a.y,
            wall_bx: wall.b.x,
            wall_by: wall.b.y,
        });
    }
    Ok(rows)
}

pub fn default_sweep_world() -> Result<World, HarnessError> {
    Ok(World::straight_wall(0.35, 1.6, 0.0)?)
}

pub fn write_dataset<W: Write>(writer: W, rows: &[SweepRow]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a dataset; a missing, blank or non-finite ground-truth depth is
/// reported with its row index.
pub fn read_dataset<R: Read>(reader: R) -> Result<Vec<SweepRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    let gt: Vec<usize> = ["d_l_gt", "d_r_gt"]
        .iter()
        .filter_map(|h| headers.iter().position(|x| x == *h))
        .collect();
    if gt.len() != 2 {
        return Err(HarnessError::MissingGroundTruth(0));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let finite = gt
            .iter()
            .all(|&c| rec.get(c).and_then(|v| v.trim().parse::<f64>().ok()).is_some_and(f64::is_finite));
        if !finite {
            return Err(HarnessError::MissingGroundTruth(i));
        }
        rows.push(rec.deserialize(Some(&headers))?);
    }
    Ok(rows)
}

pub fn split_rows(rows: &[SweepRow], split: Split) -> Vec<SweepRow> {
    rows.iter().filter(|r| r.split == split).copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_flights_split_nine_three() {
        let rows = gen_sweep_dataset(&default_sweep_world().unwrap(), &SweepConfig::default(), 1).unwrap();
        let mut eps: Vec<u32> = rows.iter().map(|r| r.episode).collect();
        eps.dedup();
        assert_eq!(eps.len(), 12);
        let train: std::collections::BTreeSet<u32> =
            rows.iter().filter(|r| r.split == Split::Train).map(|r| r.episode).collect();
        assert_eq!(train.len(), 9);
        assert!(train.iter().all(|e| *e < 9));
    }

    #[test]
    fn csv_round_trip() {
        let cfg = SweepConfig {
            n_flights: 2,
            n_train: 1,
            ..SweepConfig::default()
        };
        let rows = gen_sweep_dataset(&default_sweep_world().unwrap(), &cfg, 3).unwrap();
        let mut buf = Vec::new();
        write_dataset(&mut buf, &rows).unwrap();
        assert_eq!(read_dataset(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn blank_ground_truth_rejected() {
        let cfg = SweepConfig {
            n_flights: 2,
            n_train: 1,
            ..SweepConfig::default()
        };
        let rows = gen_sweep_dataset(&default_sweep_world().unwrap(), &cfg, 3).unwrap();
        let mut buf = Vec::new();
        write_dataset(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
        let col = header.iter().position(|h| *h == "d_r_gt").unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let mut fields: Vec<String> = lines[3].split(',').map(String::from).collect();
        fields[col].clear();
        lines[3] = fields.join(",");
        let broken = lines.join("\n");
        assert!(matches!(read_dataset(broken.as_bytes()), Err(HarnessError::MissingGroundTruth(2))));
        let no_gt = text.replace("d_l_gt", "depth_left");
        assert!(matches!(read_dataset(no_gt.as_bytes()), Err(HarnessError::MissingGroundTruth(0))));
    }

    #[test]
    fn empty_world_rejected() {
        let w = World::empty(1.0);
        assert!(gen_sweep_dataset(&w, &SweepConfig::default(), 0).is_err());
    }
}
