//! Whisker contact geometry and the two sensor synthesis modes.

use super::drone::DroneModel;
use super::world::World;
use crate::depth::process::wall_drone_angle;
use crate::geom::{normalize_angle, ray_cast, Point2};
use crate::mechanics::{base_moment, WhiskerSpec};
use crate::rng::{derive_seed, normal_at, Stream};
use crate::signal::{SignalSample, CHANNELS};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    pub fn index(&self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }
}

/// Ground-truth contact of one whisker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhiskerContact {
    /// Forward distance from the mount to the wall, m.
    pub depth: f64,
    /// Wall angle in the drone frame (normal to heading), rad.
    pub wall_angle: f64,
    pub point: Point2,
    pub segment: usize,
}

/// Casts the undeflected whisker forward from its mount. Contact exists
/// when a wall lies within the whisker's forward reach.
pub fn whisker_contact(world: &World, drone: &DroneModel, side: Side) -> Option<WhiskerContact> {
    let mount = drone.mount_pose(side.index());
    let dir = mount.forward();
    let hit = ray_cast(mount.position(), dir, &world.segments)?;
    if hit.distance > drone.params.whisker.reach() {
        return None;
    }
    // Orient the wall line so that its normal, rotated +90° from it, points
    // away from the drone.
    let mut theta_w = hit.wall_angle;
    let normal = Point2::from_angle(theta_w + FRAC_PI_2);
    if normal.dot(dir) < 0.0 {
        theta_w = normalize_angle(theta_w + PI);
    }
    Some(WhiskerContact {
        depth: hit.distance,
        wall_angle: wall_drone_angle(theta_w, mount.yaw),
        point: hit.point,
        segment: hit.segment,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SensorMode {
    IdealRange,
    Barometric,
}

/// Sensor synthesis parameters. Barometric values are synthetic: they only
/// need to make drift, hysteresis and ringing visible at the contact
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorNoise {
    pub mode: SensorMode,
    /// Range noise σ, m.
    pub range_sigma: f64,
    pub baseline: [f64; CHANNELS],
    /// Relative response of each channel to the base moment.
    pub gains: [f64; CHANNELS],
    /// Counts on a unit-gain channel at the calibration depth.
    pub full_scale: f64,
    /// Depth at which a unit-gain channel reads `full_scale`, m.
    pub calibration_depth: f64,
    /// Mean drift, counts/s.
    pub drift_rate: f64,
    /// Per-tick σ of the drift-rate deviation, counts/s.
    pub walk_sigma: f64,
    /// Reversion time of the drift-rate deviation, s.
    pub walk_reversion_s: f64,
    pub white_sigma: f64,
    /// Tail amplitude after release as a fraction of the released signal.
    pub hysteresis_fraction: f64,
    pub hysteresis_tau_s: f64,
    /// Ringing at contact onset, counts on a unit-gain channel.
    pub ringing_amplitude: f64,
    pub ringing_hz: f64,
    pub ringing_tau_s: f64,
}

impl Default for SensorNoise {
    fn default() -> Self {
        Self {
            mode: SensorMode::IdealRange,
            range_sigma: 0.01,
            baseline: [1000.0; CHANNELS],
            gains: [1.0, 0.55, 0.3],
            full_scale: 100.0,
            calibration_depth: 0.08,
            drift_rate: 2.0,
            walk_sigma: 0.3,
            walk_reversion_s: 5.0,
            white_sigma: 0.5,
            hysteresis_fraction: 0.3,
            hysteresis_tau_s: 0.3,
            ringing_amplitude: 20.0,
            ringing_hz: 1.5,
            ringing_tau_s: 0.5,
        }
    }
}

impl SensorNoise {
    pub fn is_valid(&self) -> bool {
        let sigmas = [self.range_sigma, self.walk_sigma, self.white_sigma];
        sigmas.iter().all(|s| *s >= 0.0)
            && self.walk_reversion_s > 0.0
            && self.hysteresis_tau_s > 0.0
            && self.ringing_tau_s > 0.0
    }
}

/// IdealRange reading: the true depth plus Gaussian noise while in contact.
pub fn synth_range(depth: Option<f64>, sigma: f64, seed: u64, stream: u64, tick: u64) -> Option<f64> {
    depth.map(|d| d + sigma * normal_at(seed, stream, tick))
}

/// Damped sinusoid used for ringing, zero before onset.
fn ring(amplitude: f64, hz: f64, tau: f64, dt: f64) -> f64 {
    if dt < 0.0 {
        return 0.0;
    }
    amplitude * (-dt / tau).exp() * (2.0 * PI * hz * dt).sin()
}

/// Three-channel barometer at the base of one whisker.
#[derive(Debug, Clone)]
pub struct BarometricSensor {
    noise: SensorNoise,
    whisker: WhiskerSpec,
    seed: u64,
    stream: u64,
    dt: f64,
    /// Counts per N·m on a unit-gain channel.
    scale: f64,
    tick: u64,
    level: [f64; CHANNELS],
    rate_dev: [f64; CHANNELS],
    onset: Option<u64>,
    signal: [f64; CHANNELS],
    release: Option<(u64, [f64; CHANNELS])>,
    bursts: Vec<(f64, [f64; CHANNELS])>,
}

impl BarometricSensor {
    /// `stream` separates the random streams of sensors sharing a seed.
    pub fn new(noise: SensorNoise, whisker: WhiskerSpec, seed: u64, stream: u64, dt: f64) -> Self {
        let penetration = whisker.reach() - noise.calibration_depth;
        let m = moment_at_penetration(penetration, &whisker);
        let scale = if m > 0.0 { noise.full_scale / m } else { 0.0 };
        Self {
            noise,
            whisker,
            seed,
            stream,
            dt,
            scale,
            tick: 0,
            level: [0.0; CHANNELS],
            rate_dev: [0.0; CHANNELS],
            onset: None,
            signal: [0.0; CHANNELS],
            release: None,
            bursts: Vec::new(),
        }
    }

    /// Adds a contact-free ringing burst starting at `t0` seconds.
    pub fn inject_burst(&mut self, t0: f64, amplitude: [f64; CHANNELS]) {
        self.bursts.push((t0, amplitude));
    }

    /// Noise-free contact response per channel at forward depth `depth`.
    pub fn contact_signal(&self, depth: f64) -> [f64; CHANNELS] {
        let m = moment_at_penetration(self.whisker.reach() - depth, &self.whisker);
        let mut out = [0.0; CHANNELS];
        for (c, o) in out.iter_mut().enumerate() {
            *o = self.noise.gains[c] * self.scale * m;
        }
        out
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    /// Emits the next sample given the true contact depth, if any.
    pub fn sample(&mut self, depth: Option<f64>) -> SignalSample {
        let k = self.tick;
        let t = k as f64 * self.dt;
        let nz = self.noise;
        let contact = depth.map(|d| self.contact_signal(d));
        match (contact, self.onset) {
            (Some(_), None) => {
                self.onset = Some(k);
                self.release = None;
            }
            (None, Some(_)) => {
                self.onset = None;
                self.release = Some((k, self.signal));
            }
            _ => {}
        }
        self.signal = contact.unwrap_or([0.0; CHANNELS]);

        let mut out = [0.0; CHANNELS];
        for (c, o) in out.iter_mut().enumerate() {
            let ch = self.stream * 8 + c as u64;
            self.rate_dev[c] += nz.walk_sigma * normal_at(self.seed, ch + 4, k)
                - self.rate_dev[c] * self.dt / nz.walk_reversion_s;
            self.level[c] += (nz.drift_rate + self.rate_dev[c]) * self.dt;
            let mut v = nz.baseline[c] + self.level[c] + self.signal[c];
            if let Some((r, released)) = self.release {
                let since = (k - r) as f64 * self.dt;
                v += nz.hysteresis_fraction * released[c] * (-since / nz.hysteresis_tau_s).exp();
            }
            if let Some(o) = self.onset {
                let since = (k - o) as f64 * self.dt;
                v += ring(nz.ringing_amplitude * nz.gains[c], nz.ringing_hz, nz.ringing_tau_s, since);
            }
            for (t0, amp) in &self.bursts {
                v += ring(amp[c], nz.ringing_hz, nz.ringing_tau_s, t - t0);
            }
            v += nz.white_sigma * normal_at(self.seed, ch, k);
            *o = v;
        }
        self.tick += 1;
        SignalSample::new(k, out)
    }
}

/// Base moment once the wall is `penetration` closer than first touch.
fn moment_at_penetration(penetration: f64, whisker: &WhiskerSpec) -> f64 {
    if penetration <= 0.0 {
        return 0.0;
    }
    let d = penetration.min(0.999 * whisker.l_o / whisker.mount_angle.cos());
    base_moment(d, whisker).unwrap_or(0.0)
}

/// Contact-free barometer trace with injected ringing bursts.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeFlightTrace {
    pub samples: Vec<SignalSample>,
    /// Burst onsets, s.
    pub bursts: Vec<f64>,
}

/// `seconds` of free flight at 50 Hz with `n_bursts` ringing bursts shared
/// by all channels, onsets uniform in [3, seconds − 2] s and amplitudes
/// `ringing_amplitude · U(0.7, 1)` per channel.
pub fn free_flight_trace(seed: u64, seconds: f64, n_bursts: usize, noise: &SensorNoise) -> FreeFlightTrace {
    let dt = 0.02;
    let n = (seconds / dt).round() as usize;
    let mut sensor = BarometricSensor::new(*noise, WhiskerSpec::default(), seed, 0, dt);
    let mut rng = Stream::new(derive_seed(seed, "bursts", 0), 0);
    let mut bursts = Vec::with_capacity(n_bursts);
    for _ in 0..n_bursts {
        let t0 = rng.uniform(3.0, (seconds - 2.0).max(3.0));
        let mut amp = [0.0; CHANNELS];
        for a in amp.iter_mut() {
            *a = noise.ringing_amplitude * rng.uniform(0.7, 1.0);
        }
        sensor.inject_burst(t0, amp);
        bursts.push(t0);
    }
    let samples = (0..n).map(|_| sensor.sample(None)).collect();
    FreeFlightTrace { samples, bursts }
}
