//! Multi-seed navigation and exploration runs with aggregate metrics.

use crate::HarnessError;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use whisker_core::depth::DepthModel;
use whisker_core::rng::{derive_seed, Stream};
use whisker_core::sim::{run_episode_with, EpisodeConfig, EpisodeResult, MissionKind, TelemetryRow, Termination, World};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RoomConfig {
    pub side: f64,
    pub exit_width: f64,
}

impl Default for RoomConfig {
    fn default() -> Self {
        Self {
            side: 2.0,
            exit_width: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub mission: MissionKind,
    pub seeds: Vec<u64>,
    pub episode: EpisodeConfig,
    /// Explore only, when no fixed world is given: a square room rotated
    /// by a per-seed angle.
    pub room: RoomConfig,
    /// Cap the map at the embedded training-set and grid sizes.
    pub embedded_parity: bool,
}

impl CampaignConfig {
    pub fn new(mission: MissionKind, seeds: Vec<u64>) -> Self {
        Self {
            mission,
            seeds,
            episode: EpisodeConfig {
                mission,
                ..EpisodeConfig::default()
            },
            room: RoomConfig::default(),
            embedded_parity: false,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.seeds.is_empty() {
            return Err(HarnessError::InvalidConfig("seed list is empty".into()));
        }
        self.resolved_episode().validate()?;
        Ok(())
    }

    /// Episode settings with the mission and embedded limits applied.
    pub fn resolved_episode(&self) -> EpisodeConfig {
        let mut ep = EpisodeConfig {
            mission: self.mission,
            ..self.episode.clone()
        };
        if self.embedded_parity {
            ep.explore.map = ep.explore.map.embedded();
        }
        ep
    }
}

/// Room for `seed`: rotation uniform in [0, 2π).
pub fn seeded_room(room: &RoomConfig, seed: u64) -> Result<World, HarnessError> {
    let rotation = Stream::new(derive_seed(seed, "room", 0), 0).uniform(0.0, TAU);
    Ok(World::square_room(room.side, room.exit_width, rotation)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandOccupancy {
    pub segment: usize,
    pub contact_ticks: usize,
    pub in_band: usize,
    pub fraction: f64,
}

/// Per wall segment: ticks where a whisker touches it and every fused depth
/// lies in `[lo, hi]`.
pub fn band_occupancy(rows: &[TelemetryRow], lo: f64, hi: f64) -> Vec<BandOccupancy> {
    let mut counts: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for r in rows {
        let mut segs: Vec<usize> = [r.seg_l, r.seg_r].into_iter().flatten().collect();
        segs.dedup();
        if segs.is_empty() {
            continue;
        }
        let ds: Vec<f64> = [r.d_l, r.d_r].into_iter().flatten().collect();
        let ok = !ds.is_empty() && ds.iter().all(|d| (lo..=hi).contains(d));
        for s in segs {
            let c = counts.entry(s).or_default();
            c.0 += 1;
            c.1 += ok as usize;
        }
    }
    counts
        .into_iter()
        .map(|(segment, (n, k))| BandOccupancy {
            segment,
            contact_ticks: n,
            in_band: k,
            fraction: k as f64 / n as f64,
        })
        .collect()
}

/// Band occupancy over all contact ticks regardless of segment.
pub fn overall_band_occupancy(rows: &[TelemetryRow], lo: f64, hi: f64) -> Option<f64> {
    let contact: Vec<&TelemetryRow> = rows.iter().filter(|r| r.seg_l.is_some() || r.seg_r.is_some()).collect();
    if contact.is_empty() {
        return None;
    }
    let ok = contact
        .iter()
        .filter(|r| {
            let ds: Vec<f64> = [r.d_l, r.d_r].into_iter().flatten().collect();
            !ds.is_empty() && ds.iter().all(|d| (lo..=hi).contains(d))
        })
        .count();
    Some(ok as f64 / contact.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub error: Option<String>,
    pub termination: Option<Termination>,
    pub exit_found: bool,
    pub travel_m: Option<f64>,
    pub recon_mae_m: Option<f64>,
    pub recon_rmse_m: Option<f64>,
    pub ticks: u64,
    pub band: Vec<BandOccupancy>,
    pub band_overall: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation; zero for a single value.
    pub std: f64,
    pub n: usize,
}

impl MeanStd {
    pub fn of(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, std, n: xs.len() })
    }

    /// `"22.62 ± 6.26 m"` style.
    pub fn display(&self, unit: &str) -> String {
        format!("{:.2} ± {:.2} {unit}", self.mean, self.std)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub mission: MissionKind,
    pub seeds: Vec<u64>,
    pub runs: Vec<SeedSummary>,
    pub successes: usize,
    pub failures: usize,
    pub travel_m: Option<MeanStd>,
    pub recon_m: Option<MeanStd>,
    pub travel_text: Option<String>,
    pub recon_text: Option<String>,
}

pub struct SeedRun {
    pub seed: u64,
    pub world: World,
    pub result: Result<EpisodeResult, HarnessError>,
}

pub struct Campaign {
    pub report: CampaignReport,
    pub runs: Vec<SeedRun>,
}

fn summarize(run: &SeedRun, ep: &EpisodeConfig) -> SeedSummary {
    let (lo, hi) = (ep.explore.fsm.d_min, ep.explore.fsm.d_max);
    match &run.result {
        Ok(r) => SeedSummary {
            seed: run.seed,
            error: None,
            termination: Some(r.termination),
            exit_found: r.metrics.exit_found,
            travel_m: Some(r.metrics.travel_m),
            recon_mae_m: r.metrics.recon_mae_m,
            recon_rmse_m: r.metrics.recon_rmse_m,
            ticks: r.metrics.ticks,
            band: band_occupancy(&r.telemetry, lo, hi),
            band_overall: overall_band_occupancy(&r.telemetry, lo, hi),
        },
        Err(e) => SeedSummary {
            seed: run.seed,
            error: Some(e.to_json()),
            termination: None,
            exit_found: false,
            travel_m: None,
            recon_mae_m: None,
            recon_rmse_m: None,
            ticks: 0,
            band: Vec::new(),
            band_overall: None,
        },
    }
}

/// Runs every seed, in parallel, against `world` or, when exploring without
/// one, a seeded room. Navigation defaults to the baffle course. Episode
/// failures are recorded per seed.
pub fn run_campaign(
    cfg: &CampaignConfig,
    world: Option<&World>,
    model: Option<&DepthModel>,
) -> Result<Campaign, HarnessError> {
    cfg.validate()?;
    let ep = cfg.resolved_episode();
    let fixed = match (world, cfg.mission) {
        (Some(w), _) => Some(w.clone()),
        (None, MissionKind::Navigate) => Some(World::baffles()?),
        (None, MissionKind::Explore) => None,
    };
    let mut seeds = cfg.seeds.clone();
    seeds.sort_unstable();
    seeds.dedup();
    let runs: Vec<SeedRun> = seeds
        .par_iter()
        .map(|&seed| {
            let world = match &fixed {
                Some(w) => Ok(w.clone()),
                None => seeded_room(&cfg.room, seed),
            };
            match world {
                Ok(world) => {
                    let result = run_episode_with(&world, &ep, seed, model).map_err(HarnessError::from);
                    SeedRun { seed, world, result }
                }
                Err(e) => SeedRun {
                    seed,
                    world: World::empty(1.0),
                    result: Err(e),
                },
            }
        })
        .collect();
    let summaries: Vec<SeedSummary> = runs.iter().map(|r| summarize(r, &ep)).collect();
    let success = |s: &SeedSummary| match cfg.mission {
        MissionKind::Explore => s.exit_found,
        MissionKind::Navigate => s.termination == Some(Termination::Landed),
    };
    let successes = summaries.iter().filter(|s| success(s)).count();
    let travel: Vec<f64> = summaries.iter().filter_map(|s| s.travel_m).collect();
    let recon: Vec<f64> = summaries.iter().filter_map(|s| s.recon_mae_m).collect();
    let travel_m = MeanStd::of(&travel);
    let recon_m = MeanStd::of(&recon);
    let report = CampaignReport {
        mission: cfg.mission,
        seeds,
        successes,
        failures: summaries.len() - successes,
        travel_text: travel_m.map(|m| m.display("m")),
        recon_text: recon_m.map(|m| m.display("m")),
        travel_m,
        recon_m,
        runs: summaries,
    };
    Ok(Campaign { report, runs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(seg: Option<usize>, d: Option<f64>) -> TelemetryRow {
        TelemetryRow {
            tick: 0,
            t: 0.0,
            x: 0.0,
            y: 0.0,
            yaw: 0.0,
            state: "Follow".into(),
            substate: None,
            m_l: d,
            m_r: None,
            d_l: d,
            d_r: None,
            v_forward: 0.0,
            v_side: 0.0,
            yaw_rate: 0.0,
            seg_l: seg,
            seg_r: None,
        }
    }

    #[test]
    fn band_counts_per_segment() {
        let rows = vec![
            row(Some(0), Some(0.07)),
            row(Some(0), Some(0.12)),
            row(None, None),
            row(Some(2), Some(0.08)),
        ];
        let b = band_occupancy(&rows, 0.06, 0.10);
        assert_eq!(b.len(), 2);
        assert_eq!((b[0].segment, b[0].contact_ticks, b[0].in_band), (0, 2, 1));
        assert_eq!(b[1].fraction, 1.0);
        assert_eq!(overall_band_occupancy(&rows, 0.06, 0.10), Some(2.0 / 3.0));
    }

    #[test]
    fn mean_std_format() {
        let m = MeanStd::of(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(m.mean, 2.0);
        assert_eq!(m.std, 1.0);
        assert_eq!(m.display("m"), "2.00 ± 1.00 m");
        assert!(MeanStd::of(&[]).is_none());
    }

    #[test]
    fn empty_seed_list_rejected() {
        let cfg = CampaignConfig::new(MissionKind::Explore, Vec::new());
        assert!(matches!(run_campaign(&cfg, None, None), Err(HarnessError::InvalidConfig(_))));
    }

    #[test]
    fn baffle_navigation_reports_each_baffle() {
        let cfg = CampaignConfig::new(MissionKind::Navigate, vec![0]);
        let c = run_campaign(&cfg, None, None).unwrap();
        let s = &c.report.runs[0];
        assert!(s.error.is_none());
        let segs: Vec<usize> = s.band.iter().map(|b| b.segment).collect();
        assert_eq!(segs, vec![0, 1, 2]);
        assert!(s.band.iter().all(|b| (0.0..=1.0).contains(&b.fraction)));
    }

    #[test]
    fn results_sorted_by_seed() {
        let cfg = CampaignConfig::new(MissionKind::Navigate, vec![3, 1, 2, 1]);
        let c = run_campaign(&cfg, None, None).unwrap();
        assert_eq!(c.report.seeds, vec![1, 2, 3]);
        assert!(c.runs.iter().map(|r| r.seed).eq([1, 2, 3]));
    }
}
