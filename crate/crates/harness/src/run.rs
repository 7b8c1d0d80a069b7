//! Executes one experiment and writes its outputs and manifest.

use crate::campaign::{run_campaign, CampaignConfig};
use crate::config::{ExperimentConfig, Kind};
use crate::dataset::{default_sweep_world, gen_sweep_dataset, read_dataset, write_dataset};
use crate::evaluate::{eval_depth, train_depth_model, MetricsReport};
use crate::manifest::Manifest;
use crate::memory::{memory_report, EstimatorFootprint};
use crate::prbm::{grid_csv, run_prbm_grid};
use crate::signalbench::signal_bench;
use crate::HarnessError;
use serde::Serialize;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use whisker_core::depth::{DepthModel, FusionVariant};
use whisker_core::gpis::GpisSnapshot;
use whisker_core::signal::trace::write_processed;
use whisker_core::sim::{telemetry_bytes, MissionKind, World};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutput {
    pub manifest: PathBuf,
    pub outputs: Vec<PathBuf>,
}

struct Writer<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl Writer<'_> {
    fn bytes(&mut self, name: &str, data: &[u8]) -> Result<(), HarnessError> {
        let p = self.dir.join(name);
        std::fs::write(&p, data)?;
        self.written.push(p);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), HarnessError> {
        self.bytes(name, serde_json::to_string_pretty(value)?.as_bytes())
    }
}

fn load_world(cfg: &ExperimentConfig) -> Result<Option<World>, HarnessError> {
    Ok(match &cfg.world {
        Some(p) => Some(World::load(p)?),
        None => None,
    })
}

fn load_model(cfg: &ExperimentConfig) -> Result<Option<DepthModel>, HarnessError> {
    Ok(match cfg.model_path() {
        Some(p) => Some(DepthModel::load(&p)?),
        None => None,
    })
}

/// Validates `cfg`, runs it, and writes outputs plus `manifest.json` into
/// `cfg.out`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out)?;
    let mut manifest = Manifest::new(cfg.kind.name(), cfg, &cfg.seeds)?;
    for p in cfg.inputs() {
        manifest.add_input(&p)?;
    }
    let mut w = Writer {
        dir: &cfg.out,
        written: Vec::new(),
    };
    let seed = cfg.root_seed();
    let mut snapshots: Vec<GpisSnapshot> = Vec::new();
    match cfg.kind {
        Kind::Sweepdata => {
            let world = match load_world(cfg)? {
                Some(w) => w,
                None => default_sweep_world()?,
            };
            let rows = gen_sweep_dataset(&world, &cfg.sweep, seed)?;
            let mut buf = Vec::new();
            write_dataset(&mut buf, &rows)?;
            w.bytes("dataset.csv", &buf)?;
        }
        Kind::Train => {
            let rows = read_dataset(File::open(cfg.dataset_path())?)?;
            let (model, outcome) = train_depth_model(&rows, &cfg.training, seed)?;
            w.bytes("model.json", model.to_json()?.as_bytes())?;
            w.json("train.json", &outcome)?;
        }
        Kind::Evaldepth => {
            let rows = read_dataset(File::open(cfg.dataset_path())?)?;
            let model = load_model(cfg)?.ok_or_else(|| HarnessError::InvalidConfig("no model".into()))?;
            let variants: Vec<FusionVariant> = match cfg.variant {
                Some(v) => vec![v],
                None => FusionVariant::ALL.to_vec(),
            };
            let report = MetricsReport {
                variants: variants
                    .iter()
                    .map(|v| eval_depth(&rows, &model, *v, &cfg.fusion))
                    .collect::<Result<_, _>>()?,
            };
            w.bytes("metrics.csv", &report.to_csv()?)?;
            w.json("metrics.json", &report)?;
        }
        Kind::Navigate | Kind::Explore => {
            let mission = if cfg.kind == Kind::Navigate {
                MissionKind::Navigate
            } else {
                MissionKind::Explore
            };
            let camp = CampaignConfig {
                mission,
                seeds: cfg.seeds.clone(),
                episode: cfg.episode.clone(),
                room: cfg.room,
                embedded_parity: cfg.embedded_parity,
            };
            let world = load_world(cfg)?;
            let model = load_model(cfg)?;
            let c = run_campaign(&camp, world.as_ref(), model.as_ref())?;
            for run in &c.runs {
                if let Ok(r) = &run.result {
                    w.bytes(&format!("telemetry_{}.csv", run.seed), &telemetry_bytes(&r.telemetry))?;
                    if mission == MissionKind::Explore {
                        w.json(&format!("snapshots_{}.json", run.seed), &r.snapshots)?;
                        w.bytes(&format!("world_{}.json", run.seed), run.world.to_json().as_bytes())?;
                    }
                    snapshots.extend(r.snapshots.iter().cloned());
                }
            }
            w.json("campaign.json", &c.report)?;
        }
        Kind::Prbmgrid => {
            let rows = run_prbm_grid(&cfg.prbm)?;
            w.bytes("prbm_grid.csv", &grid_csv(&rows)?)?;
        }
        Kind::Signalbench => {
            let (report, samples, out) = signal_bench(&cfg.signal, seed)?;
            let path = cfg.out.join("signal_trace.csv");
            write_processed(BufWriter::new(File::create(&path)?), &samples, &out)?;
            w.written.push(path);
            w.json("signalbench.json", &report)?;
        }
    }
    if cfg.embedded_parity {
        let map = cfg.episode.explore.map.embedded();
        let est = EstimatorFootprint {
            architecture: match load_model(cfg)? {
                Some(m) => m.architecture,
                None => cfg.training.architecture.clone(),
            },
            window: cfg.episode.pipeline.window,
        };
        let report = memory_report(&map, &est).with_observed(&snapshots);
        w.json("memory.json", &report)?;
    }
    for p in &w.written {
        manifest.add_output(p)?;
    }
    let path = cfg.out.join("manifest.json");
    manifest.write(&path)?;
    Ok(RunOutput {
        manifest: path,
        outputs: w.written,
    })
}
