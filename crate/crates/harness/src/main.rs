use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use whisker_core::depth::FusionVariant;
use whisker_harness::config::{ExperimentConfig, Kind};
use whisker_harness::run::run_experiment;
use whisker_harness::HarnessError;

#[derive(Parser)]
#[command(name = "whisker", version, about = "Whisker tactile navigation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config JSON; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed(s), comma separated or repeated.
    #[arg(long, global = true, value_delimiter = ',')]
    seed: Vec<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Constrain the map to the embedded sizes and write memory.json.
    #[arg(long, global = true)]
    embedded_parity: bool,
    /// World JSON file.
    #[arg(long, global = true)]
    world: Option<PathBuf>,
    /// Sweep dataset CSV.
    #[arg(long, global = true)]
    dataset: Option<PathBuf>,
    /// Trained depth model JSON.
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// Estimator variant for evaldepth; all when omitted.
    #[arg(long, global = true)]
    variant: Option<Variant>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Generate the approach-and-sweep dataset.
    Sweepdata,
    /// Train the depth model on a dataset.
    Train,
    /// Depth, orientation and reconstruction errors per estimator.
    Evaldepth,
    /// Wall-following campaign.
    Navigate,
    /// Exploration campaign.
    Explore,
    /// Normal force over placement angle and depth.
    Prbmgrid,
    /// False-positive rates of the signal pipeline modes.
    Signalbench,
}

#[derive(ValueEnum, Clone, Copy)]
enum Variant {
    Mlp,
    MlpKfSimplified,
    MlpKfFull,
}

impl From<Variant> for FusionVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Mlp => FusionVariant::MeasurementOnly,
            Variant::MlpKfSimplified => FusionVariant::Simplified,
            Variant::MlpKfFull => FusionVariant::Full,
        }
    }
}

impl From<Command> for Kind {
    fn from(c: Command) -> Self {
        match c {
            Command::Sweepdata => Kind::Sweepdata,
            Command::Train => Kind::Train,
            Command::Evaldepth => Kind::Evaldepth,
            Command::Navigate => Kind::Navigate,
            Command::Explore => Kind::Explore,
            Command::Prbmgrid => Kind::Prbmgrid,
            Command::Signalbench => Kind::Signalbench,
        }
    }
}

fn resolve(cli: Cli) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    cfg.kind = cli.command.into();
    if !cli.seed.is_empty() {
        cfg.seeds = cli.seed;
    }
    if let Some(o) = cli.out {
        cfg.out = o;
    }
    cfg.embedded_parity |= cli.embedded_parity;
    if cli.world.is_some() {
        cfg.world = cli.world;
    }
    if cli.dataset.is_some() {
        cfg.dataset = cli.dataset;
    }
    if cli.model.is_some() {
        cfg.model = cli.model;
    }
    if let Some(v) = cli.variant {
        cfg.variant = Some(v.into());
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match resolve(cli).and_then(|cfg| run_experiment(&cfg)) {
        Ok(out) => {
            println!("{}", serde_json::to_string(&out).unwrap_or_default());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}
