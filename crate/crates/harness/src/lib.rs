//! Experiment orchestration for the whisker navigation stack: sweep
//! datasets, sensor-model training, depth metrics, navigation and
//! exploration campaigns, and benchmark outputs.

pub mod dataset;
mod error;
pub mod evaluate;
pub mod signalbench;
pub mod campaign;
pub mod config;
pub mod manifest;
pub mod memory;
pub mod prbm;
pub mod run;

pub use error::HarnessError;
