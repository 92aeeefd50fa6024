//! File formats, the evaluation pipeline, synthetic data and the command-line
//! front end for `dynaeval-core`.

pub mod archive;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod select;
pub mod synth;

pub use archive::{forecast, Archive, ForecastOutcome, ForecastRequest, VStar};
pub use config::RunConfig;
pub use dataset::{load_dataset, Dataset, DatasetManifest};
pub use error::{Coord, HarnessError, Result};
pub use pipeline::evaluate;
pub use report::{EvaluationReport, SCHEMA_VERSION};
pub use select::{compare, select_mode, Choice};
pub use synth::{generate, SynthSpec, Synthetic};
