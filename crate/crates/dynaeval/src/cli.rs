use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use dynaeval_core::selection::DEFAULT_EPS;

use crate::archive::{forecast, Archive, ForecastRequest, VStar};
use crate::config::RunConfig;
use crate::dataset::load_dataset;
use crate::error::{HarnessError, Result};
use crate::pipeline::evaluate;
use crate::report::EvaluationReport;
use crate::select::{compare, select_mode};
use crate::synth::{generate, SynthSpec};

#[derive(Debug, Parser)]
#[command(name = "dynaeval", version, about = "Multilevel evaluation of dynamical systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a dataset and write the report.
    Evaluate {
        manifest: PathBuf,
        config: PathBuf,
        /// Report path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Directory for per-level CSV tables.
        #[arg(long)]
        plot_data: Option<PathBuf>,
        /// Print the elapsed time to stderr.
        #[arg(long)]
        time: bool,
    },
    /// Pick the optimal operating mode from a report.
    SelectMode {
        report: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long)]
        json: bool,
    },
    /// Pick the optimal system among several reports.
    Compare {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long)]
        json: bool,
    },
    /// Forecast the global score over a directory of reports.
    Forecast {
        archive: PathBuf,
        /// `auto` or a threshold value.
        #[arg(long, default_value = "auto", allow_hyphen_values = true)]
        v_star: VStar,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        basis_size: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Write a synthetic dataset described by a spec file.
    Generate {
        spec: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Overrides the seed in the spec.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Load and check a dataset without evaluating it.
    Validate { manifest: PathBuf },
}

/// Runs one command, writing results to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let stdout_err = |e| HarnessError::io("<stdout>", e);
    match cli.command {
        Command::Evaluate { manifest, config, output, plot_data, time } => {
            let start = Instant::now();
            let dataset = load_dataset(&manifest)?;
            let cfg = RunConfig::read(&config)?;
            let report = evaluate(&dataset, &cfg)?;
            match output {
                Some(path) => report.save(&path)?,
                None => out.write_all(report.to_json().as_bytes()).map_err(stdout_err)?,
            }
            if let Some(dir) = plot_data {
                report.write_plot_data(&dir)?;
            }
            if time {
                eprintln!("evaluated {} cells in {:.3} s", report.cells.len(), start.elapsed().as_secs_f64());
            }
        }
        Command::SelectMode { report, eps, json } => {
            let choice = select_mode(&EvaluationReport::load(&report)?, eps)?;
            emit(out, &choice, json)?;
        }
        Command::Compare { reports, eps, json } => {
            let loaded = reports.iter().map(|p| EvaluationReport::load(p)).collect::<Result<Vec<_>>>()?;
            let choice = compare(&loaded, eps)?;
            emit(out, &choice, json)?;
        }
        Command::Forecast { archive, v_star, horizon, basis_size, json } => {
            let archive = Archive::load(&archive)?;
            let req = ForecastRequest { v_star, horizon, basis_size, ..ForecastRequest::default() };
            emit(out, &forecast(&archive, &req)?, json)?;
        }
        Command::Generate { spec, output, seed } => {
            let mut spec = SynthSpec::read(&spec)?;
            if let Some(seed) = seed {
                spec.seed = seed;
            }
            let syn = generate(&spec)?;
            let manifest = syn.write(&output)?;
            writeln!(
                out,
                "wrote {} ({} injected cells of {})",
                manifest.display(),
                syn.injected_cells(),
                syn.expected.len()
            )
            .map_err(stdout_err)?;
        }
        Command::Validate { manifest } => {
            let ds = load_dataset(&manifest)?;
            let s = ds.shape;
            writeln!(
                out,
                "ok: {} with {} elements, {} modes, {} characteristics, {} criteria, {} samples per signal",
                ds.manifest.system_id,
                s.elements,
                s.modes,
                s.characteristics,
                s.criteria,
                ds.grid.count()
            )
            .map_err(stdout_err)?;
        }
    }
    Ok(())
}

fn emit<T: serde::Serialize + std::fmt::Display>(out: &mut dyn Write, value: &T, json: bool) -> Result<()> {
    let text = if json {
        serde_json::to_string_pretty(value).expect("result serializes")
    } else {
        value.to_string()
    };
    writeln!(out, "{text}").map_err(|e| HarnessError::io("<stdout>", e))
}
