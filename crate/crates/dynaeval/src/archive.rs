//! Report archives and trend forecasting.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dynaeval_core::trend::{grade_threshold, MAX_MONOMIAL_BASIS};
use dynaeval_core::{classify_trend, fit_forecast, forecast_at, next_examination_time, Crossing, History, Trend};
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::report::EvaluationReport;

/// Reports of one system ordered by examination time.
#[derive(Debug, Clone)]
pub struct Archive {
    pub entries: Vec<(PathBuf, EvaluationReport)>,
}

impl Archive {
    /// Loads every `*.json` file in `dir`.
    pub fn load(dir: &Path) -> Result<Self> {
        let listing = fs::read_dir(dir).map_err(|e| HarnessError::io(dir, e))?;
        let mut paths = Vec::new();
        for entry in listing {
            let path = entry.map_err(|e| HarnessError::io(dir, e))?.path();
            if path.extension().is_some_and(|x| x == "json") {
                paths.push(path);
            }
        }
        paths.sort();
        let entries = paths
            .into_iter()
            .map(|p| EvaluationReport::load(&p).map(|r| (p, r)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_reports(entries)
    }

    pub fn from_reports(mut entries: Vec<(PathBuf, EvaluationReport)>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(HarnessError::Archive(format!("need at least 2 reports, found {}", entries.len())));
        }
        entries.sort_by(|a, b| a.1.examination_time.total_cmp(&b.1.examination_time));
        let system = &entries[0].1.system_id;
        if let Some((p, r)) = entries.iter().find(|(_, r)| &r.system_id != system) {
            return Err(HarnessError::Archive(format!(
                "{} belongs to system {:?}, not {system:?}",
                p.display(),
                r.system_id
            )));
        }
        if let Some(w) = entries.windows(2).find(|w| w[0].1.examination_time >= w[1].1.examination_time) {
            return Err(HarnessError::Archive(format!(
                "{} and {} share examination time {}",
                w[0].0.display(),
                w[1].0.display(),
                w[1].1.examination_time
            )));
        }
        Ok(Self { entries })
    }

    pub fn history(&self) -> Result<History> {
        let points = self.entries.iter().map(|(_, r)| (r.examination_time, r.global.value)).collect();
        Ok(History::new(points)?)
    }
}

/// Threshold whose crossing triggers the next examination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VStar {
    /// Lower edge of the current grade band.
    Auto,
    Value(f64),
}

impl FromStr for VStar {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(VStar::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(VStar::Value(v)),
            _ => Err(format!("expected `auto` or a number, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastRequest {
    pub v_star: VStar,
    /// Defaults to twice the archive span.
    pub horizon: Option<f64>,
    /// Defaults to `min(J, 7)`.
    pub basis_size: Option<usize>,
    pub trend_tolerance: f64,
}

impl Default for ForecastRequest {
    fn default() -> Self {
        Self { v_star: VStar::Auto, horizon: None, basis_size: None, trend_tolerance: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForecastOutcome {
    pub system_id: String,
    pub history: Vec<(f64, f64)>,
    pub trend: Trend,
    pub basis_size: usize,
    /// Coefficients on the monomials of rescaled time.
    pub coefficients: Vec<f64>,
    /// `T_J` plus the last examination interval.
    pub next_time: f64,
    pub forecast_next: f64,
    pub extrapolation: bool,
    pub v_star: f64,
    pub v_star_rule: VStar,
    pub horizon: f64,
    pub crossing: Crossing,
    /// Crossing time measured from the first report.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossing_since_first: Option<f64>,
}

impl fmt::Display for ForecastOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let trend = format!("{:?}", self.trend).to_lowercase();
        writeln!(f, "system {}: {} reports, trend {trend}", self.system_id, self.history.len())?;
        writeln!(
            f,
            "forecast at t = {}: {}{}",
            self.next_time,
            self.forecast_next,
            if self.extrapolation { " (extrapolated)" } else { "" }
        )?;
        let rule = match self.v_star_rule {
            VStar::Auto => " (lower edge of current grade)",
            VStar::Value(_) => "",
        };
        writeln!(f, "threshold v* = {}{rule}, horizon {}", self.v_star, self.horizon)?;
        match (self.crossing, self.crossing_since_first) {
            (Crossing::At(t), Some(rel)) => write!(f, "next examination at t = {t} ({rel} after the first report)"),
            _ => write!(f, "no crossing within the horizon"),
        }
    }
}

pub fn forecast(archive: &Archive, req: &ForecastRequest) -> Result<ForecastOutcome> {
    let history = archive.history()?;
    let j = history.len();
    let basis_size = req.basis_size.unwrap_or(j.min(MAX_MONOMIAL_BASIS));
    let model = fit_forecast(&history, basis_size)?;
    let (t1, tj) = (history.first_time(), history.last_time());
    let samples = history.samples();
    let next_time = tj + (tj - samples[j - 2].0);
    let horizon = req.horizon.unwrap_or(2.0 * (tj - t1));
    let current = forecast_at(&model, tj);
    let v_star = match req.v_star {
        VStar::Auto => grade_threshold(current),
        VStar::Value(v) => v,
    };
    let crossing = next_examination_time(&model, v_star, horizon)?;
    Ok(ForecastOutcome {
        system_id: archive.entries[0].1.system_id.clone(),
        history: samples.to_vec(),
        trend: classify_trend(&history, req.trend_tolerance),
        basis_size,
        coefficients: model.coefficients().to_vec(),
        next_time,
        forecast_next: forecast_at(&model, next_time),
        extrapolation: model.is_extrapolation(next_time),
        v_star,
        v_star_rule: req.v_star,
        horizon,
        crossing,
        crossing_since_first: match crossing {
            Crossing::At(t) => Some(t - t1),
            Crossing::NoCrossing => None,
        },
    })
}
