//! Evaluation reports: the JSON artifact written by `evaluate` and read by
//! the selection and forecasting commands.

use std::fs;
use std::path::Path;

use dynaeval_core::{
    Disturbance, ElementRollup, EvalCounts, GlobalScore, LocalEvaluation, ModeRollup, ScaleConfig, Shape,
    WeightProfile,
};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Labels {
    pub elements: Vec<String>,
    pub modes: Vec<String>,
    pub characteristics: Vec<String>,
    pub criteria: Vec<String>,
}

/// Norms of a derivative-augmented deviation signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeNorms {
    pub order: u8,
    pub uniform: f64,
    pub l2: f64,
}

/// Everything computed for one `(n, l, m, k)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub element: usize,
    pub mode: usize,
    pub characteristic: usize,
    pub criterion: usize,
    /// Permissible amplitude `A` (uniform `h_max`).
    pub amplitude: f64,
    /// Mean-squared `h_max`.
    pub h_max_l2: f64,
    pub norm_uniform: f64,
    pub norm_l2: f64,
    pub evaluation: LocalEvaluation,
    pub disturbance: Disturbance,
    pub label: String,
    pub continuous_uniform: f64,
    pub continuous_l2: f64,
    pub discrete_uniform: usize,
    pub discrete_l2: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivatives: Option<DerivativeNorms>,
}

/// Conceptual labels of every aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conceptual {
    pub global: String,
    /// `[n]`
    pub elements: Vec<String>,
    /// `[l]`
    pub modes: Vec<String>,
    /// `[n][l]`
    pub element_modes: Vec<Vec<String>>,
    /// `[l][m]`
    pub mode_characteristics: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema_version: String,
    pub system_id: String,
    pub examination_time: f64,
    pub labels: Labels,
    pub shape: Shape,
    pub scale: ScaleConfig,
    pub weights: WeightProfile,
    pub orders: Vec<u8>,
    pub counts: EvalCounts,
    /// Row-major over `(n, l, m, k)`.
    pub cells: Vec<CellReport>,
    pub element_rollup: ElementRollup,
    pub mode_rollup: ModeRollup,
    pub global: GlobalScore,
    pub conceptual: Conceptual,
}

impl EvaluationReport {
    pub fn cell(&self, n: usize, l: usize, m: usize, k: usize) -> &CellReport {
        &self.cells[self.shape.offset(n, l, m, k)]
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| HarnessError::Schema(e.to_string()))?;
        let version = value
            .get("schema_version")
            .and_then(|v| v.as_str())
            .ok_or_else(|| HarnessError::Schema("missing schema_version".into()))?;
        if version.split('.').next() != SCHEMA_VERSION.split('.').next() {
            return Err(HarnessError::Schema(version.to_string()));
        }
        let report: Self = serde_json::from_value(value).map_err(|e| HarnessError::Schema(e.to_string()))?;
        if report.cells.len() != report.shape.cell_count() {
            return Err(HarnessError::Schema(format!(
                "{} cells for shape with {} cells",
                report.cells.len(),
                report.shape.cell_count()
            )));
        }
        Ok(report)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| HarnessError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            HarnessError::Schema(msg) => HarnessError::parse(path, format!("report schema: {msg}")),
            other => other,
        })
    }

    /// Per-level CSV tables for external plotting.
    pub fn write_plot_data(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        let l = &self.labels;
        let conc = &self.conceptual;

        let mut cells = Table::new(&[
            "element", "mode", "characteristic", "criterion", "e_uniform", "e_l2", "grade", "disturbance",
        ]);
        for c in &self.cells {
            cells.row(vec![
                l.elements[c.element].clone(),
                l.modes[c.mode].clone(),
                l.characteristics[c.characteristic].clone(),
                l.criteria[c.criterion].clone(),
                c.evaluation.e_uniform.to_string(),
                c.evaluation.e_l2.to_string(),
                c.evaluation.grade.to_string(),
                c.disturbance.to_string(),
            ]);
        }
        cells.write(&dir.join("cells.csv"))?;

        let er = &self.element_rollup;
        let mut em = Table::new(&["element", "mode", "score", "label"]);
        for (n, row) in er.characteristic.iter().enumerate() {
            for (li, v) in row.iter().enumerate() {
                em.row(vec![l.elements[n].clone(), l.modes[li].clone(), v.to_string(), conc.element_modes[n][li].clone()]);
            }
        }
        em.write(&dir.join("element_modes.csv"))?;

        let mut el = Table::new(&["element", "score", "label"]);
        for (n, v) in er.element.iter().enumerate() {
            el.row(vec![l.elements[n].clone(), v.to_string(), conc.elements[n].clone()]);
        }
        el.write(&dir.join("elements.csv"))?;

        let mr = &self.mode_rollup;
        let mut mc = Table::new(&["mode", "characteristic", "score", "label"]);
        for (li, row) in mr.criterion.iter().enumerate() {
            for (m, v) in row.iter().enumerate() {
                mc.row(vec![
                    l.modes[li].clone(),
                    l.characteristics[m].clone(),
                    v.to_string(),
                    conc.mode_characteristics[li][m].clone(),
                ]);
            }
        }
        mc.write(&dir.join("mode_characteristics.csv"))?;

        let mut md = Table::new(&["mode", "score", "label"]);
        for (li, v) in mr.mode.iter().enumerate() {
            md.row(vec![l.modes[li].clone(), v.to_string(), conc.modes[li].clone()]);
        }
        md.write(&dir.join("modes.csv"))?;

        let mut gl = Table::new(&["system", "examination_time", "score", "via_elements", "via_modes", "label"]);
        gl.row(vec![
            self.system_id.clone(),
            self.examination_time.to_string(),
            self.global.value.to_string(),
            self.global.via_elements.to_string(),
            self.global.via_modes.to_string(),
            conc.global.clone(),
        ]);
        gl.write(&dir.join("global.csv"))
    }
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    fn row(&mut self, r: Vec<String>) {
        self.rows.push(r);
    }

    fn write(&self, path: &Path) -> Result<()> {
        let err = |e: csv::Error| HarnessError::parse(path, e);
        let mut w = csv::Writer::from_path(path).map_err(err)?;
        w.write_record(&self.header).map_err(err)?;
        for r in &self.rows {
            w.write_record(r).map_err(err)?;
        }
        w.flush().map_err(|e| HarnessError::io(path, e))
    }
}
