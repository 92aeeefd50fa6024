//! Optimal mode and optimal system selection over reports.

use std::fmt;

use dynaeval_core::{optimal_mode, optimal_system, tie_set, Selection, TieSet};
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::report::EvaluationReport;

/// Outcome of a selection, with the scores and products behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Choice {
    /// Candidate labels, indexed like `scores`.
    pub candidates: Vec<String>,
    pub scores: Vec<f64>,
    pub ties: TieSet,
    /// `(candidate, product of its components)` for every tie-set member.
    pub products: Vec<(usize, f64)>,
    /// `(candidate, sum of log components)`, the quantity actually compared.
    pub log_products: Vec<(usize, f64)>,
    pub winners: Vec<usize>,
}

impl Choice {
    fn new(candidates: Vec<String>, scores: Vec<f64>, rows: &[Vec<f64>], ties: TieSet, sel: Selection) -> Self {
        let products = sel.log_products.iter().map(|&(i, _)| (i, rows[i].iter().product())).collect();
        Self { candidates, scores, ties, products, log_products: sel.log_products, winners: sel.winners }
    }

    pub fn winner_labels(&self) -> Vec<&str> {
        self.winners.iter().map(|&i| self.candidates[i].as_str()).collect()
    }
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "best score {} (eps {})", self.ties.score, self.ties.eps)?;
        writeln!(f, "tie set:")?;
        for &(i, p) in &self.products {
            let mark = if self.winners.contains(&i) { "*" } else { " " };
            writeln!(f, " {mark} {} score {} product {}", self.candidates[i], self.scores[i], p)?;
        }
        write!(f, "selected: {}", self.winner_labels().join(", "))
    }
}

/// Modes tied on their score, broken by the product of their
/// per-characteristic scores.
pub fn select_mode(report: &EvaluationReport, eps: f64) -> Result<Choice> {
    let scores = report.mode_rollup.mode.clone();
    let ties = tie_set(&scores, eps)?;
    let sel = optimal_mode(&report.mode_rollup.criterion, &ties)?;
    Ok(Choice::new(report.labels.modes.clone(), scores, &report.mode_rollup.criterion, ties, sel))
}

/// Systems tied on their global score, broken by the product of their mode
/// scores. All reports must share the same modes.
pub fn compare(reports: &[EvaluationReport], eps: f64) -> Result<Choice> {
    let Some(first) = reports.first() else {
        return Err(HarnessError::Config("compare needs at least one report".into()));
    };
    if let Some(r) = reports.iter().find(|r| r.labels.modes != first.labels.modes) {
        return Err(HarnessError::Config(format!(
            "system {:?} has different modes from {:?}",
            r.system_id, first.system_id
        )));
    }
    let scores: Vec<f64> = reports.iter().map(|r| r.global.value).collect();
    let rows: Vec<Vec<f64>> = reports.iter().map(|r| r.mode_rollup.mode.clone()).collect();
    let ties = tie_set(&scores, eps)?;
    let sel = optimal_system(&rows, &ties)?;
    let names = reports.iter().map(|r| r.system_id.clone()).collect();
    Ok(Choice::new(names, scores, &rows, ties, sel))
}
