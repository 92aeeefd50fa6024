//! Choosing optimal modes and systems.
//!
//! Candidates whose top-level scores are maximal within `eps` form a tie set.
//! Among them the winner maximizes the product of its component scores: for
//! a fixed sum the product is largest when the components are equal, so the
//! criterion prefers the most evenly performing candidate.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::quad::Accumulator;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Default tolerance for both the score tie and the product tie.
pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct TieSet {
    /// Indices in ascending order.
    pub members: Vec<usize>,
    /// The maximal score.
    pub score: f64,
    pub eps: f64,
}

/// Indices whose score is at least `max − eps`.
pub fn tie_set(scores: &[f64], eps: f64) -> Result<TieSet> {
    if scores.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter("eps must be a finite non-negative number"));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidParameter("scores must be finite"));
    }
    let score = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let members = (0..scores.len()).filter(|&i| scores[i] >= score - eps).collect();
    Ok(TieSet { members, score, eps })
}

/// Outcome of the product criterion over a tie set.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Selection {
    /// Winning indices in ascending order; several when the products tie.
    pub winners: Vec<usize>,
    /// `(candidate, Σ ln component)` for every tie-set member.
    pub log_products: Vec<(usize, f64)>,
}

impl Selection {
    pub fn product_of(&self, candidate: usize) -> Option<f64> {
        self.log_products
            .iter()
            .find(|(i, _)| *i == candidate)
            .map(|(_, lp)| libm::exp(*lp))
    }
}

/// Optimal modes among `ties`; `rows[l]` holds the per-characteristic scores of mode `l`.
pub fn optimal_mode(rows: &[Vec<f64>], ties: &TieSet) -> Result<Selection> {
    max_product(rows, ties)
}

/// Optimal systems among `ties`; `rows[q]` holds the per-mode scores of system `q`.
pub fn optimal_system(rows: &[Vec<f64>], ties: &TieSet) -> Result<Selection> {
    max_product(rows, ties)
}

/// Products are compared through sums of logarithms; two candidates tie when
/// their log-products differ by at most `ties.eps`.
fn max_product(rows: &[Vec<f64>], ties: &TieSet) -> Result<Selection> {
    if ties.members.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut log_products = Vec::with_capacity(ties.members.len());
    for &candidate in &ties.members {
        let row = rows.get(candidate).ok_or(Error::IndexOutOfRange {
            what: "candidate",
            index: candidate,
            len: rows.len(),
        })?;
        if row.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut acc = Accumulator::default();
        for (component, &value) in row.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositiveComponent { candidate, component, value });
            }
            acc.add(libm::log(value));
        }
        log_products.push((candidate, acc.total()));
    }
    let best = log_products.iter().map(|(_, lp)| *lp).fold(f64::NEG_INFINITY, f64::max);
    let winners = log_products
        .iter()
        .filter(|(_, lp)| *lp >= best - ties.eps)
        .map(|(i, _)| *i)
        .collect();
    Ok(Selection { winners, log_products })
}
