//! Sampled characteristics, corridors, deviation signals and their norms.
//!
//! All signals live on a uniform [`SamplingGrid`] starting at `t = 0`. The
//! continuous-time norms are approximated by the maximum over samples
//! (uniform metric) and by the trapezoid rule (mean-squared metric).

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::quad;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Uniform time grid `t_i = i * dt`, `i = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SamplingGrid {
    dt: f64,
    count: usize,
}

impl SamplingGrid {
    pub fn new(dt: f64, count: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) || count < 2 {
            return Err(Error::InvalidGrid { dt, count });
        }
        Ok(Self { dt, count })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Duration `T = dt * (count - 1)`.
    pub fn duration(&self) -> f64 {
        self.dt * (self.count - 1) as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.time(i))
    }

    /// Same sample count and a time step equal up to rounding.
    pub fn is_compatible(&self, other: &SamplingGrid) -> bool {
        self.count == other.count
            && (self.dt - other.dt).abs() <= 1e-12 * self.dt.max(other.dt)
    }
}

/// One sampled characteristic of element `element` under mode `mode`.
#[derive(Debug, Clone, PartialEq)]
pub struct Characteristic {
    element: usize,
    mode: usize,
    index: usize,
    grid: SamplingGrid,
    values: Vec<f64>,
    label: String,
}

impl Characteristic {
    pub fn new(
        element: usize,
        mode: usize,
        index: usize,
        grid: SamplingGrid,
        values: Vec<f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(Error::LengthMismatch { expected: grid.count(), found: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { element, mode, index, grid, values, label: label.into() })
    }

    pub fn element(&self) -> usize {
        self.element
    }

    pub fn mode(&self) -> usize {
        self.mode
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// A corridor bound: either constant over time or sampled on the grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(untagged))]
pub enum Bound {
    Constant(f64),
    Series(Vec<f64>),
}

impl Bound {
    /// Value at sample `i`; constants broadcast.
    pub fn at(&self, i: usize) -> f64 {
        match self {
            Bound::Constant(c) => *c,
            Bound::Series(s) => s[i],
        }
    }

    /// Sample count of a series bound, `None` for a constant.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> Option<usize> {
        match self {
            Bound::Constant(_) => None,
            Bound::Series(s) => Some(s.len()),
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            Bound::Constant(c) => c.is_finite(),
            Bound::Series(s) => s.iter().all(|v| v.is_finite()),
        }
    }
}

impl From<f64> for Bound {
    fn from(c: f64) -> Self {
        Bound::Constant(c)
    }
}

impl From<Vec<f64>> for Bound {
    fn from(s: Vec<f64>) -> Self {
        Bound::Series(s)
    }
}

/// Reference band `[ref_lo, ref_hi]` nested in permissible band `[perm_lo, perm_hi]`
/// for one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Corridor {
    criterion: usize,
    ref_lo: Bound,
    ref_hi: Bound,
    perm_lo: Bound,
    perm_hi: Bound,
    len: Option<usize>,
}

impl Corridor {
    /// Validates finiteness, equal series lengths and the nesting
    /// `perm_lo <= ref_lo <= ref_hi <= perm_hi` at every sample.
    pub fn new(
        criterion: usize,
        ref_lo: impl Into<Bound>,
        ref_hi: impl Into<Bound>,
        perm_lo: impl Into<Bound>,
        perm_hi: impl Into<Bound>,
    ) -> Result<Self> {
        let (ref_lo, ref_hi, perm_lo, perm_hi) =
            (ref_lo.into(), ref_hi.into(), perm_lo.into(), perm_hi.into());
        let mut len = None;
        for b in [&ref_lo, &ref_hi, &perm_lo, &perm_hi] {
            if !b.is_finite() {
                return Err(Error::CorridorViolation { sample: 0, detail: "non-finite bound" });
            }
            match (len, b.len()) {
                (None, Some(n)) => len = Some(n),
                (Some(a), Some(n)) if a != n => {
                    return Err(Error::LengthMismatch { expected: a, found: n })
                }
                _ => {}
            }
        }
        if len == Some(0) {
            return Err(Error::EmptyInput);
        }
        for i in 0..len.unwrap_or(1) {
            let (rl, rh, pl, ph) = (ref_lo.at(i), ref_hi.at(i), perm_lo.at(i), perm_hi.at(i));
            if rl > rh {
                return Err(Error::CorridorViolation { sample: i, detail: "ref_lo > ref_hi" });
            }
            if pl > rl {
                return Err(Error::CorridorViolation { sample: i, detail: "perm_lo > ref_lo" });
            }
            if rh > ph {
                return Err(Error::CorridorViolation { sample: i, detail: "ref_hi > perm_hi" });
            }
        }
        Ok(Self { criterion, ref_lo, ref_hi, perm_lo, perm_hi, len })
    }

    pub fn criterion(&self) -> usize {
        self.criterion
    }

    pub fn ref_lo(&self) -> &Bound {
        &self.ref_lo
    }

    pub fn ref_hi(&self) -> &Bound {
        &self.ref_hi
    }

    pub fn perm_lo(&self) -> &Bound {
        &self.perm_lo
    }

    pub fn perm_hi(&self) -> &Bound {
        &self.perm_hi
    }

    /// Ok if every series bound has exactly `grid.count()` samples.
    pub fn check_grid(&self, grid: &SamplingGrid) -> Result<()> {
        match self.len {
            Some(n) if n != grid.count() => Err(Error::GridMismatch),
            _ => Ok(()),
        }
    }

    /// Largest single-sided gap between the two bands at sample `i`.
    fn envelope_at(&self, i: usize) -> f64 {
        let below = self.ref_lo.at(i) - self.perm_lo.at(i);
        let above = self.perm_hi.at(i) - self.ref_hi.at(i);
        below.max(above)
    }
}

/// Pointwise distance from a characteristic to its reference band.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationSignal {
    grid: SamplingGrid,
    values: Vec<f64>,
}

impl DeviationSignal {
    pub fn new(grid: SamplingGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(Error::LengthMismatch { expected: grid.count(), found: values.len() });
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if value < 0.0 {
                return Err(Error::NegativeDeviation { index, value });
            }
        }
        Ok(Self { grid, values })
    }

    /// Constant signal `value` on `grid`.
    pub fn constant(grid: SamplingGrid, value: f64) -> Result<Self> {
        Self::new(grid, alloc::vec![value; grid.count()])
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest sample.
    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Metric in which a deviation signal is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "snake_case"))]
pub enum Metric {
    /// Sup norm, `C_0[0, T]`.
    Uniform,
    /// Mean-squared norm, `L_2[0, T]`.
    MeanSquared,
}

/// Pointwise distance to `[ref_lo, ref_hi]`: zero inside, gap to the nearest
/// bound outside.
pub fn distance_to_domain(ch: &Characteristic, corridor: &Corridor) -> Result<DeviationSignal> {
    corridor.check_grid(ch.grid())?;
    let values = ch
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let lo = corridor.ref_lo.at(i);
            let hi = corridor.ref_hi.at(i);
            if v < lo {
                lo - v
            } else if v > hi {
                v - hi
            } else {
                0.0
            }
        })
        .collect();
    DeviationSignal::new(*ch.grid(), values)
}

/// Maximum over samples.
pub fn norm_uniform(dev: &DeviationSignal) -> f64 {
    sup_abs(dev.values())
}

/// `sqrt` of the trapezoid rule applied to `dev²` over `[0, T]`.
pub fn norm_l2(dev: &DeviationSignal) -> f64 {
    let v = dev.values();
    quad::l2_by(v.len(), dev.grid.dt(), |i| v[i])
}

/// Norm including finite-difference derivatives of orders `0..order`.
///
/// `Uniform` takes the maximum of the sup norms of each derivative;
/// `MeanSquared` takes the root of the summed squared `L_2` norms.
/// `order = 1` is exactly [`norm_uniform`] / [`norm_l2`].
pub fn norm_with_derivatives(dev: &DeviationSignal, order: u8, metric: Metric) -> Result<f64> {
    if !(1..=3).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    let n = dev.values.len();
    let needed = order as usize + 1;
    if n < needed {
        return Err(Error::TooFewSamples { needed, found: n });
    }
    let dt = dev.grid.dt();
    let mut current: Vec<f64> = dev.values.clone();
    let mut uniform: f64 = 0.0;
    let mut squared = quad::Accumulator::default();
    for p in 0..order {
        if p > 0 {
            current = derivative(&current, dt);
        }
        match metric {
            Metric::Uniform => uniform = uniform.max(sup_abs(&current)),
            Metric::MeanSquared => {
                squared.add(quad::trapezoid_by(n, dt, |i| current[i] * current[i]))
            }
        }
    }
    Ok(match metric {
        Metric::Uniform => uniform,
        Metric::MeanSquared => libm::sqrt(squared.total()),
    })
}

/// Largest norm reachable by a characteristic confined to the permissible band.
///
/// Returns [`Error::DegenerateCorridor`] when the two bands coincide.
pub fn h_max_for(corridor: &Corridor, metric: Metric, grid: &SamplingGrid) -> Result<f64> {
    corridor.check_grid(grid)?;
    let n = grid.count();
    let h = match metric {
        Metric::Uniform => (0..n).map(|i| corridor.envelope_at(i)).fold(0.0, f64::max),
        Metric::MeanSquared => quad::l2_by(n, grid.dt(), |i| corridor.envelope_at(i)),
    };
    if h > 0.0 {
        Ok(h)
    } else {
        Err(Error::DegenerateCorridor)
    }
}

fn sup_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Central differences inside, second-order one-sided stencils at the ends.
/// Needs at least three samples.
fn derivative(v: &[f64], dt: f64) -> Vec<f64> {
    let n = v.len();
    let mut d = alloc::vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - v[i - 1]) / (2.0 * dt);
    }
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dt);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dt);
    d
}
