//! Evaluation history: trend classification, forecasting and scheduling of
//! the next examination.
//!
//! Forecasts are linear combinations of basis functions of the rescaled time
//! `s = (t − T_1) / (T_J − T_1)`, so a history keeps the same model when all
//! its times are shifted.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scales::Grade;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Largest monomial basis (degree 6).
pub const MAX_MONOMIAL_BASIS: usize = 7;
/// Number of scan steps across the horizon before bisection.
pub const SCAN_STEPS: usize = 10_000;

/// Global evaluations `V(T_j)` at strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct History {
    samples: Vec<(f64, f64)>,
}

impl History {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidHistory("at least two examinations are required"));
        }
        if samples.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(Error::InvalidHistory("times and values must be finite"));
        }
        if samples.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::InvalidHistory("times must be strictly increasing"));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first_time(&self) -> f64 {
        self.samples[0].0
    }

    pub fn last_time(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "snake_case"))]
pub enum Trend {
    Improving,
    Degrading,
    Stable,
    Mixed,
}

/// Improving / degrading when every step moves by more than `tol` in one
/// direction; stable when every value is within `tol` of the mean.
pub fn classify_trend(history: &History, tol: f64) -> Trend {
    let s = history.samples();
    if s.windows(2).all(|w| w[1].1 - w[0].1 > tol) {
        return Trend::Improving;
    }
    if s.windows(2).all(|w| w[0].1 - w[1].1 > tol) {
        return Trend::Degrading;
    }
    let mean = history.values().sum::<f64>() / s.len() as f64;
    if history.values().all(|v| (v - mean).abs() <= tol) {
        Trend::Stable
    } else {
        Trend::Mixed
    }
}

/// Basis functions of the rescaled time `s ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    /// `1, s, s², …` with the given number of terms.
    Monomial(usize),
    /// User-supplied functions.
    Custom(Vec<fn(f64) -> f64>),
}

impl Basis {
    pub fn size(&self) -> usize {
        match self {
            Basis::Monomial(n) => *n,
            Basis::Custom(fs) => fs.len(),
        }
    }

    fn eval_into(&self, s: f64, out: &mut Vec<f64>) {
        out.clear();
        match self {
            Basis::Monomial(n) => {
                let mut p = 1.0;
                for _ in 0..*n {
                    out.push(p);
                    p *= s;
                }
            }
            Basis::Custom(fs) => out.extend(fs.iter().map(|f| f(s))),
        }
    }
}

/// `V(t) = Σ a_j φ_j(s(t))` fitted over `[T_1, T_J]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastModel {
    basis: Basis,
    coefficients: Vec<f64>,
    window: (f64, f64),
}

impl ForecastModel {
    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `(T_1, T_J)`.
    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn rescale(&self, t: f64) -> f64 {
        (t - self.window.0) / (self.window.1 - self.window.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut phi = Vec::with_capacity(self.coefficients.len());
        self.basis.eval_into(self.rescale(t), &mut phi);
        self.coefficients.iter().zip(&phi).map(|(a, p)| a * p).sum()
    }

    /// True beyond the last fitted examination.
    pub fn is_extrapolation(&self, t: f64) -> bool {
        t > self.window.1
    }
}

/// Monomial fit with `basis_size` terms: interpolation when it equals the
/// history length, least squares when smaller.
pub fn fit_forecast(history: &History, basis_size: usize) -> Result<ForecastModel> {
    if basis_size > MAX_MONOMIAL_BASIS {
        return Err(Error::InvalidBasis("monomial basis is capped at degree 6"));
    }
    fit_forecast_with(history, Basis::Monomial(basis_size))
}

pub fn fit_forecast_with(history: &History, basis: Basis) -> Result<ForecastModel> {
    let size = basis.size();
    let j = history.len();
    if size == 0 {
        return Err(Error::InvalidBasis("basis must not be empty"));
    }
    if size > j {
        return Err(Error::InvalidBasis("basis larger than the history"));
    }
    let window = (history.first_time(), history.last_time());
    let mut model = ForecastModel { basis, coefficients: Vec::new(), window };
    let mut matrix = Vec::with_capacity(j * size);
    let mut phi = Vec::with_capacity(size);
    for &(t, _) in history.samples() {
        model.basis.eval_into(model.rescale(t), &mut phi);
        if phi.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidBasis("basis function is not finite on the sample times"));
        }
        matrix.extend_from_slice(&phi);
    }
    let rhs: Vec<f64> = history.values().collect();
    model.coefficients = linalg::least_squares(&matrix, &rhs, j, size)?;
    Ok(model)
}

/// `⟨A, Φ(t)⟩`. Times past `T_J` are extrapolations; see
/// [`ForecastModel::is_extrapolation`].
pub fn forecast_at(model: &ForecastModel, t: f64) -> f64 {
    model.eval(t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "snake_case"))]
pub enum Crossing {
    /// First time the forecast reaches the threshold.
    At(f64),
    /// The forecast stays above the threshold over the whole horizon.
    NoCrossing,
}

/// Lower edge of the grade band holding `value`: the threshold whose crossing
/// lowers the conceptual grade by one.
pub fn grade_threshold(value: f64) -> f64 {
    Grade::of_rating(value).lower_edge()
}

/// Smallest `t ∈ (T_J, T_J + horizon]` with forecast `≤ v_star`, located by
/// scanning [`SCAN_STEPS`] steps and bisecting the first bracket to machine
/// precision.
pub fn next_examination_time(model: &ForecastModel, v_star: f64, horizon: f64) -> Result<Crossing> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::InvalidParameter("horizon must be positive"));
    }
    if !v_star.is_finite() {
        return Err(Error::InvalidParameter("threshold must be finite"));
    }
    let start = model.window.1;
    let at_start = model.eval(start);
    if at_start < v_star {
        return Err(Error::AlreadyBelowThreshold { value: at_start, threshold: v_star });
    }
    if at_start == v_star {
        return Ok(Crossing::At(start));
    }
    let mut lo = start;
    for i in 1..=SCAN_STEPS {
        let hi = start + horizon * (i as f64 / SCAN_STEPS as f64);
        if model.eval(hi) <= v_star {
            return Ok(Crossing::At(bisect(model, v_star, lo, hi)));
        }
        lo = hi;
    }
    Ok(Crossing::NoCrossing)
}

/// Invariant: `eval(lo) > v_star >= eval(hi)`.
fn bisect(model: &ForecastModel, v_star: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        if model.eval(mid) <= v_star {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn history(points: &[(f64, f64)]) -> History {
        History::new(points.to_vec()).unwrap()
    }

    #[test]
    fn history_validation() {
        assert!(History::new(vec![(0.0, 1.0)]).is_err());
        assert!(History::new(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(History::new(vec![(1.0, 1.0), (0.0, 2.0)]).is_err());
        assert!(History::new(vec![(0.0, 1.0), (1.0, f64::NAN)]).is_err());
    }

    #[test]
    fn trend_classes() {
        let tol = 1e-6;
        assert_eq!(classify_trend(&history(&[(0.0, 4.0), (1.0, 4.2), (2.0, 4.5)]), tol), Trend::Improving);
        assert_eq!(classify_trend(&history(&[(0.0, 4.5), (1.0, 4.2), (2.0, 4.0)]), tol), Trend::Degrading);
        assert_eq!(
            classify_trend(&history(&[(0.0, 4.0), (1.0, 4.0 + 1e-9), (2.0, 4.0)]), tol),
            Trend::Stable
        );
        assert_eq!(classify_trend(&history(&[(0.0, 4.0), (1.0, 3.5), (2.0, 3.8)]), tol), Trend::Mixed);
    }

    #[test]
    fn affine_history_fit_and_extrapolation() {
        let h = history(&[(0.0, 5.0), (1.0, 4.5), (2.0, 4.0)]);
        let m = fit_forecast(&h, 2).unwrap();
        for &(t, v) in h.samples() {
            assert!((forecast_at(&m, t) - v).abs() < 1e-12);
        }
        assert!((forecast_at(&m, 3.0) - 3.5).abs() < 1e-12);
        assert!(m.is_extrapolation(3.0) && !m.is_extrapolation(2.0));
        let m3 = fit_forecast(&h, 3).unwrap();
        assert!(m3.coefficients()[2].abs() < 1e-12);
    }

    #[test]
    fn constant_history_gives_constant_model() {
        let h = history(&[(0.0, 4.2), (1.0, 4.2), (3.0, 4.2), (4.0, 4.2)]);
        let m = fit_forecast(&h, 4).unwrap();
        assert!((m.coefficients()[0] - 4.2).abs() < 1e-10);
        assert!(m.coefficients()[1..].iter().all(|a| a.abs() < 1e-10));
    }

    #[test]
    fn basis_size_errors() {
        let h = history(&[(0.0, 5.0), (1.0, 4.5)]);
        assert!(fit_forecast(&h, 3).is_err());
        assert!(fit_forecast(&h, 0).is_err());
        let long: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 4.0)).collect();
        assert!(fit_forecast(&History::new(long).unwrap(), 8).is_err());
        // s and 2s are collinear on any sample set
        let collinear = Basis::Custom(vec![|s| s, |s| 2.0 * s]);
        assert_eq!(
            fit_forecast_with(&history(&[(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)]), collinear),
            Err(Error::RankDeficient)
        );
    }

    #[test]
    fn least_squares_line_through_noisy_points() {
        // symmetric residuals around y = 5 - t
        let h = history(&[(0.0, 5.1), (1.0, 3.9), (2.0, 3.1), (3.0, 1.9)]);
        let m = fit_forecast(&h, 2).unwrap();
        let residual: f64 = h.samples().iter().map(|&(t, v)| (m.eval(t) - v).powi(2)).sum();
        // Oracle: normal equations for the line in raw time.
        let (n, st, sv, stt, stv) = h.samples().iter().fold((0.0, 0.0, 0.0, 0.0, 0.0), |a, &(t, v)| {
            (a.0 + 1.0, a.1 + t, a.2 + v, a.3 + t * t, a.4 + t * v)
        });
        let slope = (n * stv - st * sv) / (n * stt - st * st);
        let icept = (sv - slope * st) / n;
        for t in [0.0, 1.5, 4.0] {
            assert!((m.eval(t) - (icept + slope * t)).abs() < 1e-12);
        }
        assert!(residual > 0.0);
    }

    #[test]
    fn custom_basis_fits() {
        let basis = Basis::Custom(vec![|_| 1.0, |s| libm::exp(-s)]);
        let h = history(&[(0.0, 2.0 + 3.0), (1.0, 2.0 + 3.0 * libm::exp(-1.0))]);
        let m = fit_forecast_with(&h, basis).unwrap();
        assert!((m.coefficients()[0] - 2.0).abs() < 1e-12);
        assert!((m.coefficients()[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn affine_crossing_is_exact() {
        let h = history(&[(0.0, 5.0), (1.0, 4.5), (2.0, 4.0)]);
        let m = fit_forecast(&h, 2).unwrap();
        match next_examination_time(&m, 3.0, 10.0).unwrap() {
            Crossing::At(t) => assert!((t - 4.0).abs() < 1e-9, "{t}"),
            Crossing::NoCrossing => panic!("expected a crossing"),
        }
        assert_eq!(next_examination_time(&m, 3.0, 1.0).unwrap(), Crossing::NoCrossing);
        assert!(matches!(
            next_examination_time(&m, 4.5, 1.0),
            Err(Error::AlreadyBelowThreshold { .. })
        ));
        assert!(next_examination_time(&m, 3.0, 0.0).is_err());
    }

    #[test]
    fn constant_model_never_crosses() {
        let h = history(&[(0.0, 4.5), (1.0, 4.5)]);
        let m = fit_forecast(&h, 2).unwrap();
        assert_eq!(next_examination_time(&m, 3.0, 100.0).unwrap(), Crossing::NoCrossing);
    }

    #[test]
    fn grade_threshold_is_lower_band_edge() {
        assert_eq!(grade_threshold(4.3), 4.0);
        assert_eq!(grade_threshold(3.99), 3.0);
        assert_eq!(grade_threshold(5.0), 5.0);
    }
}
