//! Evaluation scales: continuous, discrete, conceptual and the hybrid
//! precise-rating scale.
//!
//! The hybrid scale maps a deviation signal to a real number in
//! `{2} ∪ [3, 4) ∪ [4, 5) ∪ {5}`. The integer part is the conceptual grade;
//! the fraction locates the signal inside that grade. It is computed twice,
//! once in the uniform metric (size of the largest disturbance) and once in
//! the mean-squared metric (how widespread the disturbances are).

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::quad;
use crate::timeseries::DeviationSignal;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Band fraction below which a rating counts as sitting at the lower edge of its grade.
pub const LOWER_EDGE_FRACTION: f64 = 0.25;
/// Band fraction above which a rating counts as sitting at the upper edge of its grade.
pub const UPPER_EDGE_FRACTION: f64 = 0.75;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(default))]
pub struct ScaleConfig {
    /// Normalizing coefficient of the continuous scale.
    pub nu: f64,
    /// Discrete scale breakpoints `0 = δ_0 < δ_1 < … < δ_{I+1} = 1`.
    pub delta_grid: Vec<f64>,
    /// Split between "good" and "satisfactory" as a fraction of the permissible amplitude.
    pub delta: f64,
    /// Conceptual labels in ascending order, starting at grade 2.
    pub labels: Vec<String>,
}

impl Default for ScaleConfig {
    fn default() -> Self {
        Self {
            nu: 10.0,
            delta_grid: Self::uniform_grid(10),
            delta: 0.5,
            labels: ["unsatisfactory", "satisfactory", "good", "excellent"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

impl ScaleConfig {
    /// Breakpoints of a discrete scale with `grades` equal-width bins.
    pub fn uniform_grid(grades: usize) -> Vec<f64> {
        (0..=grades).map(|i| i as f64 / grades as f64).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(Error::InvalidScale("nu must be positive"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidScale("delta must lie in (0, 1)"));
        }
        let g = &self.delta_grid;
        if g.len() < 2 || g[0] != 0.0 || g[g.len() - 1] != 1.0 {
            return Err(Error::InvalidScale("delta_grid must start at 0 and end at 1"));
        }
        if g.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidScale("delta_grid must be strictly increasing"));
        }
        if self.labels.is_empty() {
            return Err(Error::InvalidScale("labels must not be empty"));
        }
        Ok(())
    }

    /// Highest grade of the discrete scale.
    pub fn top_discrete_grade(&self) -> usize {
        self.delta_grid.len() - 2
    }
}

/// Conceptual grade of the hybrid scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(into = "u8", try_from = "u8")
)]
#[repr(u8)]
pub enum Grade {
    Unsatisfactory = 2,
    Satisfactory = 3,
    Good = 4,
    Excellent = 5,
}

impl Grade {
    pub fn value(self) -> u8 {
        self as u8
    }

    /// Grade whose band contains `rating`, clamped to `[2, 5]`.
    pub fn of_rating(rating: f64) -> Grade {
        if rating >= 5.0 {
            Grade::Excellent
        } else if rating >= 4.0 {
            Grade::Good
        } else if rating >= 3.0 {
            Grade::Satisfactory
        } else {
            Grade::Unsatisfactory
        }
    }

    /// Lower edge of this grade's rating band.
    pub fn lower_edge(self) -> f64 {
        f64::from(self.value())
    }
}

impl From<Grade> for u8 {
    fn from(g: Grade) -> u8 {
        g.value()
    }
}

impl TryFrom<u8> for Grade {
    type Error = Error;

    fn try_from(v: u8) -> Result<Grade> {
        match v {
            2 => Ok(Grade::Unsatisfactory),
            3 => Ok(Grade::Satisfactory),
            4 => Ok(Grade::Good),
            5 => Ok(Grade::Excellent),
            _ => Err(Error::LabelOutOfRange { grade: i64::from(v) }),
        }
    }
}

impl core::fmt::Display for Grade {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Hybrid ratings of one (element, mode, characteristic, criterion) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct LocalEvaluation {
    pub e_uniform: f64,
    pub e_l2: f64,
    pub grade: Grade,
}

impl LocalEvaluation {
    /// Both metrics at the same rating; handy for constant tensors.
    pub fn uniform(rating: f64) -> Self {
        Self { e_uniform: rating, e_l2: rating, grade: Grade::of_rating(rating) }
    }
}

/// `ν (h_max − h) / (h_max − h_min)`; negative beyond the permissible bound.
pub fn continuous_eval(h: f64, h_min: f64, h_max: f64, nu: f64) -> Result<f64> {
    if !(h_max > h_min) || !h_min.is_finite() || !h_max.is_finite() {
        return Err(Error::InvalidRange { h_min, h_max });
    }
    Ok(nu * (h_max - h) / (h_max - h_min))
}

/// Bin of `e_c / ν` in the half-open intervals `[δ_i, δ_{i+1})`, clamped to
/// `0..=I`.
pub fn discrete_eval(e_c: f64, config: &ScaleConfig) -> usize {
    let x = e_c / config.nu;
    let top = config.top_discrete_grade();
    if !(x > 0.0) {
        return 0;
    }
    if x >= 1.0 {
        return top;
    }
    let above = config.delta_grid.partition_point(|&d| d <= x);
    (above - 1).min(top)
}

/// Label for a conceptual grade; the first label belongs to grade 2.
pub fn conceptual_label(grade: i64, config: &ScaleConfig) -> Result<&str> {
    usize::try_from(grade - 2)
        .ok()
        .and_then(|i| config.labels.get(i))
        .map(String::as_str)
        .ok_or(Error::LabelOutOfRange { grade })
}

/// Hybrid scale for one corridor: permissible amplitude `A` and split `δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridScale {
    amplitude: f64,
    delta: f64,
}

impl HybridScale {
    pub fn new(amplitude: f64, delta: f64) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude > 0.0) {
            return Err(Error::InvalidAmplitude(amplitude));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidScale("delta must lie in (0, 1)"));
        }
        Ok(Self { amplitude, delta })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// `γ = δ·A`, the largest deviation still rated "good".
    pub fn gamma(&self) -> f64 {
        self.delta * self.amplitude
    }

    /// Bins are closed above: `sup = γ` is good, `sup = A` is satisfactory.
    pub fn grade(&self, dev: &DeviationSignal) -> Grade {
        self.grade_of_sup(dev.sup())
    }

    fn grade_of_sup(&self, s: f64) -> Grade {
        if s == 0.0 {
            Grade::Excellent
        } else if s <= self.gamma() {
            Grade::Good
        } else if s <= self.amplitude {
            Grade::Satisfactory
        } else {
            Grade::Unsatisfactory
        }
    }

    pub fn eval_uniform(&self, dev: &DeviationSignal) -> f64 {
        let s = dev.sup();
        let (a, g) = (self.amplitude, self.gamma());
        match self.grade_of_sup(s) {
            Grade::Excellent => 5.0,
            Grade::Unsatisfactory => 2.0,
            Grade::Good => in_band(4.0, 4.0 + (g - s) / g),
            Grade::Satisfactory => in_band(3.0, 3.0 + (a - s) / (a - g)),
        }
    }

    pub fn eval_l2(&self, dev: &DeviationSignal) -> f64 {
        let (a, g) = (self.amplitude, self.gamma());
        let grid = dev.grid();
        let root_t = libm::sqrt(grid.duration());
        let v = dev.values();
        match self.grade(dev) {
            Grade::Excellent => 5.0,
            Grade::Unsatisfactory => 2.0,
            Grade::Good => {
                let spread = quad::l2_by(v.len(), grid.dt(), |i| g - v[i]);
                in_band(4.0, 4.0 + spread / (g * root_t))
            }
            Grade::Satisfactory => {
                let excess = quad::l2_by(v.len(), grid.dt(), |i| (v[i] - g).max(0.0));
                let scale = (a - g) * root_t;
                in_band(3.0, 3.0 + (scale - excess) / scale)
            }
        }
    }

    pub fn evaluate(&self, dev: &DeviationSignal) -> LocalEvaluation {
        LocalEvaluation {
            e_uniform: self.eval_uniform(dev),
            e_l2: self.eval_l2(dev),
            grade: self.grade(dev),
        }
    }
}

/// Keeps a rating inside `[base, base + 1)` despite rounding at the band edges.
fn in_band(base: f64, x: f64) -> f64 {
    x.clamp(base, (base + 1.0).next_down())
}

pub fn hybrid_grade(dev: &DeviationSignal, amplitude: f64, delta: f64) -> Result<Grade> {
    Ok(HybridScale::new(amplitude, delta)?.grade(dev))
}

pub fn hybrid_eval_uniform(dev: &DeviationSignal, amplitude: f64, delta: f64) -> Result<f64> {
    Ok(HybridScale::new(amplitude, delta)?.eval_uniform(dev))
}

pub fn hybrid_eval_l2(dev: &DeviationSignal, amplitude: f64, delta: f64) -> Result<f64> {
    Ok(HybridScale::new(amplitude, delta)?.eval_l2(dev))
}

/// Qualitative reading of a (uniform, mean-squared) rating pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(rename_all = "kebab-case"))]
pub enum Disturbance {
    /// Grade 5: no deviation from the reference domain.
    Undisturbed,
    /// Grade 2: the permissible domain is exceeded.
    OutOfBounds,
    /// Both ratings sit at the bottom of their grade.
    NearCritical,
    /// Large peak but little mass: a few short disturbances.
    FewShortDisturbances,
    /// Both ratings sit near the top of their grade.
    NearNextGrade,
    Mixed,
}

impl Disturbance {
    pub fn as_str(self) -> &'static str {
        match self {
            Disturbance::Undisturbed => "undisturbed",
            Disturbance::OutOfBounds => "out-of-bounds",
            Disturbance::NearCritical => "near-critical",
            Disturbance::FewShortDisturbances => "few short disturbances",
            Disturbance::NearNextGrade => "near next grade",
            Disturbance::Mixed => "mixed",
        }
    }
}

impl core::fmt::Display for Disturbance {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_pair(ev: &LocalEvaluation) -> Disturbance {
    match ev.grade {
        Grade::Excellent => return Disturbance::Undisturbed,
        Grade::Unsatisfactory => return Disturbance::OutOfBounds,
        _ => {}
    }
    let base = ev.grade.lower_edge();
    let low = |e: f64| e - base <= LOWER_EDGE_FRACTION;
    let high = |e: f64| e - base >= UPPER_EDGE_FRACTION;
    match (low(ev.e_uniform), low(ev.e_l2), high(ev.e_uniform), high(ev.e_l2)) {
        (true, true, _, _) => Disturbance::NearCritical,
        (true, _, _, true) => Disturbance::FewShortDisturbances,
        (_, _, true, true) => Disturbance::NearNextGrade,
        _ => Disturbance::Mixed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::SamplingGrid;
    use alloc::vec;

    fn grid(dt: f64, n: usize) -> SamplingGrid {
        SamplingGrid::new(dt, n).unwrap()
    }

    #[test]
    fn continuous_scale_cases() {
        assert_eq!(continuous_eval(0.0, 0.0, 2.0, 10.0).unwrap(), 10.0);
        assert_eq!(continuous_eval(2.0, 0.0, 2.0, 10.0).unwrap(), 0.0);
        assert_eq!(continuous_eval(1.0, 0.0, 2.0, 10.0).unwrap(), 5.0);
        assert!(continuous_eval(3.0, 0.0, 2.0, 10.0).unwrap() < 0.0);
        assert!(continuous_eval(1.0, 2.0, 2.0, 10.0).is_err());
    }

    #[test]
    fn discrete_scale_bins() {
        let cfg = ScaleConfig::default();
        assert_eq!(discrete_eval(9.5, &cfg), 9);
        assert_eq!(discrete_eval(0.0, &cfg), 0);
        assert_eq!(discrete_eval(-3.0, &cfg), 0);
        assert_eq!(discrete_eval(10.0, &cfg), 9);
        // exactly on δ_3 = 0.3 (0.3 * 10 rounds back to 3.0 / 10 = 0.3)
        let on_edge = cfg.delta_grid[3] * cfg.nu;
        assert_eq!(discrete_eval(on_edge, &cfg), 3);
        let custom = ScaleConfig { delta_grid: vec![0.0, 0.25, 0.5, 1.0], ..ScaleConfig::default() };
        assert_eq!(discrete_eval(2.5, &custom), 1);
        assert_eq!(discrete_eval(7.0, &custom), 2);
    }

    #[test]
    fn config_validation() {
        assert!(ScaleConfig::default().validate().is_ok());
        let bad = |f: fn(&mut ScaleConfig)| {
            let mut c = ScaleConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.nu = 0.0));
        assert!(bad(|c| c.delta = 1.0));
        assert!(bad(|c| c.delta_grid = vec![0.0, 0.5, 0.5, 1.0]));
        assert!(bad(|c| c.delta_grid = vec![0.1, 1.0]));
        assert!(bad(|c| c.labels.clear()));
    }

    #[test]
    fn conceptual_labels() {
        let cfg = ScaleConfig::default();
        assert_eq!(conceptual_label(5, &cfg).unwrap(), "excellent");
        assert_eq!(conceptual_label(2, &cfg).unwrap(), "unsatisfactory");
        assert_eq!(conceptual_label(4, &cfg).unwrap(), "good");
        assert_eq!(conceptual_label(3, &cfg).unwrap(), "satisfactory");
        assert_eq!(conceptual_label(6, &cfg), Err(Error::LabelOutOfRange { grade: 6 }));
        assert_eq!(conceptual_label(1, &cfg), Err(Error::LabelOutOfRange { grade: 1 }));
    }

    #[test]
    fn hybrid_grade_bins() {
        let g = grid(0.1, 11);
        let a = 2.0;
        let s = HybridScale::new(a, 0.5).unwrap();
        assert_eq!(s.grade(&DeviationSignal::constant(g, 0.0).unwrap()), Grade::Excellent);
        assert_eq!(s.grade(&DeviationSignal::constant(g, 1.0).unwrap()), Grade::Good);
        assert_eq!(s.grade(&DeviationSignal::constant(g, 2.0).unwrap()), Grade::Satisfactory);
        assert_eq!(s.grade(&DeviationSignal::constant(g, 3.0).unwrap()), Grade::Unsatisfactory);
        assert!(HybridScale::new(0.0, 0.5).is_err());
        assert!(HybridScale::new(1.0, 0.0).is_err());
        assert!(hybrid_eval_uniform(&DeviationSignal::constant(g, 0.0).unwrap(), 1.0, 1.5).is_err());
    }

    #[test]
    fn hybrid_uniform_midpoints_and_edges() {
        let g = grid(0.1, 11);
        let a = 2.0;
        let gamma = 1.0;
        let e = |c: f64| hybrid_eval_uniform(&DeviationSignal::constant(g, c).unwrap(), a, 0.5).unwrap();
        assert_eq!(e(gamma / 2.0), 4.5);
        assert_eq!(e((gamma + a) / 2.0), 3.5);
        assert_eq!(e(gamma), 4.0);
        assert_eq!(e(a), 3.0);
        assert_eq!(e(0.0), 5.0);
        assert_eq!(e(1.5 * a), 2.0);
    }

    #[test]
    fn hybrid_uniform_spike_matches_scalar_oracle() {
        let n = 501;
        let g = grid(0.01, n);
        let (a, delta) = (3.0, 0.4);
        let gamma = delta * a;
        let mut v = vec![gamma * 0.999; n];
        v[250] = a - 1e-3;
        let dev = DeviationSignal::new(g, v.clone()).unwrap();
        let s = v.iter().cloned().fold(f64::MIN, f64::max);
        let oracle = 3.0 + (a - s) / (a - gamma);
        let got = hybrid_eval_uniform(&dev, a, delta).unwrap();
        assert!((got - oracle).abs() < 1e-15);
        assert!(got > 3.0 && got < 3.01);
    }

    #[test]
    fn hybrid_l2_constant_collapses_to_uniform() {
        let g = grid(0.37, 123);
        let (a, delta) = (2.0, 0.5);
        for c in [0.1, 0.5, 0.99, 1.0, 1.2, 1.7, 2.0] {
            let dev = DeviationSignal::constant(g, c).unwrap();
            let u = hybrid_eval_uniform(&dev, a, delta).unwrap();
            let l = hybrid_eval_l2(&dev, a, delta).unwrap();
            assert!((u - l).abs() <= 1e-12, "c = {c}: {u} vs {l}");
        }
        let dev = DeviationSignal::constant(g, 1.5).unwrap();
        let l = hybrid_eval_l2(&dev, a, delta).unwrap();
        assert!((l - (3.0 + (a - 1.5) / (a - 1.0))).abs() < 1e-12);
    }

    #[test]
    fn hybrid_l2_spike_matches_clipped_quadrature_oracle() {
        let n = 10_001;
        let t_end = 5.0;
        let g = grid(t_end / (n - 1) as f64, n);
        let (a, delta) = (2.0, 0.5);
        let gamma = delta * a;
        let height = (gamma + a) / 2.0;
        // 100 samples of width dt each: T / 100.
        let mut v = vec![0.0; n];
        for x in v.iter_mut().skip(4000).take(100) {
            *x = height;
        }
        let dev = DeviationSignal::new(g, v.clone()).unwrap();

        let dt = g.dt();
        let clipped: Vec<f64> = v.iter().map(|x| (x - gamma).max(0.0).powi(2)).collect();
        let mut integral = 0.0;
        for i in 1..n {
            integral += 0.5 * dt * (clipped[i - 1] + clipped[i]);
        }
        let scale = (a - gamma) * libm::sqrt(t_end);
        let oracle = 3.0 + (scale - libm::sqrt(integral)) / scale;
        let got = hybrid_eval_l2(&dev, a, delta).unwrap();
        assert!((got - oracle).abs() < 1e-12);
        assert!((got - 3.95).abs() < 1e-9);
        assert_eq!(hybrid_eval_uniform(&dev, a, delta).unwrap(), 3.5);
    }

    #[test]
    fn hybrid_l2_good_grade_stays_below_five() {
        let g = grid(0.1, 11);
        let mut v = vec![0.0; 11];
        v[5] = 1e-300;
        let dev = DeviationSignal::new(g, v).unwrap();
        let e = hybrid_eval_l2(&dev, 1.0, 0.5).unwrap();
        assert!((4.0..5.0).contains(&e));
        assert_eq!(hybrid_grade(&dev, 1.0, 0.5).unwrap(), Grade::Good);
    }

    #[test]
    fn pair_classification_matches_reference_readings() {
        let pair = |u, l| LocalEvaluation { e_uniform: u, e_l2: l, grade: Grade::of_rating(u) };
        assert_eq!(classify_pair(&pair(3.05, 3.98)), Disturbance::FewShortDisturbances);
        assert_eq!(classify_pair(&pair(3.01, 3.02)), Disturbance::NearCritical);
        assert_eq!(classify_pair(&pair(3.95, 3.91)), Disturbance::NearNextGrade);
        assert_eq!(classify_pair(&pair(3.5, 3.5)), Disturbance::Mixed);
        assert_eq!(classify_pair(&pair(5.0, 5.0)), Disturbance::Undisturbed);
        assert_eq!(classify_pair(&pair(2.0, 2.0)), Disturbance::OutOfBounds);
    }

    #[test]
    fn grade_conversions() {
        assert_eq!(Grade::try_from(4u8).unwrap(), Grade::Good);
        assert!(Grade::try_from(1u8).is_err());
        assert_eq!(Grade::of_rating(4.999), Grade::Good);
        assert_eq!(Grade::of_rating(2.7), Grade::Unsatisfactory);
        assert_eq!(Grade::Satisfactory.lower_edge(), 3.0);
    }
}
