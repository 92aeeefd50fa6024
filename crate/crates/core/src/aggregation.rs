//! Weighted rollup of local evaluations through the two hierarchies.
//!
//! Element-first: parameters → criteria → characteristics → modes, giving
//! one score per element. Mode-first: elements (per metric) → parameters →
//! criteria → characteristics, giving one score per operating mode. With a
//! shared weight profile both routes produce the same global score.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::quad::Accumulator;
use crate::scales::LocalEvaluation;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Allowed gap between the element-first and mode-first global scores.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// Index ranges `N × L × M × K` of a local evaluation tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Shape {
    pub elements: usize,
    pub modes: usize,
    pub characteristics: usize,
    pub criteria: usize,
}

impl Shape {
    pub fn new(elements: usize, modes: usize, characteristics: usize, criteria: usize) -> Result<Self> {
        let s = Self { elements, modes, characteristics, criteria };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (n, what) in [
            (self.elements, "elements"),
            (self.modes, "modes"),
            (self.characteristics, "characteristics"),
            (self.criteria, "criteria"),
        ] {
            if n == 0 {
                return Err(Error::ZeroDimension(what));
            }
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.elements * self.modes * self.characteristics * self.criteria
    }

    /// Row-major offset of `(n, l, m, k)`.
    pub fn offset(&self, n: usize, l: usize, m: usize, k: usize) -> usize {
        ((n * self.modes + l) * self.characteristics + m) * self.criteria + k
    }

    fn check(&self, n: usize, l: usize, m: usize, k: usize) -> Result<()> {
        for (index, len, what) in [
            (n, self.elements, "element"),
            (l, self.modes, "mode"),
            (m, self.characteristics, "characteristic"),
            (k, self.criteria, "criterion"),
        ] {
            if index >= len {
                return Err(Error::IndexOutOfRange { what, index, len });
            }
        }
        Ok(())
    }
}

/// Complete rectangular tensor of local evaluations indexed `[n][l][m][k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalEvalTensor {
    shape: Shape,
    cells: Vec<LocalEvaluation>,
}

impl LocalEvalTensor {
    /// Cells in row-major `(n, l, m, k)` order.
    pub fn new(shape: Shape, cells: Vec<LocalEvaluation>) -> Result<Self> {
        shape.validate()?;
        if cells.len() != shape.cell_count() {
            return Err(Error::ShapeMismatch {
                what: "tensor cells",
                expected: shape.cell_count(),
                found: cells.len(),
            });
        }
        Ok(Self { shape, cells })
    }

    pub fn filled(shape: Shape, ev: LocalEvaluation) -> Result<Self> {
        Self::new(shape, alloc::vec![ev; shape.cell_count()])
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn get(&self, n: usize, l: usize, m: usize, k: usize) -> &LocalEvaluation {
        &self.cells[self.shape.offset(n, l, m, k)]
    }

    pub fn cells(&self) -> &[LocalEvaluation] {
        &self.cells
    }

    /// Cells with their `(n, l, m, k)` coordinates, row-major.
    pub fn iter_indexed(&self) -> impl Iterator<Item = ([usize; 4], &LocalEvaluation)> + '_ {
        let s = self.shape;
        self.cells.iter().enumerate().map(move |(i, ev)| {
            let k = i % s.criteria;
            let m = (i / s.criteria) % s.characteristics;
            let l = (i / (s.criteria * s.characteristics)) % s.modes;
            let n = i / (s.criteria * s.characteristics * s.modes);
            ([n, l, m, k], ev)
        })
    }
}

/// Collects cells in any order and refuses to build until every cell is set.
#[derive(Debug, Clone)]
pub struct TensorBuilder {
    shape: Shape,
    cells: Vec<Option<LocalEvaluation>>,
}

impl TensorBuilder {
    pub fn new(shape: Shape) -> Result<Self> {
        shape.validate()?;
        Ok(Self { shape, cells: alloc::vec![None; shape.cell_count()] })
    }

    pub fn set(&mut self, n: usize, l: usize, m: usize, k: usize, ev: LocalEvaluation) -> Result<()> {
        self.shape.check(n, l, m, k)?;
        self.cells[self.shape.offset(n, l, m, k)] = Some(ev);
        Ok(())
    }

    pub fn build(self) -> Result<LocalEvalTensor> {
        let s = self.shape;
        let mut cells = Vec::with_capacity(self.cells.len());
        for (i, cell) in self.cells.into_iter().enumerate() {
            match cell {
                Some(ev) => cells.push(ev),
                None => {
                    return Err(Error::IncompleteTensor {
                        element: i / (s.criteria * s.characteristics * s.modes),
                        mode: (i / (s.criteria * s.characteristics)) % s.modes,
                        characteristic: (i / s.criteria) % s.characteristics,
                        criterion: i % s.criteria,
                    })
                }
            }
        }
        LocalEvalTensor::new(s, cells)
    }
}

/// Priority weights at every level of both hierarchies.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct WeightProfile {
    /// Weight of the uniform-metric rating.
    pub parameter_uniform: f64,
    /// Weight of the mean-squared-metric rating.
    pub parameter_l2: f64,
    pub criteria: Vec<f64>,
    pub characteristics: Vec<f64>,
    pub modes: Vec<f64>,
    pub elements: Vec<f64>,
}

impl WeightProfile {
    /// All weights equal to one.
    pub fn uniform(shape: Shape) -> Self {
        Self {
            parameter_uniform: 1.0,
            parameter_l2: 1.0,
            criteria: alloc::vec![1.0; shape.criteria],
            characteristics: alloc::vec![1.0; shape.characteristics],
            modes: alloc::vec![1.0; shape.modes],
            elements: alloc::vec![1.0; shape.elements],
        }
    }

    pub fn validate(&self, shape: Shape) -> Result<()> {
        check_weights(&[self.parameter_uniform, self.parameter_l2])?;
        for (w, len, what) in [
            (&self.criteria, shape.criteria, "criteria weights"),
            (&self.characteristics, shape.characteristics, "characteristic weights"),
            (&self.modes, shape.modes, "mode weights"),
            (&self.elements, shape.elements, "element weights"),
        ] {
            if w.len() != len {
                return Err(Error::ShapeMismatch { what, expected: len, found: w.len() });
            }
            check_weights(w)?;
        }
        Ok(())
    }

    fn parameters(&self) -> [f64; 2] {
        [self.parameter_uniform, self.parameter_l2]
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    match weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
        Some(index) => Err(Error::NonPositiveWeight { index, value: weights[index] }),
        None => Ok(()),
    }
}

/// `Σ ρ_i x_i / Σ ρ_i`.
pub fn weighted_mean(values: &[f64], weights: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if values.len() != weights.len() {
        return Err(Error::ShapeMismatch {
            what: "weights",
            expected: values.len(),
            found: weights.len(),
        });
    }
    check_weights(weights)?;
    Ok(mean_by(weights, |i| values[i]))
}

/// Weighted mean with values produced on demand; weights already validated.
/// Summation runs in index order.
fn mean_by(weights: &[f64], value: impl Fn(usize) -> f64) -> f64 {
    let mut num = Accumulator::default();
    let mut den = Accumulator::default();
    for (i, &w) in weights.iter().enumerate() {
        num.add(w * value(i));
        den.add(w);
    }
    num.total() / den.total()
}

/// Element-first hierarchy.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ElementRollup {
    /// `[n][l][m][k]`: both metrics combined.
    pub parameter: Vec<Vec<Vec<Vec<f64>>>>,
    /// `[n][l][m]`: over criteria.
    pub criterion: Vec<Vec<Vec<f64>>>,
    /// `[n][l]`: over characteristics.
    pub characteristic: Vec<Vec<f64>>,
    /// `[n]`: over modes.
    pub element: Vec<f64>,
}

/// Mode-first hierarchy.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ModeRollup {
    /// `[l][m][k]`: uniform-metric ratings over elements.
    pub parameter_uniform: Vec<Vec<Vec<f64>>>,
    /// `[l][m][k]`: mean-squared ratings over elements.
    pub parameter_l2: Vec<Vec<Vec<f64>>>,
    /// `[l][m][k]`: both metrics combined.
    pub parameter: Vec<Vec<Vec<f64>>>,
    /// `[l][m]`: over criteria.
    pub criterion: Vec<Vec<f64>>,
    /// `[l]`: over characteristics.
    pub mode: Vec<f64>,
}

pub fn element_rollup(tensor: &LocalEvalTensor, weights: &WeightProfile) -> Result<ElementRollup> {
    let s = tensor.shape();
    weights.validate(s)?;
    let rho_p = weights.parameters();
    let parameter: Vec<Vec<Vec<Vec<f64>>>> = (0..s.elements)
        .map(|n| {
            (0..s.modes)
                .map(|l| {
                    (0..s.characteristics)
                        .map(|m| {
                            (0..s.criteria)
                                .map(|k| {
                                    let ev = tensor.get(n, l, m, k);
                                    mean_by(&rho_p, |p| if p == 0 { ev.e_uniform } else { ev.e_l2 })
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let criterion: Vec<Vec<Vec<f64>>> = parameter
        .iter()
        .map(|modes| {
            modes
                .iter()
                .map(|chars| chars.iter().map(|ks| mean_by(&weights.criteria, |k| ks[k])).collect())
                .collect()
        })
        .collect();
    let characteristic: Vec<Vec<f64>> = criterion
        .iter()
        .map(|modes| modes.iter().map(|ms| mean_by(&weights.characteristics, |m| ms[m])).collect())
        .collect();
    let element = characteristic.iter().map(|ls| mean_by(&weights.modes, |l| ls[l])).collect();
    Ok(ElementRollup { parameter, criterion, characteristic, element })
}

pub fn mode_rollup(tensor: &LocalEvalTensor, weights: &WeightProfile) -> Result<ModeRollup> {
    let s = tensor.shape();
    weights.validate(s)?;
    let over_elements = |metric: fn(&LocalEvaluation) -> f64| -> Vec<Vec<Vec<f64>>> {
        (0..s.modes)
            .map(|l| {
                (0..s.characteristics)
                    .map(|m| {
                        (0..s.criteria)
                            .map(|k| mean_by(&weights.elements, |n| metric(tensor.get(n, l, m, k))))
                            .collect()
                    })
                    .collect()
            })
            .collect()
    };
    let parameter_uniform = over_elements(|ev| ev.e_uniform);
    let parameter_l2 = over_elements(|ev| ev.e_l2);
    let rho_p = weights.parameters();
    let parameter: Vec<Vec<Vec<f64>>> = parameter_uniform
        .iter()
        .zip(&parameter_l2)
        .map(|(cu, cl)| {
            cu.iter()
                .zip(cl)
                .map(|(ku, kl)| {
                    ku.iter()
                        .zip(kl)
                        .map(|(&u, &l2)| mean_by(&rho_p, |p| if p == 0 { u } else { l2 }))
                        .collect()
                })
                .collect()
        })
        .collect();
    let criterion: Vec<Vec<f64>> = parameter
        .iter()
        .map(|chars| chars.iter().map(|ks| mean_by(&weights.criteria, |k| ks[k])).collect())
        .collect();
    let mode = criterion.iter().map(|ms| mean_by(&weights.characteristics, |m| ms[m])).collect();
    Ok(ModeRollup { parameter_uniform, parameter_l2, parameter, criterion, mode })
}

/// Global score computed through both hierarchies.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct GlobalScore {
    pub value: f64,
    pub via_elements: f64,
    pub via_modes: f64,
}

/// Weighted mean of element scores, cross-checked against the weighted mean
/// of mode scores.
pub fn global_eval(
    elements: &ElementRollup,
    modes: &ModeRollup,
    weights: &WeightProfile,
) -> Result<GlobalScore> {
    let via_elements = weighted_mean(&elements.element, &weights.elements)?;
    let via_modes = weighted_mean(&modes.mode, &weights.modes)?;
    if !((via_elements - via_modes).abs() <= IDENTITY_TOLERANCE) {
        return Err(Error::IdentityViolation { via_elements, via_modes });
    }
    Ok(GlobalScore { value: via_elements, via_elements, via_modes })
}

/// Both hierarchies plus the global score.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Evaluation {
    pub element: ElementRollup,
    pub mode: ModeRollup,
    pub global: GlobalScore,
}

impl Evaluation {
    pub fn compute(tensor: &LocalEvalTensor, weights: &WeightProfile) -> Result<Self> {
        let element = element_rollup(tensor, weights)?;
        let mode = mode_rollup(tensor, weights)?;
        let global = global_eval(&element, &mode, weights)?;
        Ok(Self { element, mode, global })
    }
}

/// Number of local evaluation parameters per element and in total.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct EvalCounts {
    pub per_element: Vec<u64>,
    pub total: u64,
}

/// `S_n = L·M·K·P` for each of `N` elements and `S = Σ S_n`.
pub fn count_local_evals(
    elements: usize,
    modes: usize,
    characteristics: usize,
    criteria: usize,
    parameters: usize,
) -> Result<EvalCounts> {
    if criteria == 0 {
        return Err(Error::ZeroDimension("criteria"));
    }
    count_local_evals_per_criterion(elements, modes, characteristics, &alloc::vec![parameters; criteria])
}

/// Like [`count_local_evals`] with a parameter count per criterion.
pub fn count_local_evals_per_criterion(
    elements: usize,
    modes: usize,
    characteristics: usize,
    parameters: &[usize],
) -> Result<EvalCounts> {
    for (n, what) in [(elements, "elements"), (modes, "modes"), (characteristics, "characteristics")] {
        if n == 0 {
            return Err(Error::ZeroDimension(what));
        }
    }
    if parameters.is_empty() {
        return Err(Error::ZeroDimension("criteria"));
    }
    if parameters.contains(&0) {
        return Err(Error::ZeroDimension("parameters"));
    }
    let per_criterion: u64 = parameters.iter().map(|&p| p as u64).sum();
    let s_n = modes as u64 * characteristics as u64 * per_criterion;
    Ok(EvalCounts { per_element: alloc::vec![s_n; elements], total: s_n * elements as u64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scales::Grade;
    use alloc::vec;

    fn ev(u: f64, l: f64) -> LocalEvaluation {
        LocalEvaluation { e_uniform: u, e_l2: l, grade: Grade::of_rating(u) }
    }

    #[test]
    fn weighted_mean_cases() {
        assert!((weighted_mean(&[4.0, 4.0, 4.0], &[0.3, 2.0, 7.0]).unwrap() - 4.0).abs() < 1e-15);
        assert_eq!(weighted_mean(&[3.0, 5.0], &[1.0, 1.0]).unwrap(), 4.0);
        assert_eq!(weighted_mean(&[3.0, 5.0], &[3.0, 1.0]).unwrap(), 3.5);
        assert_eq!(weighted_mean(&[], &[]), Err(Error::EmptyInput));
        assert!(matches!(weighted_mean(&[1.0], &[1.0, 2.0]), Err(Error::ShapeMismatch { .. })));
        assert!(matches!(
            weighted_mean(&[1.0, 2.0], &[1.0, 0.0]),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
    }

    #[test]
    fn constant_tensor_propagates() {
        let shape = Shape::new(2, 3, 2, 2).unwrap();
        let t = LocalEvalTensor::filled(shape, LocalEvaluation::uniform(4.2)).unwrap();
        let mut w = WeightProfile::uniform(shape);
        w.modes = vec![1.0, 2.0, 5.0];
        let e = Evaluation::compute(&t, &w).unwrap();
        for v in e.element.element.iter().chain(&e.mode.mode) {
            assert!((v - 4.2).abs() < 1e-12);
        }
        assert!((e.global.value - 4.2).abs() < 1e-12);
    }

    #[test]
    fn parameter_level_of_single_cell() {
        let shape = Shape::new(2, 1, 1, 1).unwrap();
        let t = LocalEvalTensor::new(shape, vec![ev(3.0, 5.0), ev(3.0, 5.0)]).unwrap();
        let r = element_rollup(&t, &WeightProfile::uniform(shape)).unwrap();
        assert_eq!(r.parameter[0][0][0][0], 4.0);
        assert_eq!(r.element, vec![4.0, 4.0]);
    }

    #[test]
    fn mode_rollup_over_two_elements() {
        let shape = Shape::new(2, 1, 1, 1).unwrap();
        let t = LocalEvalTensor::new(shape, vec![ev(2.0, 2.0), ev(5.0, 5.0)]).unwrap();
        let r = mode_rollup(&t, &WeightProfile::uniform(shape)).unwrap();
        assert_eq!(r.parameter[0][0][0], 3.5);
        assert_eq!(r.mode, vec![3.5]);

        let t = LocalEvalTensor::filled(Shape::new(3, 4, 2, 2).unwrap(), ev(3.0, 3.0)).unwrap();
        let r = mode_rollup(&t, &WeightProfile::uniform(t.shape())).unwrap();
        assert!(r.mode.iter().all(|&v| v == 3.0));
    }

    #[test]
    fn single_element_single_mode_global() {
        let shape = Shape::new(1, 1, 2, 3).unwrap();
        let cells = (0..6).map(|i| ev(2.0 + i as f64 * 0.5, 3.0)).collect();
        let t = LocalEvalTensor::new(shape, cells).unwrap();
        let e = Evaluation::compute(&t, &WeightProfile::uniform(shape)).unwrap();
        assert!((e.global.value - e.element.element[0]).abs() < 1e-15);
        assert!((e.global.value - e.mode.mode[0]).abs() < 1e-12);
    }

    #[test]
    fn weight_shape_mismatch_is_rejected() {
        let shape = Shape::new(2, 2, 1, 1).unwrap();
        let t = LocalEvalTensor::filled(shape, ev(4.0, 4.0)).unwrap();
        let mut w = WeightProfile::uniform(shape);
        w.elements.push(1.0);
        assert!(matches!(element_rollup(&t, &w), Err(Error::ShapeMismatch { .. })));
        let mut w = WeightProfile::uniform(shape);
        w.parameter_l2 = -1.0;
        assert!(matches!(mode_rollup(&t, &w), Err(Error::NonPositiveWeight { .. })));
    }

    #[test]
    fn builder_reports_first_missing_cell() {
        let shape = Shape::new(2, 2, 2, 2).unwrap();
        let mut b = TensorBuilder::new(shape).unwrap();
        for n in 0..2 {
            for l in 0..2 {
                for m in 0..2 {
                    for k in 0..2 {
                        if (n, l, m, k) != (1, 0, 1, 1) {
                            b.set(n, l, m, k, ev(4.0, 4.0)).unwrap();
                        }
                    }
                }
            }
        }
        assert!(b.set(2, 0, 0, 0, ev(4.0, 4.0)).is_err());
        assert_eq!(
            b.build(),
            Err(Error::IncompleteTensor { element: 1, mode: 0, characteristic: 1, criterion: 1 })
        );
        assert!(LocalEvalTensor::new(shape, vec![ev(4.0, 4.0); 15]).is_err());
    }

    #[test]
    fn indexed_iteration_matches_offsets() {
        let shape = Shape::new(2, 3, 2, 2).unwrap();
        let cells = (0..shape.cell_count()).map(|i| ev(i as f64, 0.0)).collect();
        let t = LocalEvalTensor::new(shape, cells).unwrap();
        for ([n, l, m, k], e) in t.iter_indexed() {
            assert_eq!(e.e_uniform as usize, shape.offset(n, l, m, k));
        }
    }

    #[test]
    fn counts() {
        let c = count_local_evals(6, 18, 3, 4, 2).unwrap();
        assert_eq!(c.per_element, vec![432; 6]);
        assert_eq!(c.total, 2592);
        let c = count_local_evals(1, 1, 1, 1, 1).unwrap();
        assert_eq!((c.per_element[0], c.total), (1, 1));
        let c = count_local_evals(2, 3, 2, 2, 2).unwrap();
        assert_eq!((c.per_element[0], c.total), (24, 48));
        assert_eq!(count_local_evals(0, 3, 2, 2, 2), Err(Error::ZeroDimension("elements")));
        assert_eq!(count_local_evals(1, 1, 1, 1, 0), Err(Error::ZeroDimension("parameters")));
        let c = count_local_evals_per_criterion(2, 3, 2, &[2, 4]).unwrap();
        assert_eq!(c.total, 2 * 3 * 2 * 6);
    }

    #[test]
    fn identity_violation_is_reported() {
        let shape = Shape::new(2, 2, 1, 1).unwrap();
        let t = LocalEvalTensor::new(shape, vec![ev(2.0, 2.0), ev(5.0, 5.0), ev(4.0, 4.0), ev(3.0, 3.0)])
            .unwrap();
        let w = WeightProfile::uniform(shape);
        let el = element_rollup(&t, &w).unwrap();
        let mut mo = mode_rollup(&t, &w).unwrap();
        mo.mode[0] += 0.1;
        assert!(matches!(global_eval(&el, &mo, &w), Err(Error::IdentityViolation { .. })));
    }
}
