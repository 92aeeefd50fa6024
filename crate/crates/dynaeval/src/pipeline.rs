//! The `evaluate` pipeline: dataset and config in, report out.

use dynaeval_core::aggregation::count_local_evals_per_criterion;
use dynaeval_core::{
    classify_pair, conceptual_label, continuous_eval, discrete_eval, distance_to_domain, h_max_for, norm_l2,
    norm_uniform, norm_with_derivatives, Evaluation, Grade, HybridScale, Metric, ScaleConfig, TensorBuilder,
};

use crate::config::RunConfig;
use crate::dataset::Dataset;
use crate::error::{AtCell, Coord, HarnessError, Result};
use crate::report::{CellReport, Conceptual, DerivativeNorms, EvaluationReport, Labels, SCHEMA_VERSION};

/// Evaluates every cell, rolls both hierarchies up and labels each level.
///
/// Cells are visited in `(n, l, m, k)` order and every reduction runs in index
/// order, so identical inputs give identical reports.
pub fn evaluate(dataset: &Dataset, config: &RunConfig) -> Result<EvaluationReport> {
    let shape = dataset.shape;
    let weights = config.weights.resolve(shape)?;
    let orders = config.orders(shape)?;
    let scale = &config.scale;

    let mut cells = Vec::with_capacity(shape.cell_count());
    let mut builder = TensorBuilder::new(shape)?;
    for n in 0..shape.elements {
        for l in 0..shape.modes {
            for m in 0..shape.characteristics {
                let ch = dataset.characteristic(n, l, m);
                for (k, &order) in orders.iter().enumerate() {
                    let cell = evaluate_cell(dataset, scale, order, ch, n, l, m, k)?;
                    builder.set(n, l, m, k, cell.evaluation).at(Coord::cell(n, l, m, k))?;
                    cells.push(cell);
                }
            }
        }
    }
    let tensor = builder.build()?;
    let Evaluation { element, mode, global } = Evaluation::compute(&tensor, &weights)?;

    let parameters: Vec<usize> = orders.iter().map(|&p| 2 * p as usize).collect();
    let counts = count_local_evals_per_criterion(shape.elements, shape.modes, shape.characteristics, &parameters)?;

    let label = |v: f64| aggregate_label(v, scale);
    let conceptual = Conceptual {
        global: label(global.value)?,
        elements: element.element.iter().map(|&v| label(v)).collect::<Result<_>>()?,
        modes: mode.mode.iter().map(|&v| label(v)).collect::<Result<_>>()?,
        element_modes: element
            .characteristic
            .iter()
            .map(|row| row.iter().map(|&v| label(v)).collect())
            .collect::<Result<_>>()?,
        mode_characteristics: mode
            .criterion
            .iter()
            .map(|row| row.iter().map(|&v| label(v)).collect())
            .collect::<Result<_>>()?,
    };

    let manifest = &dataset.manifest;
    Ok(EvaluationReport {
        schema_version: SCHEMA_VERSION.to_string(),
        system_id: manifest.system_id.clone(),
        examination_time: manifest.examination_time,
        labels: Labels {
            elements: manifest.elements.clone(),
            modes: manifest.modes.clone(),
            characteristics: manifest.characteristics.clone(),
            criteria: manifest.criteria.clone(),
        },
        shape,
        scale: scale.clone(),
        weights,
        orders,
        counts,
        cells,
        element_rollup: element,
        mode_rollup: mode,
        global,
        conceptual,
    })
}

#[allow(clippy::too_many_arguments)]
fn evaluate_cell(
    dataset: &Dataset,
    scale: &ScaleConfig,
    order: u8,
    ch: &dynaeval_core::Characteristic,
    n: usize,
    l: usize,
    m: usize,
    k: usize,
) -> Result<CellReport> {
    let coord = Coord::cell(n, l, m, k);
    let corridor = dataset.corridors.get(n, l, m, k);
    let dev = distance_to_domain(ch, corridor).at(coord)?;
    let amplitude = h_max_for(corridor, Metric::Uniform, &dataset.grid).at(coord)?;
    let h_max_l2 = h_max_for(corridor, Metric::MeanSquared, &dataset.grid).at(coord)?;
    let hybrid = HybridScale::new(amplitude, scale.delta).at(coord)?;
    let evaluation = hybrid.evaluate(&dev);
    let (nu, nl2) = (norm_uniform(&dev), norm_l2(&dev));
    let continuous_uniform = continuous_eval(nu, 0.0, amplitude, scale.nu).at(coord)?;
    let continuous_l2 = continuous_eval(nl2, 0.0, h_max_l2, scale.nu).at(coord)?;
    let derivatives = if order > 1 {
        Some(DerivativeNorms {
            order,
            uniform: norm_with_derivatives(&dev, order, Metric::Uniform).at(coord)?,
            l2: norm_with_derivatives(&dev, order, Metric::MeanSquared).at(coord)?,
        })
    } else {
        None
    };
    Ok(CellReport {
        element: n,
        mode: l,
        characteristic: m,
        criterion: k,
        amplitude,
        h_max_l2,
        norm_uniform: nu,
        norm_l2: nl2,
        evaluation,
        disturbance: classify_pair(&evaluation),
        label: conceptual_label(i64::from(evaluation.grade.value()), scale).at(coord)?.to_string(),
        continuous_uniform,
        continuous_l2,
        discrete_uniform: discrete_eval(continuous_uniform, scale),
        discrete_l2: discrete_eval(continuous_l2, scale),
        derivatives,
    })
}

/// Label of the grade band holding an aggregate rating.
fn aggregate_label(value: f64, scale: &ScaleConfig) -> Result<String> {
    conceptual_label(i64::from(Grade::of_rating(value).value()), scale)
        .map(str::to_string)
        .map_err(HarnessError::from)
}
