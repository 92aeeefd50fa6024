//! Multilevel, multicriteria evaluation of complex dynamical systems.
//!
//! A system of `N` elements runs under `L` operating modes; each element is
//! described in each mode by `M` sampled characteristics, and each
//! characteristic is judged against `K` criteria through a reference corridor
//! nested inside a permissible corridor. This crate turns those samples into
//! graded local evaluations and rolls them up:
//!
//! - [`timeseries`]: sampling grids, corridors, deviation signals and their norms.
//! - [`scales`]: continuous, discrete, conceptual and hybrid precise-rating scales.
//! - [`aggregation`]: the element-first and mode-first weighted hierarchies.
//! - [`selection`]: tie sets and the maximal-product choice of modes and systems.
//! - [`trend`]: history classification, forecasting and re-examination scheduling.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` style checks are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod linalg;
mod quad;

pub mod aggregation;
pub mod scales;
pub mod selection;
pub mod timeseries;
pub mod trend;

pub use error::{Error, Result};

pub use aggregation::{
    count_local_evals, element_rollup, global_eval, mode_rollup, weighted_mean, ElementRollup,
    EvalCounts, Evaluation, GlobalScore, LocalEvalTensor, ModeRollup, Shape, TensorBuilder,
    WeightProfile,
};
pub use scales::{
    classify_pair, conceptual_label, continuous_eval, discrete_eval, hybrid_eval_l2,
    hybrid_eval_uniform, hybrid_grade, Disturbance, Grade, HybridScale, LocalEvaluation,
    ScaleConfig,
};
pub use selection::{optimal_mode, optimal_system, tie_set, Selection, TieSet};
pub use timeseries::{
    distance_to_domain, h_max_for, norm_l2, norm_uniform, norm_with_derivatives, Bound,
    Characteristic, Corridor, DeviationSignal, Metric, SamplingGrid,
};
pub use trend::{
    classify_trend, fit_forecast, forecast_at, next_examination_time, Basis, Crossing,
    ForecastModel, History, Trend,
};
