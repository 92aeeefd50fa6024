//! Synthetic datasets with disturbances of known grade.
//!
//! Characteristic `m` oscillates around `c_m = 10(m + 1)` with amplitude at
//! most 0.5. Criterion `k` has a reference half-width `r_k = 1 + k` and a
//! permissible half-width `r_k + 2`, so every corridor has `A = 2` and, with
//! `δ = 0.5`, `γ = 1`. A disturbance aimed at grade `g` under criterion `k*`
//! peaks at `r_k* + 0.5`, `+ 1.5` or `+ 2.5` for `g = 4, 3, 2`, which puts
//! the peak deviation of every criterion a half unit away from the nearest
//! grade boundary.

use std::fs;
use std::path::{Path, PathBuf};

use dynaeval_core::{Bound, Grade, SamplingGrid, ScaleConfig, Shape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::dataset::{write_signal_csv, CorridorSpec, DatasetManifest, GridSpec, SignalRef};
use crate::error::{HarnessError, Result};

const BASELINE_AMPLITUDE: (f64, f64) = (0.1, 0.5);
const PERMISSIBLE_MARGIN: f64 = 2.0;
const DELTA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Clean,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisturbanceKind {
    /// Short raised-cosine bump.
    Spike,
    /// Linear ramp that peaks at the last sample.
    Drift,
}

/// One disturbance placed on characteristic `(element, mode, characteristic)`,
/// sized to give `grade` under `criterion`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Injection {
    pub element: usize,
    pub mode: usize,
    pub characteristic: usize,
    pub criterion: usize,
    pub grade: u8,
    #[serde(default = "default_kind")]
    pub kind: DisturbanceKind,
}

fn default_kind() -> DisturbanceKind {
    DisturbanceKind::Spike
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    #[serde(default = "default_system_id")]
    pub system_id: String,
    pub shape: Shape,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_profile")]
    pub profile: Profile,
    /// Share of characteristics that receive a random disturbance.
    #[serde(default = "default_fraction")]
    pub disturbed_fraction: f64,
    #[serde(default)]
    pub examination_time: f64,
    #[serde(default)]
    pub inject: Vec<Injection>,
}

fn default_system_id() -> String {
    "synthetic".into()
}
fn default_samples() -> usize {
    200
}
fn default_dt() -> f64 {
    0.01
}
fn default_profile() -> Profile {
    Profile::Random
}
fn default_fraction() -> f64 {
    0.25
}

impl SynthSpec {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let spec: Self = toml::from_str(&text).map_err(|e| HarnessError::parse(path, e))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        self.shape.validate()?;
        if self.samples < 8 {
            return bad(format!("samples must be at least 8, got {}", self.samples));
        }
        SamplingGrid::new(self.dt, self.samples)?;
        if !(0.0..=1.0).contains(&self.disturbed_fraction) {
            return bad("disturbed_fraction must lie in [0, 1]".into());
        }
        let s = self.shape;
        for inj in &self.inject {
            if inj.element >= s.elements
                || inj.mode >= s.modes
                || inj.characteristic >= s.characteristics
                || inj.criterion >= s.criteria
            {
                return bad(format!("injection {inj:?} is outside the shape"));
            }
            if !(2..=4).contains(&inj.grade) {
                return bad(format!("injected grade must be 2, 3 or 4, got {}", inj.grade));
            }
        }
        Ok(())
    }
}

/// Reference half-width of criterion `k`.
pub fn reference_half_width(k: usize) -> f64 {
    1.0 + k as f64
}

/// Centre of characteristic `m`.
pub fn centre(m: usize) -> f64 {
    10.0 * (m as f64 + 1.0)
}

fn peak_offset(grade: u8) -> f64 {
    match grade {
        4 => 0.5,
        3 => 1.5,
        _ => 2.5,
    }
}

/// Grade under a corridor with reference half-width `r` of a signal whose
/// largest distance from the centre is `peak`.
pub fn expected_grade(peak: f64, r: f64) -> Grade {
    let d = peak - r;
    let gamma = DELTA * PERMISSIBLE_MARGIN;
    if d <= 0.0 {
        Grade::Excellent
    } else if d <= gamma {
        Grade::Good
    } else if d <= PERMISSIBLE_MARGIN {
        Grade::Satisfactory
    } else {
        Grade::Unsatisfactory
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedCell {
    pub element: usize,
    pub mode: usize,
    pub characteristic: usize,
    pub criterion: usize,
    pub grade: Grade,
    pub injected: bool,
}

/// A generated dataset, before or after it is written out.
#[derive(Debug, Clone)]
pub struct Synthetic {
    pub manifest: DatasetManifest,
    pub config: RunConfig,
    pub grid: SamplingGrid,
    /// `[n * L + l]` → one column per characteristic.
    pub signals: Vec<Vec<Vec<f64>>>,
    /// Row-major `(n, l, m, k)`.
    pub expected: Vec<ExpectedCell>,
}

impl Synthetic {
    pub fn injected_cells(&self) -> usize {
        self.expected.iter().filter(|c| c.injected).count()
    }

    /// Writes `manifest.toml`, `config.toml`, `signals/*.csv` and `expected_grades.csv`.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let signals_dir = dir.join("signals");
        fs::create_dir_all(&signals_dir).map_err(|e| HarnessError::io(&signals_dir, e))?;
        for sref in &self.manifest.signals {
            let path = dir.join(&sref.file);
            let cols = &self.signals[sref.element * self.manifest.modes.len() + sref.mode];
            write_signal_csv(&path, &self.grid, &self.manifest.characteristics, cols)?;
        }
        let manifest_path = dir.join("manifest.toml");
        let text = toml::to_string(&self.manifest).map_err(|e| HarnessError::parse(&manifest_path, e))?;
        fs::write(&manifest_path, text).map_err(|e| HarnessError::io(&manifest_path, e))?;
        let config_path = dir.join("config.toml");
        fs::write(&config_path, self.config.to_toml()).map_err(|e| HarnessError::io(&config_path, e))?;

        let expected_path = dir.join("expected_grades.csv");
        let err = |e: csv::Error| HarnessError::parse(&expected_path, e);
        let mut w = csv::Writer::from_path(&expected_path).map_err(err)?;
        w.write_record(["element", "mode", "characteristic", "criterion", "grade", "injected"]).map_err(err)?;
        for c in &self.expected {
            w.write_record([
                c.element.to_string(),
                c.mode.to_string(),
                c.characteristic.to_string(),
                c.criterion.to_string(),
                c.grade.to_string(),
                c.injected.to_string(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| HarnessError::io(&expected_path, e))?;
        Ok(manifest_path)
    }
}

/// Reads an `expected_grades.csv` sidecar.
pub fn read_expected(path: &Path) -> Result<Vec<ExpectedCell>> {
    #[derive(Deserialize)]
    struct Row {
        element: usize,
        mode: usize,
        characteristic: usize,
        criterion: usize,
        grade: u8,
        injected: bool,
    }
    let mut r = csv::Reader::from_path(path).map_err(|e| HarnessError::parse(path, e))?;
    r.deserialize::<Row>()
        .map(|row| {
            let row = row.map_err(|e| HarnessError::parse(path, e))?;
            Ok(ExpectedCell {
                element: row.element,
                mode: row.mode,
                characteristic: row.characteristic,
                criterion: row.criterion,
                grade: Grade::try_from(row.grade)?,
                injected: row.injected,
            })
        })
        .collect()
}

struct Planned {
    criterion: usize,
    grade: u8,
    kind: DisturbanceKind,
}

pub fn generate(spec: &SynthSpec) -> Result<Synthetic> {
    spec.validate()?;
    let s = spec.shape;
    let grid = SamplingGrid::new(spec.dt, spec.samples)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let triples = s.elements * s.modes * s.characteristics;
    let mut plan: Vec<Option<Planned>> = (0..triples).map(|_| None).collect();
    let triple = |n: usize, l: usize, m: usize| (n * s.modes + l) * s.characteristics + m;
    if spec.profile == Profile::Random {
        for slot in plan.iter_mut() {
            if rng.gen_bool(spec.disturbed_fraction) {
                *slot = Some(Planned {
                    criterion: rng.gen_range(0..s.criteria),
                    grade: rng.gen_range(2..=4),
                    kind: if rng.gen_bool(0.5) { DisturbanceKind::Spike } else { DisturbanceKind::Drift },
                });
            }
        }
    }
    for inj in &spec.inject {
        plan[triple(inj.element, inj.mode, inj.characteristic)] =
            Some(Planned { criterion: inj.criterion, grade: inj.grade, kind: inj.kind });
    }

    let count = grid.count();
    let duration = grid.duration();
    let mut signals = Vec::with_capacity(s.elements * s.modes);
    let mut expected = Vec::with_capacity(s.cell_count());
    for n in 0..s.elements {
        for l in 0..s.modes {
            let mut columns = Vec::with_capacity(s.characteristics);
            for m in 0..s.characteristics {
                let c = centre(m);
                let amp = rng.gen_range(BASELINE_AMPLITUDE.0..=BASELINE_AMPLITUDE.1);
                let cycles = f64::from(rng.gen_range(1u8..=4));
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                let mut values: Vec<f64> = grid
                    .times()
                    .map(|t| amp * (std::f64::consts::TAU * cycles * t / duration + phase).sin())
                    .collect();
                let mut peak = amp;
                let planned = &plan[triple(n, l, m)];
                if let Some(p) = planned {
                    let target = reference_half_width(p.criterion) + peak_offset(p.grade);
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    let weights = disturbance_weights(p.kind, count, &mut rng);
                    for (v, w) in values.iter_mut().zip(&weights) {
                        *v = (1.0 - w) * *v + w * sign * target;
                    }
                    peak = target;
                }
                for v in values.iter_mut() {
                    *v += c;
                }
                for k in 0..s.criteria {
                    expected.push(ExpectedCell {
                        element: n,
                        mode: l,
                        characteristic: m,
                        criterion: k,
                        grade: if planned.is_some() {
                            expected_grade(peak, reference_half_width(k))
                        } else {
                            Grade::Excellent
                        },
                        injected: planned.is_some(),
                    });
                }
                columns.push(values);
            }
            signals.push(columns);
        }
    }

    let names = Names::for_shape(s);
    let manifest = DatasetManifest {
        system_id: spec.system_id.clone(),
        examination_time: spec.examination_time,
        elements: names.elements,
        modes: names.modes,
        characteristics: names.characteristics,
        criteria: names.criteria,
        grid: GridSpec { dt: spec.dt, count: spec.samples },
        signals: (0..s.elements)
            .flat_map(|n| {
                (0..s.modes).map(move |l| SignalRef {
                    element: n,
                    mode: l,
                    file: PathBuf::from(format!("signals/e{n}_m{l}.csv")),
                })
            })
            .collect(),
        corridors: (0..s.characteristics)
            .flat_map(|m| {
                (0..s.criteria).map(move |k| {
                    let (c, r) = (centre(m), reference_half_width(k));
                    CorridorSpec {
                        characteristic: m,
                        criterion: k,
                        element: None,
                        mode: None,
                        ref_lo: Bound::Constant(c - r),
                        ref_hi: Bound::Constant(c + r),
                        perm_lo: Bound::Constant(c - r - PERMISSIBLE_MARGIN),
                        perm_hi: Bound::Constant(c + r + PERMISSIBLE_MARGIN),
                    }
                })
            })
            .collect(),
    };
    let config = RunConfig { scale: ScaleConfig { delta: DELTA, ..ScaleConfig::default() }, ..RunConfig::default() };
    Ok(Synthetic { manifest, config, grid, signals, expected })
}

/// Blend weights in `[0, 1]`, equal to 1 at exactly one sample.
fn disturbance_weights(kind: DisturbanceKind, count: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match kind {
        DisturbanceKind::Spike => {
            let half = (count / 20).max(2);
            let at = rng.gen_range(0..count);
            (0..count)
                .map(|i| {
                    let d = i.abs_diff(at);
                    if d == 0 {
                        1.0
                    } else if d < half {
                        0.5 * (1.0 + (std::f64::consts::PI * d as f64 / half as f64).cos())
                    } else {
                        0.0
                    }
                })
                .collect()
        }
        DisturbanceKind::Drift => {
            let start = rng.gen_range(0..count - 1);
            let span = (count - 1 - start) as f64;
            (0..count)
                .map(|i| if i == count - 1 { 1.0 } else if i <= start { 0.0 } else { (i - start) as f64 / span })
                .collect()
        }
    }
}

struct Names {
    elements: Vec<String>,
    modes: Vec<String>,
    characteristics: Vec<String>,
    criteria: Vec<String>,
}

impl Names {
    /// Gait-lab names for the 6×18×3×4 demo shape, generic names otherwise.
    fn for_shape(s: Shape) -> Self {
        let generic = |prefix: &str, len: usize| (0..len).map(|i| format!("{prefix}{i}")).collect::<Vec<_>>();
        let strings = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let elements = if s.elements == 6 {
            strings(&["hip_left", "hip_right", "knee_left", "knee_right", "ankle_left", "ankle_right"])
        } else {
            generic("element_", s.elements)
        };
        let modes = if s.modes == 18 {
            let mut v = Vec::with_capacity(18);
            for speed in ["slow", "normal", "fast"] {
                for surface in ["level", "incline", "stairs"] {
                    for load in ["unloaded", "loaded"] {
                        v.push(format!("{speed}_{surface}_{load}"));
                    }
                }
            }
            v
        } else {
            generic("mode_", s.modes)
        };
        let characteristics = if s.characteristics == 3 {
            strings(&["kinematic", "dynamic", "energy"])
        } else {
            generic("characteristic_", s.characteristics)
        };
        let criteria = if s.criteria == 4 {
            strings(&["normal_range", "asymmetry", "best_result", "stability"])
        } else {
            generic("criterion_", s.criteria)
        };
        Self { elements, modes, characteristics, criteria }
    }
}
