//! Dataset manifests and signal files.
//!
//! A manifest is a TOML file naming the index labels, the sampling grid, one
//! CSV per (element, mode) pair and the corridors. Each CSV has a `t` column
//! followed by one column per characteristic, in manifest order.

use std::fs;
use std::path::{Path, PathBuf};

use dynaeval_core::{Bound, Characteristic, Corridor, SamplingGrid, Shape};
use serde::{Deserialize, Serialize};

use crate::error::{AtCell, Coord, HarnessError, Result};

/// Relative tolerance when checking the `t` column against the grid.
const TIME_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dt: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalRef {
    pub element: usize,
    pub mode: usize,
    /// Relative to the manifest's directory.
    pub file: PathBuf,
}

/// Corridor for characteristic `m` under criterion `k`, optionally restricted
/// to one element and/or one mode. The most specific entry wins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorridorSpec {
    pub characteristic: usize,
    pub criterion: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<usize>,
    pub ref_lo: Bound,
    pub ref_hi: Bound,
    pub perm_lo: Bound,
    pub perm_hi: Bound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub system_id: String,
    /// Time of the examination this dataset records; orders report archives.
    #[serde(default)]
    pub examination_time: f64,
    pub elements: Vec<String>,
    pub modes: Vec<String>,
    pub characteristics: Vec<String>,
    pub criteria: Vec<String>,
    pub grid: GridSpec,
    pub signals: Vec<SignalRef>,
    pub corridors: Vec<CorridorSpec>,
}

impl DatasetManifest {
    pub fn shape(&self) -> Result<Shape> {
        Shape::new(self.elements.len(), self.modes.len(), self.characteristics.len(), self.criteria.len())
            .map_err(|e| HarnessError::Manifest(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        toml::from_str(&text).map_err(|e| HarnessError::parse(path, e))
    }
}

type Restricted = (Option<usize>, Option<usize>, Corridor);

/// Corridors indexed by (characteristic, criterion) with optional overrides.
#[derive(Debug, Clone)]
pub struct CorridorTable {
    shape: Shape,
    /// `[m][k]` → entries with their `(element, mode)` restriction.
    entries: Vec<Vec<Vec<Restricted>>>,
}

impl CorridorTable {
    fn build(shape: Shape, specs: &[CorridorSpec], grid: &SamplingGrid) -> Result<Self> {
        let mut entries = vec![vec![Vec::new(); shape.criteria]; shape.characteristics];
        for spec in specs {
            let (m, k) = (spec.characteristic, spec.criterion);
            let coord = Coord {
                element: spec.element,
                mode: spec.mode,
                characteristic: Some(m),
                criterion: Some(k),
            };
            if m >= shape.characteristics
                || k >= shape.criteria
                || spec.element.is_some_and(|n| n >= shape.elements)
                || spec.mode.is_some_and(|l| l >= shape.modes)
            {
                return Err(HarnessError::Manifest(format!("corridor {coord} is out of range")));
            }
            let corridor = Corridor::new(
                k,
                spec.ref_lo.clone(),
                spec.ref_hi.clone(),
                spec.perm_lo.clone(),
                spec.perm_hi.clone(),
            )
            .at(coord)?;
            corridor.check_grid(grid).at(coord)?;
            let slot: &mut Vec<_> = &mut entries[m][k];
            if slot.iter().any(|(n, l, _)| *n == spec.element && *l == spec.mode) {
                return Err(HarnessError::Manifest(format!("duplicate corridor {coord}")));
            }
            slot.push((spec.element, spec.mode, corridor));
        }
        let table = Self { shape, entries };
        for n in 0..shape.elements {
            for l in 0..shape.modes {
                for m in 0..shape.characteristics {
                    for k in 0..shape.criteria {
                        if table.lookup(n, l, m, k).is_none() {
                            return Err(HarnessError::Manifest(format!(
                                "no corridor covers cell {}",
                                Coord::cell(n, l, m, k)
                            )));
                        }
                    }
                }
            }
        }
        Ok(table)
    }

    fn lookup(&self, n: usize, l: usize, m: usize, k: usize) -> Option<&Corridor> {
        let specificity = |e: &Option<usize>, md: &Option<usize>| {
            u8::from(e.is_some()) * 2 + u8::from(md.is_some())
        };
        self.entries[m][k]
            .iter()
            .filter(|(e, md, _)| e.is_none_or(|e| e == n) && md.is_none_or(|md| md == l))
            .max_by_key(|(e, md, _)| specificity(e, md))
            .map(|(_, _, c)| c)
    }

    /// Corridor governing cell `(n, l, m, k)`; total after loading.
    pub fn get(&self, n: usize, l: usize, m: usize, k: usize) -> &Corridor {
        self.lookup(n, l, m, k).expect("corridor coverage is checked at load time")
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }
}

/// A validated dataset held in memory.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub manifest: DatasetManifest,
    pub root: PathBuf,
    pub shape: Shape,
    pub grid: SamplingGrid,
    /// Row-major `(n, l, m)`.
    characteristics: Vec<Characteristic>,
    pub corridors: CorridorTable,
}

impl Dataset {
    pub fn characteristic(&self, n: usize, l: usize, m: usize) -> &Characteristic {
        let s = self.shape;
        &self.characteristics[(n * s.modes + l) * s.characteristics + m]
    }

    pub fn signal_count(&self) -> usize {
        self.characteristics.len()
    }
}

/// Reads and validates a manifest, its signal files and its corridors.
pub fn load_dataset(manifest_path: &Path) -> Result<Dataset> {
    let manifest = DatasetManifest::read(manifest_path)?;
    let root = manifest_path.parent().map(Path::to_path_buf).unwrap_or_default();
    let shape = manifest.shape()?;
    let grid = SamplingGrid::new(manifest.grid.dt, manifest.grid.count)
        .map_err(|e| HarnessError::Manifest(e.to_string()))?;

    let mut files: Vec<Option<&SignalRef>> = vec![None; shape.elements * shape.modes];
    for s in &manifest.signals {
        if s.element >= shape.elements || s.mode >= shape.modes {
            return Err(HarnessError::Manifest(format!(
                "signal {} is out of range",
                Coord::signal(s.element, s.mode)
            )));
        }
        let slot = &mut files[s.element * shape.modes + s.mode];
        if slot.is_some() {
            return Err(HarnessError::Manifest(format!(
                "duplicate signal {}",
                Coord::signal(s.element, s.mode)
            )));
        }
        *slot = Some(s);
    }

    let mut characteristics = Vec::with_capacity(shape.elements * shape.modes * shape.characteristics);
    for n in 0..shape.elements {
        for l in 0..shape.modes {
            let Some(sref) = files[n * shape.modes + l] else {
                return Err(HarnessError::Manifest(format!(
                    "missing signal file for {}",
                    Coord::signal(n, l)
                )));
            };
            let path = root.join(&sref.file);
            let columns = read_signal_csv(&path, n, l, &manifest.characteristics, &grid)?;
            for (m, values) in columns.into_iter().enumerate() {
                let ch = Characteristic::new(n, l, m, grid, values, manifest.characteristics[m].clone())
                    .map_err(|e| HarnessError::Signal {
                        path: path.clone(),
                        coord: Coord::characteristic(n, l, m),
                        message: e.to_string(),
                    })?;
                characteristics.push(ch);
            }
        }
    }

    let corridors = CorridorTable::build(shape, &manifest.corridors, &grid)?;
    Ok(Dataset { manifest, root, shape, grid, characteristics, corridors })
}

/// Returns one column per characteristic.
fn read_signal_csv(
    path: &Path,
    n: usize,
    l: usize,
    labels: &[String],
    grid: &SamplingGrid,
) -> Result<Vec<Vec<f64>>> {
    let err = |coord: Coord, message: String| HarnessError::Signal { path: path.to_path_buf(), coord, message };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| err(Coord::signal(n, l), e.to_string()))?;
    let header = reader.headers().map_err(|e| err(Coord::signal(n, l), e.to_string()))?.clone();
    let expected: Vec<&str> = std::iter::once("t").chain(labels.iter().map(String::as_str)).collect();
    let found: Vec<&str> = header.iter().collect();
    if found != expected {
        return Err(err(Coord::signal(n, l), format!("header {found:?}, expected {expected:?}")));
    }

    let mut columns = vec![Vec::with_capacity(grid.count()); labels.len()];
    let mut rows = 0;
    let t_scale = grid.duration().max(1.0);
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| err(Coord::signal(n, l), e.to_string()))?;
        for (c, field) in record.iter().enumerate() {
            let coord = if c == 0 { Coord::signal(n, l) } else { Coord::characteristic(n, l, c - 1) };
            let v: f64 = field
                .parse()
                .map_err(|_| err(coord, format!("row {}: cannot parse {field:?}", i + 1)))?;
            if !v.is_finite() {
                return Err(err(coord, format!("row {}: non-finite sample", i + 1)));
            }
            if c == 0 {
                if (v - grid.time(i)).abs() > TIME_TOLERANCE * t_scale {
                    return Err(err(coord, format!("row {}: time {v} is off the grid ({})", i + 1, grid.time(i))));
                }
            } else {
                columns[c - 1].push(v);
            }
        }
        rows += 1;
    }
    if rows != grid.count() {
        return Err(err(
            Coord::signal(n, l),
            format!("manifest declares {} samples, file has {rows}", grid.count()),
        ));
    }
    Ok(columns)
}

/// Writes one signal CSV in the format [`load_dataset`] reads.
pub fn write_signal_csv(path: &Path, grid: &SamplingGrid, labels: &[String], columns: &[Vec<f64>]) -> Result<()> {
    let io = |e: csv::Error| HarnessError::parse(path, e);
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(std::iter::once("t").chain(labels.iter().map(String::as_str))).map_err(io)?;
    let mut row = Vec::with_capacity(labels.len() + 1);
    for i in 0..grid.count() {
        row.clear();
        row.push(grid.time(i).to_string());
        row.extend(columns.iter().map(|c| c[i].to_string()));
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p
    }

    const MANIFEST: &str = r#"
system_id = "rig"
elements = ["a"]
modes = ["slow", "fast"]
characteristics = ["x"]
criteria = ["normal"]
grid = { dt = 0.5, count = 3 }
signals = [
  { element = 0, mode = 0, file = "s0.csv" },
  { element = 0, mode = 1, file = "s1.csv" },
]

[[corridors]]
characteristic = 0
criterion = 0
ref_lo = 0
ref_hi = 1.0
perm_lo = -1.0
perm_hi = [2.0, 2.5, 3.0]

[[corridors]]
characteristic = 0
criterion = 0
mode = 1
ref_lo = 0.5
ref_hi = 1.0
perm_lo = 0.0
perm_hi = 2.0
"#;

    fn setup() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "s0.csv", "t,x\n0,0.5\n0.5,1.5\n1.0,0.0\n");
        write(dir.path(), "s1.csv", "t,x\n0,0.5\n0.5,0.5\n1,0.75\n");
        dir
    }

    #[test]
    fn loads_signals_and_resolves_corridor_overrides() {
        let dir = setup();
        let m = write(dir.path(), "manifest.toml", MANIFEST);
        let ds = load_dataset(&m).unwrap();
        assert_eq!(ds.signal_count(), 2);
        assert_eq!(ds.characteristic(0, 0, 0).values(), &[0.5, 1.5, 0.0]);
        assert_eq!(ds.corridors.get(0, 0, 0, 0).perm_hi(), &Bound::Series(vec![2.0, 2.5, 3.0]));
        assert_eq!(ds.corridors.get(0, 1, 0, 0).ref_lo(), &Bound::Constant(0.5));
    }

    #[test]
    fn short_signal_is_named() {
        let dir = setup();
        write(dir.path(), "s1.csv", "t,x\n0,0.5\n0.5,0.5\n");
        let m = write(dir.path(), "manifest.toml", MANIFEST);
        let err = load_dataset(&m).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("s1.csv") && msg.contains("declares 3 samples, file has 2"), "{msg}");
        assert_eq!(err.coordinate(), Some(Coord::signal(0, 1)));
    }

    #[test]
    fn non_finite_sample_carries_its_coordinate() {
        let dir = setup();
        write(dir.path(), "s0.csv", "t,x\n0,0.5\n0.5,NaN\n1.0,0.0\n");
        let m = write(dir.path(), "manifest.toml", MANIFEST);
        let err = load_dataset(&m).unwrap_err();
        assert_eq!(err.coordinate(), Some(Coord::characteristic(0, 0, 0)));
    }

    #[test]
    fn bad_header_and_off_grid_time_are_rejected() {
        let dir = setup();
        write(dir.path(), "s0.csv", "t,y\n0,0.5\n0.5,1.5\n1.0,0.0\n");
        let m = write(dir.path(), "manifest.toml", MANIFEST);
        assert!(load_dataset(&m).unwrap_err().to_string().contains("header"));
        write(dir.path(), "s0.csv", "t,x\n0,0.5\n0.6,1.5\n1.0,0.0\n");
        assert!(load_dataset(&m).unwrap_err().to_string().contains("off the grid"));
    }

    #[test]
    fn corridor_breach_is_rejected() {
        let dir = setup();
        let bad = MANIFEST.replace("perm_hi = 2.0", "perm_hi = 0.9");
        let m = write(dir.path(), "manifest.toml", &bad);
        let err = load_dataset(&m).unwrap_err();
        assert!(err.to_string().contains("ref_hi > perm_hi"), "{err}");
        assert_eq!(err.coordinate().unwrap().mode, Some(1));
    }

    #[test]
    fn missing_pieces_are_reported() {
        let dir = setup();
        let no_signal = MANIFEST.replace("  { element = 0, mode = 1, file = \"s1.csv\" },\n", "");
        let m = write(dir.path(), "manifest.toml", &no_signal);
        assert!(load_dataset(&m).unwrap_err().to_string().contains("missing signal file"));

        let only_override = MANIFEST.replacen("characteristic = 0\ncriterion = 0\nref_lo = 0\n", "characteristic = 0\ncriterion = 0\nmode = 1\nelement = 0\nref_lo = 0\n", 1);
        let m = write(dir.path(), "manifest.toml", &only_override);
        assert!(load_dataset(&m).unwrap_err().to_string().contains("no corridor covers"));

        let missing_file = MANIFEST.replace("s1.csv", "nope.csv");
        let m = write(dir.path(), "manifest.toml", &missing_file);
        assert!(load_dataset(&m).unwrap_err().to_string().contains("nope.csv"));
    }
}
