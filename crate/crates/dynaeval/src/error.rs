use std::fmt;
use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

/// Position of a cell in the evaluation tensor; unset trailing indices are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct Coord {
    pub element: Option<usize>,
    pub mode: Option<usize>,
    pub characteristic: Option<usize>,
    pub criterion: Option<usize>,
}

impl Coord {
    pub fn signal(element: usize, mode: usize) -> Self {
        Self { element: Some(element), mode: Some(mode), ..Self::default() }
    }

    pub fn characteristic(element: usize, mode: usize, characteristic: usize) -> Self {
        Self { characteristic: Some(characteristic), ..Self::signal(element, mode) }
    }

    pub fn cell(element: usize, mode: usize, characteristic: usize, criterion: usize) -> Self {
        Self { criterion: Some(criterion), ..Self::characteristic(element, mode, characteristic) }
    }

    pub fn corridor(characteristic: usize, criterion: usize) -> Self {
        Self { characteristic: Some(characteristic), criterion: Some(criterion), ..Self::default() }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = [
            ("n", self.element),
            ("l", self.mode),
            ("m", self.characteristic),
            ("k", self.criterion),
        ];
        let shown: Vec<String> =
            parts.iter().filter_map(|(name, v)| v.map(|v| format!("{name}={v}"))).collect();
        write!(f, "({})", shown.join(", "))
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    #[error("invalid manifest: {0}")]
    Manifest(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("signal {coord} in {}: {message}", path.display())]
    Signal { path: PathBuf, coord: Coord, message: String },

    #[error("cell {coord}: {source}")]
    Cell {
        coord: Coord,
        #[source]
        source: dynaeval_core::Error,
    },

    #[error(transparent)]
    Core(#[from] dynaeval_core::Error),

    #[error("unsupported report schema version {0:?}")]
    Schema(String),

    #[error("invalid archive: {0}")]
    Archive(String),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl fmt::Display) -> Self {
        HarnessError::Parse { path: path.into(), message: message.to_string() }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Io { .. } => "io",
            HarnessError::Parse { .. } => "parse",
            HarnessError::Manifest(_) => "manifest",
            HarnessError::Config(_) => "config",
            HarnessError::Signal { .. } => "signal",
            HarnessError::Cell { .. } => "cell",
            HarnessError::Core(_) => "core",
            HarnessError::Schema(_) => "schema",
            HarnessError::Archive(_) => "archive",
        }
    }

    pub fn coordinate(&self) -> Option<Coord> {
        match self {
            HarnessError::Signal { coord, .. } | HarnessError::Cell { coord, .. } => Some(*coord),
            _ => None,
        }
    }

    /// `{"error": {"kind", "message", "coordinate"?}}` for the CLI.
    pub fn to_json(&self) -> serde_json::Value {
        let mut body = serde_json::json!({
            "kind": self.kind(),
            "message": self.to_string(),
        });
        if let Some(c) = self.coordinate() {
            body["coordinate"] = serde_json::to_value(c).expect("coordinate serializes");
        }
        serde_json::json!({ "error": body })
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

/// Attaches a cell coordinate to a core error.
pub(crate) trait AtCell<T> {
    fn at(self, coord: Coord) -> Result<T>;
}

impl<T> AtCell<T> for std::result::Result<T, dynaeval_core::Error> {
    fn at(self, coord: Coord) -> Result<T> {
        self.map_err(|source| HarnessError::Cell { coord, source })
    }
}
