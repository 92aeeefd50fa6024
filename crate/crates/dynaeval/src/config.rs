//! Run configuration: scales, weights, derivative orders, tolerances.

use std::fs;
use std::path::Path;

use dynaeval_core::{ScaleConfig, Shape, WeightProfile};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Weights as written in the config file; omitted vectors default to ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightConfig {
    pub parameter_uniform: f64,
    pub parameter_l2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criteria: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub characteristics: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<f64>>,
}

impl Default for WeightConfig {
    fn default() -> Self {
        Self {
            parameter_uniform: 1.0,
            parameter_l2: 1.0,
            criteria: None,
            characteristics: None,
            modes: None,
            elements: None,
        }
    }
}

impl WeightConfig {
    pub fn resolve(&self, shape: Shape) -> Result<WeightProfile> {
        let pick = |v: &Option<Vec<f64>>, len| v.clone().unwrap_or_else(|| vec![1.0; len]);
        let profile = WeightProfile {
            parameter_uniform: self.parameter_uniform,
            parameter_l2: self.parameter_l2,
            criteria: pick(&self.criteria, shape.criteria),
            characteristics: pick(&self.characteristics, shape.characteristics),
            modes: pick(&self.modes, shape.modes),
            elements: pick(&self.elements, shape.elements),
        };
        profile.validate(shape).map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(profile)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForecastConfig {
    /// Defaults to `min(J, 7)` when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_size: Option<usize>,
    /// Defaults to twice the archive span when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    /// Step tolerance for trend classification.
    pub trend_tolerance: f64,
}

impl Default for ForecastConfig {
    fn default() -> Self {
        Self { basis_size: None, horizon: None, trend_tolerance: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scale: ScaleConfig,
    pub weights: WeightConfig,
    /// Highest derivative order per criterion, 1 (C_0/L_2 only) to 3.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<u8>>,
    pub tie_eps: f64,
    pub forecast: ForecastConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scale: ScaleConfig::default(),
            weights: WeightConfig::default(),
            orders: None,
            tie_eps: dynaeval_core::selection::DEFAULT_EPS,
            forecast: ForecastConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::parse(path, msg),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.scale.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        if cfg.scale.labels.len() < 4 {
            return Err(HarnessError::Config("scale.labels needs one label per grade 2..=5".into()));
        }
        if !(cfg.tie_eps >= 0.0 && cfg.tie_eps.is_finite()) {
            return Err(HarnessError::Config("tie_eps must be finite and non-negative".into()));
        }
        Ok(cfg)
    }

    /// Derivative order per criterion.
    pub fn orders(&self, shape: Shape) -> Result<Vec<u8>> {
        let orders = self.orders.clone().unwrap_or_else(|| vec![1; shape.criteria]);
        if orders.len() != shape.criteria {
            return Err(HarnessError::Config(format!(
                "orders has {} entries for {} criteria",
                orders.len(),
                shape.criteria
            )));
        }
        if let Some(p) = orders.iter().find(|&&p| !(1..=3).contains(&p)) {
            return Err(HarnessError::Config(format!("derivative order {p} is outside 1..=3")));
        }
        Ok(orders)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_takes_defaults() {
        let cfg = RunConfig::parse("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        let shape = Shape::new(2, 3, 1, 2).unwrap();
        assert_eq!(cfg.weights.resolve(shape).unwrap(), WeightProfile::uniform(shape));
        assert_eq!(cfg.orders(shape).unwrap(), vec![1, 1]);
    }

    #[test]
    fn partial_sections_merge_with_defaults() {
        let cfg = RunConfig::parse(
            "tie_eps = 0.01\norders = [1, 2]\n[scale]\nnu = 4.0\n[weights]\nmodes = [1.0, 2.0, 3.0]\n",
        )
        .unwrap();
        assert_eq!(cfg.scale.nu, 4.0);
        assert_eq!(cfg.scale.delta, 0.5);
        let shape = Shape::new(2, 3, 1, 2).unwrap();
        let w = cfg.weights.resolve(shape).unwrap();
        assert_eq!(w.modes, vec![1.0, 2.0, 3.0]);
        assert_eq!(w.elements, vec![1.0, 1.0]);
        assert_eq!(cfg.orders(shape).unwrap(), vec![1, 2]);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::parse("[scale]\nlabels = [\"a\", \"b\"]\n").is_err());
        assert!(RunConfig::parse("[scale]\ndelta = 1.5\n").is_err());
        assert!(RunConfig::parse("tie_eps = -1.0\n").is_err());
        assert!(RunConfig::parse("bogus = 1\n").is_err());
        let shape = Shape::new(1, 2, 1, 1).unwrap();
        let cfg = RunConfig::parse("[weights]\nmodes = [1.0, 0.0]\n").unwrap();
        assert!(cfg.weights.resolve(shape).is_err());
        let cfg = RunConfig::parse("orders = [4]\n").unwrap();
        assert!(cfg.orders(shape).is_err());
        let cfg = RunConfig::parse("orders = [1, 1]\n").unwrap();
        assert!(cfg.orders(shape).is_err());
    }

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfig {
            orders: Some(vec![1, 3]),
            forecast: ForecastConfig { horizon: Some(5.0), ..ForecastConfig::default() },
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::parse(&cfg.to_toml()).unwrap(), cfg);
    }
}
