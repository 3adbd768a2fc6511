use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball_radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, rename = "flow_T", skip_serializing_if = "Option::is_none")]
    pub flow_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_budget: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// Tolerance names accepted by `--tol`, with defaults.
pub const TOLERANCES: [(&str, f64); 5] = [
    ("cluster", projconvex::group::DEFAULT_CLUSTER_TOL),
    ("gap", projconvex::projlin::DEFAULT_GAP_TOL),
    ("pair", 1e-2),
    ("collinear", 1e-6),
    ("min_sep", 1e-3),
];

impl RunConfig {
    pub fn tol(&self, key: &str) -> f64 {
        let default = TOLERANCES.iter().find(|(k, _)| *k == key).map(|t| t.1).expect("known tolerance");
        self.tolerances.get(key).copied().unwrap_or(default)
    }

    pub fn radius(&self, default: usize) -> usize {
        self.budgets.ball_radius.unwrap_or(default)
    }

    pub fn grid(&self, default: usize) -> usize {
        self.budgets.grid.unwrap_or(default)
    }

    pub fn flow_t(&self, default: f64) -> f64 {
        self.budgets.flow_t.unwrap_or(default)
    }

    pub fn check(&self) -> Result<(), String> {
        for (k, v) in &self.tolerances {
            if !TOLERANCES.iter().any(|(t, _)| t == k) {
                let known: Vec<&str> = TOLERANCES.iter().map(|t| t.0).collect();
                return Err(format!("unknown tolerance `{k}` (known: {})", known.join(", ")));
            }
            if !(v.is_finite() && *v > 0.0) {
                return Err(format!("tolerance `{k}` must be positive"));
            }
        }
        if let Some(t) = self.budgets.flow_t {
            if !t.is_finite() {
                return Err("flow_t must be finite".into());
            }
        }
        Ok(())
    }
}

pub fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}
