// Copyright 2026 The sgb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Dataset generators, timing harness and speedup reports.
//!
//! A [`BenchSpec`] names a data generator and a matrix of engine settings;
//! [`run_matrix`] times every cell and [`report`] turns the rows into a
//! speedup table relative to the all-pairs strategy.

mod generate;
mod report;
mod run;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Metric;
use crate::sgb_all::{OverlapPolicy, SgbError, Strategy};

pub use generate::{gauss_clusters, generate, uniform};
pub use report::{gnuplot_series, report, speedup_rows, SpeedupRow};
pub use run::{rows_to_csv, run_cell, run_matrix, BenchRow, Cell, CSV_HEADER};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmark spec: {0}")]
    InvalidSpec(String),
    #[error("reading input: {0}")]
    Io(String),
    #[error(transparent)]
    Engine(#[from] SgbError),
    #[error("validation failed: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// Uniform over the unit square.
    Uniform,
    /// `k` centers in the unit square with normal spread `sigma` per axis.
    GaussClusters { k: usize, sigma: f64 },
    /// The first `n` rows of a CSV file with finite values in two columns
    /// (the first two columns when unnamed).
    Csv {
        path: PathBuf,
        #[serde(default)]
        x: Option<String>,
        #[serde(default)]
        y: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    All,
    Any,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::All => "all",
            Mode::Any => "any",
        }
    }
}

fn default_modes() -> Vec<Mode> {
    vec![Mode::All, Mode::Any]
}
fn default_policies() -> Vec<OverlapPolicy> {
    vec![OverlapPolicy::JoinAny]
}
fn default_metrics() -> Vec<Metric> {
    vec![Metric::L2]
}
fn default_strategies() -> Vec<Strategy> {
    vec![
        Strategy::AllPairs,
        Strategy::BoundsChecking,
        Strategy::Indexed,
    ]
}
fn default_repetitions() -> usize {
    3
}
fn default_sample() -> f64 {
    0.01
}
fn default_true() -> bool {
    true
}

/// Benchmark description; every field except `generator`, `n` and `eps`
/// has a default so a TOML spec can stay short.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    pub generator: Generator,
    pub n: usize,
    pub eps: Vec<f64>,
    #[serde(default = "default_modes")]
    pub modes: Vec<Mode>,
    /// Overlap policies for distance-to-all cells.
    #[serde(default = "default_policies")]
    pub policies: Vec<OverlapPolicy>,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<Metric>,
    /// Distance-to-any cells skip `bounds`, which it has no counterpart for.
    #[serde(default = "default_strategies")]
    pub strategies: Vec<Strategy>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    /// Run one discarded repetition before timing.
    #[serde(default = "default_true")]
    pub warmup: bool,
    /// Fraction of output groups re-checked after each run.
    #[serde(default = "default_sample")]
    pub validate_fraction: f64,
    /// Spread cells over worker threads. Timings are noisier.
    #[serde(default)]
    pub parallel: bool,
}

impl BenchSpec {
    /// A one-generator spec with defaults for everything else.
    pub fn new(generator: Generator, n: usize, eps: Vec<f64>) -> Self {
        Self {
            generator,
            n,
            eps,
            modes: default_modes(),
            policies: default_policies(),
            metrics: default_metrics(),
            strategies: default_strategies(),
            repetitions: default_repetitions(),
            seed: 0,
            warmup: true,
            validate_fraction: default_sample(),
            parallel: false,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::InvalidSpec(m));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if self.eps.is_empty() {
            return bad("eps list is empty".into());
        }
        if let Some(e) = self.eps.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return bad(format!("eps must be positive, got {e}"));
        }
        if self.modes.is_empty() || self.metrics.is_empty() || self.strategies.is_empty() {
            return bad("modes, metrics and strategies must be non-empty".into());
        }
        if self.modes.contains(&Mode::All) && self.policies.is_empty() {
            return bad("distance-to-all cells need at least one policy".into());
        }
        if !(0.0..=1.0).contains(&self.validate_fraction) {
            return bad(format!(
                "validate_fraction must lie in [0, 1], got {}",
                self.validate_fraction
            ));
        }
        if let Generator::GaussClusters { k, sigma } = self.generator {
            if k == 0 || !(sigma.is_finite() && sigma >= 0.0) {
                return bad(format!("bad cluster parameters k={k} sigma={sigma}"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_points_rejected() {
        let spec = BenchSpec::new(Generator::Uniform, 0, vec![0.1]);
        assert!(matches!(spec.validate(), Err(BenchError::InvalidSpec(_))));
    }

    #[test]
    fn json_round_trip_with_defaults() {
        let text = r#"{"generator": {"kind": "gauss_clusters", "k": 4, "sigma": 0.02},
                       "n": 100, "eps": [0.1, 0.2], "metrics": ["LINF", "l2"],
                       "policies": ["eliminate", "FORM_NEW"]}"#;
        let spec: BenchSpec = serde_json::from_str(text).unwrap();
        assert_eq!(
            spec.generator,
            Generator::GaussClusters { k: 4, sigma: 0.02 }
        );
        assert_eq!(spec.metrics, [Metric::LInf, Metric::L2]);
        assert_eq!(
            spec.policies,
            [OverlapPolicy::Eliminate, OverlapPolicy::FormNewGroup]
        );
        assert_eq!(spec.repetitions, 3);
        let again: BenchSpec =
            serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(again, spec);
    }
}
