//! TOML experiment files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ExpJumps, LevyModel};
use crate::sim::SimConfig;
use crate::stats::ThresholdGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UpSection {
    pub rate: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DownSection {
    pub rate: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub drift: f64,
    #[serde(default)]
    pub sigma: f64,
    pub up: Option<UpSection>,
    pub down: Option<DownSection>,
}

impl ModelSection {
    pub fn build(&self) -> Result<LevyModel> {
        LevyModel::new(
            self.drift,
            self.sigma,
            self.up.as_ref().map(|u| ExpJumps::new(u.rate, u.alpha)),
            self.down.as_ref().map(|d| ExpJumps::new(d.rate, d.beta)),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default = "defaults::n")]
    pub n: u64,
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    /// Grid step for models with a Brownian part; defaults to the largest allowed.
    pub step: Option<f64>,
    #[serde(default = "defaults::horizon")]
    pub horizon: f64,
    #[serde(default = "defaults::t")]
    pub t: f64,
    #[serde(default = "defaults::x")]
    pub x: f64,
    /// First index to simulate; `simulate` writes rows `start..start + n`.
    #[serde(default)]
    pub start: u64,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            n: defaults::n(),
            seed: defaults::seed(),
            step: None,
            horizon: defaults::horizon(),
            t: defaults::t(),
            x: defaults::x(),
            start: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Scale in the coupling `t = lambda * exp(gamma * x)`.
    #[serde(default = "defaults::lambda")]
    pub lambda: f64,
    #[serde(default = "defaults::x_list")]
    pub x_list: Vec<f64>,
    #[serde(default = "defaults::y_offset")]
    pub y_offset: f64,
    /// Thresholds for the events `Y(t) > a`, `Z > b`, `M <= c`.
    #[serde(default = "defaults::a")]
    pub a: Vec<f64>,
    #[serde(default = "defaults::b")]
    pub b: Vec<f64>,
    #[serde(default = "defaults::c")]
    pub c: Vec<f64>,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            lambda: defaults::lambda(),
            x_list: defaults::x_list(),
            y_offset: defaults::y_offset(),
            a: defaults::a(),
            b: defaults::b(),
            c: defaults::c(),
        }
    }
}

impl GridSection {
    pub fn thresholds(&self) -> Result<ThresholdGrid> {
        ThresholdGrid::new(self.a.clone(), self.b.clone(), self.c.clone())
    }
}

/// Points at which `limits` and `plot-data` tabulate the laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSection {
    #[serde(default = "defaults::x_max")]
    pub x_max: f64,
    #[serde(default = "defaults::points")]
    pub points: usize,
}

impl Default for TableSection {
    fn default() -> Self {
        Self {
            x_max: defaults::x_max(),
            points: defaults::points(),
        }
    }
}

impl TableSection {
    /// `points` equally spaced values in `(0, x_max]`.
    pub fn xs(&self) -> Vec<f64> {
        (1..=self.points)
            .map(|i| self.x_max * i as f64 / self.points as f64)
            .collect()
    }
}

/// Sizes and thresholds of the `verify` suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    /// Checks to run; empty means every check that applies to the model.
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default = "defaults::stationary_t")]
    pub stationary_t: f64,
    #[serde(default = "defaults::exit_x")]
    pub exit_x: f64,
    #[serde(default = "defaults::exit_z")]
    pub exit_z: f64,
    #[serde(default = "defaults::quad_pairs")]
    pub quadrature_pairs: Vec<[f64; 2]>,
    #[serde(default = "defaults::quad_nodes")]
    pub quadrature_nodes: usize,
    #[serde(default = "defaults::quad_per_node")]
    pub quadrature_per_node: u64,
    #[serde(default = "defaults::straddle_x")]
    pub straddle_x: Vec<f64>,
    #[serde(default = "defaults::straddle_n")]
    pub straddle_n: u64,
    #[serde(default = "defaults::tol_root")]
    pub tol_root: f64,
    #[serde(default = "defaults::tol_wh")]
    pub tol_wh: f64,
    #[serde(default = "defaults::tol_overshoot_ks")]
    pub tol_overshoot_ks: f64,
    #[serde(default = "defaults::tol_atom")]
    pub tol_atom: f64,
    #[serde(default = "defaults::tol_stationary_ks")]
    pub tol_stationary_ks: f64,
    #[serde(default = "defaults::tol_gumbel_ks")]
    pub tol_gumbel_ks: f64,
    #[serde(default = "defaults::tol_gap")]
    pub tol_gap: f64,
    #[serde(default = "defaults::tol_exit")]
    pub tol_exit: f64,
    #[serde(default = "defaults::tol_quadrature")]
    pub tol_quadrature: f64,
    #[serde(default = "defaults::min_straddle_ratio")]
    pub min_straddle_ratio: f64,
}

impl Default for VerifySection {
    fn default() -> Self {
        toml::from_str("").expect("defaults deserialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub model: ModelSection,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub table: TableSection,
    #[serde(default)]
    pub verify: VerifySection,
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn model(&self) -> Result<LevyModel> {
        self.model.build()
    }

    /// Simulation settings for a given `(t, x, y_offset)`, horizon raised to `t` if needed.
    pub fn sim_config(&self, model: &LevyModel, t: f64, x: f64, y_offset: f64) -> SimConfig {
        SimConfig {
            t,
            x,
            y_offset,
            n: self.sim.n,
            seed: self.sim.seed,
            step: self.sim.step.unwrap_or_else(|| SimConfig::max_step(model)),
            horizon: self.sim.horizon.max(t),
        }
    }

    /// `(t, x)` pairs on the coupled grid `t = lambda * exp(gamma * x)`.
    pub fn coupled_grid(&self, gamma: f64) -> Result<Vec<(f64, f64)>> {
        if self.grid.x_list.is_empty() {
            return Err(Error::Config("grid.x_list is empty".into()));
        }
        if !(self.grid.lambda > 0.0) {
            return Err(Error::Config("grid.lambda must be positive".into()));
        }
        Ok(self
            .grid
            .x_list
            .iter()
            .map(|&x| (self.grid.lambda * (gamma * x).exp(), x))
            .collect())
    }
}

mod defaults {
    pub fn n() -> u64 {
        10_000
    }
    pub fn seed() -> u64 {
        1
    }
    pub fn horizon() -> f64 {
        1e4
    }
    pub fn t() -> f64 {
        100.0
    }
    pub fn x() -> f64 {
        5.0
    }
    pub fn lambda() -> f64 {
        4.0
    }
    pub fn x_list() -> Vec<f64> {
        vec![10.0, 12.0, 14.0]
    }
    pub fn y_offset() -> f64 {
        8.0
    }
    pub fn a() -> Vec<f64> {
        vec![0.5, 1.5, 3.0]
    }
    pub fn b() -> Vec<f64> {
        vec![0.5, 1.0, 2.0]
    }
    pub fn c() -> Vec<f64> {
        vec![-1.0, 0.5, 2.0, 4.0]
    }
    pub fn x_max() -> f64 {
        10.0
    }
    pub fn points() -> usize {
        41
    }
    pub fn stationary_t() -> f64 {
        400.0
    }
    pub fn exit_x() -> f64 {
        20.0
    }
    pub fn exit_z() -> f64 {
        10.0
    }
    pub fn quad_pairs() -> Vec<[f64; 2]> {
        vec![[1.0, 2.0], [2.0, 1.0]]
    }
    pub fn quad_nodes() -> usize {
        12
    }
    pub fn quad_per_node() -> u64 {
        20_000
    }
    pub fn straddle_x() -> Vec<f64> {
        vec![10.0, 16.0]
    }
    pub fn straddle_n() -> u64 {
        20_000
    }
    pub fn tol_root() -> f64 {
        1e-10
    }
    pub fn tol_wh() -> f64 {
        1e-8
    }
    pub fn tol_overshoot_ks() -> f64 {
        0.02
    }
    pub fn tol_atom() -> f64 {
        0.01
    }
    pub fn tol_stationary_ks() -> f64 {
        0.02
    }
    pub fn tol_gumbel_ks() -> f64 {
        0.03
    }
    pub fn tol_gap() -> f64 {
        0.03
    }
    pub fn tol_exit() -> f64 {
        0.05
    }
    pub fn tol_quadrature() -> f64 {
        0.02
    }
    pub fn min_straddle_ratio() -> f64 {
        2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let spec = ExperimentSpec::from_toml(
            "[model]\ndrift = -2.0\n[model.up]\nrate = 1.0\nalpha = 1.0\n",
        )
        .unwrap();
        let m = spec.model().unwrap();
        assert_eq!(m.drift(), -2.0);
        assert_eq!(spec.sim.n, 10_000);
        assert_eq!(spec.verify.tol_gap, 0.03);
        let grid = spec.coupled_grid(0.5).unwrap();
        assert!((grid[0].0 - 4.0 * 5f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = ExperimentSpec::from_toml("[model]\ndrift = -1.0\nsigma = 1.0\nsgima = 2.0\n").unwrap_err();
        assert_eq!(err.kind(), "config");
    }

    #[test]
    fn empty_x_list_rejected() {
        let spec = ExperimentSpec::from_toml("[model]\ndrift = -1.0\nsigma = 1.0\n[grid]\nx_list = []\n").unwrap();
        assert!(spec.coupled_grid(2.0).is_err());
    }
}
