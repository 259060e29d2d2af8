//! Path simulation of X and of the reflected process Y.
//!
//! Every sample draws its randomness from a generator keyed by
//! `(seed, index)`, so a sample is a pure function of the model, the
//! configuration and its index. Batches are computed in parallel and merged
//! in index order, which keeps results independent of the worker count.

pub mod euler;
pub mod exact;
mod tracker;

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::LevyModel;
use crate::stats::{EmpiricalDistribution, JointCounts, ThresholdGrid};
use exact::{Exit, RandomEvents};

/// Safety cap on the duration of unreflected passage simulations.
const MAX_EXIT_TIME: f64 = 1e7;

/// Generator for sample `index` of a run seeded by `seed`. The ChaCha8
/// stream `index` under key `seed` supplies the state of a xoshiro256++
/// generator, which is several times cheaper per draw.
pub fn sample_rng(seed: u64, index: u64) -> Xoshiro256PlusPlus {
    let mut key = ChaCha8Rng::seed_from_u64(seed);
    key.set_stream(index);
    Xoshiro256PlusPlus::from_rng(&mut key)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub t: f64,
    pub x: f64,
    /// Extra height: the passage level is `x + y_offset`.
    pub y_offset: f64,
    pub n: u64,
    pub seed: u64,
    /// Grid step, used only when the model has a Brownian part.
    pub step: f64,
    /// Passages of `x + y_offset` after this time are recorded as absent.
    pub horizon: f64,
}

impl SimConfig {
    /// Largest step allowed for `model`: `1e-2 * min(1, 1 / r)` with `r` the
    /// largest of the jump rate, `|drift|` and `sigma^2`.
    pub fn max_step(model: &LevyModel) -> f64 {
        let r = model
            .jump_rate()
            .max(model.drift().abs())
            .max(model.sigma() * model.sigma());
        1e-2 * (1.0f64).min(1.0 / r)
    }

    pub fn validate(&self, model: &LevyModel) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.t > 0.0 && self.t.is_finite()) {
            return bad(format!("t must be positive, got {}", self.t));
        }
        if !(self.x > 0.0 && self.x.is_finite()) {
            return bad(format!("x must be positive, got {}", self.x));
        }
        if !(self.y_offset >= 0.0 && self.y_offset.is_finite()) {
            return bad(format!("y_offset must be nonnegative, got {}", self.y_offset));
        }
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if !(self.horizon >= self.t && self.horizon.is_finite()) {
            return bad(format!("horizon {} must be finite and >= t = {}", self.horizon, self.t));
        }
        if model.has_diffusion() {
            let cap = Self::max_step(model);
            if !(self.step > 0.0 && self.step <= cap * (1.0 + 1e-12)) {
                return bad(format!("step {} must lie in (0, {cap}] for this model", self.step));
            }
        }
        Ok(())
    }
}

/// One draw of `(Y(t), Z(x+y), M(t,x))` with passage time and straddle flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSample {
    pub index: u64,
    pub y_t: f64,
    /// Overshoot over `x + y_offset`, absent if the level was not passed by the horizon.
    pub z: Option<f64>,
    /// `max_{s <= t} Y(s) - x`.
    pub m: f64,
    pub tau: Option<f64>,
    /// `t` and `tau(x)` lie in the same excursion of Y away from 0.
    pub straddle: bool,
    pub weight: f64,
}

/// Samples the functionals for one index. Exact for models without a
/// Brownian part, grid based otherwise.
pub fn sample_functionals(model: &LevyModel, cfg: &SimConfig, index: u64) -> FunctionalSample {
    let rng = sample_rng(cfg.seed, index);
    if model.has_diffusion() {
        euler::run_reflected(model, cfg, index, rng)
    } else {
        exact::run_reflected(model, cfg, index, &mut RandomEvents::new(model, rng))
    }
}

/// Samples for an index range, in index order.
pub fn sample_range(model: &LevyModel, cfg: &SimConfig, range: Range<u64>) -> Vec<FunctionalSample> {
    range
        .into_par_iter()
        .map(|i| sample_functionals(model, cfg, i))
        .collect()
}

/// Aggregated Monte Carlo output. Z and the joint counts only use the
/// samples whose passage was observed within the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloResult {
    pub samples: Vec<FunctionalSample>,
    pub y_t: EmpiricalDistribution,
    pub z: EmpiricalDistribution,
    pub m: EmpiricalDistribution,
    pub counts: Option<JointCounts>,
}

impl MonteCarloResult {
    pub fn from_samples(samples: Vec<FunctionalSample>, grid: Option<&ThresholdGrid>) -> Self {
        let y_t = EmpiricalDistribution::from_values(samples.iter().map(|s| s.y_t));
        let z = EmpiricalDistribution::from_values(samples.iter().filter_map(|s| s.z));
        let m = EmpiricalDistribution::from_values(samples.iter().map(|s| s.m));
        let counts = grid.map(|g| {
            JointCounts::from_triples(
                g.clone(),
                samples.iter().filter_map(|s| s.z.map(|z| (s.y_t, z, s.m))),
            )
        });
        Self { samples, y_t, z, m, counts }
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    /// Fraction of samples with an observed passage.
    pub fn z_observed_fraction(&self) -> f64 {
        self.z.len() as f64 / self.samples.len() as f64
    }

    pub fn straddle_fraction(&self) -> f64 {
        self.samples.iter().filter(|s| s.straddle).count() as f64 / self.samples.len() as f64
    }

    /// Combines two runs over disjoint index ranges.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        let counts = match (&self.counts, &other.counts) {
            (Some(a), Some(b)) => Some(a.merge(b)?),
            (None, None) => None,
            _ => return Err(Error::Config("cannot merge runs with and without joint counts".into())),
        };
        let mut samples = self.samples.clone();
        samples.extend_from_slice(&other.samples);
        samples.sort_by_key(|s| s.index);
        Ok(Self {
            samples,
            y_t: self.y_t.merge(&other.y_t),
            z: self.z.merge(&other.z),
            m: self.m.merge(&other.m),
            counts,
        })
    }
}

/// Runs indices `0..cfg.n` and aggregates them.
pub fn monte_carlo(
    model: &LevyModel,
    cfg: &SimConfig,
    grid: Option<&ThresholdGrid>,
) -> Result<MonteCarloResult> {
    monte_carlo_range(model, cfg, 0..cfg.n, grid)
}

pub fn monte_carlo_range(
    model: &LevyModel,
    cfg: &SimConfig,
    range: Range<u64>,
    grid: Option<&ThresholdGrid>,
) -> Result<MonteCarloResult> {
    cfg.validate(model)?;
    Ok(MonteCarloResult::from_samples(sample_range(model, cfg, range), grid))
}

/// Mean and standard error of per-index values, computed in parallel and
/// summed in index order.
fn mean_and_se<F: Fn(u64) -> f64 + Sync + Send>(n: u64, f: F) -> (f64, f64) {
    let vals: Vec<f64> = (0..n).into_par_iter().map(f).collect();
    let nf = n as f64;
    let mean = vals.iter().sum::<f64>() / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    (mean, (var / nf).sqrt())
}

fn exit_once(model: &LevyModel, up: f64, down: f64, seed: u64, index: u64) -> Option<Exit> {
    let rng = sample_rng(seed, index);
    if model.has_diffusion() {
        euler::run_exit(model, SimConfig::max_step(model), up, down, MAX_EXIT_TIME, rng)
    } else {
        exact::run_exit(model.drift(), up, down, MAX_EXIT_TIME, &mut RandomEvents::new(model, rng))
    }
}

/// `P(T(x) < T_hat(z))` for X started at 0, estimated under the Esscher
/// tilt at the Cramér root with likelihood ratio `exp(-gamma X(T(x)))`.
/// Returns `(estimate, standard error)`. For `x <= 0` the level is already
/// passed and the estimate is exactly 1.
pub fn importance_sample_exit(model: &LevyModel, x: f64, z: f64, n: u64, seed: u64) -> Result<(f64, f64)> {
    if x <= 0.0 {
        return Ok((1.0, 0.0));
    }
    if !(z > 0.0) || n == 0 {
        return Err(Error::Config("z must be positive and n at least 1".into()));
    }
    let gamma = model.cramer_gamma()?.gamma;
    let tilted = model.esscher_tilt(gamma)?;
    Ok(mean_and_se(n, |i| match exit_once(&tilted, x, z, seed, i) {
        Some(Exit::Up(k)) => (-gamma * (x + k)).exp(),
        _ => 0.0,
    }))
}

/// Plain Monte Carlo estimate of `P(T(x) < T_hat(z))`.
pub fn plain_exit_probability(model: &LevyModel, x: f64, z: f64, n: u64, seed: u64) -> Result<(f64, f64)> {
    if x <= 0.0 {
        return Ok((1.0, 0.0));
    }
    if !(z > 0.0) || n == 0 {
        return Err(Error::Config("z must be positive and n at least 1".into()));
    }
    Ok(mean_and_se(n, |i| match exit_once(model, x, z, seed, i) {
        Some(Exit::Up(_)) => 1.0,
        _ => 0.0,
    }))
}

/// Overshoot `X(T(x)) - x` of one tilted path, or `None` past the time cap.
pub fn tilted_overshoot(tilted: &LevyModel, x: f64, seed: u64, index: u64) -> Option<f64> {
    match exit_once(tilted, x, f64::INFINITY, seed, index) {
        Some(Exit::Up(k)) => Some(k),
        _ => None,
    }
}

/// Nodes and weights of `n`-point Gauss–Laguerre quadrature for
/// `int_0^inf e^{-s} f(s) ds`.
pub fn gauss_laguerre(n: usize) -> Vec<(f64, f64)> {
    let nf = n as f64;
    let mut nodes: Vec<(f64, f64)> = Vec::with_capacity(n);
    let mut z = 0.0f64;
    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2].0)
            }
        };
        let mut pp = 0.0;
        let mut p2 = 0.0;
        for _ in 0..100 {
            let (mut p1, mut q2) = (1.0f64, 0.0f64);
            for j in 1..=n {
                let jf = j as f64;
                let p3 = q2;
                q2 = p1;
                p1 = ((2.0 * jf - 1.0 - z) * q2 - (jf - 1.0) * p3) / jf;
            }
            p2 = q2;
            pp = (nf * p1 - nf * p2) / z;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs() {
                break;
            }
        }
        nodes.push((z, -1.0 / (pp * nf * p2)));
    }
    nodes
}

/// Quadrature estimate of `q int_0^inf e^{-qx} E[e^{-u K(x)}] dx` where
/// `K(x)` is the overshoot of X over `x` under the Esscher tilt at the Cramér
/// root. Each of the `nodes` quadrature points uses `per_node` paths.
pub fn tilted_overshoot_quadrature(
    model: &LevyModel,
    q: f64,
    u: f64,
    nodes: usize,
    per_node: u64,
    seed: u64,
) -> Result<f64> {
    if !(q > 0.0 && u >= 0.0) || nodes == 0 || per_node == 0 {
        return Err(Error::Config("need q > 0, u >= 0 and a nonempty quadrature".into()));
    }
    let gamma = model.cramer_gamma()?.gamma;
    let tilted = model.esscher_tilt(gamma)?;
    let mut total = 0.0;
    for (k, (node, weight)) in gauss_laguerre(nodes).into_iter().enumerate() {
        let x = node / q;
        let base = k as u64 * per_node;
        let (mean, _) = mean_and_se(per_node, |i| {
            tilted_overshoot(&tilted, x, seed, base + i).map_or(0.0, |k| (-u * k).exp())
        });
        total += weight * mean;
    }
    Ok(total)
}

/// `sup_{s <= t} X(s)` for index `index`.
pub fn sample_supremum(model: &LevyModel, t: f64, seed: u64, index: u64) -> f64 {
    let rng = sample_rng(seed, index);
    if model.has_diffusion() {
        euler::run_supremum(model, SimConfig::max_step(model), t, rng)
    } else {
        exact::run_supremum(model.drift(), t, &mut RandomEvents::new(model, rng))
    }
}

/// Probability that `t` and `tau(x)` fall in the same excursion of Y away
/// from 0, with its standard error. Excursions are only identifiable
/// exactly without a Brownian part.
pub fn straddle_probability(model: &LevyModel, t: f64, x: f64, n: u64, seed: u64) -> Result<(f64, f64)> {
    if model.has_diffusion() {
        return Err(Error::UnsupportedModel(
            "straddle estimation needs a model without a Brownian part".into(),
        ));
    }
    let cfg = SimConfig {
        t,
        x,
        y_offset: 0.0,
        n,
        seed,
        step: 1.0,
        horizon: t,
    };
    cfg.validate(model)?;
    let hits = sample_range(model, &cfg, 0..n).iter().filter(|s| s.straddle).count();
    let p = hits as f64 / n as f64;
    Ok((p, (p * (1.0 - p) / n as f64).sqrt()))
}
