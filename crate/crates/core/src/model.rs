//! Parametric Lévy models with a rational Laplace exponent.
//!
//! A [`LevyModel`] is a linear drift plus an optional Brownian component plus
//! two independent compound Poisson streams with exponentially distributed
//! jump sizes, one upward and one downward. Its cumulant exponent
//!
//! ```text
//! psi(theta) = log E[exp(theta X(1))]
//!            = drift*theta + sigma^2 theta^2 / 2
//!              + rate_up * theta / (alpha - theta)
//!              - rate_down * theta / (beta + theta)
//! ```
//!
//! is a rational function of `theta`, which is what makes the ladder
//! factorization in [`crate::ladder`] computable by root finding.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A compound Poisson stream with `Exp(decay)` jump sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpJumps {
    /// Jump intensity per unit time.
    pub rate: f64,
    /// Inverse mean jump size.
    pub decay: f64,
}

impl ExpJumps {
    pub fn new(rate: f64, decay: f64) -> Self {
        Self { rate, decay }
    }

    fn mean_size(&self) -> f64 {
        1.0 / self.decay
    }
}

/// Drift + Brownian motion + two-sided exponential jumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyModel {
    drift: f64,
    sigma: f64,
    up: Option<ExpJumps>,
    down: Option<ExpJumps>,
}

impl LevyModel {
    /// Builds a model, rejecting non-finite or out-of-range parameters and the
    /// degenerate pure-drift case (a lattice path with no randomness).
    pub fn new(
        drift: f64,
        sigma: f64,
        up: Option<ExpJumps>,
        down: Option<ExpJumps>,
    ) -> Result<Self> {
        if !drift.is_finite() {
            return Err(Error::InvalidModel(format!("drift must be finite, got {drift}")));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::InvalidModel(format!(
                "diffusion volatility must be finite and nonnegative, got {sigma}"
            )));
        }
        for (name, jumps) in [("up", up), ("down", down)] {
            if let Some(j) = jumps {
                if !(j.rate.is_finite() && j.rate > 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "{name}-jump rate must be positive, got {}",
                        j.rate
                    )));
                }
                if !(j.decay.is_finite() && j.decay > 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "{name}-jump decay must be positive, got {}",
                        j.decay
                    )));
                }
            }
        }
        if sigma == 0.0 && up.is_none() && down.is_none() {
            return Err(Error::InvalidModel(
                "pure-drift model is degenerate (no diffusion and no jumps)".into(),
            ));
        }
        Ok(Self {
            drift,
            sigma,
            up,
            down,
        })
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn up_jumps(&self) -> Option<ExpJumps> {
        self.up
    }

    pub fn down_jumps(&self) -> Option<ExpJumps> {
        self.down
    }

    pub fn has_diffusion(&self) -> bool {
        self.sigma > 0.0
    }

    /// Total jump intensity of both streams.
    pub fn jump_rate(&self) -> f64 {
        self.up.map_or(0.0, |j| j.rate) + self.down.map_or(0.0, |j| j.rate)
    }

    /// `E[X(1)]`.
    pub fn mean_x1(&self) -> f64 {
        self.drift + self.up.map_or(0.0, |j| j.rate * j.mean_size())
            - self.down.map_or(0.0, |j| j.rate * j.mean_size())
    }

    /// Upper end of the domain of `psi` (the up-jump decay, or infinity).
    pub fn theta_max(&self) -> f64 {
        self.up.map_or(f64::INFINITY, |j| j.decay)
    }

    /// Lower end of the domain of `psi` (minus the down-jump decay, or minus infinity).
    pub fn theta_min(&self) -> f64 {
        self.down.map_or(f64::NEG_INFINITY, |j| -j.decay)
    }

    /// Cumulant exponent `log E[exp(theta X(1))]` on the real line.
    pub fn psi(&self, theta: f64) -> Result<f64> {
        if let Some(up) = self.up {
            if theta >= up.decay {
                return Err(Error::Pole {
                    theta,
                    boundary: up.decay,
                    side: "up-jump decay alpha",
                });
            }
        }
        if let Some(down) = self.down {
            if theta <= -down.decay {
                return Err(Error::Pole {
                    theta,
                    boundary: -down.decay,
                    side: "down-jump decay beta",
                });
            }
        }
        Ok(self.psi_unchecked(theta))
    }

    pub(crate) fn psi_unchecked(&self, theta: f64) -> f64 {
        let mut v = self.drift * theta + 0.5 * self.sigma * self.sigma * theta * theta;
        if let Some(up) = self.up {
            v += up.rate * theta / (up.decay - theta);
        }
        if let Some(down) = self.down {
            v -= down.rate * theta / (down.decay + theta);
        }
        v
    }

    /// Analytic continuation of `psi` to complex arguments away from the poles.
    pub fn psi_complex(&self, theta: Complex64) -> Complex64 {
        let mut v = theta * self.drift + theta * theta * (0.5 * self.sigma * self.sigma);
        if let Some(up) = self.up {
            v += theta * up.rate / (Complex64::new(up.decay, 0.0) - theta);
        }
        if let Some(down) = self.down {
            v -= theta * down.rate / (Complex64::new(down.decay, 0.0) + theta);
        }
        v
    }

    /// `psi'(theta)`.
    pub fn psi_prime(&self, theta: f64) -> Result<f64> {
        self.psi(theta)?;
        let mut v = self.drift + self.sigma * self.sigma * theta;
        if let Some(up) = self.up {
            let d = up.decay - theta;
            v += up.rate * up.decay / (d * d);
        }
        if let Some(down) = self.down {
            let d = down.decay + theta;
            v -= down.rate * down.decay / (d * d);
        }
        Ok(v)
    }

    /// Model of `X` under the exponentially tilted (Esscher) measure with
    /// parameter `gamma`. The tilted exponent is `psi(theta + gamma) - psi(gamma)`.
    pub fn esscher_tilt(&self, gamma: f64) -> Result<LevyModel> {
        self.psi(gamma)?;
        if gamma == 0.0 {
            return Ok(self.clone());
        }
        let s2 = self.sigma * self.sigma;
        let up = self
            .up
            .map(|j| ExpJumps::new(j.rate * j.decay / (j.decay - gamma), j.decay - gamma));
        let down = self
            .down
            .map(|j| ExpJumps::new(j.rate * j.decay / (j.decay + gamma), j.decay + gamma));
        LevyModel::new(self.drift + s2 * gamma, self.sigma, up, down)
    }

    /// Solves `psi(gamma) = 0` on `(0, theta_max)`.
    ///
    /// The bracket is found by a geometric scan from `1e-12` toward the upper
    /// end of the domain, then refined by bisection down to floating-point
    /// resolution (which also drives `|psi|` below `1e-12`).
    pub fn cramer_gamma(&self) -> Result<CramerData> {
        let mean = self.mean_x1();
        if mean >= 0.0 {
            return Err(Error::NoCramerRoot(format!(
                "E[X(1)] = {mean} is not negative, psi has no positive root"
            )));
        }
        let theta_max = self.theta_max();
        let hi = self.bracket_root(theta_max).ok_or_else(|| {
            Error::NoCramerRoot(format!(
                "psi stays negative on (0, {theta_max}); the upward tail is too light for a Cramer root"
            ))
        })?;
        let mut lo = 1e-12_f64.min(hi * 0.5);
        let mut hi = hi;
        // psi < 0 on (0, gamma) and > 0 on (gamma, theta_max) by convexity.
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.psi_unchecked(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let gamma = if self.psi_unchecked(lo).abs() <= self.psi_unchecked(hi).abs() {
            lo
        } else {
            hi
        };
        let psi_prime = self.psi_prime(gamma)?;
        Ok(CramerData {
            gamma,
            mean_x1: mean,
            theta_max,
            psi_prime,
        })
    }

    /// First scan point with `psi > 0`, if any.
    fn bracket_root(&self, theta_max: f64) -> Option<f64> {
        let mut theta = 1e-12;
        if theta_max.is_finite() {
            while theta < 0.5 * theta_max {
                if self.psi_unchecked(theta) > 0.0 {
                    return Some(theta);
                }
                theta *= 2.0;
            }
            let mut gap = 0.5 * theta_max;
            while gap >= 1e-9 {
                let th = theta_max - gap;
                if self.psi_unchecked(th) > 0.0 {
                    return Some(th);
                }
                gap *= 0.5;
            }
            let th = theta_max - 1e-9;
            (self.psi_unchecked(th) > 0.0).then_some(th)
        } else {
            while theta < 1e150 {
                if self.psi_unchecked(theta) > 0.0 {
                    return Some(theta);
                }
                theta *= 2.0;
            }
            None
        }
    }
}

/// The Cramér root and the quantities that certify it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CramerData {
    pub gamma: f64,
    pub mean_x1: f64,
    pub theta_max: f64,
    /// `psi'(gamma) > 0`; small values signal an ill-conditioned root.
    pub psi_prime: f64,
}

/// Reference models used throughout the examples and tests.
pub mod presets {
    use super::{ExpJumps, LevyModel};

    /// Cramér–Lundberg: drift -2, unit-rate `Exp(1)` upward jumps.
    pub fn cl1() -> LevyModel {
        LevyModel::new(-2.0, 0.0, Some(ExpJumps::new(1.0, 1.0)), None).unwrap()
    }

    /// Brownian motion with drift -1 and unit volatility.
    pub fn bm1() -> LevyModel {
        LevyModel::new(-1.0, 1.0, None, None).unwrap()
    }

    /// Jump diffusion: drift -1, unit volatility, rate 0.5 `Exp(2)` upward jumps.
    pub fn kou1() -> LevyModel {
        LevyModel::new(-1.0, 1.0, Some(ExpJumps::new(0.5, 2.0)), None).unwrap()
    }

    /// Two-sided jumps without diffusion: drift -0.5, up `Exp(2)` at rate 1,
    /// down `Exp(1)` at rate 0.5.
    pub fn two_sided() -> LevyModel {
        LevyModel::new(
            -0.5,
            0.0,
            Some(ExpJumps::new(1.0, 2.0)),
            Some(ExpJumps::new(0.5, 1.0)),
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::presets::*;
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn psi_examples() {
        assert_abs_diff_eq!(cl1().psi(0.5).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(bm1().psi(2.0).unwrap(), 0.0, epsilon = 1e-15);
        for m in [cl1(), bm1(), kou1(), two_sided()] {
            assert_eq!(m.psi(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn psi_rejects_poles() {
        let err = cl1().psi(1.0).unwrap_err();
        assert!(matches!(err, Error::Pole { boundary, .. } if boundary == 1.0));
        let err = two_sided().psi(-1.5).unwrap_err();
        assert!(matches!(err, Error::Pole { boundary, .. } if boundary == -1.0));
    }

    #[test]
    fn mean_examples() {
        assert_eq!(cl1().mean_x1(), -1.0);
        assert_eq!(bm1().mean_x1(), -1.0);
        let m = LevyModel::new(0.0, 1.0, None, None).unwrap();
        assert_eq!(m.mean_x1(), 0.0);
    }

    #[test]
    fn cramer_examples() {
        let c = cl1().cramer_gamma().unwrap();
        assert_abs_diff_eq!(c.gamma, 1.0 - 1.0 / 2.0, epsilon = 1e-12);
        assert!(c.psi_prime > 0.0);
        let c = bm1().cramer_gamma().unwrap();
        assert_abs_diff_eq!(c.gamma, 2.0, epsilon = 1e-12);
        let c = kou1().cramer_gamma().unwrap();
        assert_abs_diff_eq!(c.gamma, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn cramer_rejects_nonnegative_mean() {
        let m = LevyModel::new(0.0, 1.0, None, None).unwrap();
        assert!(matches!(m.cramer_gamma(), Err(Error::NoCramerRoot(_))));
        let m = LevyModel::new(-0.5, 0.0, Some(ExpJumps::new(1.0, 1.0)), None).unwrap();
        assert!(matches!(m.cramer_gamma(), Err(Error::NoCramerRoot(_))));
    }

    #[test]
    fn cramer_rejects_missing_upward_randomness() {
        let m = LevyModel::new(-1.0, 0.0, None, Some(ExpJumps::new(1.0, 1.0))).unwrap();
        assert!(matches!(m.cramer_gamma(), Err(Error::NoCramerRoot(_))));
    }

    #[test]
    fn construction_rejects_degenerate() {
        assert!(LevyModel::new(-1.0, 0.0, None, None).is_err());
        assert!(LevyModel::new(-1.0, -0.1, None, None).is_err());
        assert!(LevyModel::new(f64::NAN, 1.0, None, None).is_err());
        assert!(LevyModel::new(-1.0, 0.0, Some(ExpJumps::new(0.0, 1.0)), None).is_err());
    }

    #[test]
    fn tilt_examples() {
        let t = cl1().esscher_tilt(0.5).unwrap();
        assert_eq!(t.drift(), -2.0);
        let up = t.up_jumps().unwrap();
        assert_abs_diff_eq!(up.rate, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(up.decay, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(t.mean_x1(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.mean_x1(), cl1().psi_prime(0.5).unwrap(), epsilon = 1e-14);

        let t = bm1().esscher_tilt(2.0).unwrap();
        assert_eq!(t.drift(), 1.0);
        assert_eq!(t.sigma(), 1.0);

        for m in [cl1(), bm1(), kou1(), two_sided()] {
            assert_eq!(m.esscher_tilt(0.0).unwrap(), m);
        }
    }

    fn model_strategy() -> impl Strategy<Value = LevyModel> {
        (
            -3.0..-0.2f64,
            prop_oneof![Just(0.0), 0.1..2.0f64],
            prop::option::of((0.1..2.0f64, 0.5..4.0f64)),
            prop::option::of((0.1..2.0f64, 0.5..4.0f64)),
        )
            .prop_filter_map("needs a Cramer root", |(drift, sigma, up, down)| {
                let m = LevyModel::new(
                    drift,
                    sigma,
                    up.map(|(r, a)| ExpJumps::new(r, a)),
                    down.map(|(r, b)| ExpJumps::new(r, b)),
                )
                .ok()?;
                (m.mean_x1() < -0.05 && (sigma > 0.0 || up.is_some())).then_some(m)
            })
    }

    proptest! {
        #[test]
        fn gamma_is_a_root(m in model_strategy()) {
            let c = m.cramer_gamma().unwrap();
            prop_assert!(c.gamma > 0.0 && c.gamma < c.theta_max);
            prop_assert!(m.psi(c.gamma).unwrap().abs() <= 1e-10);
            prop_assert!(c.psi_prime > 0.0);
        }

        #[test]
        fn psi_is_convex(m in model_strategy(), a in 0.0..1.0f64, b in 0.0..1.0f64, w in 0.05..0.95f64) {
            let lo = m.theta_min().max(-5.0) * 0.95;
            let hi = m.theta_max().min(5.0) * 0.95;
            let t1 = lo + (hi - lo) * a.min(b);
            let t3 = lo + (hi - lo) * a.max(b);
            let t2 = w * t1 + (1.0 - w) * t3;
            let chord = w * m.psi(t1).unwrap() + (1.0 - w) * m.psi(t3).unwrap();
            prop_assert!(m.psi(t2).unwrap() <= chord + 1e-9 * (1.0 + chord.abs()));
        }

        #[test]
        fn tilt_shifts_cumulant(m in model_strategy(), frac in 0.0..1.0f64, s in -0.9..0.9f64) {
            let c = m.cramer_gamma().unwrap();
            let g = c.gamma * frac;
            let tilted = m.esscher_tilt(g).unwrap();
            let lo = (m.theta_min() - g).max(-4.0);
            let hi = (m.theta_max() - g).min(4.0);
            let theta = if s < 0.0 { -s * lo } else { s * hi };
            let lhs = tilted.psi(theta).unwrap();
            let rhs = m.psi(theta + g).unwrap() - m.psi(g).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }
    }
}
