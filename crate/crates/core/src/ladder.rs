//! Wiener–Hopf factorization of rational Laplace exponents.
//!
//! For the models in [`crate::model`] the function `-psi(theta)` is a ratio of
//! real polynomials whose roots are all real. The factorization
//!
//! ```text
//! -psi(theta) = k * phi(-theta) * phi_hat(theta)
//! ```
//!
//! is obtained by assigning every strictly positive root and pole to the
//! ascending ladder exponent `phi` (through `phi(-theta)`) and the root at
//! zero plus every strictly negative root and pole to the descending ladder
//! exponent `phi_hat`. Each factor is then a rational Bernstein function
//!
//! ```text
//! c * prod(u + zero_i) / prod(u + pole_j)
//!     = killing + drift * u + sum_j weight_j * u / (u + pole_j)
//! ```
//!
//! whose Lévy measure has the hyperexponential tail
//! `sum_j weight_j * exp(-pole_j * x)`.
//!
//! Both factors carry leading coefficient 1 and `k` absorbs the rest. Only
//! combinations that are invariant under rescaling a factor (and `k`
//! inversely) have probabilistic meaning.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CramerData, LevyModel};
use crate::poly::Poly;

const COINCIDENT_ROOT_TOL: f64 = 1e-8;
const RESIDUE_TOL: f64 = 1e-10;

/// One exponential component of a ladder-height Lévy measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpTerm {
    /// Total mass of the component (its contribution to the tail at 0).
    pub weight: f64,
    /// Exponential decay rate of the component.
    pub pole: f64,
}

/// Laplace exponent of a (possibly killed) subordinator with rational form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalBernstein {
    normalization_c: f64,
    zeros: Vec<f64>,
    poles: Vec<f64>,
    killing: f64,
    drift: f64,
    jump_terms: Vec<JumpTerm>,
}

impl RationalBernstein {
    /// Builds `c * prod(u + zeros) / prod(u + poles)` and decomposes it into
    /// killing, drift and jump terms, rejecting anything that is not a
    /// Bernstein function.
    pub fn from_factors(normalization_c: f64, zeros: Vec<f64>, poles: Vec<f64>) -> Result<Self> {
        let fail = |msg: String| Err(Error::FactorizationFailure(msg));
        if !(normalization_c > 0.0 && normalization_c.is_finite()) {
            return fail(format!("normalization must be positive, got {normalization_c}"));
        }
        if zeros.iter().any(|&a| !(a >= 0.0 && a.is_finite()))
            || poles.iter().any(|&b| !(b > 0.0 && b.is_finite()))
        {
            return fail(format!(
                "zeros must be >= 0 and poles > 0 (zeros {zeros:?}, poles {poles:?})"
            ));
        }
        if zeros.len() != poles.len() && zeros.len() != poles.len() + 1 {
            return fail(format!(
                "{} zeros and {} poles cannot form a Bernstein function",
                zeros.len(),
                poles.len()
            ));
        }
        let mut all: Vec<f64> = zeros.iter().chain(poles.iter()).copied().collect();
        all.sort_by(f64::total_cmp);
        if all
            .windows(2)
            .any(|w| (w[1] - w[0]).abs() <= COINCIDENT_ROOT_TOL * w[1].abs().max(1.0))
        {
            return fail(format!(
                "near-coincident roots/poles (zeros {zeros:?}, poles {poles:?})"
            ));
        }

        let drift = if zeros.len() == poles.len() + 1 {
            normalization_c
        } else {
            0.0
        };
        let mut jump_terms = Vec::with_capacity(poles.len());
        for (j, &b) in poles.iter().enumerate() {
            let num: f64 = zeros.iter().map(|&a| a - b).product();
            let den: f64 = poles
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &bk)| bk - b)
                .product();
            let residue = normalization_c * num / den;
            let weight = -residue / b;
            if weight <= 0.0 {
                return fail(format!(
                    "non-positive Levy weight {weight} at pole {b}; zeros and poles do not interlace"
                ));
            }
            jump_terms.push(JumpTerm { weight, pole: b });
        }

        let mut f = Self {
            normalization_c,
            zeros,
            poles,
            killing: 0.0,
            drift,
            jump_terms,
        };
        let killing = f.eval(0.0);
        if killing < -RESIDUE_TOL * normalization_c {
            return fail(format!("negative killing rate {killing}"));
        }
        f.killing = killing.max(0.0);

        // The partial-fraction form must reproduce the product form.
        for u in [0.37, 1.0, 4.2, 31.0] {
            let lhs = f.eval(u);
            let rhs = f.levy_khintchine(u);
            if (lhs - rhs).abs() > RESIDUE_TOL * lhs.abs().max(normalization_c) {
                return fail(format!(
                    "partial fractions disagree with product form at u = {u}: {lhs} vs {rhs}"
                ));
            }
        }
        f.check_shape()?;
        Ok(f)
    }

    fn levy_khintchine(&self, u: f64) -> f64 {
        self.killing
            + self.drift * u
            + self
                .jump_terms
                .iter()
                .map(|t| t.weight * u / (u + t.pole))
                .sum::<f64>()
    }

    /// Nonnegative, nondecreasing and concave on a log-spaced grid.
    fn check_shape(&self) -> Result<()> {
        let grid: Vec<f64> = (0..=60).map(|i| 1e-3 * 10f64.powf(i as f64 / 10.0)).collect();
        let vals: Vec<f64> = grid.iter().map(|&u| self.eval(u)).collect();
        let tol = 1e-9 * self.normalization_c;
        if vals.iter().any(|&v| v < -tol) {
            return Err(Error::FactorizationFailure("negative exponent value".into()));
        }
        for i in 1..grid.len() {
            if vals[i] < vals[i - 1] - tol * vals[i].abs().max(1.0) {
                return Err(Error::FactorizationFailure(format!(
                    "exponent decreases near u = {}",
                    grid[i]
                )));
            }
        }
        for i in 1..grid.len() - 1 {
            let s1 = (vals[i] - vals[i - 1]) / (grid[i] - grid[i - 1]);
            let s2 = (vals[i + 1] - vals[i]) / (grid[i + 1] - grid[i]);
            if s2 > s1 + 1e-7 * s1.abs().max(self.normalization_c) {
                return Err(Error::FactorizationFailure(format!(
                    "exponent is not concave near u = {}",
                    grid[i]
                )));
            }
        }
        Ok(())
    }

    pub fn eval(&self, u: f64) -> f64 {
        let num: f64 = self.zeros.iter().map(|&a| u + a).product();
        let den: f64 = self.poles.iter().map(|&b| u + b).product();
        self.normalization_c * num / den
    }

    pub fn eval_complex(&self, u: Complex64) -> Complex64 {
        let num: Complex64 = self.zeros.iter().map(|&a| u + a).product();
        let den: Complex64 = self.poles.iter().map(|&b| u + b).product();
        num / den * self.normalization_c
    }

    /// First derivative, well defined at the zeros.
    pub fn derivative(&self, u: f64) -> f64 {
        let den: f64 = self.poles.iter().map(|&b| u + b).product();
        let num_prime: f64 = (0..self.zeros.len())
            .map(|i| {
                self.zeros
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i)
                    .map(|(_, &a)| u + a)
                    .product::<f64>()
            })
            .sum();
        let log_den_prime: f64 = self.poles.iter().map(|&b| 1.0 / (u + b)).sum();
        self.normalization_c * num_prime / den - self.eval(u) * log_den_prime
    }

    /// Tail of the Lévy measure, `nu((x, inf))`.
    pub fn nu_tail(&self, x: f64) -> f64 {
        self.jump_terms
            .iter()
            .map(|t| t.weight * (-t.pole * x).exp())
            .sum()
    }

    /// Same exponent with the normalization multiplied by `a`.
    pub fn rescaled(&self, a: f64) -> Self {
        Self {
            normalization_c: self.normalization_c * a,
            zeros: self.zeros.clone(),
            poles: self.poles.clone(),
            killing: self.killing * a,
            drift: self.drift * a,
            jump_terms: self
                .jump_terms
                .iter()
                .map(|t| JumpTerm {
                    weight: t.weight * a,
                    pole: t.pole,
                })
                .collect(),
        }
    }

    pub fn killing(&self) -> f64 {
        self.killing
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn jump_terms(&self) -> &[JumpTerm] {
        &self.jump_terms
    }

    pub fn normalization_c(&self) -> f64 {
        self.normalization_c
    }

    /// Values `a` with `phi(-a) = 0`, ascending.
    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    /// Values `b` with a pole of `phi` at `-b`.
    pub fn poles(&self) -> &[f64] {
        &self.poles
    }
}

/// Ladder exponents of a model together with the constants built from them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderFactorization {
    pub ascending: RationalBernstein,
    pub descending: RationalBernstein,
    pub k: f64,
    pub gamma: f64,
    pub mean_x1: f64,
    /// Inverse mean of the descending ladder time at local time 1.
    pub ell: f64,
    /// `phi(0) / (gamma * phi'(-gamma))`.
    pub c_gamma: f64,
}

/// Factorizes `-psi` for a model satisfying Cramér's condition.
pub fn wh_factorize(model: &LevyModel, cramer: &CramerData) -> Result<LadderFactorization> {
    let gamma = cramer.gamma;
    let s2 = model.sigma() * model.sigma();
    let up = model.up_jumps();
    let down = model.down_jumps();

    // D(theta) = (alpha - theta)(beta + theta); -psi(theta) = theta * Q(theta) / D(theta).
    let up_factor = up.map_or(Poly::constant(1.0), |j| Poly::linear(j.decay, -1.0));
    let down_factor = down.map_or(Poly::constant(1.0), |j| Poly::linear(j.decay, 1.0));
    let d = up_factor.mul(&down_factor);
    let mut q = d
        .scale(-model.drift())
        .add(&Poly::linear(0.0, -0.5 * s2).mul(&d));
    if let Some(j) = up {
        q = q.add(&down_factor.scale(-j.rate));
    }
    if let Some(j) = down {
        q = q.add(&up_factor.scale(j.rate));
    }
    let roots = q.real_roots();
    if roots.len() != q.degree() {
        return Err(Error::FactorizationFailure(format!(
            "expected {} real roots of the exponent numerator, found {}",
            q.degree(),
            roots.len()
        )));
    }
    if roots.iter().any(|r| r.abs() <= COINCIDENT_ROOT_TOL) {
        return Err(Error::FactorizationFailure(
            "repeated root at zero: the model has zero mean".into(),
        ));
    }

    let mut asc_zeros: Vec<f64> = roots.iter().copied().filter(|&r| r > 0.0).collect();
    let n_positive = asc_zeros.len();
    let gamma_idx = asc_zeros
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - gamma).abs().total_cmp(&(b.1 - gamma).abs()))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::FactorizationFailure("no positive root for gamma".into()))?;
    if (asc_zeros[gamma_idx] - gamma).abs() > COINCIDENT_ROOT_TOL * gamma.max(1.0) {
        return Err(Error::FactorizationFailure(format!(
            "polynomial root {} does not match Cramer root {gamma}",
            asc_zeros[gamma_idx]
        )));
    }
    asc_zeros[gamma_idx] = gamma;
    let asc_poles: Vec<f64> = up.map(|j| j.decay).into_iter().collect();

    let mut desc_zeros = vec![0.0];
    desc_zeros.extend(roots.iter().filter(|&&r| r < 0.0).map(|r| -r));
    desc_zeros.sort_by(f64::total_cmp);
    let desc_poles: Vec<f64> = down.map(|j| j.decay).into_iter().collect();

    let k = q.leading() * if n_positive % 2 == 0 { 1.0 } else { -1.0 };
    if !(k > 0.0) {
        return Err(Error::FactorizationFailure(format!(
            "normalization constant k = {k} is not positive"
        )));
    }

    let ascending = RationalBernstein::from_factors(1.0, asc_zeros, asc_poles)?;
    let descending = RationalBernstein::from_factors(1.0, desc_zeros, desc_poles)?;
    if descending.killing() != 0.0 {
        return Err(Error::FactorizationFailure(
            "descending ladder exponent must not be killed".into(),
        ));
    }
    if !(ascending.killing() > 0.0) {
        return Err(Error::FactorizationFailure(
            "ascending ladder exponent must be killed when E[X(1)] < 0".into(),
        ));
    }

    let mut fact = LadderFactorization {
        ascending,
        descending,
        k,
        gamma,
        mean_x1: cramer.mean_x1,
        ell: f64::NAN,
        c_gamma: f64::NAN,
    };
    for t in [-7.3, -1.1, 0.4, 2.9, 11.0] {
        let theta = Complex64::new(0.0, t);
        let res = fact.identity_residual(model, theta);
        if !(res <= 1e-8) {
            return Err(Error::FactorizationFailure(format!(
                "product identity fails at theta = {t}i: relative residual {res:e}"
            )));
        }
    }
    fact.c_gamma = fact.ascending.eval(0.0) / (gamma * fact.ascending.derivative(-gamma));
    if !(fact.c_gamma > 0.0 && fact.c_gamma.is_finite()) {
        return Err(Error::FactorizationFailure(format!(
            "Cramer constant {} is not positive",
            fact.c_gamma
        )));
    }
    fact.ell = ell_via_wald(model, &fact);
    Ok(fact)
}

/// `ell = |E[X(1)]| / E[H_hat(1)]` from Wald's identity for the descending
/// ladder time, with `E[H_hat(1)] = phi_hat'(0)`.
pub fn ell_via_wald(model: &LevyModel, fact: &LadderFactorization) -> f64 {
    model.mean_x1().abs() / fact.descending.derivative(0.0)
}

impl LadderFactorization {
    /// Ascending ladder exponent `phi(u)`, valid for `u > -gamma`'s pole bound.
    pub fn phi(&self, u: f64) -> f64 {
        self.ascending.eval(u)
    }

    pub fn phi_prime(&self, u: f64) -> f64 {
        self.ascending.derivative(u)
    }

    /// Descending ladder exponent `phi_hat(theta)`.
    pub fn phi_hat(&self, theta: f64) -> f64 {
        self.descending.eval(theta)
    }

    pub fn phi0(&self) -> f64 {
        self.ascending.killing()
    }

    /// Ascending ladder drift `m = lim phi(u)/u`.
    pub fn m(&self) -> f64 {
        self.ascending.drift()
    }

    /// `ell * phi_hat(gamma)`, free of the local-time normalization.
    pub fn ell_phihat_gamma(&self) -> f64 {
        self.ell * self.phi_hat(self.gamma)
    }

    /// Tail of the ascending ladder-height Lévy measure.
    pub fn nu_h_tail(&self, x: f64) -> f64 {
        self.ascending.nu_tail(x)
    }

    /// `k * phi(-theta) * phi_hat(theta)`.
    pub fn product(&self, theta: Complex64) -> Complex64 {
        self.ascending.eval_complex(-theta) * self.descending.eval_complex(theta) * self.k
    }

    /// Relative residual `|psi(theta) + k phi(-theta) phi_hat(theta)| / |psi(theta)|`.
    pub fn identity_residual(&self, model: &LevyModel, theta: Complex64) -> f64 {
        let lhs = -model.psi_complex(theta);
        (lhs - self.product(theta)).norm() / lhs.norm()
    }

    /// Rescales the ascending normalization by `a_up` and the descending one
    /// by `a_down`, compensating in `k` and recomputing `ell`.
    pub fn rescaled(&self, model: &LevyModel, a_up: f64, a_down: f64) -> Self {
        let mut out = Self {
            ascending: self.ascending.rescaled(a_up),
            descending: self.descending.rescaled(a_down),
            k: self.k / (a_up * a_down),
            ..self.clone()
        };
        out.c_gamma = out.phi0() / (out.gamma * out.phi_prime(-out.gamma));
        out.ell = ell_via_wald(model, &out);
        out
    }
}

/// Cramér root and factorization in one call.
pub fn factorize(model: &LevyModel) -> Result<LadderFactorization> {
    let cramer = model.cramer_gamma()?;
    wh_factorize(model, &cramer)
}
