//! Closed-form limit laws for the reflected process, its overshoot and its
//! running maximum, all expressed through the ladder exponents.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ladder::{factorize, LadderFactorization, RationalBernstein};
use crate::model::LevyModel;
use crate::special::{gamma as complex_gamma, laplace_invert_tail};

/// Limit laws of `(Y(t), Z(x + y), M(t, x))` for one model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitLawSet {
    pub gamma: f64,
    pub fact: LadderFactorization,
    /// Limit of `t * exp(-gamma x)` along the experiment's grid, if any.
    pub lambda_scale: Option<f64>,
}

impl LimitLawSet {
    pub fn new(fact: LadderFactorization, lambda_scale: Option<f64>) -> Result<Self> {
        if let Some(l) = lambda_scale {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::Config(format!("lambda_scale must be positive, got {l}")));
            }
        }
        Ok(Self {
            gamma: fact.gamma,
            fact,
            lambda_scale,
        })
    }

    pub fn from_model(model: &LevyModel, lambda_scale: Option<f64>) -> Result<Self> {
        Self::new(factorize(model)?, lambda_scale)
    }

    fn phi(&self, u: f64) -> f64 {
        self.fact.phi(u)
    }

    fn lambda(&self) -> Result<f64> {
        self.lambda_scale
            .ok_or_else(|| Error::Config("lambda_scale is required for the maximum law".into()))
    }

    /// `E[exp(-v Z(inf))] = gamma/(gamma + v) * phi(v)/phi(0)`.
    pub fn z_inf_laplace(&self, v: f64) -> f64 {
        self.gamma / (self.gamma + v) * self.phi(v) / self.fact.phi0()
    }

    /// `P(Z(inf) > x)`, integrating the ladder tail term by term.
    pub fn z_inf_tail(&self, x: f64) -> Result<f64> {
        let mut acc = 0.0;
        for t in self.fact.ascending.jump_terms() {
            if t.pole <= self.gamma {
                return Err(Error::DivergentTail {
                    pole: t.pole,
                    gamma: self.gamma,
                });
            }
            acc += t.weight * (-t.pole * x).exp() / (t.pole - self.gamma);
        }
        Ok(self.gamma / self.fact.phi0() * acc)
    }

    /// `P(Z(inf) = 0) = gamma * m / phi(0)`, the creeping probability.
    pub fn z_inf_atom(&self) -> f64 {
        self.gamma * self.fact.m() / self.fact.phi0()
    }

    pub fn z_inf_cdf(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Ok(0.0);
        }
        Ok(1.0 - self.z_inf_tail(x)?)
    }

    /// `P(Z(inf) > x)` by numerical Laplace inversion of the transform.
    pub fn z_inf_tail_inverted(&self, xs: &[f64]) -> Result<Vec<f64>> {
        laplace_invert_tail(|v| self.z_inf_laplace(v), xs)
    }

    /// `E[exp(-u Y(inf))] = phi(0)/phi(u)`.
    pub fn y_inf_laplace(&self, u: f64) -> f64 {
        self.fact.phi0() / self.phi(u)
    }

    /// `P(Y(inf) = 0)`; positive exactly when the ascending ladder has no drift.
    pub fn y_inf_atom(&self) -> f64 {
        let asc = &self.fact.ascending;
        if asc.zeros().len() == asc.poles().len() {
            self.fact.phi0() / asc.normalization_c()
        } else {
            0.0
        }
    }

    /// `P(Y(inf) > y)` as a mixture of exponentials, from the residues of
    /// `phi(0)/phi(u)` at the zeros of `phi`.
    pub fn y_inf_tail(&self, y: f64) -> f64 {
        let asc = &self.fact.ascending;
        let scale = self.fact.phi0() / asc.normalization_c();
        residues(scale, asc.poles(), asc.zeros())
            .map(|(a, r)| r / a * (-a * y).exp())
            .sum()
    }

    pub fn y_inf_tail_inverted(&self, xs: &[f64]) -> Result<Vec<f64>> {
        laplace_invert_tail(|u| self.y_inf_laplace(u), xs)
    }

    /// `E[exp(-u Y(inf) - v Z(inf))]`; factorizes into the two marginals.
    pub fn joint_yz_laplace(&self, u: f64, v: f64) -> f64 {
        self.y_inf_laplace(u) * self.z_inf_laplace(v)
    }

    /// `ell * C_gamma * phi_hat(gamma) * lambda`, the Gumbel intensity at 0.
    pub fn gumbel_intensity(&self) -> Result<f64> {
        Ok(self.fact.ell_phihat_gamma() * self.fact.c_gamma * self.lambda()?)
    }

    /// `P(M(inf) < z) = exp(-ell C_gamma phi_hat(gamma) lambda e^{-gamma z})`.
    pub fn gumbel_cdf(&self, z: f64) -> Result<f64> {
        Ok((-self.gumbel_intensity()? * (-self.gamma * z).exp()).exp())
    }

    /// Joint Fourier–Laplace transform of `(Y(inf), Z(inf), M(inf))`.
    pub fn triple_transform(&self, u: f64, v: f64, beta: f64) -> Result<Complex64> {
        let yz = self.joint_yz_laplace(u, v);
        if beta == 0.0 {
            return Ok(Complex64::new(yz, 0.0));
        }
        let g = complex_gamma(Complex64::new(1.0, -beta / self.gamma));
        let shift = Complex64::new(0.0, beta / self.gamma * self.gumbel_intensity()?.ln()).exp();
        Ok(g * shift * yz)
    }

    /// `E[exp(gamma X(T_hat(z)))]` where `T_hat(z)` is the first passage of
    /// `X` below `-z`.
    ///
    /// The undershoot below `-z` is the overshoot of the descending ladder
    /// height over `z`, whose Laplace transform in `z` is rational; it is
    /// inverted exactly by residues.
    pub fn exit_below_moment(&self, z: f64) -> f64 {
        let desc = &self.fact.descending;
        let g = self.gamma;
        // f(z) = E[exp(-gamma * undershoot)] = -sum over zeros a of phi_hat of
        // Res_{q=-a} phi_hat(gamma) / ((q - gamma) phi_hat(q)) * e^{-a z}.
        let scale = desc.eval(g) / desc.normalization_c();
        let f: f64 = residues(scale, desc.poles(), desc.zeros())
            .map(|(a, r)| -r / (-a - g) * (-a * z).exp())
            .sum();
        (-g * z).exp() * f
    }

    /// Two-sided exit asymptotics `C_gamma e^{-gamma x} (1 - E[e^{gamma X(T_hat(z))}])`.
    pub fn two_sided_exit_asym(&self, x: f64, z: f64) -> f64 {
        self.fact.c_gamma * (-self.gamma * x).exp() * (1.0 - self.exit_below_moment(z))
    }

    /// `C(u) = gamma/(gamma + u) * phi(u)/phi(0) * C_gamma`.
    pub fn overshoot_constant(&self, u: f64) -> f64 {
        self.z_inf_laplace(u) * self.fact.c_gamma
    }

    /// Asymptotics of `E[exp(-u K(x)); T(x) < T_hat(z)]`.
    pub fn overshoot_exit_asym(&self, u: f64, x: f64, z: f64) -> f64 {
        self.overshoot_constant(u) * (-self.gamma * x).exp() * (1.0 - self.exit_below_moment(z))
    }

    /// `∫ q e^{-qx} E^(gamma)[exp(-u K(x))] dx`
    /// `= q/phi(q - gamma) * (phi(q - gamma) - phi(u - gamma)) / (q - u)`,
    /// continued by its derivative limit at `q = u`.
    pub fn tilted_overshoot_transform(&self, q: f64, u: f64) -> Result<f64> {
        if !(q > 0.0 && u > 0.0) {
            return Err(Error::Config(format!("q and u must be positive, got q={q}, u={u}")));
        }
        let g = self.gamma;
        let pq = self.phi(q - g);
        let ratio = if (q - u).abs() <= 1e-9 * q.max(u) {
            self.fact.phi_prime(q - g)
        } else {
            (pq - self.phi(u - g)) / (q - u)
        };
        Ok(q / pq * ratio)
    }

    /// Limit of the tilted overshoot transform as `q -> 0`:
    /// `E^(gamma)[exp(-u K(inf))] = phi(u - gamma) / (u phi'(-gamma))`.
    pub fn tilted_overshoot_limit(&self, u: f64) -> f64 {
        self.phi(u - self.gamma) / (u * self.fact.phi_prime(-self.gamma))
    }

    pub fn ascending(&self) -> &RationalBernstein {
        &self.fact.ascending
    }
}

/// Residues of `scale * prod(s + num) / prod(s + den)` at each `s = -d`,
/// returned as `(d, residue)`. Requires distinct `den`.
fn residues<'a>(
    scale: f64,
    num: &'a [f64],
    den: &'a [f64],
) -> impl Iterator<Item = (f64, f64)> + 'a {
    den.iter().enumerate().map(move |(j, &d)| {
        let n: f64 = num.iter().map(|&a| a - d).product();
        let m: f64 = den
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, &dk)| dk - d)
            .product();
        (d, scale * n / m)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets::*;
    use approx::assert_abs_diff_eq;

    fn laws(m: &LevyModel, lambda: Option<f64>) -> LimitLawSet {
        LimitLawSet::from_model(m, lambda).unwrap()
    }

    #[test]
    fn z_laplace_examples() {
        let cl = laws(&cl1(), None);
        assert_abs_diff_eq!(cl.z_inf_laplace(1.0), 0.5, epsilon = 1e-12);
        assert_eq!(cl.z_inf_laplace(0.0), 1.0);
        let bm = laws(&bm1(), None);
        assert_abs_diff_eq!(bm.z_inf_laplace(7.0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn z_tail_examples() {
        let cl = laws(&cl1(), None);
        assert_abs_diff_eq!(cl.z_inf_tail(0.0).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cl.z_inf_tail(4f64.ln()).unwrap(), 0.25, epsilon = 1e-12);
        let bm = laws(&bm1(), None);
        assert_eq!(bm.z_inf_tail(0.3).unwrap(), 0.0);
    }

    #[test]
    fn z_atom_examples() {
        assert_abs_diff_eq!(laws(&bm1(), None).z_inf_atom(), 1.0, epsilon = 1e-12);
        assert_eq!(laws(&cl1(), None).z_inf_atom(), 0.0);
        // gamma = 1, m = 1, phi(0) = 1 * 3 / 2.
        let a = laws(&kou1(), None).z_inf_atom();
        assert_abs_diff_eq!(a, 2.0 / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn total_probability() {
        for m in [cl1(), bm1(), kou1(), two_sided()] {
            let l = laws(&m, None);
            assert_abs_diff_eq!(l.z_inf_tail(0.0).unwrap() + l.z_inf_atom(), 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(l.y_inf_tail(0.0) + l.y_inf_atom(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn y_laplace_examples() {
        let cl = laws(&cl1(), None);
        assert_abs_diff_eq!(cl.y_inf_laplace(1.0), 2.0 / 3.0, epsilon = 1e-12);
        // Pollaczek–Khinchine: (1 - rho)(alpha + u)/(u + alpha(1 - rho)).
        for u in [0.1, 0.9, 4.0] {
            assert_abs_diff_eq!(cl.y_inf_laplace(u), 0.5 * (1.0 + u) / (u + 0.5), epsilon = 1e-12);
        }
        assert_eq!(cl.y_inf_laplace(0.0), 1.0);
        assert_abs_diff_eq!(laws(&bm1(), None).y_inf_laplace(2.0), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(cl.y_inf_atom(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(cl.y_inf_tail(3.0), 0.5 * (-1.5f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn joint_examples() {
        let cl = laws(&cl1(), None);
        assert_eq!(cl.joint_yz_laplace(0.0, 0.0), 1.0);
        assert_abs_diff_eq!(cl.joint_yz_laplace(1.0, 1.0), 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(laws(&bm1(), None).joint_yz_laplace(2.0, 5.0), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn gumbel_examples() {
        let cl = laws(&cl1(), Some(4.0));
        assert_abs_diff_eq!(cl.gumbel_cdf(0.0).unwrap(), (-1.0f64).exp(), epsilon = 1e-12);
        assert_eq!(cl.gumbel_cdf(1e4).unwrap(), 1.0);
        let z = 0.7;
        let shifted = cl.gumbel_cdf(z + 2f64.ln() / cl.gamma).unwrap();
        assert_abs_diff_eq!(shifted, cl.gumbel_cdf(z).unwrap().sqrt(), epsilon = 1e-12);
        assert!(laws(&cl1(), None).gumbel_cdf(0.0).is_err());
    }

    #[test]
    fn gumbel_location_equivariance() {
        let delta = 1.3;
        let a = laws(&kou1(), Some(2.0));
        let b = laws(&kou1(), Some(2.0 * (a.gamma * delta).exp()));
        for z in [-2.0, 0.0, 1.5, 4.0] {
            assert_abs_diff_eq!(
                b.gumbel_cdf(z + delta).unwrap(),
                a.gumbel_cdf(z).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn triple_reduces_at_zero_frequency() {
        let cl = laws(&cl1(), Some(4.0));
        assert_eq!(cl.triple_transform(0.0, 0.0, 0.0).unwrap().re, 1.0);
        let t = cl.triple_transform(1.0, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(t.re, 1.0 / 3.0, epsilon = 1e-12);
        assert_eq!(t.im, 0.0);
    }

    #[test]
    fn exit_examples() {
        let cl = laws(&cl1(), None);
        let want = 0.5 * (-10.0f64).exp() * (1.0 - (-5.0f64).exp());
        assert_abs_diff_eq!(cl.two_sided_exit_asym(20.0, 10.0), want, epsilon = 1e-12 * want);
        let far = cl.two_sided_exit_asym(20.0, 200.0);
        assert_abs_diff_eq!(far, 0.5 * (-10.0f64).exp(), epsilon = 1e-12 * far);

        let bm = laws(&bm1(), None);
        let want = (-20.0f64).exp() * (1.0 - (-10.0f64).exp());
        assert_abs_diff_eq!(bm.two_sided_exit_asym(10.0, 5.0), want, epsilon = 1e-12 * want);
    }

    #[test]
    fn exit_converges_monotonically_in_z() {
        for m in [cl1(), kou1(), two_sided()] {
            let l = laws(&m, None);
            let mut prev = 0.0;
            for z in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 300.0] {
                let v = l.two_sided_exit_asym(3.0, z);
                assert!(v >= prev);
                prev = v;
            }
            let lim = l.fact.c_gamma * (-3.0 * l.gamma).exp();
            assert_abs_diff_eq!(prev, lim, epsilon = 1e-9 * lim);
        }
    }

    #[test]
    fn overshoot_exit_examples() {
        let cl = laws(&cl1(), None);
        for m in [cl1(), bm1(), kou1()] {
            let l = laws(&m, None);
            assert_eq!(l.overshoot_exit_asym(0.0, 5.0, 2.0), l.two_sided_exit_asym(5.0, 2.0));
        }
        assert_abs_diff_eq!(cl.overshoot_constant(1.0), 0.25, epsilon = 1e-12);
        let want = 0.25 * (-10.0f64).exp() * (1.0 - (-5.0f64).exp());
        assert_abs_diff_eq!(cl.overshoot_exit_asym(1.0, 20.0, 10.0), want, epsilon = 1e-12 * want);
        // Creeping: C(u) does not depend on u.
        let bm = laws(&bm1(), None);
        for u in [0.5, 10.0, 1e6] {
            assert_abs_diff_eq!(bm.overshoot_constant(u), bm.fact.c_gamma, epsilon = 1e-9);
        }
    }

    #[test]
    fn tilted_transform_examples() {
        let cl = laws(&cl1(), None);
        // phi(s - 1/2) = s / (s + 1/2)
        let p = |s: f64| s / (s + 0.5);
        let want = 1.0 / p(1.0) * (p(1.0) - p(2.0)) / (1.0 - 2.0);
        assert_abs_diff_eq!(cl.tilted_overshoot_transform(1.0, 2.0).unwrap(), want, epsilon = 1e-12);
        assert_abs_diff_eq!(cl.tilted_overshoot_transform(1.0, 2.0).unwrap(), 0.2, epsilon = 1e-12);
        let q = 1.5;
        let d = cl.tilted_overshoot_transform(q, q).unwrap();
        assert_abs_diff_eq!(d, q * cl.fact.phi_prime(q - 0.5) / cl.fact.phi(q - 0.5), epsilon = 1e-12);
        let near = cl.tilted_overshoot_transform(q, q + 1e-6).unwrap();
        assert_abs_diff_eq!(d, near, epsilon = 1e-6);
        let bm = laws(&bm1(), None);
        assert_abs_diff_eq!(bm.tilted_overshoot_transform(1.0, 2.0).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn inverted_tails() {
        let cl = laws(&cl1(), None);
        let t = cl.z_inf_tail_inverted(&[2f64.ln()]).unwrap();
        assert_abs_diff_eq!(t[0], 0.5, epsilon = 1e-6);
        let bm = laws(&bm1(), None);
        for t in bm.z_inf_tail_inverted(&[0.5, 3.0]).unwrap() {
            assert_abs_diff_eq!(t, 0.0, epsilon = 1e-6);
        }
        let y = cl.y_inf_tail_inverted(&[1e-6]).unwrap();
        assert_abs_diff_eq!(y[0], 0.5, epsilon = 1e-4);
    }

    #[test]
    fn z_transform_completely_monotone() {
        for m in [cl1(), kou1(), two_sided()] {
            let l = laws(&m, None);
            let h = 0.05;
            let vals: Vec<f64> = (0..80).map(|i| l.z_inf_laplace(i as f64 * h)).collect();
            for w in vals.windows(3) {
                assert!(w[1] <= w[0] + 1e-15);
                assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-13);
            }
            assert_abs_diff_eq!(l.z_inf_laplace(1e-9), 1.0, epsilon = 1e-7);
        }
    }
}
