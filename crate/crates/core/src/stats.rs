//! Empirical distributions and the statistics used to confront samples with
//! the analytical limit laws.

use serde::Serialize;

use crate::error::{Error, Result};

/// Sorted sample with exact zeros kept as a separate atom count.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EmpiricalDistribution {
    sorted_values: Vec<f64>,
    n: usize,
    atom_at_zero_count: usize,
}

impl EmpiricalDistribution {
    /// Builds the distribution from raw values. NaNs are not allowed.
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Self {
        let mut atom = 0;
        let mut sorted_values: Vec<f64> = values
            .into_iter()
            .filter(|&v| {
                assert!(!v.is_nan(), "NaN in empirical sample");
                if v == 0.0 {
                    atom += 1;
                    false
                } else {
                    true
                }
            })
            .collect();
        sorted_values.sort_unstable_by(f64::total_cmp);
        Self {
            n: sorted_values.len() + atom,
            sorted_values,
            atom_at_zero_count: atom,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn atom_at_zero_count(&self) -> usize {
        self.atom_at_zero_count
    }

    /// Nonzero values, ascending.
    pub fn nonzero_values(&self) -> &[f64] {
        &self.sorted_values
    }

    pub fn atom_fraction(&self) -> f64 {
        self.atom_at_zero_count as f64 / self.n as f64
    }

    /// Number of sample points `<= x`.
    pub fn count_le(&self, x: f64) -> usize {
        let below = self.sorted_values.partition_point(|&v| v <= x);
        below + if x >= 0.0 { self.atom_at_zero_count } else { 0 }
    }

    /// Number of sample points `< x`.
    pub fn count_lt(&self, x: f64) -> usize {
        let below = self.sorted_values.partition_point(|&v| v < x);
        below + if x > 0.0 { self.atom_at_zero_count } else { 0 }
    }

    pub fn ecdf(&self, x: f64) -> f64 {
        self.count_le(x) as f64 / self.n as f64
    }

    /// Strictly positive part, as its own distribution.
    pub fn positive_part(&self) -> Self {
        let start = self.sorted_values.partition_point(|&v| v <= 0.0);
        let vals = self.sorted_values[start..].to_vec();
        Self {
            n: vals.len(),
            sorted_values: vals,
            atom_at_zero_count: 0,
        }
    }

    /// Union of two samples.
    pub fn merge(&self, other: &Self) -> Self {
        let mut vals = Vec::with_capacity(self.sorted_values.len() + other.sorted_values.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.sorted_values, &other.sorted_values);
        while i < a.len() && j < b.len() {
            if a[i].total_cmp(&b[j]).is_le() {
                vals.push(a[i]);
                i += 1;
            } else {
                vals.push(b[j]);
                j += 1;
            }
        }
        vals.extend_from_slice(&a[i..]);
        vals.extend_from_slice(&b[j..]);
        Self {
            n: self.n + other.n,
            sorted_values: vals,
            atom_at_zero_count: self.atom_at_zero_count + other.atom_at_zero_count,
        }
    }

    /// Distinct support points with the number of sample points at each.
    fn support(&self) -> Vec<(f64, usize)> {
        let split = self.sorted_values.partition_point(|&v| v < 0.0);
        let mut out: Vec<(f64, usize)> = Vec::new();
        let mut push = |v: f64, c: usize| match out.last_mut() {
            Some((last, cnt)) if *last == v => *cnt += c,
            _ => out.push((v, c)),
        };
        for &v in &self.sorted_values[..split] {
            push(v, 1);
        }
        if self.atom_at_zero_count > 0 {
            push(0.0, self.atom_at_zero_count);
        }
        for &v in &self.sorted_values[split..] {
            push(v, 1);
        }
        out
    }
}

/// Kolmogorov–Smirnov distance `sup_x |F_n(x) - F(x)|` for a right-continuous
/// CDF `F`. Both one-sided gaps are checked at every support point, using the
/// left limit `F(x-)` (evaluated at the preceding float) so that atoms in
/// either distribution are compared correctly.
pub fn ks_distance<F: Fn(f64) -> f64>(emp: &EmpiricalDistribution, cdf: F) -> f64 {
    if emp.is_empty() {
        return 0.0;
    }
    let n = emp.len() as f64;
    let mut below = 0usize;
    let mut d = 0.0f64;
    for (x, count) in emp.support() {
        let f_left = cdf(x.next_down());
        let f = cdf(x);
        d = d.max((below as f64 / n - f_left).abs());
        below += count;
        d = d.max((below as f64 / n - f).abs());
    }
    d
}

/// Two-sample Kolmogorov–Smirnov distance `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_two_sample(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    a.support()
        .into_iter()
        .chain(b.support())
        .map(|(x, _)| (a.ecdf(x) - b.ecdf(x)).abs())
        .fold(0.0, f64::max)
}

/// DKW band half-width `sqrt(ln(2 / (1 - confidence)) / (2 n))`.
pub fn dkw_radius(n: usize, confidence: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Config("DKW radius needs at least one sample".into()));
    }
    if !(confidence > 0.0 && confidence <= 1.0 - 1e-12) {
        return Err(Error::Config(format!(
            "confidence must lie in (0, 1 - 1e-12], got {confidence}"
        )));
    }
    Ok(((2.0 / (1.0 - confidence)).ln() / (2.0 * n as f64)).sqrt())
}

/// Thresholds for the half-line events `{Y > a}`, `{Z > b}`, `{M <= c}`.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ThresholdGrid {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl ThresholdGrid {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        if a.is_empty() || b.is_empty() || c.is_empty() {
            return Err(Error::Config("threshold grid must be non-empty in every axis".into()));
        }
        Ok(Self { a, b, c })
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.a.iter().flat_map(move |&a| {
            self.b
                .iter()
                .flat_map(move |&b| self.c.iter().map(move |&c| (a, b, c)))
        })
    }

    fn len(&self) -> usize {
        self.a.len() * self.b.len() * self.c.len()
    }
}

/// Counts of the marginal, pairwise and triple events over a grid.
/// Merging two sets of counts is exact addition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointCounts {
    pub grid: ThresholdGrid,
    pub n: u64,
    y_gt: Vec<u64>,
    z_gt: Vec<u64>,
    m_le: Vec<u64>,
    yz: Vec<u64>,
    yzm: Vec<u64>,
}

impl JointCounts {
    pub fn empty(grid: ThresholdGrid) -> Self {
        let (na, nb, nc) = (grid.a.len(), grid.b.len(), grid.c.len());
        Self {
            n: 0,
            y_gt: vec![0; na],
            z_gt: vec![0; nb],
            m_le: vec![0; nc],
            yz: vec![0; na * nb],
            yzm: vec![0; grid.len()],
            grid,
        }
    }

    pub fn add(&mut self, y: f64, z: f64, m: f64) {
        let g = &self.grid;
        let (nb, nc) = (g.b.len(), g.c.len());
        self.n += 1;
        for (i, &a) in g.a.iter().enumerate() {
            let ya = y > a;
            self.y_gt[i] += ya as u64;
            for (j, &b) in g.b.iter().enumerate() {
                let zb = z > b;
                if i == 0 {
                    self.z_gt[j] += zb as u64;
                }
                self.yz[i * nb + j] += (ya && zb) as u64;
                for (k, &c) in g.c.iter().enumerate() {
                    let mc = m <= c;
                    if i == 0 && j == 0 {
                        self.m_le[k] += mc as u64;
                    }
                    self.yzm[(i * nb + j) * nc + k] += (ya && zb && mc) as u64;
                }
            }
        }
    }

    pub fn from_triples(grid: ThresholdGrid, triples: impl IntoIterator<Item = (f64, f64, f64)>) -> Self {
        let mut out = Self::empty(grid);
        for (y, z, m) in triples {
            out.add(y, z, m);
        }
        out
    }

    pub fn merge(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Config("cannot merge counts over different grids".into()));
        }
        let add = |a: &[u64], b: &[u64]| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>();
        Ok(Self {
            grid: self.grid.clone(),
            n: self.n + other.n,
            y_gt: add(&self.y_gt, &other.y_gt),
            z_gt: add(&self.z_gt, &other.z_gt),
            m_le: add(&self.m_le, &other.m_le),
            yz: add(&self.yz, &other.yz),
            yzm: add(&self.yzm, &other.yzm),
        })
    }
}

/// Joint versus product probabilities over the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependenceReport {
    pub grid: Vec<(f64, f64, f64)>,
    pub joint_probs: Vec<f64>,
    pub product_probs: Vec<f64>,
    /// Sup-norm gap of the triple events.
    pub gap: f64,
    /// Sup-norm gap of the pairwise `(Y, Z)` events.
    pub pair_gap: f64,
    /// DKW radius at 99% for the sample size.
    pub dkw_radius: f64,
    pub n: u64,
}

/// Compares joint event frequencies with products of marginal frequencies.
/// Gaps are formed in integer arithmetic, so they vanish exactly when the
/// joint counts are the outer product of the marginal counts.
pub fn independence_gap(counts: &JointCounts) -> Result<IndependenceReport> {
    let n = counts.n;
    if n == 0 {
        return Err(Error::Config("independence gap needs at least one sample".into()));
    }
    let g = &counts.grid;
    let (nb, nc) = (g.b.len(), g.c.len());
    let nf = n as f64;
    let n128 = n as i128;
    let mut grid = Vec::with_capacity(g.len());
    let mut joint_probs = Vec::with_capacity(g.len());
    let mut product_probs = Vec::with_capacity(g.len());
    let mut gap = 0.0f64;
    let mut pair_gap = 0.0f64;
    for (i, &a) in g.a.iter().enumerate() {
        for (j, &b) in g.b.iter().enumerate() {
            let (cy, cz) = (counts.y_gt[i] as i128, counts.z_gt[j] as i128);
            let pair = counts.yz[i * nb + j] as i128;
            let diff = (pair * n128 - cy * cz).abs();
            pair_gap = pair_gap.max(diff as f64 / (nf * nf));
            for (k, &c) in g.c.iter().enumerate() {
                let cm = counts.m_le[k] as i128;
                let joint = counts.yzm[(i * nb + j) * nc + k] as i128;
                let diff = (joint * n128 * n128 - cy * cz * cm).abs();
                gap = gap.max(diff as f64 / (nf * nf * nf));
                grid.push((a, b, c));
                joint_probs.push(joint as f64 / nf);
                product_probs.push((cy as f64 / nf) * (cz as f64 / nf) * (cm as f64 / nf));
            }
        }
    }
    Ok(IndependenceReport {
        grid,
        joint_probs,
        product_probs,
        gap,
        pair_gap,
        dkw_radius: dkw_radius(n as usize, 0.99)?,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn atom_bookkeeping() {
        let e = EmpiricalDistribution::from_values([0.0, 2.0, -1.0, 0.0, 1.0]);
        assert_eq!(e.len(), 5);
        assert_eq!(e.atom_at_zero_count(), 2);
        assert_eq!(e.nonzero_values(), &[-1.0, 1.0, 2.0]);
        assert_abs_diff_eq!(e.ecdf(0.0), 0.6);
        assert_abs_diff_eq!(e.ecdf(-0.5), 0.2);
        assert_eq!(e.positive_part().len(), 2);
    }

    #[test]
    fn constant_zero_against_exponential() {
        let e = EmpiricalDistribution::from_values(vec![0.0; 100]);
        let d = ks_distance(&e, |x| if x < 0.0 { 0.0 } else { 1.0 - (-x).exp() });
        assert_eq!(d, 1.0);
    }

    #[test]
    fn atoms_in_the_reference_cdf() {
        // Half zeros, half Exp(1): compare with the mixed CDF that has the same atom.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let vals: Vec<f64> = (0..20_000)
            .map(|i| {
                if i % 2 == 0 {
                    0.0
                } else {
                    -(1.0 - rng.random::<f64>()).ln()
                }
            })
            .collect();
        let e = EmpiricalDistribution::from_values(vals);
        let d = ks_distance(&e, |x| if x < 0.0 { 0.0 } else { 1.0 - 0.5 * (-x).exp() });
        assert!(d < dkw_radius(e.len(), 0.99).unwrap(), "d = {d}");
    }

    #[test]
    fn self_sample_within_dkw() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let e = EmpiricalDistribution::from_values((0..50_000).map(|_| rng.random::<f64>()));
        let d = ks_distance(&e, |x| x.clamp(0.0, 1.0));
        assert!(d <= dkw_radius(e.len(), 0.99).unwrap());
    }

    #[test]
    fn two_sample_distance() {
        let a = EmpiricalDistribution::from_values([0.0, 1.0, 2.0, 3.0]);
        let b = EmpiricalDistribution::from_values([0.0, 1.0, 2.0, 3.0]);
        assert_eq!(ks_two_sample(&a, &b), 0.0);
        let c = EmpiricalDistribution::from_values([10.0, 11.0]);
        assert_eq!(ks_two_sample(&a, &c), 1.0);
        let d = EmpiricalDistribution::from_values([0.0, 0.0, 2.0, 3.0]);
        assert_abs_diff_eq!(ks_two_sample(&a, &d), 0.25);
    }

    #[test]
    fn dkw_examples() {
        assert_abs_diff_eq!(dkw_radius(100_000, 0.99).unwrap(), 0.005146, epsilon = 1e-5);
        assert_abs_diff_eq!(dkw_radius(1, 0.5).unwrap(), (4f64.ln() / 2.0).sqrt(), epsilon = 1e-15);
        assert!(dkw_radius(10, 1.0 - 1e-13).is_err());
        assert!(dkw_radius(0, 0.9).is_err());
    }

    fn grid() -> ThresholdGrid {
        ThresholdGrid::new(vec![0.2, 0.5], vec![0.3, 0.7], vec![0.4, 0.8]).unwrap()
    }

    #[test]
    fn product_construction_has_zero_gap() {
        let ys = [0.1, 0.3, 0.6, 0.9];
        let zs = [0.2, 0.5, 0.8];
        let ms = [0.35, 0.5, 0.9, 0.1, 0.75];
        let mut triples = Vec::new();
        for y in ys {
            for z in zs {
                for m in ms {
                    triples.push((y, z, m));
                }
            }
        }
        let r = independence_gap(&JointCounts::from_triples(grid(), triples)).unwrap();
        assert_eq!(r.gap, 0.0);
        assert_eq!(r.pair_gap, 0.0);
    }

    #[test]
    fn independent_and_comonotone_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ind: Vec<_> = (0..20_000)
            .map(|_| (rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()))
            .collect();
        let r = independence_gap(&JointCounts::from_triples(grid(), ind.clone())).unwrap();
        assert!(r.gap <= 3.0 * r.dkw_radius);
        let como = ind.iter().map(|&(y, _, _)| (y, y, y));
        let r = independence_gap(&JointCounts::from_triples(grid(), como)).unwrap();
        assert!(r.gap > 0.05, "gap = {}", r.gap);
        assert!(r.gap <= 2.0);
        assert!(r.joint_probs.iter().chain(&r.product_probs).all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn counts_merge_by_addition() {
        let pts: Vec<_> = (0..40).map(|i| {
            let f = i as f64 / 40.0;
            (f, (f * 7.0) % 1.0, (f * 13.0) % 1.0)
        }).collect();
        let all = JointCounts::from_triples(grid(), pts.clone());
        let a = JointCounts::from_triples(grid(), pts[..17].to_vec());
        let b = JointCounts::from_triples(grid(), pts[17..].to_vec());
        assert_eq!(a.merge(&b).unwrap(), all);
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(ThresholdGrid::new(vec![], vec![1.0], vec![1.0]).is_err());
    }

    proptest! {
        #[test]
        fn ks_invariant_under_monotone_maps(seed in 0u64..1000, shift in -3.0..3.0f64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vals: Vec<f64> = (0..300).map(|_| 0.01 + rng.random::<f64>()).collect();
            let e = EmpiricalDistribution::from_values(vals.iter().copied());
            let d1 = ks_distance(&e, |x| x.clamp(0.0, 1.0));
            // g(x) = exp(x) + shift is strictly increasing.
            let mapped = EmpiricalDistribution::from_values(vals.iter().map(|v| v.exp() + shift));
            let d2 = ks_distance(&mapped, |y| {
                let x = if y - shift > 0.0 { (y - shift).ln() } else { f64::NEG_INFINITY };
                x.clamp(0.0, 1.0)
            });
            prop_assert!((d1 - d2).abs() <= 1e-9);
        }

        #[test]
        fn merge_matches_concatenation(a in prop::collection::vec(-5.0..5.0f64, 0..50), b in prop::collection::vec(-5.0..5.0f64, 0..50)) {
            let ea = EmpiricalDistribution::from_values(a.iter().copied());
            let eb = EmpiricalDistribution::from_values(b.iter().copied());
            let all = EmpiricalDistribution::from_values(a.iter().chain(&b).copied());
            prop_assert_eq!(ea.merge(&eb), all);
        }
    }
}
