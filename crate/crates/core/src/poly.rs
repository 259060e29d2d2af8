//! Dense real polynomials: arithmetic, evaluation and real-root isolation.

/// Coefficients in ascending order: `c[0] + c[1] x + c[2] x^2 + ...`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    /// `a + b x`.
    pub fn linear(a: f64, b: f64) -> Self {
        Poly(vec![a, b])
    }

    fn trimmed(mut self) -> Self {
        while self.0.len() > 1 && *self.0.last().unwrap() == 0.0 {
            self.0.pop();
        }
        self
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        *self.0.last().unwrap_or(&0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly::constant(0.0);
        }
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).trimmed()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let out = (0..n)
            .map(|i| self.0.get(i).unwrap_or(&0.0) + other.0.get(i).unwrap_or(&0.0))
            .collect();
        Poly(out).trimmed()
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect()).trimmed()
    }

    /// All real roots, ascending. Roots are isolated between consecutive
    /// critical points (roots of the derivative, found recursively) and the
    /// Cauchy bound, then refined by bisection to floating-point resolution.
    /// A double root that only touches zero is not reported.
    pub fn real_roots(&self) -> Vec<f64> {
        let p = self.clone().trimmed();
        let deg = p.degree();
        if deg == 0 {
            return Vec::new();
        }
        let lead = p.leading();
        if deg == 1 {
            return vec![-p.0[0] / lead];
        }
        let bound = 1.0
            + p.0[..deg]
                .iter()
                .map(|c| (c / lead).abs())
                .fold(0.0, f64::max);
        let mut knots = vec![-bound];
        knots.extend(p.derivative().real_roots());
        knots.push(bound);

        let mut roots: Vec<f64> = Vec::new();
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (p.eval(a), p.eval(b));
            if fa == 0.0 {
                if roots.last().is_none_or(|&r| r != a) {
                    roots.push(a);
                }
                continue;
            }
            if fa.signum() == fb.signum() {
                continue;
            }
            if fb == 0.0 {
                continue;
            }
            roots.push(bisect(&p, a, b, fa));
        }
        if let Some(&last) = knots.last() {
            if p.eval(last) == 0.0 && roots.last().is_none_or(|&r| r != last) {
                roots.push(last);
            }
        }
        roots
    }
}

fn bisect(p: &Poly, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..2000 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = p.eval(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    if p.eval(a).abs() <= p.eval(b).abs() {
        a
    } else {
        b
    }
}
