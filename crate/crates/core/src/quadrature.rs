//! Fixed-order quadrature rules on finite intervals.

use std::f64::consts::PI;

/// Which interpolatory family to use for a [`Rule`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    GaussLegendre,
    ClenshawCurtis,
}

/// Nodes and weights mapped to an interval `[a, b]`.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn new(family: Family, n: usize, a: f64, b: f64) -> Self {
        let (x, w) = match family {
            Family::GaussLegendre => gauss_legendre(n),
            Family::ClenshawCurtis => clenshaw_curtis(n),
        };
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        Rule {
            nodes: x.iter().map(|&t| mid + half * t).collect(),
            weights: w.iter().map(|&v| half * v).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
///
/// Newton iteration on the three-term recurrence, started from the
/// Tricomi-type initial guess. Accurate to a few ulps for n up to several
/// thousand.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Clenshaw–Curtis rule with `n` points (Chebyshev extrema) on `[-1, 1]`,
/// ascending.
pub fn clenshaw_curtis(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "Clenshaw-Curtis rule needs at least two nodes");
    let big_n = n - 1;
    let nf = big_n as f64;
    let theta: Vec<f64> = (0..=big_n).map(|k| PI * k as f64 / nf).collect();
    let mut w = vec![0.0; n];
    let end = if big_n.is_multiple_of(2) {
        1.0 / (nf * nf - 1.0)
    } else {
        1.0 / (nf * nf)
    };
    w[0] = end;
    w[big_n] = end;
    for i in 1..big_n {
        let mut v = 1.0;
        if big_n.is_multiple_of(2) {
            for k in 1..big_n / 2 {
                let kf = k as f64;
                v -= 2.0 * (2.0 * kf * theta[i]).cos() / (4.0 * kf * kf - 1.0);
            }
            v -= (nf * theta[i]).cos() / (nf * nf - 1.0);
        } else {
            for k in 1..=(big_n - 1) / 2 {
                let kf = k as f64;
                v -= 2.0 * (2.0 * kf * theta[i]).cos() / (4.0 * kf * kf - 1.0);
            }
        }
        w[i] = 2.0 * v / nf;
    }
    // cos(theta) runs from 1 down to -1; flip to ascending order.
    let mut x: Vec<f64> = theta.iter().map(|t| t.cos()).collect();
    x.reverse();
    w.reverse();
    (x, w)
}

/// Composite Gauss–Legendre integration of `f` over `[a, b]` split into
/// `panels` equal pieces.
pub fn composite_gl<F: FnMut(f64) -> f64>(
    rule: &(Vec<f64>, Vec<f64>),
    a: f64,
    b: f64,
    panels: usize,
    mut f: F,
) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = crate::NeumaierSum::new();
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let mid = lo + 0.5 * h;
        let mut s = 0.0;
        for (&t, &w) in rule.0.iter().zip(&rule.1) {
            s += w * f(mid + 0.5 * h * t);
        }
        total.add(0.5 * h * s);
    }
    total.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 32, 64] {
            let (x, w) = gauss_legendre(n);
            let deg = 2 * n - 1;
            for k in 0..=deg.min(40) {
                let exact = if k % 2 == 1 {
                    0.0
                } else {
                    2.0 / (k as f64 + 1.0)
                };
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                assert!((got - exact).abs() < 1e-13, "n={n} k={k} got={got}");
            }
        }
    }

    #[test]
    fn gauss_legendre_nodes_are_sorted_and_symmetric() {
        let (x, w) = gauss_legendre(33);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        for i in 0..33 {
            assert!((x[i] + x[32 - i]).abs() < 1e-15);
            assert!((w[i] - w[32 - i]).abs() < 1e-15);
        }
    }

    #[test]
    fn clenshaw_curtis_weights_sum_to_two_and_integrate_exp() {
        for n in [2usize, 3, 8, 33, 64] {
            let (x, w) = clenshaw_curtis(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
        let r = Rule::new(Family::ClenshawCurtis, 40, 0.0, 1.0);
        let got = r.integrate(f64::exp);
        assert!((got - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn composite_rule_handles_oscillation() {
        let rule = gauss_legendre(32);
        let got = composite_gl(&rule, 0.0, 10.0, 20, |x| (7.0 * x).cos());
        assert!((got - (70f64).sin() / 7.0).abs() < 1e-13);
    }
}
