//! Wave function, its Fourier coefficients `J(m)` and the correlation
//! kernel
//!
//! ```text
//! K(a, b) = ½ J(a) J(b) + Σ_{k≥1} (−1)^k J(a+k) J(b−k).
//! ```
//!
//! For real parameters the wave function on the unit circle is
//! `exp(4i Σ t_n sin nθ)`, so the coefficients are real, `Σ J(m)² = 1` and
//! `J(−m) = (−1)^m J(m)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::miwa::MiwaParams;
use crate::quadrature::gauss_legendre;
use crate::sum::NeumaierSum;
use crate::{Error, Result};

/// Coefficients below this are treated as zero beyond the cache.
pub const DEFAULT_FLOOR: f64 = 1e-16;

/// Largest trapezoid node count we are willing to allocate.
pub const MAX_NODES: usize = 10_000_000;

const RESIDUE_LIMIT: f64 = 1e-13;

/// `exp(4i Σ t_n sin nθ)`.
pub fn wave_fn(params: &MiwaParams, theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, params.wave_phase(theta))
}

/// Bandwidth estimate `ceil(s) + 8 s^{1/3} + 16`, `s = 4 Σ n |t_n|`.
pub fn estimated_bandwidth(params: &MiwaParams) -> usize {
    let s = params.abs_scale();
    s.ceil() as usize + (8.0 * s.cbrt()).ceil() as usize + 16
}

/// Default trapezoid node count `4B + 64`.
pub fn default_nodes(params: &MiwaParams) -> usize {
    4 * estimated_bandwidth(params) + 64
}

/// Phase `4 Σ t_n sin(2π n j / M)` at node `j`, with `n j` reduced mod `M`
/// before scaling so large tables keep full angular accuracy.
fn node_phase(params: &MiwaParams, j: usize, nodes: usize) -> f64 {
    let step = 2.0 * PI / nodes as f64;
    4.0 * params
        .coeffs()
        .iter()
        .map(|(&n, &t)| {
            let r = (n as usize * j) % nodes;
            t * (step * r as f64).sin()
        })
        .sum::<f64>()
}

/// `J(m)` by the uniform trapezoid rule with `nodes` points on the circle.
pub fn j_coefficient_with_nodes(params: &MiwaParams, m: i64, nodes: usize) -> f64 {
    let step = 2.0 * PI / nodes as f64;
    let mm = m.rem_euclid(nodes as i64) as usize;
    let mut acc = NeumaierSum::new();
    for j in 0..nodes {
        let r = (mm * j) % nodes;
        acc.add((node_phase(params, j, nodes) - step * r as f64).cos());
    }
    acc.value() / nodes as f64
}

/// `J(m) = (1/2π) ∫ exp(i[4 Σ t_n sin nθ − mθ]) dθ` at the default node count.
pub fn j_coefficient(params: &MiwaParams, m: i64) -> f64 {
    j_coefficient_with_nodes(params, m, default_nodes(params))
}

/// Real-index continuation `(1/π) ∫_0^π cos(4 Σ t_n sin nθ − νθ) dθ`.
///
/// Agrees with [`j_coefficient`] at integer `ν`. Composite Gauss–Legendre,
/// about 20 radians of phase per 32-node panel.
pub fn j_real_index(params: &MiwaParams, nu: f64) -> f64 {
    let rule = gauss_legendre(32);
    let freq = params.abs_scale() + nu.abs();
    let panels = (freq * PI / 20.0).ceil() as usize + 2;
    crate::quadrature::composite_gl(&rule, 0.0, PI, panels, |th| {
        (params.wave_phase(th) - nu * th).cos()
    }) / PI
}

/// Kernel value with a bound on the part of the series beyond the cache.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: f64,
    pub bound: f64,
}

/// Cached `J(m)` for `0 ≤ m ≤ capacity`, computed by one FFT.
#[derive(Debug, Clone)]
pub struct JTable {
    params: MiwaParams,
    values: Vec<f64>,
    /// `suffix_sq[m] = Σ_{j ≥ m} J(j)²` over the cache.
    suffix_sq: Vec<f64>,
    abs_sum: f64,
    bandwidth: usize,
    floor_tol: f64,
    floor: f64,
    nodes: usize,
    residue: f64,
}

impl JTable {
    pub fn new(params: &MiwaParams) -> Result<Self> {
        Self::with_floor(params, DEFAULT_FLOOR)
    }

    /// Builds the table, doubling the cache until the coefficients in its
    /// last quarter are below the effective floor `max(floor_tol, 2·residue)`.
    pub fn with_floor(params: &MiwaParams, floor_tol: f64) -> Result<Self> {
        let mut b0 = estimated_bandwidth(params);
        loop {
            let nodes = 4 * b0 + 64;
            if nodes > MAX_NODES {
                return Err(Error::Size {
                    size: nodes,
                    limit: MAX_NODES,
                });
            }
            let capacity = 2 * b0;
            let (values, residue) = fft_coefficients(params, nodes, capacity);
            if residue > RESIDUE_LIMIT {
                return Err(Error::Consistency(format!(
                    "imaginary residue {residue:e} in J coefficients"
                )));
            }
            let floor = floor_tol.max(2.0 * residue);
            let bandwidth = values.iter().rposition(|v| v.abs() >= floor).unwrap_or(0);
            if bandwidth > capacity * 3 / 4 {
                b0 *= 2;
                continue;
            }
            let mut suffix_sq = vec![0.0; capacity + 2];
            let mut acc = NeumaierSum::new();
            for m in (0..=capacity).rev() {
                acc.add(values[m] * values[m]);
                suffix_sq[m] = acc.value();
            }
            let abs_sum = values[0].abs() + 2.0 * values[1..].iter().map(|v| v.abs()).sum::<f64>();
            return Ok(JTable {
                params: params.clone(),
                values,
                suffix_sq,
                abs_sum,
                bandwidth,
                floor_tol,
                floor,
                nodes,
                residue,
            });
        }
    }

    pub fn params(&self) -> &MiwaParams {
        &self.params
    }

    /// Largest `m` with `|J(m)|` at or above the effective floor.
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Largest cached index.
    pub fn capacity(&self) -> usize {
        self.values.len() - 1
    }

    pub fn floor_tol(&self) -> f64 {
        self.floor_tol
    }

    /// Floor actually used, raised to the FFT noise level when that is larger.
    pub fn effective_floor(&self) -> f64 {
        self.floor
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Largest imaginary part seen in the cached coefficients.
    pub fn residue(&self) -> f64 {
        self.residue
    }

    /// `J(m)`; zero beyond the cache, parity for negative `m`.
    pub fn get(&self, m: i64) -> f64 {
        let k = m.unsigned_abs() as usize;
        match self.values.get(k) {
            Some(&v) if m < 0 && k % 2 == 1 => -v,
            Some(&v) => v,
            None => 0.0,
        }
    }

    /// `Σ_{m ∈ ℤ} J(m)²` over the cache.
    pub fn parseval(&self) -> f64 {
        self.values[0] * self.values[0] + 2.0 * self.suffix_sq[1]
    }

    pub fn kernel(&self, a: i64, b: i64) -> KernelValue {
        let c = self.capacity() as i64;
        let lo = 1.max(-c - a).max(b - c);
        let hi = (c - a).min(b + c);
        let mut acc = NeumaierSum::new();
        acc.add(0.5 * self.get(a) * self.get(b));
        for k in lo..=hi {
            let term = self.get(a + k) * self.get(b - k);
            if k % 2 == 0 {
                acc.add(term);
            } else {
                acc.add(-term);
            }
        }
        KernelValue {
            value: acc.value(),
            bound: self.floor * self.abs_sum + self.floor * self.floor,
        }
    }

    /// `ρ({m}) = ½ J(m)² + Σ_{k≥1} J(m+k)²` for `m ≥ 1`.
    pub fn one_point(&self, m: u64) -> f64 {
        let m = m as usize;
        if m > self.capacity() {
            return 0.0;
        }
        0.5 * self.values[m] * self.values[m] + self.suffix_sq[m + 1]
    }
}

/// Real parts of `J(0..=capacity)` from one forward FFT, and the largest
/// imaginary part among them.
fn fft_coefficients(params: &MiwaParams, nodes: usize, capacity: usize) -> (Vec<f64>, f64) {
    let mut buf: Vec<Complex64> = (0..nodes)
        .map(|j| Complex64::from_polar(1.0, node_phase(params, j, nodes)))
        .collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(nodes);
    fft.process(&mut buf);
    let scale = 1.0 / nodes as f64;
    let mut residue = 0.0f64;
    let values = buf[..=capacity]
        .iter()
        .map(|z| {
            residue = residue.max((z.im * scale).abs());
            z.re * scale
        })
        .collect();
    (values, residue)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::bessel_j;

    fn plancherel() -> MiwaParams {
        MiwaParams::single(0.5).unwrap()
    }

    #[test]
    fn wave_fn_examples() {
        let p = MiwaParams::solve_minimal_multicritical(4).unwrap();
        assert_eq!(wave_fn(&p, 0.0), Complex64::new(1.0, 0.0));
        let w = wave_fn(&plancherel(), PI / 2.0);
        assert!((w - Complex64::from_polar(1.0, 2.0)).norm() < 1e-15);
        for th in [0.3, 1.1, 2.9] {
            let z = wave_fn(&p, th);
            assert!((z.norm() - 1.0).abs() < 1e-15);
            assert!((z.conj() - wave_fn(&p, -th)).norm() < 1e-15);
        }
    }

    #[test]
    fn j_coefficient_examples() {
        let p = plancherel();
        assert!((j_coefficient(&p, 0) - 0.223_890_779_141_235_67).abs() < 1e-14);
        assert!((j_coefficient(&p, 1) - 0.576_724_807_756_873_4).abs() < 1e-14);
        let q = MiwaParams::solve_minimal_multicritical(4).unwrap();
        assert!((j_coefficient(&q, -3) + j_coefficient(&q, 3)).abs() < 1e-15);
    }

    #[test]
    fn table_matches_direct_trapezoid_and_bessel() {
        let p = plancherel();
        let t = JTable::new(&p).unwrap();
        for m in 0..=30 {
            let b = bessel_j(m, 2.0);
            assert!((t.get(m as i64) - b).abs() < 1e-15, "m={m}");
            assert!((j_coefficient(&p, m as i64) - b).abs() < 1e-15);
        }
    }

    #[test]
    fn node_doubling_is_stable() {
        let p = MiwaParams::solve_minimal_multicritical(4)
            .unwrap()
            .scaled(10.0);
        let n = default_nodes(&p);
        for m in [0i64, 5, 17, 40, -33] {
            let a = j_coefficient_with_nodes(&p, m, n);
            let b = j_coefficient_with_nodes(&p, m, 2 * n);
            assert!((a - b).abs() < 1e-12, "m={m}");
        }
    }

    #[test]
    fn real_index_form_agrees_at_integers() {
        let p = MiwaParams::solve_minimal_multicritical(4)
            .unwrap()
            .scaled(20.0);
        let t = JTable::new(&p).unwrap();
        for m in [0i64, 3, 50, 53, 60, -7] {
            assert!(
                (j_real_index(&p, m as f64) - t.get(m)).abs() < 1e-13,
                "m={m}"
            );
        }
    }

    #[test]
    fn parity_and_parseval() {
        let p = MiwaParams::solve_minimal_multicritical(4)
            .unwrap()
            .scaled(3.0);
        let t = JTable::new(&p).unwrap();
        assert!((t.parseval() - 1.0).abs() < 1e-12);
        let b = t.bandwidth() as i64;
        for m in 0..=2 * b {
            let dir = j_coefficient(&p, -m);
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            assert!((dir - sign * t.get(m)).abs() < 1e-14);
            assert_eq!(t.get(-m), sign * t.get(m));
        }
    }

    #[test]
    fn anticommutation() {
        for p in [
            plancherel(),
            MiwaParams::solve_minimal_multicritical(4).unwrap(),
        ] {
            let t = JTable::new(&p).unwrap();
            for a in -20i64..=20 {
                for b in -20i64..=20 {
                    let s = t.kernel(a, b).value + t.kernel(b, a).value;
                    let want = if a + b == 0 {
                        if a % 2 == 0 {
                            1.0
                        } else {
                            -1.0
                        }
                    } else {
                        0.0
                    };
                    assert!((s - want).abs() < 1e-12, "a={a} b={b} s={s}");
                }
            }
        }
    }

    #[test]
    fn one_point_matches_kernel_and_bessel_sum() {
        let t = JTable::new(&plancherel()).unwrap();
        let rho = t.one_point(1);
        assert!((rho + t.kernel(1, -1).value).abs() < 1e-15);
        let direct: f64 =
            0.5 * bessel_j(1, 2.0).powi(2) + (2..60).map(|k| bessel_j(k, 2.0).powi(2)).sum::<f64>();
        assert!((rho - direct).abs() < 1e-15);
        assert!((rho - 0.308_630_707_566_664).abs() < 1e-12);
        assert!(t.kernel(5, 5).value.abs() < 1e-12);
        assert!(t.one_point(t.bandwidth() as u64 + 1) < 1e-28);
        assert_eq!(t.one_point(10_000), 0.0);
    }

    #[test]
    fn large_parameters_extend_the_cache() {
        let p = MiwaParams::single(0.5).unwrap().scaled(1000.0);
        let t = JTable::new(&p).unwrap();
        assert!(t.bandwidth() > 2000);
        assert!((t.parseval() - 1.0).abs() < 1e-10);
        assert!(t.residue() < 1e-13);
    }
}
