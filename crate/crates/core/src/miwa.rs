//! Real Miwa parameter sets and the trigonometric functions built from them.
//!
//! A parameter set is a finite map `n ↦ t_n` over odd positive `n`. From it
//! we build
//!
//! * the phase `φ(θ) = 4 Σ t_n sin nθ − aθ`,
//! * the dispersion `D(θ) = 4 Σ n t_n cos nθ` with `D(0) = b`,
//! * the curvature `−D'(θ) = 4 Σ n² t_n sin nθ` whose positivity on `(0, π)`
//!   is the non-degeneracy condition,
//! * the Fermi angle `χ(x) ∈ [0, π]` solving `D(χ) = x`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::sum::compensated_sum;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsRepr", into = "ParamsRepr")]
pub struct MiwaParams {
    coeffs: BTreeMap<u32, f64>,
    a: f64,
    b: f64,
}

#[derive(Serialize, Deserialize)]
struct ParamsRepr {
    t: BTreeMap<u32, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
}

impl TryFrom<ParamsRepr> for MiwaParams {
    type Error = Error;

    fn try_from(r: ParamsRepr) -> Result<Self> {
        let p = MiwaParams::new(r.t)?;
        match r.a {
            Some(a) => p.with_edge(a),
            None => Ok(p),
        }
    }
}

impl From<MiwaParams> for ParamsRepr {
    fn from(p: MiwaParams) -> Self {
        ParamsRepr {
            t: p.coeffs,
            a: Some(p.a),
        }
    }
}

impl MiwaParams {
    /// Builds a parameter set; zero entries are dropped. The edge constant
    /// `a` defaults to `b`.
    pub fn new<I: IntoIterator<Item = (u32, f64)>>(coeffs: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, t) in coeffs {
            if n == 0 || n % 2 == 0 {
                return Err(Error::InvalidParams(format!(
                    "index {n} is not an odd positive integer"
                )));
            }
            if !t.is_finite() {
                return Err(Error::InvalidParams(format!("t_{n} = {t} is not finite")));
            }
            if t != 0.0 && map.insert(n, t).is_some() {
                return Err(Error::InvalidParams(format!("index {n} given twice")));
            }
        }
        let b = 4.0 * compensated_sum(map.iter().map(|(&n, &t)| n as f64 * t));
        Ok(MiwaParams {
            coeffs: map,
            a: b,
            b,
        })
    }

    /// The Plancherel-type specialization `t₁ = t`.
    pub fn single(t1: f64) -> Result<Self> {
        Self::new([(1, t1)])
    }

    pub fn with_edge(mut self, a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::InvalidParams(format!(
                "edge constant a = {a} is not finite"
            )));
        }
        self.a = a;
        Ok(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("params serialize")
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, f64> {
        &self.coeffs
    }

    pub fn t(&self, n: u32) -> f64 {
        self.coeffs.get(&n).copied().unwrap_or(0.0)
    }

    /// Edge constant `a`.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// `b = 4 Σ n t_n = D(0)`.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// `4 Σ n |t_n|`, an upper bound for `max |D|` and hence for the
    /// bandwidth of the wave function's Fourier series.
    pub fn abs_scale(&self) -> f64 {
        4.0 * self
            .coeffs
            .iter()
            .map(|(&n, &t)| n as f64 * t.abs())
            .sum::<f64>()
    }

    /// Multiplies every `t_n` and the edge constant by `factor`.
    pub fn scaled(&self, factor: f64) -> MiwaParams {
        let coeffs: BTreeMap<u32, f64> =
            self.coeffs.iter().map(|(&n, &t)| (n, t * factor)).collect();
        let b = 4.0 * compensated_sum(coeffs.iter().map(|(&n, &t)| n as f64 * t));
        MiwaParams {
            coeffs,
            a: self.a * factor,
            b,
        }
    }

    /// `4 Σ t_n sin nθ`, the phase of the wave function on the unit circle.
    pub fn wave_phase(&self, theta: f64) -> f64 {
        4.0 * self
            .coeffs
            .iter()
            .map(|(&n, &t)| t * (n as f64 * theta).sin())
            .sum::<f64>()
    }

    /// `φ(θ) = 4 Σ t_n sin nθ − aθ`.
    pub fn phase(&self, theta: f64) -> f64 {
        self.wave_phase(theta) - self.a * theta
    }

    /// `D(θ) = 4 Σ n t_n cos nθ`.
    pub fn dispersion(&self, theta: f64) -> f64 {
        4.0 * self
            .coeffs
            .iter()
            .map(|(&n, &t)| n as f64 * t * (n as f64 * theta).cos())
            .sum::<f64>()
    }

    /// `−D'(θ) = 4 Σ n² t_n sin nθ`.
    pub fn curvature(&self, theta: f64) -> f64 {
        4.0 * self
            .coeffs
            .iter()
            .map(|(&n, &t)| (n * n) as f64 * t * (n as f64 * theta).sin())
            .sum::<f64>()
    }

    /// Fermi angle `χ(x) ∈ [0, π]` with `D(χ(x)) = x`, by bisection.
    ///
    /// Requires `D` to be monotone on `[0, π]`, i.e. the non-degeneracy
    /// condition; `D'(0) = 0` at a multicritical edge rules out Newton.
    pub fn fermi_angle(&self, x: f64) -> Result<f64> {
        let b = self.b;
        if !(b > 0.0) {
            return Err(Error::Domain(format!(
                "Fermi angle needs b > 0, got b = {b}"
            )));
        }
        if x.is_nan() || x.abs() > b {
            return Err(Error::Domain(format!("|x| = {} exceeds b = {b}", x.abs())));
        }
        if x == b {
            return Ok(0.0);
        }
        if x == -b {
            return Ok(PI);
        }
        let (mut lo, mut hi) = (0.0f64, PI);
        // D(lo) >= x >= D(hi)
        while hi - lo > 1e-15 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.dispersion(mid) >= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Taylor coefficients of `φ` at `θ = 0` for the odd powers
    /// `θ¹, θ³, …, θ^{2k_max+1}`.
    pub fn phase_taylor(&self, k_max: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(k_max + 1);
        let mut factorial = 1.0f64;
        for k in 0..=k_max {
            let j = 2 * k + 1;
            if k > 0 {
                factorial *= ((j - 1) * j) as f64;
            }
            let power_sum = compensated_sum(
                self.coeffs
                    .iter()
                    .map(|(&n, &t)| (n as f64).powi(j as i32) * t),
            );
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let mut c = 4.0 * sign * power_sum / factorial;
            if k == 0 {
                c -= self.a;
            }
            out.push(c);
        }
        out
    }

    /// Magnitude of the individual contributions to each Taylor
    /// coefficient, used as the scale for "numerically zero".
    fn phase_taylor_scale(&self, k_max: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(k_max + 1);
        let mut factorial = 1.0f64;
        for k in 0..=k_max {
            let j = 2 * k + 1;
            if k > 0 {
                factorial *= ((j - 1) * j) as f64;
            }
            let s: f64 = self
                .coeffs
                .iter()
                .map(|(&n, &t)| (n as f64).powi(j as i32) * t.abs())
                .sum();
            let mut c = 4.0 * s / factorial;
            if k == 0 {
                c += self.a.abs();
            }
            out.push(c.max(1.0));
        }
        out
    }

    /// Checks conditions (real values, finite support, multicriticality,
    /// non-degeneracy) and reports the outcome of each.
    pub fn validate(&self, p_hint: Option<u32>) -> ConditionReport {
        let (nondegenerate, worst_theta, margin) = self.check_nondegenerate();
        let depth = self.coeffs.len() + 1 + p_hint.map_or(0, |p| p as usize / 2);
        let taylor = self.phase_taylor(depth);
        let scale = self.phase_taylor_scale(depth);
        let mut order = None;
        if self.a > 0.0 {
            if let Some(k) = (0..taylor.len()).find(|&k| taylor[k].abs() > 1e-10 * scale[k]) {
                if k >= 1 {
                    let j = (2 * k + 1) as f64;
                    if (taylor[k] + 1.0 / j).abs() <= 1e-9 * scale[k] {
                        order = Some(2 * k as u32);
                    }
                }
            }
        }
        ConditionReport {
            real_valued: self.coeffs.values().all(|t| t.is_finite()),
            finite_support: true,
            nondegenerate,
            worst_theta,
            margin,
            multicritical_order: order,
            taylor_coefficients: taylor,
            matches_hint: p_hint.map(|p| order == Some(p)),
        }
    }

    /// Grid search for the minimum of `4 Σ n² t_n sin nθ` on `(0, π)` with
    /// golden-section refinement around every grid-local minimum.
    /// Curvature with the endpoint zeros resolved: for `u = min(θ, π − θ)`
    /// small, `Σ_k (−1)^k u^{2k+1}/(2k+1)! · 4Σ n^{2k+3} t_n`, dropping power
    /// sums at rounding level (they vanish exactly at a multicritical edge).
    fn curvature_near_ends(&self, theta: f64) -> f64 {
        let u = theta.min(PI - theta);
        let n_max = self.coeffs.keys().last().copied().unwrap_or(1) as f64;
        if u * n_max > 1.0 {
            return self.curvature(theta);
        }
        let mut total = 0.0;
        let mut scale = u;
        for k in 0..60u32 {
            let pow = (2 * k + 3) as i32;
            let (mut sum, mut mag) = (0.0, 0.0);
            for (&n, &t) in &self.coeffs {
                let v = (n as f64).powi(pow) * t;
                sum += v;
                mag += v.abs();
            }
            if sum.abs() > 64.0 * f64::EPSILON * mag {
                total += 4.0 * sum * scale;
            }
            scale *= -u * u / ((2 * k + 2) as f64 * (2 * k + 3) as f64);
            if (mag * scale).abs() < 1e-30 * total.abs() {
                break;
            }
        }
        total
    }

    fn check_nondegenerate(&self) -> (bool, f64, f64) {
        const GRID: usize = 10_000;
        let h = PI / GRID as f64;
        let g = |t: f64| self.curvature_near_ends(t);
        let values: Vec<f64> = (1..GRID).map(|i| g(i as f64 * h)).collect();
        let mut worst = (f64::INFINITY, 0.0);
        for i in 0..values.len() {
            let v = values[i];
            let left = if i == 0 { f64::INFINITY } else { values[i - 1] };
            let right = values.get(i + 1).copied().unwrap_or(f64::INFINITY);
            let theta = (i + 1) as f64 * h;
            if v < worst.0 {
                worst = (v, theta);
            }
            if v <= left && v <= right {
                let lo = (theta - h).max(h);
                let hi = (theta + h).min(PI - h);
                let (tm, vm) = golden_min(g, lo, hi);
                if vm < worst.0 && tm > 0.0 && tm < PI {
                    worst = (vm, tm);
                }
            }
        }
        (worst.0 > 0.0, worst.1, worst.0)
    }

    /// Minimal p-multicritical parameters: `t_1, …, t_{p−1}` solving the
    /// Taylor conditions with `t_{p+1} = t_{p+3} = … = 0`, `a = b`.
    pub fn solve_minimal_multicritical(p: u32) -> Result<MiwaParams> {
        if p < 2 || !p.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "multicritical order must be even and >= 2, got {p}"
            )));
        }
        let m = (p / 2) as usize;
        let indices: Vec<u32> = (0..m as u32).map(|j| 2 * j + 1).collect();
        // Row k-1 expresses Σ n^{2k+1} t_n for k = 1..=m. Rows are scaled by
        // their largest entry to keep the Vandermonde-like system balanced.
        let mut mat = DMatrix::<f64>::zeros(m, m);
        let mut rhs = DVector::<f64>::zeros(m);
        for k in 1..=m {
            let pow = (2 * k + 1) as i32;
            let row: Vec<f64> = indices.iter().map(|&n| (n as f64).powi(pow)).collect();
            let scale = row.iter().cloned().fold(0.0, f64::max);
            for (j, v) in row.iter().enumerate() {
                mat[(k - 1, j)] = v / scale;
            }
            if k == m {
                // 4 (−1)^m S / (p+1)! = −1/(p+1)  ⇔  S = (−1)^{m+1} p!/4
                let fact: f64 = (1..=p).map(|i| i as f64).product();
                let sign = if m.is_multiple_of(2) { -1.0 } else { 1.0 };
                rhs[k - 1] = sign * fact / 4.0 / scale;
            }
        }
        let sol = mat
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Singular(format!("solving the p = {p} multicritical system")))?;
        MiwaParams::new(indices.iter().copied().zip(sol.iter().copied()))
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

/// Outcome of [`MiwaParams::validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub real_valued: bool,
    pub finite_support: bool,
    pub nondegenerate: bool,
    /// Location of the smallest value of `4 Σ n² t_n sin nθ` found on `(0, π)`.
    pub worst_theta: f64,
    /// That smallest value.
    pub margin: f64,
    /// Even `p` such that `φ(θ) = −θ^{p+1}/(p+1) + O(θ^{p+3})`.
    pub multicritical_order: Option<u32>,
    /// Odd-power Taylor coefficients of `φ` at 0 (`θ¹, θ³, …`).
    pub taylor_coefficients: Vec<f64>,
    pub matches_hint: Option<bool>,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.real_valued
            && self.finite_support
            && self.nondegenerate
            && self.multicritical_order.is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> MiwaParams {
        MiwaParams::solve_minimal_multicritical(2).unwrap()
    }

    fn p4() -> MiwaParams {
        MiwaParams::solve_minimal_multicritical(4).unwrap()
    }

    #[test]
    fn phase_examples() {
        let p = p2();
        assert_eq!(p.phase(0.0), 0.0);
        let expect = 2.0 * 0.1f64.sin() - 0.2;
        assert!((p.phase(0.1) - expect).abs() < 1e-16);
        assert!((p.phase(0.1) + 0.1f64.powi(3) / 3.0).abs() < 1e-6);
        assert!((p.phase(PI) + 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn dispersion_examples() {
        let p = MiwaParams::single(0.5).unwrap();
        assert_eq!(p.dispersion(0.0), 2.0);
        assert!(p.dispersion(PI / 2.0).abs() < 1e-15);
        assert!((p4().dispersion(0.0) - 8.0 / 3.0).abs() < 1e-14);
        assert!((p4().dispersion(PI) + 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn fermi_angle_examples() {
        let p = MiwaParams::single(0.5).unwrap();
        assert_eq!(p.fermi_angle(2.0).unwrap(), 0.0);
        assert!((p.fermi_angle(0.0).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!((p.fermi_angle(1.0).unwrap() - PI / 3.0).abs() < 1e-12);
        assert_eq!(p.fermi_angle(-2.0).unwrap(), PI);
        assert!(matches!(p.fermi_angle(2.5), Err(Error::Domain(_))));
    }

    #[test]
    fn minimal_multicritical_p2_and_p4() {
        let p = p2();
        assert!((p.t(1) - 0.5).abs() < 1e-15);
        assert!((p.a() - 2.0).abs() < 1e-15);
        let q = p4();
        assert!((q.t(1) - 0.75).abs() < 1e-14);
        assert!((q.t(3) + 1.0 / 36.0).abs() < 1e-15);
        assert!((q.a() - 8.0 / 3.0).abs() < 1e-14);
        assert_eq!(q.a(), q.b());
    }

    #[test]
    fn minimal_multicritical_p6_validates() {
        let p = MiwaParams::solve_minimal_multicritical(6).unwrap();
        let r = p.validate(Some(6));
        assert_eq!(r.multicritical_order, Some(6));
        assert!(r.nondegenerate);
        assert_eq!(r.matches_hint, Some(true));
    }

    #[test]
    fn odd_or_small_order_is_rejected() {
        assert!(MiwaParams::solve_minimal_multicritical(3).is_err());
        assert!(MiwaParams::solve_minimal_multicritical(0).is_err());
    }

    #[test]
    fn validate_examples() {
        let r = MiwaParams::single(0.5).unwrap().validate(None);
        assert!(r.nondegenerate);
        assert_eq!(r.multicritical_order, Some(2));

        let q = MiwaParams::new([(1, 0.75), (3, -1.0 / 36.0)]).unwrap();
        let r = q.validate(Some(4));
        assert!(r.nondegenerate);
        assert_eq!(r.multicritical_order, Some(4));
        for theta in [0.1f64, 0.7, 2.0, 3.0] {
            let s = theta.sin();
            assert!((q.curvature(theta) - 4.0 * s * s * s).abs() < 1e-14);
        }

        let r = MiwaParams::single(-0.5).unwrap().validate(None);
        assert!(!r.nondegenerate);
        assert_eq!(r.multicritical_order, None);
    }

    #[test]
    fn wrong_edge_constant_has_no_order() {
        let p = MiwaParams::single(0.5).unwrap().with_edge(2.5).unwrap();
        assert_eq!(p.validate(None).multicritical_order, None);
    }

    #[test]
    fn degenerate_sign_change_is_detected() {
        // 4(t1 sinθ + 9 t3 sin3θ) changes sign when t3 is strongly negative.
        let p = MiwaParams::new([(1, 0.5), (3, -0.1)]).unwrap();
        assert!(!p.validate(None).nondegenerate);
    }

    #[test]
    fn invalid_indices_rejected() {
        assert!(MiwaParams::new([(2, 0.1)]).is_err());
        assert!(MiwaParams::new([(0, 0.1)]).is_err());
        assert!(MiwaParams::new([(1, f64::NAN)]).is_err());
    }

    #[test]
    fn json_shape_and_round_trip() {
        let p = p2();
        assert_eq!(p.to_json(), r#"{"t":{"1":0.5},"a":2.0}"#);
        let q = p4();
        let back = MiwaParams::from_json(&q.to_json()).unwrap();
        assert_eq!(back, q);
        let r = MiwaParams::from_json(r#"{"t":{"1":0.25}}"#).unwrap();
        assert_eq!(r.a(), 1.0);
        assert!(MiwaParams::from_json(r#"{"t":{"2":0.25}}"#).is_err());
    }

    #[test]
    fn phase_remainder_is_order_p_plus_3() {
        for p in [2u32, 4, 6] {
            let params = MiwaParams::solve_minimal_multicritical(p).unwrap();
            let rem = |th: f64| {
                (params.phase(th) + th.powi(p as i32 + 1) / (p + 1) as f64) / th.powi(p as i32 + 3)
            };
            // fit C from two points, then verify at ten others
            let c = rem(0.05).abs().max(rem(0.3).abs()) * 1.5;
            for i in 1..=10 {
                let th = 0.03 * i as f64;
                let r = params.phase(th) + th.powi(p as i32 + 1) / (p + 1) as f64;
                assert!(r.abs() <= c * th.powi(p as i32 + 3) + 1e-15, "p={p} θ={th}");
            }
        }
    }

    #[test]
    fn dispersion_is_decreasing_when_nondegenerate() {
        for p in [2u32, 4, 6] {
            let params = MiwaParams::solve_minimal_multicritical(p).unwrap();
            assert!(params.validate(None).nondegenerate);
            let n = 10_000;
            let vals: Vec<f64> = (0..=n)
                .map(|i| params.dispersion(PI * i as f64 / n as f64))
                .collect();
            // D is flat to order θ^p at the ends, so only interior steps
            // are strict in floating point
            let tol = 8.0 * f64::EPSILON * params.b();
            assert!(vals.windows(2).all(|w| w[1] <= w[0] + tol), "p = {p}");
            assert!(vals[500..9500].windows(2).all(|w| w[1] < w[0]), "p = {p}");
        }
    }

    #[test]
    fn fermi_angle_inverts_dispersion() {
        for p in [2u32, 4] {
            let params = MiwaParams::solve_minimal_multicritical(p).unwrap();
            for i in 0..=100 {
                let th = PI * i as f64 / 100.0;
                let back = params.fermi_angle(params.dispersion(th).clamp(-params.b(), params.b()));
                assert!((back.unwrap() - th).abs() < 1e-10, "p={p} θ={th}");
            }
            let b = params.b();
            let mut prev = f64::INFINITY;
            for i in 0..=100 {
                let x = -b + 2.0 * b * i as f64 / 100.0;
                let chi = params.fermi_angle(x).unwrap();
                assert!((params.dispersion(chi) - x).abs() < 1e-10);
                assert!(chi <= prev);
                prev = chi;
            }
        }
    }
}
