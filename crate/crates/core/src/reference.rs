//! Independent reference implementations used as test oracles.
//!
//! Nothing here shares code paths with the production routines: Bessel
//! functions come from Miller's backward recurrence, the classical Airy
//! function from its Maclaurin series, `Ai_p` from the real oscillatory
//! integral, and Pfaffians from recursive expansion along the first row.

use std::f64::consts::PI;

use crate::quadrature::{composite_gl, gauss_legendre};
use crate::skew::SkewMatrix;

/// `Ai(0) = 3^{−2/3} / Γ(2/3)`.
pub const AIRY_AI0: f64 = 0.355_028_053_887_817_2;
/// `−Ai'(0) = 3^{−1/3} / Γ(1/3)`.
pub const AIRY_MINUS_AIP0: f64 = 0.258_819_403_792_806_8;

/// Bessel `J_m(z)` for `z ≥ 0` by Miller's backward recurrence normalised
/// with `J_0 + 2 Σ J_{2k} = 1`.
pub fn bessel_j(m: u32, z: f64) -> f64 {
    assert!(z >= 0.0, "bessel_j needs z >= 0");
    if z == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let start = (m as f64).max(z) + 30.0 + 30.0 * z.cbrt();
    let mut n = start.ceil() as u32;
    n += n % 2;
    let (mut next, mut cur) = (0.0f64, 1e-300f64);
    let mut target = 0.0;
    let mut norm = 0.0;
    // invariant: cur = j_k, next = j_{k+1}
    let mut k = n;
    loop {
        if k == m {
            target = cur;
        }
        if k.is_multiple_of(2) {
            norm += if k == 0 { cur } else { 2.0 * cur };
        }
        if k == 0 {
            break;
        }
        let prev = 2.0 * k as f64 / z * cur - next;
        next = cur;
        cur = prev;
        k -= 1;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            target *= 1e-250;
            norm *= 1e-250;
        }
    }
    target / norm
}

/// Classical `(Ai(x), Ai'(x))` from the Maclaurin series; good to about
/// `1e-13` relative for `|x| ≤ 6`.
pub fn airy_classical(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    let (mut f, mut g, mut df, mut dg) = (0.0, 0.0, 0.0, 0.0);
    let (mut a, mut b, mut c, mut d) = (1.0, x, x * x / 2.0, 1.0);
    for k in 1..200 {
        f += a;
        g += b;
        df += c;
        dg += d;
        let kf = 3.0 * k as f64;
        a *= x3 / ((kf - 1.0) * kf);
        b *= x3 / (kf * (kf + 1.0));
        c *= x3 / (kf * (kf + 2.0));
        d *= x3 / ((kf - 2.0) * kf);
        if a.abs() + b.abs() + c.abs() + d.abs() < 1e-18 * (f.abs() + g.abs() + 1.0) {
            break;
        }
    }
    (
        AIRY_AI0 * f - AIRY_MINUS_AIP0 * g,
        AIRY_AI0 * df - AIRY_MINUS_AIP0 * dg,
    )
}

/// `Ai_p(0) = (1/π)(p+1)^{1/(p+1) − 1} Γ(1/(p+1)) cos(π/(2(p+1)))`.
pub fn airy_p_at_zero(p: u32) -> f64 {
    let n = p as f64 + 1.0;
    (n.powf(1.0 / n - 1.0) * libm::tgamma(1.0 / n) * (PI / (2.0 * n)).cos()) / PI
}

/// `Ai_p(x) = (1/π) ∫_0^∞ cos(t^{p+1}/(p+1) + xt) dt`, integrated on
/// `[0, T]` with `T^p = 1000` and closed by two integrations by parts.
pub fn airy_p_oscillatory(p: u32, x: f64) -> f64 {
    let pi = p as i32;
    let n = p as f64 + 1.0;
    let big_t = 1000f64.powf(1.0 / p as f64);
    let g = |t: f64| t.powi(pi + 1) / n + x * t;
    let g1 = |t: f64| t.powi(pi) + x;
    let g2 = |t: f64| p as f64 * t.powi(pi - 1);
    let max_freq = g1(big_t).abs().max(x.abs()) + 1.0;
    let panels = (big_t * max_freq / 10.0).ceil() as usize;
    let body = composite_gl(&gauss_legendre(32), 0.0, big_t, panels, |t| g(t).cos());
    // ∫_T^∞ cos g = −sin g(T)/g'(T) − (u'/g')(T) cos g(T) + …, u = 1/g'
    let u = 1.0 / g1(big_t);
    let du = -g2(big_t) * u * u;
    let tail = -u * g(big_t).sin() - du * u * g(big_t).cos();
    (body + tail) / PI
}

/// Pfaffian by recursive expansion along the first row, `O(n!!)`.
pub fn pfaffian_expansion(m: &SkewMatrix) -> f64 {
    let idx: Vec<usize> = (0..m.order()).collect();
    expand(m, &idx)
}

fn expand(m: &SkewMatrix, idx: &[usize]) -> f64 {
    if idx.is_empty() {
        return 1.0;
    }
    if idx.len() % 2 == 1 {
        return 0.0;
    }
    let first = idx[0];
    let mut total = 0.0;
    for j in 1..idx.len() {
        let rest: Vec<usize> = idx[1..]
            .iter()
            .enumerate()
            .filter(|&(k, _)| k + 1 != j)
            .map(|(_, &v)| v)
            .collect();
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * m.get(first, idx[j]) * expand(m, &rest);
    }
    total
}
