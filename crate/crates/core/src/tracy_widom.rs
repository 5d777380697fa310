//! Fredholm determinants of the p-Airy kernel on `[s, ∞)`, i.e. the
//! degree-p Tracy–Widom distribution functions `F_p(s)`.

use nalgebra::DMatrix;

use crate::airy::{contour_decay_rate, AiryEvaluator};
use crate::quadrature::{Family, Rule};
use crate::{Error, Result};

/// Largest node count tried by [`tw_cdf`].
pub const MAX_NODES: usize = 512;

/// Right end `X` with `exp(−2·rate·X^{(p+1)/p}) ≈ 1e-12`, the point past
/// which the kernel diagonal is negligible.
pub fn negligible_from(p: u32) -> f64 {
    let q = (p as f64 + 1.0) / p as f64;
    (27.6 / (2.0 * contour_decay_rate(p))).powf(1.0 / q)
}

/// Default truncation length `max(10, X − s)`.
pub fn truncation_length(p: u32, s: f64) -> f64 {
    (negligible_from(p) - s).max(10.0)
}

/// Nyström discretisation of `K` on `[s, s + L]`.
#[derive(Debug, Clone)]
pub struct NystromScheme {
    pub p: u32,
    pub family: Family,
    pub s: f64,
    pub length: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `√w_i K(x_i, x_j) √w_j`.
    pub matrix: DMatrix<f64>,
}

impl NystromScheme {
    pub fn new(p: u32, s: f64, n: usize, family: Family, length: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(
                "Nystrom scheme needs at least two nodes".into(),
            ));
        }
        let ev = AiryEvaluator::new(p)?;
        let rule = Rule::new(family, n, s, s + length);
        let derivs = rule
            .nodes
            .iter()
            .map(|&x| Ok(ev.derivatives(x, p as usize)?.derivs))
            .collect::<Result<Vec<_>>>()?;
        let sw: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
        let mut matrix = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let k = ev.kernel_from(rule.nodes[i], &derivs[i], rule.nodes[j], &derivs[j]);
                let v = sw[i] * k * sw[j];
                matrix[(i, j)] = v;
                matrix[(j, i)] = v;
            }
        }
        Ok(NystromScheme {
            p,
            family,
            s,
            length,
            nodes: rule.nodes,
            weights: rule.weights,
            matrix,
        })
    }

    /// `det(I − W^{1/2} K W^{1/2})`.
    pub fn determinant(&self) -> f64 {
        let n = self.nodes.len();
        (DMatrix::identity(n, n) - &self.matrix).determinant()
    }
}

/// Determinant with explicit quadrature family and truncation length.
pub fn fredholm_det_with(p: u32, s: f64, n: usize, family: Family, length: f64) -> Result<f64> {
    Ok(NystromScheme::new(p, s, n, family, length)?.determinant())
}

/// `F_p(s)` from an `n`-node Gauss–Legendre scheme, checked against `2n`
/// nodes.
pub fn fredholm_det(p: u32, s: f64, n: usize) -> Result<f64> {
    if n < 16 {
        return Err(Error::Domain(format!("need at least 16 nodes, got {n}")));
    }
    let length = truncation_length(p, s);
    let a = fredholm_det_with(p, s, n, Family::GaussLegendre, length)?;
    let b = fredholm_det_with(p, s, 2 * n, Family::GaussLegendre, length)?;
    if (a - b).abs() > 1e-6 {
        return Err(Error::Convergence(format!(
            "F_{p}({s}) moved by {:e} under node doubling",
            (a - b).abs()
        )));
    }
    Ok(a)
}

/// `F_p(s)` for `s ∈ [−10, 10]`, doubling nodes from 64 until two
/// successive values agree to `1e-10`.
pub fn tw_cdf(p: u32, s: f64) -> Result<f64> {
    if !(-10.0..=10.0).contains(&s) {
        return Err(Error::Domain(format!("s = {s} outside [-10, 10]")));
    }
    let length = truncation_length(p, s);
    let mut n = 64;
    let mut prev = fredholm_det_with(p, s, n, Family::GaussLegendre, length)?;
    while n < MAX_NODES {
        n *= 2;
        let cur = fredholm_det_with(p, s, n, Family::GaussLegendre, length)?;
        if (cur - prev).abs() < 1e-10 {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Convergence(format!(
        "F_{p}({s}) not converged at {MAX_NODES} nodes"
    )))
}
