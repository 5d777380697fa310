//! Finite-ε experiments against the edge and bulk limit objects.
//!
//! At the edge the parameters are the minimal p-multicritical set scaled by
//! `1/ε^{p+1}` and lattice sites sit at `a/ε^{p+1} + x/ε`. In the bulk the
//! parameters are scaled by `1/ε` and sites sit at `x/ε`.

use serde::Serialize;

use crate::airy::AiryEvaluator;
use crate::kernel::{default_nodes, j_real_index, JTable, MAX_NODES};
use crate::limit_shape::{density, sine_kernel};
use crate::miwa::MiwaParams;
use crate::skew::{correlation_with, gap_probability_with};
use crate::tracy_widom::tw_cdf;
use crate::{Error, Result};

/// One-point values below this end the largest-part window.
pub const WINDOW_CUTOFF: f64 = 1e-14;

/// How a real edge coordinate becomes a lattice index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexRule {
    /// `⌊a/ε^{p+1} + x/ε⌋`.
    Floor,
    /// The real index itself, through the integral form of `J`.
    Continuum,
}

/// Default ε schedule per order.
pub fn default_schedule(p: u32) -> Vec<f64> {
    match p {
        2 => vec![1.0 / 4.0, 1.0 / 6.0, 1.0 / 8.0, 1.0 / 10.0],
        4 => vec![1.0 / 3.0, 1.0 / 4.0, 1.0 / 5.0],
        _ => vec![1.0 / 2.0, 1.0 / 3.0],
    }
}

/// `1/ε`, snapped to an integer when within rounding of one so that
/// lattice floors are not thrown off by representation error.
fn inverse(epsilon: f64) -> f64 {
    let inv = 1.0 / epsilon;
    if (inv - inv.round()).abs() < 1e-9 * inv {
        inv.round()
    } else {
        inv
    }
}

fn floor_snapped(v: f64) -> i64 {
    (v + 1e-9 * v.abs().max(1.0)).floor() as i64
}

fn parity_sign(e: i64) -> f64 {
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Scaled kernel blocks at the edge; (i) and (iii) tend to 0, (ii) to the
/// p-Airy kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeBlocks {
    pub block_i: f64,
    pub block_ii: f64,
    pub block_iii: f64,
}

/// The multicritical model at one ε, with its J table.
#[derive(Debug, Clone)]
pub struct EdgeLattice {
    pub p: u32,
    pub epsilon: f64,
    pub params: MiwaParams,
    pub scaled: MiwaParams,
    pub table: JTable,
    airy: AiryEvaluator,
}

impl EdgeLattice {
    pub fn new(p: u32, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Domain(format!(
                "epsilon must lie in (0, 1], got {epsilon}"
            )));
        }
        let params = MiwaParams::solve_minimal_multicritical(p)?;
        let scaled = params.scaled(inverse(epsilon).powi(p as i32 + 1));
        let nodes = default_nodes(&scaled);
        if nodes > MAX_NODES {
            return Err(Error::Size {
                size: nodes,
                limit: MAX_NODES,
            });
        }
        let table = JTable::new(&scaled)?;
        Ok(EdgeLattice {
            p,
            epsilon,
            params,
            scaled,
            table,
            airy: AiryEvaluator::new(p)?,
        })
    }

    /// `a/ε^{p+1} + x/ε`.
    pub fn edge_index(&self, x: f64) -> f64 {
        self.scaled.a() + x * inverse(self.epsilon)
    }

    pub fn site(&self, x: f64) -> i64 {
        floor_snapped(self.edge_index(x))
    }

    /// `(1/ε) J(index; t/ε^{p+1})`.
    pub fn edge_j(&self, x: f64, rule: IndexRule) -> f64 {
        let inv = inverse(self.epsilon);
        match rule {
            IndexRule::Floor => inv * self.table.get(self.site(x)),
            IndexRule::Continuum => inv * j_real_index(&self.scaled, self.edge_index(x)),
        }
    }

    pub fn edge_kernel(&self, x: f64, y: f64) -> EdgeBlocks {
        let inv = inverse(self.epsilon);
        let (mx, my) = (self.site(x), self.site(y));
        let k = |a: i64, b: i64| self.table.kernel(a, b).value;
        EdgeBlocks {
            block_i: inv * k(mx, my),
            block_ii: inv * parity_sign(my) * k(mx, -my),
            block_iii: inv * parity_sign(mx + my) * k(-mx, -my),
        }
    }

    /// `(ε^{−N} Pf M(A), det[K_Airy(k_i, k_j)])` with `A` the floored sites
    /// of `points`.
    pub fn pfaffian_vs_determinant(&self, points: &[f64]) -> Result<(f64, f64)> {
        if points.len() > 4 {
            return Err(Error::Domain("at most four points".into()));
        }
        let sites: Vec<u64> = points.iter().map(|&k| self.site(k) as u64).collect();
        let pf = correlation_with(&sites, &self.table)?.value;
        let scaled = pf * inverse(self.epsilon).powi(points.len() as i32);
        let p = self.p as usize;
        let derivs = points
            .iter()
            .map(|&k| Ok(self.airy.derivatives(k, p)?.derivs))
            .collect::<Result<Vec<_>>>()?;
        let n = points.len();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            self.airy
                .kernel_from(points[i], &derivs[i], points[j], &derivs[j])
        });
        let det = if n == 0 { 1.0 } else { m.determinant() };
        Ok((scaled, det))
    }

    /// Sites `⌊a/ε^{p+1} + s/ε⌋ + 1, …` up to where the one-point function
    /// drops below [`WINDOW_CUTOFF`].
    pub fn largest_part_window(&self, s: f64) -> Vec<u64> {
        let lo = (self.site(s) + 1).max(1) as u64;
        let mut hi = lo;
        while self.table.one_point(hi) >= WINDOW_CUTOFF {
            hi += 1;
        }
        (lo..hi).collect()
    }

    /// `P[λ_1 ≤ a/ε^{p+1} + s/ε]` as a gap probability.
    pub fn largest_part_law(&self, s: f64) -> Result<f64> {
        gap_probability_with(&self.largest_part_window(s), &self.table)
    }
}

/// The model at scale `t/ε` for bulk comparisons.
#[derive(Debug, Clone)]
pub struct BulkLattice {
    pub params: MiwaParams,
    pub epsilon: f64,
    pub table: JTable,
}

impl BulkLattice {
    pub fn new(params: &MiwaParams, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Domain(format!(
                "epsilon must lie in (0, 1], got {epsilon}"
            )));
        }
        Ok(BulkLattice {
            params: params.clone(),
            epsilon,
            table: JTable::new(&params.scaled(inverse(epsilon)))?,
        })
    }

    /// `(−1)^{m+s} K(m + r, −m − s; t/ε)` with `m = ⌊x/ε⌋`.
    pub fn kernel(&self, x: f64, r: i64, s: i64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!(
                "bulk position must be >= 0, got {x}"
            )));
        }
        let m = floor_snapped(x * inverse(self.epsilon));
        Ok(parity_sign(m + s) * self.table.kernel(m + r, -m - s).value)
    }
}

/// `bulk_kernel` without a prebuilt table.
pub fn bulk_kernel(params: &MiwaParams, x: f64, r: i64, s: i64, epsilon: f64) -> Result<f64> {
    BulkLattice::new(params, epsilon)?.kernel(x, r, s)
}

pub fn edge_j(p: u32, x: f64, epsilon: f64, rule: IndexRule) -> Result<f64> {
    Ok(EdgeLattice::new(p, epsilon)?.edge_j(x, rule))
}

pub fn edge_kernel(p: u32, x: f64, y: f64, epsilon: f64) -> Result<EdgeBlocks> {
    Ok(EdgeLattice::new(p, epsilon)?.edge_kernel(x, y))
}

pub fn pfaffian_to_determinant_check(p: u32, points: &[f64], epsilon: f64) -> Result<(f64, f64)> {
    if points.is_empty() {
        return Ok((1.0, 1.0));
    }
    EdgeLattice::new(p, epsilon)?.pfaffian_vs_determinant(points)
}

pub fn largest_part_law(p: u32, s: f64, epsilon: f64) -> Result<f64> {
    EdgeLattice::new(p, epsilon)?.largest_part_law(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    pub epsilon: f64,
    pub arg: Vec<f64>,
    pub finite: f64,
    pub limit: f64,
    pub error: f64,
}

/// Error table of one convergence experiment, rows ordered by decreasing
/// ε and then by argument.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub p: u32,
    pub target: String,
    pub rows: Vec<ScalingRow>,
}

impl ScalingReport {
    fn new(p: u32, target: &str) -> Self {
        ScalingReport {
            p,
            target: target.to_string(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, epsilon: f64, arg: Vec<f64>, finite: f64, limit: f64) {
        self.rows.push(ScalingRow {
            epsilon,
            arg,
            finite,
            limit,
            error: (finite - limit).abs(),
        });
    }

    fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            b.epsilon
                .total_cmp(&a.epsilon)
                .then_with(|| a.arg.partial_cmp(&b.arg).unwrap())
        });
    }

    pub fn args(&self) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.arg) {
                out.push(r.arg.clone());
            }
        }
        out
    }

    /// Errors for one argument, in decreasing ε.
    pub fn errors(&self, arg: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.arg == arg)
            .map(|r| r.error)
            .collect()
    }

    /// Each error at most `(1 + slack)` times the previous one; `slack = 0`
    /// demands strict decrease.
    pub fn decreasing(&self, arg: &[f64], slack: f64) -> bool {
        self.errors(arg).windows(2).all(|w| {
            if slack == 0.0 {
                w[1] < w[0]
            } else {
                w[1] <= (1.0 + slack) * w[0]
            }
        })
    }

    pub fn final_error(&self, arg: &[f64]) -> f64 {
        self.errors(arg).last().copied().unwrap_or(f64::NAN)
    }

    pub fn max_final_error(&self) -> f64 {
        self.args()
            .iter()
            .map(|a| self.final_error(a))
            .fold(0.0, f64::max)
    }

    pub fn all_decreasing(&self, slack: f64) -> bool {
        self.args().iter().all(|a| self.decreasing(a, slack))
    }
}

/// `edge_j` against `Ai_p(x)`.
pub fn edge_j_report(p: u32, eps: &[f64], xs: &[f64], rule: IndexRule) -> Result<ScalingReport> {
    let airy = AiryEvaluator::new(p)?;
    let limits = xs
        .iter()
        .map(|&x| airy.value(x))
        .collect::<Result<Vec<_>>>()?;
    let mut rep = ScalingReport::new(p, "j");
    for &e in eps {
        let lat = EdgeLattice::new(p, e)?;
        for (&x, &lim) in xs.iter().zip(&limits) {
            rep.push(e, vec![x], lat.edge_j(x, rule), lim);
        }
    }
    rep.sort();
    Ok(rep)
}

/// Kernel blocks (i), (ii), (iii) against `0`, `K_Airy`, `0`.
pub fn edge_kernel_reports(
    p: u32,
    eps: &[f64],
    pairs: &[(f64, f64)],
) -> Result<[ScalingReport; 3]> {
    let airy = AiryEvaluator::new(p)?;
    let limits = pairs
        .iter()
        .map(|&(x, y)| airy.kernel(x, y))
        .collect::<Result<Vec<_>>>()?;
    let mut reps = [
        ScalingReport::new(p, "kernel-i"),
        ScalingReport::new(p, "kernel-ii"),
        ScalingReport::new(p, "kernel-iii"),
    ];
    for &e in eps {
        let lat = EdgeLattice::new(p, e)?;
        for (&(x, y), &lim) in pairs.iter().zip(&limits) {
            let b = lat.edge_kernel(x, y);
            reps[0].push(e, vec![x, y], b.block_i, 0.0);
            reps[1].push(e, vec![x, y], b.block_ii, lim);
            reps[2].push(e, vec![x, y], b.block_iii, 0.0);
        }
    }
    for r in reps.iter_mut() {
        r.sort();
    }
    Ok(reps)
}

/// `ε^{−N} Pf` against `det K_Airy` for each point set.
pub fn pfdet_report(p: u32, eps: &[f64], point_sets: &[Vec<f64>]) -> Result<ScalingReport> {
    let mut rep = ScalingReport::new(p, "pfdet");
    for &e in eps {
        let lat = EdgeLattice::new(p, e)?;
        for pts in point_sets {
            let (pf, det) = if pts.is_empty() {
                (1.0, 1.0)
            } else {
                lat.pfaffian_vs_determinant(pts)?
            };
            rep.push(e, pts.clone(), pf, det);
        }
    }
    rep.sort();
    Ok(rep)
}

/// Largest-part law against `F_p(s)`.
pub fn tw_report(p: u32, eps: &[f64], ss: &[f64]) -> Result<ScalingReport> {
    let limits = ss
        .iter()
        .map(|&s| tw_cdf(p, s))
        .collect::<Result<Vec<_>>>()?;
    let mut rep = ScalingReport::new(p, "tw");
    for &e in eps {
        let lat = EdgeLattice::new(p, e)?;
        for (&s, &lim) in ss.iter().zip(&limits) {
            rep.push(e, vec![s], lat.largest_part_law(s)?, lim);
        }
    }
    rep.sort();
    Ok(rep)
}

/// Bulk kernel `(r, s)` entries against the sine kernel at each `x`;
/// `r = s = 0` is the one-point function against the density.
pub fn bulk_report(
    params: &MiwaParams,
    eps: &[f64],
    xs: &[f64],
    offsets: &[(i64, i64)],
) -> Result<ScalingReport> {
    let order = params.validate(None).multicritical_order.unwrap_or(0);
    let mut rep = ScalingReport::new(order, "bulk");
    for &e in eps {
        let lat = BulkLattice::new(params, e)?;
        for &x in xs {
            for &(r, s) in offsets {
                let arg = vec![x, r as f64, s as f64];
                rep.push(e, arg, lat.kernel(x, r, s)?, sine_kernel(params, x, r, s)?);
            }
        }
    }
    rep.sort();
    Ok(rep)
}

/// One-point function at `⌊x/ε⌋` against `χ(x)/π`.
pub fn bulk_density_report(params: &MiwaParams, eps: &[f64], xs: &[f64]) -> Result<ScalingReport> {
    let order = params.validate(None).multicritical_order.unwrap_or(0);
    let mut rep = ScalingReport::new(order, "density");
    for &e in eps {
        let lat = BulkLattice::new(params, e)?;
        for &x in xs {
            rep.push(e, vec![x], lat.kernel(x, 0, 0)?, density(params, x)?);
        }
    }
    rep.sort();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{bessel_j, AIRY_AI0, AIRY_MINUS_AIP0};

    #[test]
    fn edge_j_first_value() {
        let v = edge_j(2, 0.0, 0.25, IndexRule::Floor).unwrap();
        assert!((v - AIRY_AI0).abs() < 0.1);
    }

    #[test]
    fn edge_j_matches_bessel() {
        for e in [0.25, 1.0 / 6.0] {
            let lat = EdgeLattice::new(2, e).unwrap();
            for x in [-1.0, 0.0, 0.5, 1.0] {
                let m = lat.site(x);
                let inv = inverse(e);
                let want = inv * bessel_j(m as u32, 2.0 * inv.powi(3));
                assert!((lat.edge_j(x, IndexRule::Floor) - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn edge_j_far_right_is_small() {
        let lat = EdgeLattice::new(2, 0.125).unwrap();
        let ai6 = crate::airy::airy_p(2, 6.0).unwrap();
        assert!(lat.edge_j(6.0, IndexRule::Floor).abs() < ai6 + 0.01);
    }

    #[test]
    fn edge_kernel_blocks() {
        let lat = EdgeLattice::new(2, 0.25).unwrap();
        let b = lat.edge_kernel(0.0, 0.0);
        assert!((b.block_ii - AIRY_MINUS_AIP0 * AIRY_MINUS_AIP0).abs() < 0.1);
        let reps = edge_kernel_reports(2, &default_schedule(2), &[(0.0, 0.5)]).unwrap();
        assert!(reps[0].all_decreasing(0.0), "{:?}", reps[0].rows);
        assert!(reps[2].all_decreasing(0.0), "{:?}", reps[2].rows);
    }

    #[test]
    fn pfaffian_check_edge_cases() {
        assert_eq!(
            pfaffian_to_determinant_check(2, &[], 0.25).unwrap(),
            (1.0, 1.0)
        );
        let (pf, det) = pfaffian_to_determinant_check(2, &[0.0], 0.25).unwrap();
        assert!((pf - det).abs() < 0.1);
        let blocks = edge_kernel(2, 0.0, 0.0, 0.25).unwrap();
        assert!((pf - blocks.block_ii).abs() < 1e-12);
    }

    #[test]
    fn largest_part_law_is_a_cdf() {
        let lat = EdgeLattice::new(2, 0.25).unwrap();
        assert!((lat.largest_part_law(8.0).unwrap() - 1.0).abs() < 1e-9);
        let mut prev = 0.0;
        for i in 0..=12 {
            let s = -4.0 + 0.5 * i as f64;
            let f = lat.largest_part_law(s).unwrap();
            assert!((-1e-12..=1.0 + 1e-12).contains(&f));
            assert!(f >= prev - 1e-12);
            prev = f;
        }
    }

    #[test]
    fn bulk_kernel_examples() {
        let p = MiwaParams::single(0.5).unwrap();
        let v = bulk_kernel(&p, 1.0, 0, 0, 0.0625).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 0.02);
        let lat = BulkLattice::new(&p, 0.0625).unwrap();
        for d in [5i64, 9, 20] {
            let k = lat.kernel(1.0, d, 0).unwrap();
            assert!(k.abs() <= 1.0 / (std::f64::consts::PI * d as f64) + 0.02);
        }
        // beyond the edge the diagonal dies off exponentially in 1/ε
        let tail: Vec<f64> = [0.25, 0.125, 0.0625, 0.03125]
            .iter()
            .map(|&e| {
                BulkLattice::new(&p, e)
                    .unwrap()
                    .kernel(2.5, 0, 0)
                    .unwrap()
                    .abs()
            })
            .collect();
        assert!(tail.windows(2).all(|w| w[1] < 0.1 * w[0]), "{tail:?}");
        assert!(tail[3] < 1e-8);
    }

    #[test]
    fn report_helpers() {
        let mut r = ScalingReport::new(2, "x");
        r.push(0.5, vec![0.0], 1.0, 0.0);
        r.push(0.25, vec![0.0], 0.5, 0.0);
        r.push(0.125, vec![0.0], 0.52, 0.0);
        r.sort();
        assert!(!r.decreasing(&[0.0], 0.0));
        assert!(r.decreasing(&[0.0], 0.1));
        assert_eq!(r.final_error(&[0.0]), 0.52);
    }
}
