//! The numbered acceptance criteria, shared by the `acceptance` test target
//! and the CLI `verify` subcommand.

use std::f64::consts::PI;
use std::time::Instant;

use serde::Serialize;

use crate::airy::{decay_rate, AiryEvaluator};
use crate::kernel::JTable;
use crate::limit_shape::limit_shape;
use crate::miwa::MiwaParams;
use crate::quadrature::Family;
use crate::reference::{airy_classical, bessel_j, AIRY_MINUS_AIP0};
use crate::scaling::{
    bulk_density_report, default_schedule, edge_j_report, pfdet_report, EdgeLattice, IndexRule,
    ScalingReport,
};
use crate::schur_q::EnumeratedMeasure;
use crate::skew::{
    correlation_with, gap_fredholm_pfaffian, gap_inclusion_exclusion, gap_probability_with,
};
use crate::tracy_widom::{fredholm_det_with, truncation_length, tw_cdf};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// The ten criteria.
    Quick,
    /// The criteria plus informational extras (floor-rule edge table).
    Full,
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} {:>7.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

/// Criteria whose specified schedule is not met by the exact finite-ε
/// quantities: the bulk one-point error oscillates in sign at order ε, so it
/// is not monotone along ε = 1/4, 1/8, 1/16 (its final error is in range).
pub const KNOWN_FAILURES: [u32; 1] = [10];

pub const NAMES: [&str; 10] = [
    "normalization",
    "pfaffian-vs-enumeration",
    "kernel-identities",
    "limit-shape",
    "gap-probabilities",
    "higher-airy",
    "edge-convergence",
    "pfaffian-to-determinant",
    "tracy-widom",
    "bulk-limit",
];

pub fn run(id: u32, suite: Suite) -> Outcome {
    let start = Instant::now();
    let res = match id {
        1 => normalization(),
        2 => pfaffian_vs_enumeration(),
        3 => kernel_identities(),
        4 => limit_shape_check(),
        5 => gap_probabilities(),
        6 => higher_airy(),
        7 => edge_convergence(suite),
        8 => pfaffian_to_determinant(),
        9 => tracy_widom(),
        10 => bulk_limit(),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (mut passed, mut detail) = res.unwrap_or_else(|e| (false, format!("error: {e}")));
    let budget = match id {
        1 => 5.0,
        2 => 60.0,
        7 => 600.0,
        _ => f64::INFINITY,
    };
    if seconds > budget {
        passed = false;
        detail.push_str(&format!("; over the {budget} s budget"));
    }
    Outcome {
        id,
        name: NAMES.get(id as usize - 1).copied().unwrap_or("unknown"),
        passed,
        detail,
        seconds,
    }
}

pub fn run_all(suite: Suite) -> Vec<Outcome> {
    (1..=10).map(|id| run(id, suite)).collect()
}

type Check = Result<(bool, String)>;

fn plancherel() -> MiwaParams {
    MiwaParams::single(0.5).expect("valid")
}

fn normalization() -> Check {
    let m = EnumeratedMeasure::new(&plancherel(), 30)?;
    let total: f64 = m.rows.iter().map(|r| r.weight).sum();
    let err = (total - 0.5f64.exp()).abs();
    Ok((err < 1e-10, format!("|Σ w − e^½| = {err:.2e}")))
}

fn pfaffian_vs_enumeration() -> Check {
    let sets: [&[u64]; 5] = [&[1], &[2], &[1, 2], &[1, 3], &[2, 5]];
    let quartic = MiwaParams::solve_minimal_multicritical(4)?.scaled(0.5);
    let mut ok = true;
    let mut worst_width = 0.0f64;
    let mut misses = Vec::new();
    for params in [plancherel(), quartic] {
        let measure = EnumeratedMeasure::new(&params, 34)?;
        let table = JTable::new(&params)?;
        for a in sets {
            let iv = measure.correlation(a);
            let v = correlation_with(a, &table)?.value;
            worst_width = worst_width.max(iv.width());
            if !iv.contains(v) || iv.width() >= 1e-8 {
                ok = false;
                misses.push(format!("{a:?}: {v} ∉ [{}, {}]", iv.lower, iv.upper));
            }
        }
    }
    Ok((
        ok,
        format!(
            "10 sets, widest interval {worst_width:.1e} {}",
            misses.join("; ")
        ),
    ))
}

fn kernel_identities() -> Check {
    let mut worst_parseval = 0.0f64;
    let mut worst_anti = 0.0f64;
    for params in [plancherel(), MiwaParams::solve_minimal_multicritical(4)?] {
        let t = JTable::new(&params)?;
        worst_parseval = worst_parseval.max((t.parseval() - 1.0).abs());
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
                worst_anti = worst_anti.max((s - want).abs());
            }
        }
    }
    let t = JTable::new(&MiwaParams::solve_minimal_multicritical(2)?)?;
    let worst_bessel = (0..=30)
        .map(|m| (t.get(m as i64) - bessel_j(m, 2.0)).abs())
        .fold(0.0, f64::max);
    let ok = worst_parseval <= 1e-10 && worst_anti <= 1e-10 && worst_bessel <= 1e-10;
    Ok((
        ok,
        format!(
            "parseval {worst_parseval:.1e}, anticommutation {worst_anti:.1e}, bessel {worst_bessel:.1e}"
        ),
    ))
}

fn limit_shape_check() -> Check {
    let p = plancherel();
    let mut worst = 0.0f64;
    for i in 0..50 {
        let x = 2.0 * i as f64 / 49.0;
        let closed = if x >= 2.0 {
            x
        } else {
            x + 2.0 / PI * ((4.0 - x * x).sqrt() - x * (x / 2.0).acos())
        };
        worst = worst.max((limit_shape(&p, x)? - closed).abs());
    }
    let mut exact = true;
    for q in [p.clone(), MiwaParams::solve_minimal_multicritical(4)?] {
        exact &= limit_shape(&q, q.b())? == q.b();
    }
    Ok((
        worst < 1e-10 && exact,
        format!("max LSVK error {worst:.1e}, Ω(b) = b exactly: {exact}"),
    ))
}

fn gap_probabilities() -> Check {
    let p = plancherel();
    let table = JTable::new(&p)?;
    let mut worst_forms = 0.0f64;
    for mask in 1u32..256 {
        if mask.count_ones() > 5 {
            continue;
        }
        let sites: Vec<u64> = (1..=8).filter(|i| mask & (1 << (i - 1)) != 0).collect();
        let ie = gap_inclusion_exclusion(&sites, &table)?;
        let pf = gap_fredholm_pfaffian(&sites, &table)?;
        worst_forms = worst_forms.max((ie - pf).abs());
    }
    let measure = EnumeratedMeasure::new(&p, 30)?;
    let mut inside = 0;
    let mut total = 0;
    for mask in 1u32..64 {
        let sites: Vec<u64> = (1..=6).filter(|i| mask & (1 << (i - 1)) != 0).collect();
        let v = gap_probability_with(&sites, &table)?;
        total += 1;
        if measure.gap(&sites).contains(v) {
            inside += 1;
        }
    }
    Ok((
        worst_forms <= 1e-9 && inside == total,
        format!("|IE − Pf| ≤ {worst_forms:.1e}; {inside}/{total} inside the enumeration interval"),
    ))
}

fn higher_airy() -> Check {
    let e2 = AiryEvaluator::new(2)?;
    let mut worst_classical = 0.0f64;
    for i in 0..=80 {
        let x = -5.0 + 0.1 * i as f64;
        worst_classical = worst_classical.max((e2.value(x)? - airy_classical(x).0).abs());
    }
    let mut worst_ode = 0.0f64;
    for p in [2u32, 4, 6] {
        let e = AiryEvaluator::new(p)?;
        let sigma = if (p / 2 + 1) % 2 == 0 { 1.0 } else { -1.0 };
        for x in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let d = e.derivatives(x, p as usize)?.derivs;
            worst_ode = worst_ode.max((sigma * d[p as usize] - x * d[0]).abs());
        }
    }
    let mut worst_decay = 0.0f64;
    for p in [2u32, 4] {
        let e = AiryEvaluator::new(p)?;
        let q = (p as f64 + 1.0) / p as f64;
        let slope =
            (e.envelope(40.0)?.ln() - e.envelope(20.0)?.ln()) / (40f64.powf(q) - 20f64.powf(q));
        worst_decay = worst_decay.max((slope / -decay_rate(p) - 1.0).abs());
    }
    let k00 = e2.kernel_integral(0.0, 0.0)?;
    let kerr = (k00 - AIRY_MINUS_AIP0 * AIRY_MINUS_AIP0).abs();
    let ok = worst_classical < 1e-8 && worst_ode < 1e-8 && worst_decay < 0.1 && kerr < 1e-8;
    Ok((
        ok,
        format!(
            "classical {worst_classical:.1e}, ODE {worst_ode:.1e}, decay ratio off by {:.1}%, K₂(0,0) {kerr:.1e}",
            100.0 * worst_decay
        ),
    ))
}

fn summarize(rep: &ScalingReport) -> String {
    rep.args()
        .iter()
        .map(|a| {
            let errs: Vec<String> = rep.errors(a).iter().map(|e| format!("{e:.1e}")).collect();
            format!("{a:?}: {}", errs.join(" → "))
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn edge_convergence(suite: Suite) -> Check {
    let xs = [-1.0, 0.0, 1.0];
    let r2 = edge_j_report(2, &default_schedule(2), &xs, IndexRule::Continuum)?;
    let r4 = edge_j_report(4, &default_schedule(4), &xs, IndexRule::Continuum)?;
    let ok = r2.all_decreasing(0.0)
        && r2.max_final_error() < 5e-2
        && r4.all_decreasing(0.0)
        && r4.max_final_error() < 1e-1;
    let mut detail = format!("p=2 {}; p=4 {}", summarize(&r2), summarize(&r4));
    if suite == Suite::Full {
        let f4 = edge_j_report(4, &default_schedule(4), &xs, IndexRule::Floor)?;
        detail.push_str(&format!("; p=4 floored (info) {}", summarize(&f4)));
    }
    Ok((ok, detail))
}

fn pfaffian_to_determinant() -> Check {
    let rep = pfdet_report(2, &default_schedule(2), &[vec![0.0], vec![0.0, 1.0]])?;
    let ok = rep.all_decreasing(0.0) && rep.max_final_error() < 5e-2;
    Ok((ok, summarize(&rep)))
}

fn tracy_widom() -> Check {
    let mut node = 0.0f64;
    let mut trunc = 0.0f64;
    let mut two = 0.0f64;
    for i in 0..=8 {
        let s = -4.0 + i as f64;
        let l = truncation_length(2, s);
        let a = fredholm_det_with(2, s, 64, Family::GaussLegendre, l)?;
        let b = fredholm_det_with(2, s, 128, Family::GaussLegendre, l)?;
        let c = fredholm_det_with(2, s, 128, Family::GaussLegendre, 2.0 * l)?;
        let d = fredholm_det_with(2, s, 128, Family::ClenshawCurtis, l)?;
        node = node.max((a - b).abs());
        trunc = trunc.max((b - c).abs());
        two = two.max((b - d).abs());
    }
    let discrete = EdgeLattice::new(2, 0.25)?.largest_part_law(0.0)?;
    let f2 = tw_cdf(2, 0.0)?;
    let gap = (discrete - f2).abs();
    let ok = node < 1e-8 && trunc < 1e-8 && two < 1e-7 && gap < 5e-2;
    Ok((
        ok,
        format!(
            "doubling n {node:.1e}, L {trunc:.1e}; GL vs CC {two:.1e}; P[λ₁ ≤ edge] = {discrete:.4} vs F₂(0) = {f2:.4}"
        ),
    ))
}

fn bulk_limit() -> Check {
    let eps = [0.25, 0.125, 0.0625];
    let rep = bulk_density_report(&plancherel(), &eps, &[0.5, 1.0])?;
    let ok = rep.all_decreasing(0.0) && rep.max_final_error() < 2e-2;
    // the error is O(ε) with an oscillating sign; report the envelope
    let scaled = rep
        .rows
        .iter()
        .map(|r| r.error / r.epsilon)
        .fold(0.0, f64::max);
    Ok((
        ok,
        format!("{}; max |err|/ε = {scaled:.3}", summarize(&rep)),
    ))
}
