//! Schur Q-functions at real Miwa parameters, measure weights and
//! brute-force enumeration oracles.
//!
//! `q_n` are the coefficients of `exp(2 Σ t_n zⁿ)`. Two-row functions are
//! `Q_(r,s) = q_r q_s + 2 Σ_{i=1}^{s} (−1)^i q_{r+i} q_{s−i}` and `Q_λ` is the
//! Pfaffian of `[Q_(λ_i, λ_j)]`, with a zero part appended to odd-length λ
//! and `Q_(r,0) = q_r`.

use serde::Serialize;

use crate::miwa::MiwaParams;
use crate::partition::{enumerate_strict, StrictPartition};
use crate::skew::SkewMatrix;
use crate::sum::NeumaierSum;
use crate::{Error, Result};

/// Rounding allowance added to both ends of enumeration intervals.
pub const ORACLE_ROUNDING: f64 = 64.0 * f64::EPSILON;

#[derive(Debug, Clone)]
pub struct QSeries {
    params: MiwaParams,
    q: Vec<f64>,
}

impl QSeries {
    /// `q_0, …, q_{n_max}` by `n q_n = 2 Σ_{k odd ≤ n} k t_k q_{n−k}`.
    pub fn new(params: &MiwaParams, n_max: usize) -> Self {
        let mut q = vec![0.0; n_max + 1];
        q[0] = 1.0;
        for n in 1..=n_max {
            let acc: NeumaierSum = params
                .coeffs()
                .iter()
                .filter(|(&k, _)| k as usize <= n)
                .map(|(&k, &t)| 2.0 * k as f64 * t * q[n - k as usize])
                .collect();
            q[n] = acc.value() / n as f64;
        }
        QSeries {
            params: params.clone(),
            q,
        }
    }

    pub fn params(&self) -> &MiwaParams {
        &self.params
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.q
    }

    fn q(&self, n: usize) -> Result<f64> {
        self.q.get(n).copied().ok_or(Error::SeriesLength {
            have: self.q.len(),
            need: n,
        })
    }

    /// `Q_(r,s)` for `r > s ≥ 0`.
    pub fn two_row(&self, r: u32, s: u32) -> Result<f64> {
        let (r, s) = (r as usize, s as usize);
        self.q(r + s)?;
        let mut acc = NeumaierSum::new();
        acc.add(self.q[r] * self.q[s]);
        for i in 1..=s {
            let term = 2.0 * self.q[r + i] * self.q[s - i];
            acc.add(if i % 2 == 0 { term } else { -term });
        }
        Ok(acc.value())
    }

    pub fn schur_q(&self, lambda: &StrictPartition) -> Result<f64> {
        let mut rows = lambda.parts().to_vec();
        if rows.len() % 2 == 1 {
            rows.push(0);
        }
        let need = rows.first().copied().unwrap_or(0) as usize
            + rows.get(1).copied().unwrap_or(0) as usize;
        self.q(need)?;
        let mut m = SkewMatrix::zeros(rows.len());
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                m.set(i, j, self.two_row(rows[i], rows[j])?);
            }
        }
        Ok(m.pfaffian())
    }

    /// `2^{−l(λ)} Q_λ²`.
    pub fn weight(&self, lambda: &StrictPartition) -> Result<f64> {
        let q = self.schur_q(lambda)?;
        Ok(q * q * 0.5f64.powi(lambda.len() as i32))
    }
}

/// `Q_λ` with a series just long enough for λ.
pub fn schur_q(lambda: &StrictPartition, params: &MiwaParams) -> Result<f64> {
    let p = lambda.parts();
    let n = p.first().copied().unwrap_or(0) + p.get(1).copied().unwrap_or(0);
    QSeries::new(params, n as usize + 2).schur_q(lambda)
}

pub fn weight(lambda: &StrictPartition, params: &MiwaParams) -> Result<f64> {
    let q = schur_q(lambda, params)?;
    Ok(q * q * 0.5f64.powi(lambda.len() as i32))
}

/// `Z = exp(Σ 2n t_n²)`.
pub fn partition_function(params: &MiwaParams) -> f64 {
    params
        .coeffs()
        .iter()
        .map(|(&n, &t)| 2.0 * n as f64 * t * t)
        .sum::<f64>()
        .exp()
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightRow {
    pub partition: StrictPartition,
    pub q: f64,
    pub weight: f64,
    pub probability: f64,
}

/// The measure on `|λ| ≤ max_size`, listed explicitly.
#[derive(Debug, Clone)]
pub struct EnumeratedMeasure {
    pub rows: Vec<WeightRow>,
    pub z: f64,
    /// `1 − Σ weight/Z`, clamped at 0.
    pub tail: f64,
}

/// Bounds `lower ≤ value ≤ upper` from a truncated enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleInterval {
    pub lower: f64,
    pub upper: f64,
    pub tail: f64,
}

impl OracleInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

impl EnumeratedMeasure {
    pub fn new(params: &MiwaParams, max_size: u32) -> Result<Self> {
        let series = QSeries::new(params, max_size as usize + 2);
        let z = partition_function(params);
        let mut rows = Vec::new();
        let mut total = NeumaierSum::new();
        for lambda in enumerate_strict(max_size) {
            let q = series.schur_q(&lambda)?;
            let weight = q * q * 0.5f64.powi(lambda.len() as i32);
            total.add(weight / z);
            rows.push(WeightRow {
                partition: lambda,
                q,
                weight,
                probability: weight / z,
            });
        }
        Ok(EnumeratedMeasure {
            rows,
            z,
            tail: (1.0 - total.value()).max(0.0),
        })
    }

    /// Interval for the probability of an event decided on each listed λ;
    /// unlisted λ may or may not belong to it.
    pub fn interval<F: Fn(&StrictPartition) -> bool>(&self, event: F) -> OracleInterval {
        let lower: f64 = self
            .rows
            .iter()
            .filter(|r| event(&r.partition))
            .map(|r| r.probability)
            .collect::<NeumaierSum>()
            .value();
        OracleInterval {
            lower: lower - ORACLE_ROUNDING,
            upper: lower + self.tail + ORACLE_ROUNDING,
            tail: self.tail,
        }
    }

    /// Probability that every site of `sites` is a part.
    pub fn correlation(&self, sites: &[u64]) -> OracleInterval {
        self.interval(|l| {
            sites
                .iter()
                .all(|&s| s <= u32::MAX as u64 && l.contains(s as u32))
        })
    }

    /// Probability that no site of `sites` is a part.
    pub fn gap(&self, sites: &[u64]) -> OracleInterval {
        self.interval(|l| {
            sites
                .iter()
                .all(|&s| s > u32::MAX as u64 || !l.contains(s as u32))
        })
    }
}

pub fn oracle_correlation(
    sites: &[u64],
    params: &MiwaParams,
    max_size: u32,
) -> Result<OracleInterval> {
    Ok(EnumeratedMeasure::new(params, max_size)?.correlation(sites))
}
