//! Strict partitions, their profiles and Maya diagrams, enumeration by size
//! and an exact inverse-CDF sampler for small measures.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::miwa::MiwaParams;
use crate::schur_q::{partition_function, QSeries};
use crate::{Error, Result};

/// A strictly decreasing sequence of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct StrictPartition {
    parts: Vec<u32>,
}

impl StrictPartition {
    pub fn empty() -> Self {
        StrictPartition { parts: Vec::new() }
    }

    /// Parts must already be strictly decreasing and positive.
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::Domain(
                "strict partition parts must be positive".into(),
            ));
        }
        if parts.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Domain(format!(
                "parts {parts:?} are not strictly decreasing"
            )));
        }
        Ok(StrictPartition { parts })
    }

    /// Sorts distinct positive parts into decreasing order.
    pub fn from_parts_unsorted(mut parts: Vec<u32>) -> Result<Self> {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of parts `l(λ)`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `|λ|`.
    pub fn size(&self) -> u64 {
        self.parts.iter().map(|&p| p as u64).sum()
    }

    /// Parity of the length, 0 or 1.
    pub fn parity(&self) -> u32 {
        (self.parts.len() % 2) as u32
    }

    pub fn largest(&self) -> u32 {
        self.parts.first().copied().unwrap_or(0)
    }

    pub fn contains(&self, part: u32) -> bool {
        self.parts.binary_search_by(|p| part.cmp(p)).is_ok()
    }

    /// Profile of the shifted diagram: `x + 2·#{i : x < λ_i}`.
    pub fn profile(&self, x: u64) -> u64 {
        x + 2 * self.parts.iter().filter(|&&p| x < p as u64).count() as u64
    }

    pub fn maya(&self) -> MayaView {
        MayaView {
            occupied: self.parts.iter().copied().collect(),
        }
    }

    /// Parts joined by `;`, the CSV field format.
    pub fn joined(&self) -> String {
        self.parts
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl TryFrom<Vec<u32>> for StrictPartition {
    type Error = Error;

    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Self::new(parts)
    }
}

impl From<StrictPartition> for Vec<u32> {
    fn from(p: StrictPartition) -> Self {
        p.parts
    }
}

impl fmt::Display for StrictPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Occupied positive sites; a part `λ_i` is a particle at site `λ_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MayaView {
    pub occupied: BTreeSet<u32>,
}

impl MayaView {
    pub fn to_partition(&self) -> StrictPartition {
        StrictPartition {
            parts: self.occupied.iter().rev().copied().collect(),
        }
    }
}

/// Number of partitions of `n` into distinct parts.
pub fn count_strict(n: usize) -> u64 {
    // 0/1 knapsack over part sizes
    let mut ways = vec![0u64; n + 1];
    ways[0] = 1;
    for part in 1..=n {
        for total in (part..=n).rev() {
            ways[total] += ways[total - part];
        }
    }
    ways[n]
}

/// Every strict partition of size at most `max_size`, in nondecreasing size
/// order (reverse lexicographic within a size).
pub fn enumerate_strict(max_size: u32) -> StrictEnumerator {
    StrictEnumerator {
        max_size,
        size: 0,
        pending: Vec::new(),
    }
}

pub struct StrictEnumerator {
    max_size: u32,
    size: u32,
    pending: Vec<StrictPartition>,
}

impl Iterator for StrictEnumerator {
    type Item = StrictPartition;

    fn next(&mut self) -> Option<StrictPartition> {
        while self.pending.is_empty() {
            if self.size > self.max_size {
                return None;
            }
            let mut out = Vec::new();
            let mut scratch = Vec::new();
            distinct_parts(self.size, self.size, &mut scratch, &mut out);
            out.reverse();
            self.pending = out;
            self.size += 1;
        }
        self.pending.pop()
    }
}

/// Partitions of `n` into distinct parts, each at most `max_part`.
fn distinct_parts(n: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<StrictPartition>) {
    if n == 0 {
        out.push(StrictPartition {
            parts: prefix.clone(),
        });
        return;
    }
    let top = max_part.min(n);
    for part in (1..=top).rev() {
        // the remaining parts are < part, so at most part(part-1)/2 more
        if (part as u64) * (part as u64 + 1) / 2 < n as u64 {
            break;
        }
        prefix.push(part);
        distinct_parts(n - part, part - 1, prefix, out);
        prefix.pop();
    }
}

/// Draws `count` partitions from the measure restricted to `|λ| ≤ max_size`
/// by inverse CDF over the exact weights.
///
/// Fails when the discarded tail `1 − Σ weight/Z` exceeds `1e-6`.
pub fn sample(
    params: &MiwaParams,
    max_size: u32,
    count: usize,
    seed: u64,
) -> Result<Vec<StrictPartition>> {
    let series = QSeries::new(params, max_size as usize + 2);
    let z = partition_function(params);
    let mut support = Vec::new();
    let mut cdf = Vec::new();
    let mut acc = crate::NeumaierSum::new();
    for lambda in enumerate_strict(max_size) {
        let w = series.weight(&lambda)?;
        acc.add(w);
        support.push(lambda);
        cdf.push(acc.value());
    }
    let total = acc.value();
    let tail = 1.0 - total / z;
    if tail > 1e-6 {
        return Err(Error::Truncation {
            tail,
            allowed: 1e-6,
        });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let u = rng.gen::<f64>() * total;
            let i = cdf.partition_point(|&c| c <= u).min(support.len() - 1);
            support[i].clone()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(p: &[u32]) -> StrictPartition {
        StrictPartition::new(p.to_vec()).unwrap()
    }

    #[test]
    fn profile_examples() {
        let l = lam(&[9, 6, 3, 2]);
        assert_eq!(l.profile(0), 8);
        assert_eq!(l.profile(9), 9);
        assert_eq!(l.profile(12), 12);
        let e = StrictPartition::empty();
        for x in 0..10 {
            assert_eq!(e.profile(x), x);
        }
    }

    #[test]
    fn profile_steps_are_unit() {
        for l in enumerate_strict(15) {
            for x in 0..20 {
                let d = l.profile(x + 1) as i64 - l.profile(x) as i64;
                assert_eq!(d.abs(), 1, "{l} at {x}");
            }
        }
    }

    #[test]
    fn size_length_parity() {
        let l = lam(&[9, 6, 3, 2]);
        assert_eq!(l.size(), 20);
        assert_eq!(l.len(), 4);
        assert_eq!(l.parity(), 0);
        assert!(l.contains(6) && !l.contains(5));
        assert_eq!(l.to_string(), "(9,6,3,2)");
        assert_eq!(l.joined(), "9;6;3;2");
    }

    #[test]
    fn rejects_non_strict() {
        assert!(StrictPartition::new(vec![3, 3]).is_err());
        assert!(StrictPartition::new(vec![2, 3]).is_err());
        assert!(StrictPartition::new(vec![2, 0]).is_err());
        assert_eq!(
            StrictPartition::from_parts_unsorted(vec![2, 5, 1]).unwrap(),
            lam(&[5, 2, 1])
        );
    }

    #[test]
    fn maya_round_trip() {
        for l in enumerate_strict(12) {
            assert_eq!(l.maya().to_partition(), l);
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(
            enumerate_strict(0).collect::<Vec<_>>(),
            vec![StrictPartition::empty()]
        );
        let all: Vec<_> = enumerate_strict(5).collect();
        let counts: Vec<usize> = (0..=5)
            .map(|n| all.iter().filter(|l| l.size() == n).count())
            .collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 2, 3]);
        assert_eq!(enumerate_strict(10).count(), 43);
        for n in 0..=25 {
            let got = enumerate_strict(n as u32)
                .filter(|l| l.size() == n as u64)
                .count();
            assert_eq!(got as u64, count_strict(n));
        }
    }

    #[test]
    fn enumeration_is_sorted_by_size_and_unique() {
        let all: Vec<_> = enumerate_strict(18).collect();
        assert!(all.windows(2).all(|w| w[0].size() <= w[1].size()));
        let set: BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        for l in &all {
            assert!(l.parts().windows(2).all(|w| w[0] > w[1]));
        }
    }

    #[test]
    fn json_is_array() {
        let l = lam(&[4, 1]);
        assert_eq!(serde_json::to_string(&l).unwrap(), "[4,1]");
        let back: StrictPartition = serde_json::from_str("[4,1]").unwrap();
        assert_eq!(back, l);
        assert!(serde_json::from_str::<StrictPartition>("[1,4]").is_err());
    }

    #[test]
    fn sampler_is_deterministic_and_supported() {
        let p = MiwaParams::single(0.5).unwrap();
        let a = sample(&p, 30, 50, 7).unwrap();
        let b = sample(&p, 30, 50, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|l| l.size() <= 30));
    }

    #[test]
    fn sampler_tiny_parameter_gives_empty() {
        let p = MiwaParams::single(1e-9).unwrap();
        let s = sample(&p, 10, 1000, 1).unwrap();
        assert!(s.iter().all(|l| l.is_empty()));
    }

    #[test]
    fn sampler_rejects_heavy_tail() {
        let p = MiwaParams::single(2.0).unwrap();
        assert!(matches!(sample(&p, 5, 1, 0), Err(Error::Truncation { .. })));
    }

    #[test]
    fn sampler_empty_frequency() {
        let p = MiwaParams::single(0.5).unwrap();
        let n = 100_000;
        let s = sample(&p, 30, n, 2024).unwrap();
        let freq = s.iter().filter(|l| l.is_empty()).count() as f64 / n as f64;
        let prob = (-0.5f64).exp();
        let sigma = (prob * (1.0 - prob) / n as f64).sqrt();
        assert!((freq - prob).abs() < 3.0 * sigma, "freq {freq}");
    }
}
