//! Skew-symmetric matrices, Pfaffians, correlation functions and discrete
//! gap probabilities.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::kernel::JTable;
use crate::miwa::MiwaParams;
use crate::{Error, Result};

/// Above this many sites the gap probability switches from inclusion–exclusion
/// to a single Pfaffian.
pub const INCLUSION_EXCLUSION_MAX: usize = 12;

/// Largest order accepted for the gap Pfaffian.
pub const GAP_ORDER_LIMIT: usize = 1200;

/// Dense real skew-symmetric matrix; writes keep `A^T = −A`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SkewMatrix {
    pub fn zeros(n: usize) -> Self {
        SkewMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Builds from the strict upper triangle `f(i, j)`, `i < j`.
    pub fn from_upper<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets `(i, j)` and `(j, i)`; `i == j` is ignored.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        if i != j {
            self.data[i * self.n + j] = v;
            self.data[j * self.n + i] = -v;
        }
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    /// Principal submatrix on `idx`, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> SkewMatrix {
        SkewMatrix::from_upper(idx.len(), |i, j| self.get(idx[i], idx[j]))
    }

    pub fn pfaffian(&self) -> f64 {
        pfaffian(self)
    }
}

/// Pfaffian by Parlett–Reid elimination with complete pivoting.
///
/// Odd order gives 0, the empty matrix gives 1.
pub fn pfaffian(m: &SkewMatrix) -> f64 {
    let n = m.n;
    if n % 2 == 1 {
        return 0.0;
    }
    let mut a = m.data.clone();
    let idx = |i: usize, j: usize| i * n + j;
    let mut pf = 1.0;
    let mut k = 0;
    while k < n {
        let (mut p, mut q, mut best) = (k, k + 1, 0.0f64);
        for i in k..n {
            for j in i + 1..n {
                let v = a[idx(i, j)].abs();
                if v > best {
                    best = v;
                    p = i;
                    q = j;
                }
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if p != k {
            swap_index(&mut a, n, k, p);
            pf = -pf;
            if q == k {
                q = p;
            }
        }
        if q != k + 1 {
            swap_index(&mut a, n, k + 1, q);
            pf = -pf;
        }
        let piv = a[idx(k, k + 1)];
        pf *= piv;
        // Schur complement: A'_{ij} = A_ij + (A_{k+1,i} A_{k,j} − A_{k,i} A_{k+1,j}) / piv
        for i in k + 2..n {
            let aki = a[idx(k, i)];
            let ak1i = a[idx(k + 1, i)];
            if aki == 0.0 && ak1i == 0.0 {
                continue;
            }
            for j in i + 1..n {
                let upd = (ak1i * a[idx(k, j)] - aki * a[idx(k + 1, j)]) / piv;
                a[idx(i, j)] += upd;
                a[idx(j, i)] = -a[idx(i, j)];
            }
        }
        k += 2;
    }
    pf
}

/// Symmetric swap of index `i` and `j` (rows and columns).
fn swap_index(a: &mut [f64], n: usize, i: usize, j: usize) {
    for c in 0..n {
        a.swap(i * n + c, j * n + c);
    }
    for r in 0..n {
        a.swap(r * n + i, r * n + j);
    }
}

/// Determinant through LU; used to cross-check Pfaffians.
pub fn determinant(m: &SkewMatrix) -> f64 {
    m.to_dmatrix().determinant()
}

/// The `2N × 2N` correlation matrix of a set of distinct positive sites.
///
/// Sites are sorted decreasingly, `a_1 > … > a_N`. Writing `ā_j` for
/// `a_{2N−j+1}`, the upper triangle holds `K(a_i, a_j)` in the first block,
/// `(−1)^{ā_j} K(a_i, −ā_j)` in the mixed block and
/// `(−1)^{ā_i + ā_j} K(−ā_i, −ā_j)` in the last block.
pub fn correlation_matrix(sites: &[u64], table: &JTable) -> Result<SkewMatrix> {
    let a = sorted_sites(sites)?;
    let n = a.len();
    let bar = |j: usize| a[2 * n - 1 - j] as i64;
    let k = |x: i64, y: i64| table.kernel(x, y).value;
    Ok(SkewMatrix::from_upper(2 * n, |i, j| {
        if j < n {
            k(a[i] as i64, a[j] as i64)
        } else if i < n {
            sign(bar(j)) * k(a[i] as i64, -bar(j))
        } else {
            sign(bar(i) + bar(j)) * k(-bar(i), -bar(j))
        }
    }))
}

fn sorted_sites(sites: &[u64]) -> Result<Vec<u64>> {
    let mut a = sites.to_vec();
    a.sort_unstable_by(|x, y| y.cmp(x));
    if a.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Domain("sites must be distinct".into()));
    }
    if a.last() == Some(&0) {
        return Err(Error::Domain("sites must be positive".into()));
    }
    Ok(a)
}

fn sign(e: i64) -> f64 {
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Correlation value and a first-order bound from kernel truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlation {
    pub value: f64,
    pub error_bound: f64,
}

/// `ρ(A) = Pf M(A)`.
pub fn correlation_with(sites: &[u64], table: &JTable) -> Result<Correlation> {
    let m = correlation_matrix(sites, table)?;
    let entries = (m.order() * m.order().saturating_sub(1) / 2) as f64;
    Ok(Correlation {
        value: m.pfaffian(),
        error_bound: entries * table.kernel(1, 1).bound,
    })
}

pub fn correlation(sites: &[u64], params: &MiwaParams) -> Result<Correlation> {
    correlation_with(sites, &JTable::new(params)?)
}

/// Kernel values among `±x_i` for a fixed site list, indexed
/// `2i` for `x_i` and `2i + 1` for `−x_i`.
struct SignedKernel {
    n: usize,
    vals: Vec<f64>,
}

impl SignedKernel {
    fn new(sites: &[u64], table: &JTable) -> Self {
        let n = 2 * sites.len();
        let pt = |i: usize| {
            let x = sites[i / 2] as i64;
            if i.is_multiple_of(2) {
                x
            } else {
                -x
            }
        };
        let mut vals = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                vals[i * n + j] = table.kernel(pt(i), pt(j)).value;
            }
        }
        SignedKernel { n, vals }
    }

    fn k(&self, i: usize, j: usize) -> f64 {
        self.vals[i * self.n + j]
    }
}

/// The interleaved matrix `L` on sites `x_1, …, x_n`, rows `(x_i, −x_i)`:
/// blocks `[[K(x,y), (−1)^y K(x,−y)], [(−1)^x K(−x,y), (−1)^{x+y} K(−x,−y)]]`.
fn interleaved(sites: &[u64], sk: &SignedKernel) -> SkewMatrix {
    SkewMatrix::from_upper(2 * sites.len(), |i, j| {
        let (si, sj) = (i / 2, j / 2);
        let mut s = 1.0;
        if i % 2 == 1 {
            s *= sign(sites[si] as i64);
        }
        if j % 2 == 1 {
            s *= sign(sites[sj] as i64);
        }
        s * sk.k(i, j)
    })
}

/// `Σ_{S ⊆ I} (−1)^{|S|} ρ(S)` with every `ρ(S)` a Pfaffian.
pub fn gap_inclusion_exclusion(sites: &[u64], table: &JTable) -> Result<f64> {
    let a = sorted_sites(sites)?;
    if a.len() > 20 {
        return Err(Error::Size {
            size: a.len(),
            limit: 20,
        });
    }
    let sk = SignedKernel::new(&a, table);
    let full = interleaved(&a, &sk);
    let mut acc = crate::NeumaierSum::new();
    for mask in 0u32..(1 << a.len()) {
        let idx: Vec<usize> = (0..a.len())
            .filter(|i| mask & (1 << i) != 0)
            .flat_map(|i| [2 * i, 2 * i + 1])
            .collect();
        let rho = full.submatrix(&idx).pfaffian();
        if mask.count_ones() % 2 == 0 {
            acc.add(rho);
        } else {
            acc.add(-rho);
        }
    }
    Ok(acc.value())
}

/// Fredholm Pfaffian `Pf(J − L)` with `J` block diagonal `[[0, 1], [−1, 0]]`.
pub fn gap_fredholm_pfaffian(sites: &[u64], table: &JTable) -> Result<f64> {
    let a = sorted_sites(sites)?;
    if 2 * a.len() > GAP_ORDER_LIMIT {
        return Err(Error::Size {
            size: 2 * a.len(),
            limit: GAP_ORDER_LIMIT,
        });
    }
    let sk = SignedKernel::new(&a, table);
    let l = interleaved(&a, &sk);
    let m = SkewMatrix::from_upper(l.order(), |i, j| {
        let unit = if i % 2 == 0 && j == i + 1 { 1.0 } else { 0.0 };
        unit - l.get(i, j)
    });
    Ok(m.pfaffian())
}

/// Probability that no particle sits in `sites`; inclusion–exclusion up to
/// [`INCLUSION_EXCLUSION_MAX`] sites, a single Pfaffian above.
pub fn gap_probability_with(sites: &[u64], table: &JTable) -> Result<f64> {
    if 2 * sites.len() > GAP_ORDER_LIMIT {
        return Err(Error::Size {
            size: 2 * sites.len(),
            limit: GAP_ORDER_LIMIT,
        });
    }
    if sites.len() <= INCLUSION_EXCLUSION_MAX {
        gap_inclusion_exclusion(sites, table)
    } else {
        gap_fredholm_pfaffian(sites, table)
    }
}

pub fn gap_probability(sites: &[u64], params: &MiwaParams) -> Result<f64> {
    gap_probability_with(sites, &JTable::new(params)?)
}
