//! Limit shape of the rescaled profile, the bulk density and the sine
//! kernel.

use std::f64::consts::PI;

use serde::Serialize;

use crate::kernel::JTable;
use crate::miwa::MiwaParams;
use crate::{Error, Result};

/// Default truncation for profile sums.
pub const PROFILE_TOL: f64 = 1e-12;

/// `Ω(x) = x + (2/π)(4 Σ t_n sin nχ − xχ)` with `χ = χ(x)` for
/// `0 ≤ x ≤ b`, and `Ω(x) = x` beyond.
pub fn limit_shape(params: &MiwaParams, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("limit shape needs x >= 0, got {x}")));
    }
    if x >= params.b() {
        return Ok(x);
    }
    let chi = params.fermi_angle(x)?;
    Ok(x + 2.0 / PI * (params.wave_phase(chi) - x * chi))
}

/// `χ(x)/π`, zero for `x ≥ b`.
pub fn density(params: &MiwaParams, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("density needs x >= 0, got {x}")));
    }
    if x >= params.b() {
        return Ok(0.0);
    }
    Ok(params.fermi_angle(x)? / PI)
}

/// `sin(χ(x)(r−s)) / (π(r−s))`, diagonal `χ(x)/π`.
pub fn sine_kernel(params: &MiwaParams, x: f64, r: i64, s: i64) -> Result<f64> {
    let rho = density(params, x)?;
    if r == s {
        return Ok(rho);
    }
    let d = (r - s) as f64;
    Ok((PI * rho * d).sin() / (PI * d))
}

/// Expected rescaled profile `ε m + 2ε Σ_{k≥1} ρ(m + k; t/ε)` at the lattice
/// point `m = ⌊x/ε⌋`.
pub fn expected_profile(params: &MiwaParams, epsilon: f64, x: f64, tol: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Domain(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    let table = JTable::new(&params.scaled(1.0 / epsilon))?;
    expected_profile_with(&table, epsilon, x, tol)
}

/// As [`expected_profile`] with a prebuilt table for `t/ε`.
pub fn expected_profile_with(table: &JTable, epsilon: f64, x: f64, tol: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("profile needs x >= 0, got {x}")));
    }
    let m = (x / epsilon + 1e-9).floor() as u64;
    let mut acc = crate::NeumaierSum::new();
    let mut k = m + 1;
    loop {
        let rho = table.one_point(k);
        acc.add(rho);
        if k as usize > table.bandwidth() && rho < tol {
            break;
        }
        k += 1;
    }
    Ok(epsilon * m as f64 + 2.0 * epsilon * acc.value())
}

/// Ω and the density sampled on a uniform grid.
#[derive(Debug, Clone, Serialize)]
pub struct ShapeCurve {
    pub grid: Vec<f64>,
    pub omega: Vec<f64>,
    pub density: Vec<f64>,
}

impl ShapeCurve {
    /// `points` equally spaced values on `[0, x_max]`.
    pub fn new(params: &MiwaParams, x_max: f64, points: usize) -> Result<Self> {
        if points < 2 || !(x_max > 0.0) {
            return Err(Error::Domain(
                "shape grid needs >= 2 points and x_max > 0".into(),
            ));
        }
        let grid: Vec<f64> = (0..points)
            .map(|i| x_max * i as f64 / (points - 1) as f64)
            .collect();
        let omega = grid
            .iter()
            .map(|&x| limit_shape(params, x))
            .collect::<Result<Vec<_>>>()?;
        let density = grid
            .iter()
            .map(|&x| density(params, x))
            .collect::<Result<Vec<_>>>()?;
        Ok(ShapeCurve {
            grid,
            omega,
            density,
        })
    }
}
