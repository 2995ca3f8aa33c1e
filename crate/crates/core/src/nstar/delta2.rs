use serde::Serialize;

use super::NStarFunction;
use crate::error::{Error, Result};
use crate::roots;

/// Relative spread of `k(x)` below which a single global constant is reported.
pub const GLOBAL_SPREAD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Delta2Status {
    ExactGlobal,
    PerXOnly,
}

/// Per-sample solutions of `2Φ(x) = Φ(k(x)·x)` on `[2, k0]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Delta2Certificate {
    pub k0: f64,
    /// `(x, k(x))` pairs.
    pub k_per_x: Vec<(f64, f64)>,
    pub k_global: Option<f64>,
    pub status: Delta2Status,
    pub k_min: f64,
    pub k_max: f64,
    /// Largest `|Φ(k(x)·x) − 2Φ(x)|` relative to `Φ(x)`.
    pub max_residual: f64,
}

impl Delta2Certificate {
    /// Constant usable in the quasi-triangle bound: the global `k` when one
    /// exists, else the largest sampled `k(x)`.
    pub fn k(&self) -> f64 {
        self.k_global.unwrap_or(self.k_max)
    }
}

/// Solve `Φ(k·x) = 2Φ(x)` for each grid point by bisection on `[2, k0]`.
///
/// The bracket is valid because `Φ(2x) <= 2Φ(x)` (subadditivity) and the
/// hypothesis `2Φ(x) <= Φ(k0·x)` is checked first at every sample.
pub fn delta2_solve(phi: &NStarFunction, k0: f64, grid: &[f64]) -> Result<Delta2Certificate> {
    if !(k0 > 2.0 && k0.is_finite()) {
        return Err(Error::InvalidInput(format!("k0 must exceed 2, got {k0}")));
    }
    let xs: Vec<f64> = grid.iter().copied().filter(|x| *x > 0.0 && x.is_finite()).collect();
    if xs.is_empty() {
        return Err(Error::InvalidInput("delta-2 grid has no positive points".into()));
    }
    let slack = 1e-12 + phi.eval_tolerance();
    let mut k_per_x = Vec::with_capacity(xs.len());
    let mut max_residual: f64 = 0.0;
    for &x in &xs {
        let target = 2.0 * phi.eval(x);
        let top = phi.eval(k0 * x);
        if !(target <= top * (1.0 + slack)) {
            return Err(Error::NotDelta2 { x, lhs: target, rhs: top });
        }
        let k = roots::bisect_bracketed(|k| phi.eval(k * x) - target, 2.0, k0);
        let residual = (phi.eval(k * x) - target).abs() / (0.5 * target);
        max_residual = max_residual.max(residual);
        k_per_x.push((x, k));
    }
    let k_min = k_per_x.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let k_max = k_per_x.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let (k_global, status) = if (k_max - k_min) <= GLOBAL_SPREAD_TOL * k_max {
        let mean = k_per_x.iter().map(|p| p.1).sum::<f64>() / k_per_x.len() as f64;
        (Some(mean), Delta2Status::ExactGlobal)
    } else {
        (None, Delta2Status::PerXOnly)
    };
    Ok(Delta2Certificate { k0, k_per_x, k_global, status, k_min, k_max, max_residual })
}

/// Smallest power-of-two `k0 >= 4` for which the Δ2 hypothesis holds on the
/// grid, then [`delta2_solve`] with it.
pub fn delta2_auto(phi: &NStarFunction, grid: &[f64]) -> Result<Delta2Certificate> {
    let mut k0 = 4.0;
    let mut last = None;
    for _ in 0..40 {
        match delta2_solve(phi, k0, grid) {
            Ok(cert) => return Ok(cert),
            Err(e @ Error::NotDelta2 { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
        k0 *= 2.0;
    }
    Err(last.unwrap_or_else(|| Error::NonConvergence("no k0 found".into())))
}

/// `c_Φ = max_x Φ(2x)/Φ(x)` over the positive grid points.
pub fn growth_factor(phi: &NStarFunction, grid: &[f64]) -> f64 {
    grid.iter()
        .filter(|x| **x > 0.0)
        .filter_map(|&x| {
            let base = phi.eval(x);
            (base > 0.0).then(|| phi.eval(2.0 * x) / base)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}
