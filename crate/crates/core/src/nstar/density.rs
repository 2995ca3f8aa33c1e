use std::fmt;
use std::sync::Arc;

use super::{log_grid, RealFn};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_from_zero, QuadConfig};

/// The right derivative `p` of an N*-function.
#[derive(Clone)]
pub struct DensityFunction {
    eval: RealFn,
    singular_at_zero: bool,
    description: String,
}

impl fmt::Debug for DensityFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityFunction")
            .field("description", &self.description)
            .field("singular_at_zero", &self.singular_at_zero)
            .finish()
    }
}

impl DensityFunction {
    pub fn new<F>(description: impl Into<String>, singular_at_zero: bool, eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        DensityFunction { eval: Arc::new(eval), singular_at_zero, description: description.into() }
    }

    /// Density through sorted `(t, p(t))` samples, interpolated linearly in
    /// `(ln t, ln p)` and extrapolated by the end segments' power laws.
    pub fn tabulated(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidInput("tabulated density needs at least two points".into()));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidInput(format!(
                    "tabulated abscissae must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
            if w[1].1 > w[0].1 {
                return Err(Error::InvalidInput(format!(
                    "tabulated density must be non-increasing (p({}) = {} < p({}) = {})",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        if points.iter().any(|&(t, p)| !(t > 0.0 && t.is_finite() && p > 0.0 && p.is_finite())) {
            return Err(Error::InvalidInput("tabulated points must be positive and finite".into()));
        }
        let logs: Vec<(f64, f64)> = points.iter().map(|&(t, p)| (t.ln(), p.ln())).collect();
        let singular = logs[1].1 < logs[0].1;
        let n = logs.len();
        let eval = move |t: f64| {
            if t <= 0.0 {
                return if singular { f64::INFINITY } else { logs[0].1.exp() };
            }
            let lt = t.ln();
            let seg = match logs.binary_search_by(|probe| probe.0.total_cmp(&lt)) {
                Ok(i) => return logs[i].1.exp(),
                Err(i) => i.clamp(1, n - 1) - 1,
            };
            let (x0, y0) = logs[seg];
            let (x1, y1) = logs[seg + 1];
            (y0 + (y1 - y0) * (lt - x0) / (x1 - x0)).exp()
        };
        Ok(DensityFunction {
            eval: Arc::new(eval),
            singular_at_zero: singular,
            description: format!("tabulated density ({} points)", points.len()),
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn singular_at_zero(&self) -> bool {
        self.singular_at_zero
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Sampled invariants: positivity and monotonicity on a log grid, blow-up
    /// near `0⁺`, decay at infinity.
    pub fn check_invariants(&self) -> Result<()> {
        let grid = log_grid(1e-12, 1e12, 97);
        let vals: Vec<f64> = grid.iter().map(|&t| self.eval(t)).collect();
        if let Some((t, v)) = grid.iter().zip(&vals).find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::InvalidInput(format!("density not positive at t = {t}: {v}")));
        }
        for (i, w) in vals.windows(2).enumerate() {
            if w[1] > w[0] * (1.0 + 1e-12) {
                return Err(Error::InvalidInput(format!(
                    "density increases between t = {} and t = {}",
                    grid[i],
                    grid[i + 1]
                )));
            }
        }
        let (first, last) = (vals[0], vals[vals.len() - 1]);
        let mid = self.eval(1.0);
        if !(first > 1e3 * mid) {
            return Err(Error::InvalidInput(format!(
                "density does not blow up at 0+: p(1e-12) = {first}, p(1) = {mid}"
            )));
        }
        if !(last < 1e-3 * mid) {
            return Err(Error::InvalidInput(format!(
                "density does not vanish at infinity: p(1e12) = {last}, p(1) = {mid}"
            )));
        }
        Ok(())
    }
}

/// `∫_0^{|x|} p(t) dt` by graded quadrature.
pub fn eval_from_density(density: &DensityFunction, x: f64, quad: &QuadConfig) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("evaluation point must be finite, got {x}")));
    }
    integrate_from_zero(|t| density.eval(t), x.abs(), quad)
}
