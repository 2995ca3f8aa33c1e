//! Quadrature for densities with an integrable singularity at the origin.
//!
//! `∫_0^x p(t) dt` is split on a geometric mesh `x, x·r, x·r², …` that
//! grades toward zero. Each panel is integrated by adaptive Gauss–Kronrod
//! (7/15). Successive panel contributions of a power-like singularity form
//! a geometric series, so the remainder `∫_0^{x·r^k}` is extrapolated from
//! the observed contraction ratio once two ratios agree.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadConfig {
    /// Relative tolerance on the full integral.
    pub tol: f64,
    /// Geometric ratio between consecutive mesh points, in (0, 1).
    pub mesh_ratio: f64,
    /// Maximum bisection depth inside one panel.
    pub max_depth: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { tol: 1e-8, mesh_ratio: 0.25, max_depth: 30 }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidInput(format!("quadrature tolerance must lie in (0, 1), got {}", self.tol)));
        }
        if !(self.mesh_ratio > 0.0 && self.mesh_ratio < 1.0) {
            return Err(Error::InvalidInput(format!("mesh ratio must lie in (0, 1), got {}", self.mesh_ratio)));
        }
        Ok(())
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// One Gauss–Kronrod 7/15 pass: (kronrod estimate, |kronrod - gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel: f64, depth: u32) -> f64 {
    let (k, err) = gk15(f, a, b);
    if err <= rel * k.abs() || err < 1e-300 || depth == 0 {
        return k;
    }
    let mid = 0.5 * (a + b);
    adaptive(f, a, mid, rel, depth - 1) + adaptive(f, mid, b, rel, depth - 1)
}

/// Adaptive Gauss–Kronrod on a finite interval with no endpoint singularity.
pub fn integrate_smooth<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> f64 {
    if a == b {
        return 0.0;
    }
    adaptive(&f, a, b, cfg.tol * 0.01, cfg.max_depth)
}

/// `∫_0^upper f(t) dt` for `f` positive with a possible integrable blow-up
/// at `0⁺`. Errors when the panel contributions stop contracting.
pub fn integrate_from_zero<F: Fn(f64) -> f64>(f: F, upper: f64, cfg: &QuadConfig) -> Result<f64> {
    cfg.validate()?;
    if upper.is_nan() || upper < 0.0 {
        return Err(Error::Domain(format!("upper limit must be >= 0, got {upper}")));
    }
    if upper == 0.0 {
        return Ok(0.0);
    }
    if !upper.is_finite() {
        return Err(Error::Domain("upper limit must be finite".into()));
    }
    let r = cfg.mesh_ratio;
    let panel_tol = cfg.tol * 0.01;
    let mut total = 0.0;
    let mut hi = upper;
    let mut prev: Option<f64> = None;
    let mut prev_ratio: Option<f64> = None;
    let mut panels = 0;
    while hi > 1e-300 {
        let lo = hi * r;
        let c = adaptive(&f, lo, hi, panel_tol, cfg.max_depth);
        if !c.is_finite() {
            return Err(Error::DivergedIntegral { upper, panels });
        }
        total += c;
        panels += 1;
        if c == 0.0 {
            return Ok(total);
        }
        if let Some(p) = prev {
            let ratio = c / p;
            if ratio < 1.0 - 1e-9 && ratio > 0.0 {
                let tail = c * ratio / (1.0 - ratio);
                if tail <= 0.1 * cfg.tol * total {
                    return Ok(total + tail);
                }
                if let Some(q) = prev_ratio {
                    // geometric-series remainder; its error scales with the drift of the ratio
                    let drift = (ratio - q).abs();
                    let tail_err = tail * drift / (1.0 - ratio) + tail * 1e-12;
                    if tail_err <= 0.1 * cfg.tol * total {
                        return Ok(total + tail);
                    }
                }
            }
            prev_ratio = Some(ratio);
        }
        prev = Some(c);
        hi = lo;
    }
    Err(Error::DivergedIntegral { upper, panels })
}
