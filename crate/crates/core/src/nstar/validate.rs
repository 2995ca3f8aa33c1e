use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::NStarFunction;

/// Minimum log-log decay of `Φ(x)/x` (toward `0⁺` and toward infinity)
/// accepted as evidence of the two limit conditions.
const LIMIT_SLOPE: f64 = 0.01;
const PAIRS: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    pub worst_residual: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub label: String,
    pub entries: Vec<CheckEntry>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn entry(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.entries.iter().filter(|e| !e.passed).map(|e| e.name.as_str()).collect()
    }
}

fn entry(name: &str, worst: f64, limit: f64, detail: String) -> CheckEntry {
    CheckEntry { name: name.into(), passed: worst <= limit, worst_residual: worst, detail }
}

/// log-log slope of `g(x)/x` between `a` and `b`.
fn ratio_slope(g: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let ra = g(a) / a;
    let rb = g(b) / b;
    (rb.ln() - ra.ln()) / (b.ln() - a.ln())
}

/// Run every N* invariant on the positive grid points, plus the cross-check
/// that the numerically inverted generator is an N-function.
pub fn validate_nstar(phi: &NStarFunction, grid: &[f64]) -> ValidationReport {
    let mut xs: Vec<f64> = grid.iter().copied().filter(|x| *x > 0.0 && x.is_finite()).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let tol = 10.0 * phi.eval_tolerance();
    let mut entries = Vec::new();
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let log_span = (lo.ln(), hi.ln());
    let mut sample = move || rng.gen_range(log_span.0..=log_span.1).exp();
    let pairs: Vec<(f64, f64)> = (0..PAIRS).map(|_| (sample(), sample())).collect();

    entries.push(entry("zero_at_origin", phi.eval(0.0).abs(), tol, "|phi(0)|".into()));

    let even = xs.iter().map(|&x| (phi.eval(x) - phi.eval(-x)).abs() / phi.eval(x).max(1e-300)).fold(0.0, f64::max);
    entries.push(entry("even", even, tol, "max |phi(x) - phi(-x)| / phi(x)".into()));

    let mono =
        xs.windows(2).map(|w| (phi.eval(w[0]) - phi.eval(w[1])) / phi.eval(w[1]).max(1e-300)).fold(0.0, f64::max);
    entries.push(entry("non_decreasing", mono, tol, "max relative drop between grid points".into()));

    let concave = pairs
        .iter()
        .map(|&(a, b)| {
            let (fa, fb) = (phi.eval(a), phi.eval(b));
            ((fa + fb) / 2.0 - phi.eval((a + b) / 2.0)) / fa.max(fb)
        })
        .fold(0.0, f64::max);
    entries.push(entry(
        "midpoint_concavity",
        concave,
        tol,
        "max ((phi(a)+phi(b))/2 - phi((a+b)/2)) / max(phi(a), phi(b))".into(),
    ));

    let subadd = pairs
        .iter()
        .map(|&(a, b)| {
            let (fa, fb) = (phi.eval(a), phi.eval(b));
            (phi.eval(a + b) - fa - fb) / (fa + fb)
        })
        .fold(0.0, f64::max);
    entries.push(entry("subadditivity", subadd, tol, "max (phi(x+y) - phi(x) - phi(y)) / (phi(x)+phi(y))".into()));

    let superhom = xs
        .iter()
        .flat_map(|&x| (1..10).map(move |i| (x, i as f64 / 10.0)))
        .map(|(x, a)| {
            let fx = phi.eval(x);
            (a * fx - phi.eval(a * x)) / fx
        })
        .fold(0.0, f64::max);
    entries.push(entry("superhomogeneity", superhom, tol, "max (a phi(x) - phi(a x)) / phi(x), a in (0,1)".into()));

    let at_zero = ratio_slope(|x| phi.eval(x), lo, lo * 10.0);
    entries.push(entry(
        "ratio_unbounded_at_zero",
        at_zero,
        -LIMIT_SLOPE,
        format!("log-log slope of phi(x)/x on [{lo:e}, {:e}] must be <= -{LIMIT_SLOPE}", lo * 10.0),
    ));
    let at_inf = ratio_slope(|x| phi.eval(x), hi / 10.0, hi);
    entries.push(entry(
        "ratio_vanishes_at_infinity",
        at_inf,
        -LIMIT_SLOPE,
        format!("log-log slope of phi(x)/x on [{:e}, {hi:e}] must be <= -{LIMIT_SLOPE}", hi / 10.0),
    ));

    entries.push(inverse_is_nfunction(phi, &pairs, tol));

    ValidationReport { label: phi.label().to_string(), entries }
}

fn inverse_is_nfunction(phi: &NStarFunction, pairs: &[(f64, f64)], tol: f64) -> CheckEntry {
    let inv = |y: f64| phi.invert(y).unwrap_or(f64::NAN);
    // work in the image of the sampled x range
    let ys: Vec<(f64, f64)> = pairs.iter().map(|&(a, b)| (phi.eval(a), phi.eval(b))).collect();
    let mut worst: f64 = inv(0.0).abs();
    for &(a, b) in &ys {
        let (ma, mb) = (inv(a), inv(b));
        let v = (inv((a + b) / 2.0) - (ma + mb) / 2.0) / ma.max(mb);
        worst = worst.max(if v.is_nan() { f64::INFINITY } else { v });
    }
    let y_lo = ys.iter().map(|p| p.0.min(p.1)).fold(f64::INFINITY, f64::min);
    let y_hi = ys.iter().map(|p| p.0.max(p.1)).fold(0.0, f64::max);
    let slope_zero = ratio_slope(inv, y_lo, y_lo * 10.0);
    let slope_inf = ratio_slope(inv, y_hi / 10.0, y_hi);
    let convex_ok = worst <= tol;
    let limits_ok = slope_zero >= LIMIT_SLOPE && slope_inf >= LIMIT_SLOPE;
    CheckEntry {
        name: "inverse_is_nfunction".into(),
        passed: convex_ok && limits_ok,
        worst_residual: worst,
        detail: format!(
            "inverse midpoint-convexity residual {worst:e}; log-log slopes of M(y)/y: {slope_zero:.4} near 0, {slope_inf:.4} near infinity"
        ),
    }
}
