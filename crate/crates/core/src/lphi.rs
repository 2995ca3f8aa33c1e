//! The `L_Φ` machinery: modular `ρ(f) = ∫Φ(|f|)dμ`, the metric
//! `d_Φ(f, g) = ρ(f − g)`, the Luxemburg quasi-norm, and the inequalities
//! relating them as checks that report signed slack.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::MeasurableFn;
use crate::nstar::NStarFunction;

/// Absolute slack allowed on every inequality before it is called a failure.
pub const SLACK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModularValue {
    pub value: f64,
    pub finite: bool,
}

pub fn modular(phi: &NStarFunction, f: &MeasurableFn) -> ModularValue {
    let value = f.integrate(|v| phi.eval(v.abs()));
    ModularValue { value, finite: value.is_finite() }
}

pub fn metric(phi: &NStarFunction, f: &MeasurableFn, g: &MeasurableFn) -> Result<f64> {
    Ok(modular(phi, &f.sub(g)?).value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasiNormResult {
    pub value: f64,
    /// `|ρ(f/λ*) − 1|` at the returned `λ*`.
    pub lambda_residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LuxemburgConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LuxemburgConfig {
    fn default() -> Self {
        LuxemburgConfig { tol: 1e-10, max_iter: 200 }
    }
}

pub fn luxemburg_norm(phi: &NStarFunction, f: &MeasurableFn) -> Result<QuasiNormResult> {
    luxemburg_norm_with(phi, f, &LuxemburgConfig::default())
}

/// `‖f‖_Φ = inf{λ > 0 : ρ(f/λ) <= 1}` by bisection on the strictly
/// decreasing map `λ ↦ ρ(f/λ)`, bracketed by doubling and halving.
/// Bisection runs until the bracket collapses; the result is an error only
/// if the best residual `|ρ(f/λ) − 1|` then still exceeds `cfg.tol`.
pub fn luxemburg_norm_with(phi: &NStarFunction, f: &MeasurableFn, cfg: &LuxemburgConfig) -> Result<QuasiNormResult> {
    if f.is_zero() {
        return Ok(QuasiNormResult { value: 0.0, lambda_residual: 0.0, iterations: 0 });
    }
    let rho = |lambda: f64| f.integrate(|v| phi.eval(v.abs() / lambda));
    let start = f.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (mut lo, mut hi) = (start, start);
    let mut iterations = 0;
    // lo: ρ(f/lo) >= 1, hi: ρ(f/hi) <= 1
    let r0 = rho(start);
    if (r0 - 1.0).abs() <= cfg.tol {
        return Ok(QuasiNormResult { value: start, lambda_residual: (r0 - 1.0).abs(), iterations: 0 });
    }
    const BRACKET_STEPS: usize = 2100;
    if r0 > 1.0 {
        let mut steps = 0;
        while rho(hi) > 1.0 {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps > BRACKET_STEPS || !hi.is_finite() {
                return Err(Error::NonConvergence("no upper bracket for the Luxemburg norm".into()));
            }
        }
    } else {
        let mut steps = 0;
        while rho(lo) < 1.0 {
            hi = lo;
            lo *= 0.5;
            steps += 1;
            if steps > BRACKET_STEPS || lo == 0.0 {
                // bounded Φ with ρ(f/λ) < 1 for every λ: the infimum is 0
                return Err(Error::NonConvergence("modular stays below 1 as lambda -> 0; no lower bracket".into()));
            }
        }
    }
    let mut best = (hi, (rho(hi) - 1.0).abs());
    while iterations < cfg.max_iter {
        iterations += 1;
        let mid = lo.sqrt() * hi.sqrt(); // the product can underflow
        if !(mid > lo && mid < hi) {
            break;
        }
        let r = rho(mid);
        let residual = (r - 1.0).abs();
        if residual < best.1 {
            best = (mid, residual);
        }
        // keep going past the tolerance: λ is pinned to the last few ulps
        if residual == 0.0 {
            break;
        }
        if r > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let collapsed = (hi - lo) <= 4.0 * f64::EPSILON * hi;
    if best.1 > cfg.tol && !collapsed {
        return Err(Error::NonConvergence(format!(
            "Luxemburg bisection stopped at residual {} after {iterations} iterations",
            best.1
        )));
    }
    Ok(QuasiNormResult { value: best.0, lambda_residual: best.1, iterations })
}

/// Signed slack of an inequality `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlackReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl SlackReport {
    fn new(lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = rhs - lhs;
        SlackReport { lhs, rhs, slack, pass: slack >= -tol }
    }
}

fn tolerance(phi: &NStarFunction, scale: f64) -> f64 {
    SLACK_TOL + phi.eval_tolerance() * scale.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasiTriangleReport {
    pub norm_f: f64,
    pub norm_g: f64,
    pub norm_sum: f64,
    /// `‖f+g‖ / (‖f‖ + ‖g‖)`, 0 when both vanish.
    pub ratio: f64,
    pub k: f64,
    pub within_bound: bool,
    /// `ratio > 1`: a witness that the triangle inequality fails.
    pub norm_fails: bool,
}

/// `‖f+g‖_Φ <= k(‖f‖_Φ + ‖g‖_Φ)` with `k` from the attached Δ2 certificate.
pub fn quasi_triangle_check(phi: &NStarFunction, f: &MeasurableFn, g: &MeasurableFn) -> Result<QuasiTriangleReport> {
    let k = phi
        .delta2()
        .ok_or_else(|| Error::NotApplicable("quasi-triangle check needs a delta-2 certificate".into()))?
        .k();
    let norm_f = luxemburg_norm(phi, f)?.value;
    let norm_g = luxemburg_norm(phi, g)?.value;
    let norm_sum = luxemburg_norm(phi, &f.add(g)?)?.value;
    let denom = norm_f + norm_g;
    let ratio = if denom == 0.0 { 0.0 } else { norm_sum / denom };
    Ok(QuasiTriangleReport {
        norm_f,
        norm_g,
        norm_sum,
        ratio,
        k,
        within_bound: ratio <= k + SLACK_TOL,
        norm_fails: ratio > 1.0 + SLACK_TOL,
    })
}

/// `∫Φ(f)Φ̂(g) dμ <= ∫|f| dμ + ∫|g| dμ`.
pub fn young_type_check(
    phi: &NStarFunction,
    hat: &NStarFunction,
    f: &MeasurableFn,
    g: &MeasurableFn,
) -> Result<SlackReport> {
    let prod = f.zip_with(g, |a, b| phi.eval(a) * hat.eval(b))?;
    let lhs = prod.integrate(|v| v);
    let rhs = f.l1_norm() + g.l1_norm();
    Ok(SlackReport::new(lhs, rhs, tolerance(phi, rhs) + tolerance(hat, rhs)))
}

/// `(1/μ(X))∫Φ(f) dμ <= Φ((1/μ(X))∫|f| dμ)`.
pub fn reversed_jensen_check(phi: &NStarFunction, f: &MeasurableFn) -> Result<SlackReport> {
    let mass = f.space().total_mass();
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::InvalidInput(format!("total mass must be finite and positive, got {mass}")));
    }
    let lhs = modular(phi, f).value / mass;
    let rhs = phi.eval(f.l1_norm() / mass);
    Ok(SlackReport::new(lhs, rhs, tolerance(phi, rhs)))
}

/// `‖f‖_Φ <= ‖f‖₁ / (μ(X)·Φ⁻¹(1/μ(X)))`.
pub fn l1_embedding_bound_check(phi: &NStarFunction, f: &MeasurableFn) -> Result<SlackReport> {
    let mass = f.space().total_mass();
    let norm = luxemburg_norm(phi, f)?.value;
    let rhs = f.l1_norm() / (mass * phi.invert(1.0 / mass)?);
    Ok(SlackReport::new(norm, rhs, tolerance(phi, rhs) + 1e-9 * rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModularBoundReport {
    pub modular: f64,
    pub c: f64,
    pub n0: i64,
    pub k: f64,
    pub bound: f64,
    pub norm: f64,
    /// The precondition `ρ(f) < c` did not hold; nothing was asserted.
    pub skipped: bool,
    pub pass: bool,
}

/// `ρ(f) < c ⇒ ‖f‖_Φ <= k^{n₀}` with `n₀ = ⌊ln c / ln 2⌋ + 1`.
pub fn modular_to_norm_bound_check(phi: &NStarFunction, f: &MeasurableFn, c: f64) -> Result<ModularBoundReport> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidInput(format!("c must be positive and finite, got {c}")));
    }
    let k = phi
        .delta2()
        .ok_or_else(|| Error::NotApplicable("modular-to-norm bound needs a delta-2 certificate".into()))?
        .k();
    let rho = modular(phi, f).value;
    let n0 = (c.ln() / std::f64::consts::LN_2).floor() as i64 + 1;
    let bound = k.powi(n0 as i32);
    if !(rho < c) {
        return Ok(ModularBoundReport { modular: rho, c, n0, k, bound, norm: f64::NAN, skipped: true, pass: true });
    }
    let norm = luxemburg_norm(phi, f)?.value;
    let pass = norm <= bound * (1.0 + 1e-12) + SLACK_TOL;
    Ok(ModularBoundReport { modular: rho, c, n0, k, bound, norm, skipped: false, pass })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductPoint {
    pub alpha: f64,
    pub phi: f64,
    pub hat: f64,
    pub product: f64,
    pub sum: f64,
    pub product_ok: bool,
    pub sum_lower_ok: bool,
    pub sum_upper_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductIdentityReport {
    pub points: Vec<ProductPoint>,
    /// Every point satisfies `α <= Φ(α)Φ̂(α) <= 2α`.
    pub product_pass: bool,
    /// `α` values where `α < Φ(α)+Φ̂(α) <= 2α` fails (diagnostic only).
    pub sum_counterexamples: Vec<f64>,
}

/// Asserts the product sandwich and evaluates the sum form diagnostically.
pub fn product_identity_check(phi: &NStarFunction, hat: &NStarFunction, alphas: &[f64]) -> ProductIdentityReport {
    let rel = 1e-9 + phi.eval_tolerance() + hat.eval_tolerance();
    let points: Vec<ProductPoint> = alphas
        .iter()
        .filter(|a| **a > 0.0)
        .map(|&alpha| {
            let (p, h) = (phi.eval(alpha), hat.eval(alpha));
            let product = p * h;
            let sum = p + h;
            ProductPoint {
                alpha,
                phi: p,
                hat: h,
                product,
                sum,
                product_ok: product >= alpha * (1.0 - rel) && product <= 2.0 * alpha * (1.0 + rel),
                sum_lower_ok: sum > alpha,
                sum_upper_ok: sum <= 2.0 * alpha,
            }
        })
        .collect();
    let product_pass = points.iter().all(|p| p.product_ok);
    let sum_counterexamples = points.iter().filter(|p| !(p.sum_lower_ok && p.sum_upper_ok)).map(|p| p.alpha).collect();
    ProductIdentityReport { points, product_pass, sum_counterexamples }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntersectionReport {
    pub l1: f64,
    pub modular_phi: f64,
    pub modular_hat: f64,
    /// `∫Φ(|f|)Φ̂(|f|) dμ`.
    pub product_integral: f64,
    pub pass: bool,
}

/// `∫|f| <= ∫Φ(|f|)Φ̂(|f|) <= 2∫|f|`, the integrated product sandwich.
pub fn intersection_check(phi: &NStarFunction, hat: &NStarFunction, f: &MeasurableFn) -> IntersectionReport {
    let l1 = f.l1_norm();
    let modular_phi = modular(phi, f).value;
    let modular_hat = modular(hat, f).value;
    let product_integral = f.integrate(|v| phi.eval(v) * hat.eval(v));
    let rel = 1e-9 + phi.eval_tolerance() + hat.eval_tolerance();
    let pass =
        product_integral >= l1 * (1.0 - rel) - SLACK_TOL && product_integral <= 2.0 * l1 * (1.0 + rel) + SLACK_TOL;
    IntersectionReport { l1, modular_phi, modular_hat, product_integral, pass }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// `(d_Φ(f_n, f), ‖f_n − f‖_Φ)` per index.
    pub pairs: Vec<(f64, f64)>,
    pub threshold: f64,
    /// Both trajectories end below the threshold, or neither does.
    pub verdict: bool,
    pub both_vanish: bool,
    pub metric_monotone: bool,
    pub norm_monotone: bool,
}

pub fn convergence_equivalence(
    phi: &NStarFunction,
    sequence: &[MeasurableFn],
    f: &MeasurableFn,
    threshold: f64,
) -> Result<ConvergenceReport> {
    let mut pairs = Vec::with_capacity(sequence.len());
    for item in sequence {
        if !item.same_space(f) {
            return Err(Error::DimensionMismatch("sequence element lives on a different space".into()));
        }
        let diff = item.sub(f)?;
        let d = modular(phi, &diff).value;
        let q = luxemburg_norm(phi, &diff)?.value;
        pairs.push((d, q));
    }
    let monotone =
        |sel: fn(&(f64, f64)) -> f64| pairs.windows(2).all(|w| sel(&w[1]) <= sel(&w[0]) * (1.0 + 1e-12) + 1e-300);
    let metric_monotone = monotone(|p| p.0);
    let norm_monotone = monotone(|p| p.1);
    let (d_small, q_small) = match pairs.last() {
        Some(&(d, q)) => (d < threshold, q < threshold),
        None => (false, false),
    };
    Ok(ConvergenceReport {
        verdict: d_small == q_small,
        both_vanish: d_small && q_small,
        pairs,
        threshold,
        metric_monotone,
        norm_monotone,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::measure::{simple_approximation, MeasureSpace};
    use crate::nstar::{delta2_solve, log_grid};

    fn unit(n: usize) -> Arc<MeasureSpace> {
        Arc::new(MeasureSpace::interval(1.0, n).unwrap())
    }

    #[test]
    fn norm_with_tiny_lambda_does_not_underflow() {
        // log_sqrt needs a huge argument to reach Φ = 20, so λ* is near 1e-170
        let phi = NStarFunction::log_sqrt();
        let space = Arc::new(MeasureSpace::atomic(vec![0.05]).unwrap());
        let f = MeasurableFn::new(&space, vec![0.79]).unwrap();
        let n = luxemburg_norm(&phi, &f).unwrap().value;
        assert!((modular(&phi, &f.scale(1.0 / n)).value - 1.0).abs() < 1e-10);
    }

    fn sqrt_phi() -> NStarFunction {
        NStarFunction::power(0.5).unwrap()
    }

    fn sqrt_phi_with_k() -> NStarFunction {
        let phi = sqrt_phi();
        let cert = delta2_solve(&phi, 8.0, &log_grid(1e-3, 1e3, 13)).unwrap();
        phi.with_delta2(cert)
    }

    #[test]
    fn modular_examples() {
        let s = unit(1000);
        let one = MeasurableFn::constant(&s, 1.0);
        assert!((modular(&sqrt_phi(), &one).value - 1.0).abs() < 1e-12);
        let id = MeasurableFn::sampled(&s, |x| x).unwrap();
        assert!((modular(&sqrt_phi(), &id).value - 2.0 / 3.0).abs() < 1e-3);
        assert_eq!(modular(&sqrt_phi(), &MeasurableFn::zero(&s)).value, 0.0);
    }

    #[test]
    fn metric_examples() {
        let s = unit(100);
        let f = MeasurableFn::constant(&s, 1.0);
        assert_eq!(metric(&sqrt_phi(), &f, &f).unwrap(), 0.0);
        let d = metric(&sqrt_phi(), &f, &MeasurableFn::zero(&s)).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        assert!(metric(&sqrt_phi(), &f, &MeasurableFn::zero(&unit(3))).is_err());
    }

    #[test]
    fn luxemburg_of_identity_on_unit_interval() {
        let s = unit(100_000);
        let id = MeasurableFn::sampled(&s, |x| x).unwrap();
        let n = luxemburg_norm(&sqrt_phi(), &id).unwrap();
        assert!(n.lambda_residual <= 1e-10);
        assert!((n.value - 4.0 / 9.0).abs() < 1e-5, "{}", n.value);
    }

    #[test]
    fn luxemburg_single_atom_closed_form() {
        for phi in [NStarFunction::log_sqrt(), NStarFunction::power_scaled(0.3).unwrap()] {
            let a = 0.37;
            let c = 2.5;
            let s = Arc::new(MeasureSpace::atomic(vec![a]).unwrap());
            let f = MeasurableFn::constant(&s, c);
            let n = luxemburg_norm(&phi, &f).unwrap().value;
            let expected = c / phi.invert(1.0 / a).unwrap();
            assert!((n / expected - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn luxemburg_zero() {
        let n = luxemburg_norm(&sqrt_phi(), &MeasurableFn::zero(&unit(5))).unwrap();
        assert_eq!(n.value, 0.0);
        assert_eq!(n.iterations, 0);
    }

    #[test]
    fn bounded_generator_has_no_bracket() {
        // Φ(x) = 2·atan(sqrt(x)) is concave but bounded by π; with μ(X) = 0.1
        // the modular never reaches 1.
        let phi = NStarFunction::custom(
            "2atan(sqrt x)",
            |x: f64| 2.0 * x.sqrt().atan(),
            |t: f64| 1.0 / (t.sqrt() * (1.0 + t)),
            None,
        );
        let s = Arc::new(MeasureSpace::atomic(vec![0.1]).unwrap());
        let f = MeasurableFn::constant(&s, 1.0);
        assert!(matches!(luxemburg_norm(&phi, &f), Err(Error::NonConvergence(_))));
    }

    #[test]
    fn disjoint_unit_atoms_ratio_two() {
        let phi = sqrt_phi_with_k();
        let s = Arc::new(MeasureSpace::atomic(vec![1.0, 1.0]).unwrap());
        let f = MeasurableFn::indicator(&s, 0..1, 1.0).unwrap();
        let g = MeasurableFn::indicator(&s, 1..2, 1.0).unwrap();
        let r = quasi_triangle_check(&phi, &f, &g).unwrap();
        assert!((r.norm_f - 1.0).abs() < 1e-9 && (r.norm_g - 1.0).abs() < 1e-9);
        assert!((r.norm_sum - 4.0).abs() < 1e-9);
        assert!((r.ratio - 2.0).abs() < 1e-9);
        assert!(r.within_bound && r.norm_fails);
        assert!((r.k - 4.0).abs() < 1e-10);
    }

    #[test]
    fn quasi_triangle_with_zero_and_without_certificate() {
        let phi = sqrt_phi_with_k();
        let s = unit(8);
        let f = MeasurableFn::random(&s, 3, -1.0, 1.0);
        let r = quasi_triangle_check(&phi, &f, &MeasurableFn::zero(&s)).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-9);
        let z = MeasurableFn::zero(&s);
        assert_eq!(quasi_triangle_check(&phi, &z, &z).unwrap().ratio, 0.0);
        assert!(matches!(quasi_triangle_check(&sqrt_phi(), &f, &f), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn young_equality_case() {
        let phi = NStarFunction::power_scaled(0.5).unwrap();
        let hat = phi.complementary();
        let s = unit(64);
        let one = MeasurableFn::constant(&s, 1.0);
        let r = young_type_check(&phi, &hat, &one, &one).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-12 && (r.rhs - 2.0).abs() < 1e-12);
        assert!(r.slack.abs() <= 1e-9 && r.pass);
        let r = young_type_check(&phi, &hat, &MeasurableFn::zero(&s), &one).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn reversed_jensen_examples() {
        let s = unit(10_000);
        let id = MeasurableFn::sampled(&s, |x| x).unwrap();
        let r = reversed_jensen_check(&sqrt_phi(), &id).unwrap();
        assert!((r.rhs - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((r.lhs - 2.0 / 3.0).abs() < 1.0 / 10_000.0);
        assert!(r.pass);
        let c = MeasurableFn::constant(&s, 3.3);
        let r = reversed_jensen_check(&sqrt_phi(), &c).unwrap();
        assert!(r.slack.abs() < 1e-12);
    }

    #[test]
    fn l1_embedding_examples() {
        let s = unit(100_000);
        let id = MeasurableFn::sampled(&s, |x| x).unwrap();
        let r = l1_embedding_bound_check(&sqrt_phi(), &id).unwrap();
        assert!((r.lhs - 4.0 / 9.0).abs() < 1e-5);
        assert!((r.rhs - 0.5).abs() < 1e-12);
        assert!(r.pass);
        let c = MeasurableFn::constant(&unit(7), 2.0);
        let r = l1_embedding_bound_check(&sqrt_phi(), &c).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-9 && (r.rhs - 2.0).abs() < 1e-12);
    }

    #[test]
    fn modular_bound_worked_instance() {
        // single unit atom with sqrt(|f|) = 3: ρ = 3, ‖f‖ = 9
        let phi = sqrt_phi_with_k();
        let s = Arc::new(MeasureSpace::atomic(vec![1.0]).unwrap());
        let f = MeasurableFn::constant(&s, 9.0);
        let r = modular_to_norm_bound_check(&phi, &f, 4.0).unwrap();
        assert!((r.modular - 3.0).abs() < 1e-12);
        assert_eq!(r.n0, 3);
        assert!((r.bound - 64.0).abs() < 1e-9);
        assert!((r.norm - 9.0).abs() < 1e-8);
        assert!(r.pass && !r.skipped);

        let small = MeasurableFn::constant(&s, 0.25);
        let r = modular_to_norm_bound_check(&phi, &small, 1.0).unwrap();
        assert_eq!(r.n0, 1);
        assert!((r.bound - r.k).abs() < 1e-12);

        let r = modular_to_norm_bound_check(&phi, &f, 2.0).unwrap();
        assert!(r.skipped && r.pass);
    }

    #[test]
    fn product_identity_examples() {
        let phi = NStarFunction::power_scaled(0.5).unwrap();
        let hat = phi.complementary();
        let alphas = log_grid(1e-3, 1e3, 25);
        let r = product_identity_check(&phi, &hat, &alphas);
        assert!(r.product_pass);
        for p in &r.points {
            assert!((p.product / (2.0 * p.alpha) - 1.0).abs() < 1e-12);
        }
        let r = product_identity_check(&phi, &hat, &[100.0]);
        assert!((r.points[0].sum - 2.0 * 200f64.sqrt()).abs() < 1e-9);
        assert_eq!(r.sum_counterexamples, vec![100.0]);
        assert!(r.product_pass);
    }

    #[test]
    fn product_identity_general_power() {
        let alphas = log_grid(1e-2, 1e2, 9);
        for p in [0.2f64, 0.6, 0.9] {
            let phi = NStarFunction::power(p).unwrap();
            let hat = phi.complementary();
            let r = product_identity_check(&phi, &hat, &alphas);
            let factor = 1.0 / (p.powf(p) * (1.0 - p).powf(1.0 - p));
            assert!(r.product_pass);
            for pt in &r.points {
                assert!((pt.product / (pt.alpha * factor) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn intersection_examples() {
        let phi = NStarFunction::power_scaled(0.5).unwrap();
        let hat = phi.complementary();
        let s = unit(50);
        let r = intersection_check(&phi, &hat, &MeasurableFn::constant(&s, 1.0));
        assert!((r.l1 - 1.0).abs() < 1e-12 && (r.product_integral - 2.0).abs() < 1e-12 && r.pass);
        let r = intersection_check(&phi, &hat, &MeasurableFn::zero(&s));
        assert_eq!((r.l1, r.modular_phi, r.modular_hat, r.product_integral), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn convergence_examples() {
        let s = unit(1000);
        let phi = sqrt_phi();
        let f = MeasurableFn::sampled(&s, |x| x).unwrap();
        let seq: Vec<_> = (1..=20).map(|n| simple_approximation(&f, n)).collect();
        let r = convergence_equivalence(&phi, &seq, &f, 1e-3).unwrap();
        assert!(r.verdict && r.both_vanish && r.metric_monotone && r.norm_monotone);

        let same = vec![f.clone(); 5];
        let r = convergence_equivalence(&phi, &same, &f, 1e-3).unwrap();
        assert!(r.pairs.iter().all(|p| *p == (0.0, 0.0)) && r.both_vanish);

        let shifted = f.map(|v| v + 1.0);
        let r = convergence_equivalence(&phi, &vec![shifted; 5], &f, 1e-3).unwrap();
        assert!(r.verdict && !r.both_vanish);
    }
}
