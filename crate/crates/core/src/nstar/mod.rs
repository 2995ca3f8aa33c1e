//! N*-functions: concave even generators `Φ(x) = ∫_0^{|x|} p(t) dt` with a
//! positive, non-increasing density that blows up at `0⁺` and vanishes at
//! infinity, together with their convex inverses (N-functions), conjugation,
//! the complementary generator `Φ̂ = (conj Φ⁻¹)⁻¹`, and the Δ2 machinery.

mod delta2;
mod density;
mod nfunction;
mod validate;

use std::fmt;
use std::sync::Arc;

pub use delta2::{delta2_auto, delta2_solve, growth_factor, Delta2Certificate, Delta2Status};
pub use density::{eval_from_density, DensityFunction};
pub use nfunction::{conjugate_by_quadrature, NFunction};
pub use validate::{validate_nstar, CheckEntry, ValidationReport};

use crate::error::{Error, Result};
use crate::quadrature::QuadConfig;
use crate::roots;

pub(crate) type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Registered closed-form families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `Φ(x) = scale·|x|^p`, `0 < p < 1`.
    Power { p: f64, scale: f64 },
    /// `Φ(x) = sqrt(ln(|x| + 1))`.
    LogSqrt,
}

impl Family {
    fn eval(&self, x: f64) -> f64 {
        match *self {
            Family::Power { p, scale } => scale * x.powf(p),
            Family::LogSqrt => x.ln_1p().sqrt(),
        }
    }

    fn inverse(&self, y: f64) -> f64 {
        match *self {
            Family::Power { p, scale } => (y / scale).powf(1.0 / p),
            Family::LogSqrt => (y * y).exp_m1(),
        }
    }

    fn density(&self, t: f64) -> f64 {
        match *self {
            Family::Power { p, scale } => scale * p * t.powf(p - 1.0),
            Family::LogSqrt => 0.5 / ((1.0 + t) * t.ln_1p().sqrt()),
        }
    }
}

#[derive(Clone)]
enum Form {
    Family(Family),
    Closed {
        eval: RealFn,
        inverse: Option<RealFn>,
        density: RealFn,
    },
    FromDensity {
        density: DensityFunction,
        quad: QuadConfig,
    },
    /// `Φ = M⁻¹` for an N-function `M`.
    InverseOf(Box<NFunction>),
}

/// A concave generator `Φ`, evaluable on all of ℝ (evenly extended).
#[derive(Clone)]
pub struct NStarFunction {
    form: Form,
    label: String,
    delta2: Option<Delta2Certificate>,
}

impl fmt::Debug for NStarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NStarFunction").field("label", &self.label).field("delta2", &self.delta2).finish()
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("power exponent must lie in (0, 1), got {p}")))
    }
}

impl NStarFunction {
    /// `Φ(t) = |t|^p`.
    pub fn power(p: f64) -> Result<Self> {
        check_exponent(p)?;
        Ok(Self::family(Family::Power { p, scale: 1.0 }, format!("t^{p}")))
    }

    /// `Φ(t) = |t|^p / p^p`, whose inverse is `p·t^{1/p}`.
    pub fn power_scaled(p: f64) -> Result<Self> {
        check_exponent(p)?;
        Ok(Self::family(Family::Power { p, scale: p.powf(-p) }, format!("t^{p}/{p}^{p}")))
    }

    /// `Φ₁(x) = exp(ln(α|x|)/α) = (α|x|)^{1/α}`, `α > 1`.
    pub fn alpha_exp(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha.is_finite()) {
            return Err(Error::InvalidInput(format!("alpha must exceed 1, got {alpha}")));
        }
        Ok(Self::family(
            Family::Power { p: 1.0 / alpha, scale: alpha.powf(1.0 / alpha) },
            format!("(({alpha})|x|)^(1/{alpha})"),
        ))
    }

    /// `Φ₂(x) = sqrt(ln(|x| + 1))`.
    pub fn log_sqrt() -> Self {
        Self::family(Family::LogSqrt, "sqrt(ln(|x|+1))".into())
    }

    /// Power law `scale·|t|^p` with an arbitrary positive scale.
    pub fn power_law(p: f64, scale: f64) -> Result<Self> {
        check_exponent(p)?;
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidInput(format!("scale must be positive, got {scale}")));
        }
        Ok(Self::family(Family::Power { p, scale }, format!("{scale}*t^{p}")))
    }

    fn family(family: Family, label: String) -> Self {
        NStarFunction { form: Form::Family(family), label, delta2: None }
    }

    /// A generator given by closures. No N* property is assumed; run
    /// [`validate_nstar`] to find out which ones hold.
    pub fn custom<E, D>(label: impl Into<String>, eval: E, density: D, inverse: Option<RealFn>) -> Self
    where
        E: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        NStarFunction {
            form: Form::Closed { eval: Arc::new(eval), inverse, density: Arc::new(density) },
            label: label.into(),
            delta2: None,
        }
    }

    /// `Φ(x) = ∫_0^{|x|} p(t) dt` evaluated by graded quadrature. The
    /// integral over `[0, 1]` is probed up front so a non-integrable density
    /// is rejected here rather than at evaluation time.
    pub fn from_density(density: DensityFunction, quad: QuadConfig) -> Result<Self> {
        quad.validate()?;
        eval_from_density(&density, 1.0, &quad)?;
        let label = format!("∫ {}", density.description());
        Ok(NStarFunction { form: Form::FromDensity { density, quad }, label, delta2: None })
    }

    pub(crate) fn inverse_of(m: NFunction) -> Self {
        let label = format!("inverse of [{}]", m.label());
        NStarFunction { form: Form::InverseOf(Box::new(m)), label, delta2: None }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn closed_family(&self) -> Option<Family> {
        match self.form {
            Form::Family(f) => Some(f),
            _ => None,
        }
    }

    pub fn with_delta2(mut self, cert: Delta2Certificate) -> Self {
        self.delta2 = Some(cert);
        self
    }

    pub fn delta2(&self) -> Option<&Delta2Certificate> {
        self.delta2.as_ref()
    }

    /// Absolute agreement one can expect from repeated evaluations, used as
    /// the slack in property checks.
    pub fn eval_tolerance(&self) -> f64 {
        match &self.form {
            Form::Family(_) | Form::Closed { .. } => 1e-12,
            Form::FromDensity { quad, .. } => 10.0 * quad.tol,
            Form::InverseOf(_) => 1e-10,
        }
    }

    pub fn try_eval(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::Domain("phi evaluated at NaN".into()));
        }
        let a = x.abs();
        if a == 0.0 {
            return Ok(0.0);
        }
        match &self.form {
            Form::Family(f) => Ok(f.eval(a)),
            Form::Closed { eval, .. } => Ok(eval(a)),
            Form::FromDensity { density, quad } => eval_from_density(density, a, quad),
            Form::InverseOf(m) => m.invert(a),
        }
    }

    /// `Φ(x)`; NaN when the underlying numerical procedure fails.
    pub fn eval(&self, x: f64) -> f64 {
        self.try_eval(x).unwrap_or(f64::NAN)
    }

    /// Right derivative `p(t)` for `t > 0`; `+∞` at `t = 0`.
    pub fn density(&self, t: f64) -> f64 {
        let t = t.abs();
        match &self.form {
            Form::Family(f) => f.density(t),
            Form::Closed { density, .. } => density(t),
            Form::FromDensity { density, .. } => density.eval(t),
            Form::InverseOf(m) => {
                let y = self.eval(t);
                1.0 / m.density(y)
            }
        }
    }

    /// `Φ⁻¹(y)` on `y >= 0`.
    pub fn invert(&self, y: f64) -> Result<f64> {
        if y.is_nan() || y < 0.0 {
            return Err(Error::Domain(format!("inverse needs y >= 0, got {y}")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        match &self.form {
            Form::Family(f) => Ok(f.inverse(y)),
            Form::Closed { inverse: Some(inv), .. } => Ok(inv(y)),
            Form::Closed { eval, .. } => roots::sup_level_set(|x| eval(x), y, 1.0),
            Form::FromDensity { density, quad } => {
                let x = roots::solve_increasing(
                    |x| eval_from_density(density, x, quad).unwrap_or(f64::INFINITY),
                    y,
                    1e-10 * y.max(1.0),
                    1.0,
                )?;
                Ok(newton_polish(x, y, |x| eval_from_density(density, x, quad).ok(), |t| density.eval(t)))
            }
            Form::InverseOf(m) => m.try_eval(y),
        }
    }

    /// `Φ⁻¹` as an N-function. Closed for the power family; otherwise the
    /// inverse is computed numerically on demand.
    pub fn inverse_nfunction(&self) -> NFunction {
        match &self.form {
            Form::Family(Family::Power { p, scale }) => {
                NFunction::power_law(scale.powf(-1.0 / p), 1.0 / p).expect("valid power family")
            }
            Form::InverseOf(m) => (**m).clone(),
            _ => NFunction::inverse_of(self.clone()),
        }
    }

    /// `Φ̂ = (conj Φ⁻¹)⁻¹`, closed-form when every stage is registered.
    pub fn complementary(&self) -> NStarFunction {
        self.inverse_nfunction().conjugate().inverse_nstar()
    }

    /// `Φ̂` through numeric conjugation even when a closed form exists.
    pub fn complementary_numeric(&self) -> NStarFunction {
        self.inverse_nfunction().conjugate_numeric().inverse_nstar()
    }
}

fn newton_polish<E, D>(mut x: f64, y: f64, eval: E, density: D) -> f64
where
    E: Fn(f64) -> Option<f64>,
    D: Fn(f64) -> f64,
{
    for _ in 0..2 {
        let Some(fx) = eval(x) else { break };
        let d = density(x);
        if !(d.is_finite() && d > 0.0) {
            break;
        }
        let next = x - (fx - y) / d;
        if !(next > 0.0 && next.is_finite()) {
            break;
        }
        let Some(fnext) = eval(next) else { break };
        if (fnext - y).abs() >= (fx - y).abs() {
            break;
        }
        x = next;
    }
    x
}

/// `n` points log-spaced over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && n >= 1);
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invert_scaled_half_power() {
        // Φ(t) = t^{1/2}/(1/2)^{1/2} = sqrt(2t), Φ⁻¹(y) = y²/2
        let phi = NStarFunction::power_scaled(0.5).unwrap();
        let x = phi.invert(2.0 * 2f64.sqrt()).unwrap();
        assert!((x - 4.0).abs() < 1e-12);
        assert_eq!(phi.invert(0.0).unwrap(), 0.0);
        assert!(phi.invert(-1.0).is_err());
    }

    #[test]
    fn invert_log_sqrt() {
        let phi = NStarFunction::log_sqrt();
        let x = phi.invert(1.0).unwrap();
        assert!((x - (std::f64::consts::E - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn evenness_and_origin() {
        for phi in [NStarFunction::power(0.3).unwrap(), NStarFunction::log_sqrt()] {
            assert_eq!(phi.eval(0.0), 0.0);
            assert_eq!(phi.eval(-2.5), phi.eval(2.5));
        }
    }

    #[test]
    fn alpha_exp_matches_definition() {
        let alpha = 3.0;
        let phi = NStarFunction::alpha_exp(alpha).unwrap();
        for x in [0.01, 0.5, 2.0, 40.0] {
            let expected = ((alpha * x).ln() / alpha).exp();
            assert!((phi.eval(x) - expected).abs() < 1e-12 * expected.max(1.0));
        }
        assert!(NStarFunction::alpha_exp(1.0).is_err());
    }

    #[test]
    fn rejects_exponents_outside_unit_interval() {
        assert!(NStarFunction::power(1.0).is_err());
        assert!(NStarFunction::power_scaled(0.0).is_err());
    }

    #[test]
    fn complementary_of_power_family_is_closed_form() {
        let p = 0.3;
        let hat = NStarFunction::power_scaled(p).unwrap().complementary();
        assert!(hat.closed_family().is_some());
        for t in [1e-3f64, 0.7, 12.0] {
            let expected = t.powf(1.0 - p) / (1.0 - p).powf(1.0 - p);
            assert!((hat.eval(t) / expected - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn half_power_is_self_complementary() {
        let phi = NStarFunction::power_scaled(0.5).unwrap();
        let hat = phi.complementary();
        for t in [1e-4, 0.3, 5.0, 1e4] {
            assert!((hat.eval(t) / phi.eval(t) - 1.0).abs() < 1e-12);
            assert!((hat.eval(t) - (2.0 * t).sqrt()).abs() < 1e-10 * t.sqrt().max(1.0));
        }
    }

    #[test]
    fn inverse_of_nfunction_round_trip() {
        let phi = NStarFunction::log_sqrt();
        let m = phi.inverse_nfunction();
        let back = m.inverse_nstar();
        for x in [0.01, 1.0, 30.0] {
            assert!((back.eval(x) - phi.eval(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-3, 1e3, 7);
        assert_eq!(g.len(), 7);
        assert!((g[0] - 1e-3).abs() < 1e-15);
        assert!((g[6] / 1e3 - 1.0).abs() < 1e-12);
        assert!((g[3] - 1.0).abs() < 1e-12);
    }
}
