use std::fmt;
use std::sync::Arc;

use super::{NStarFunction, RealFn};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_smooth, QuadConfig};
use crate::roots;

#[derive(Clone)]
enum NForm {
    /// `M(s) = coeff·s^exponent`, `exponent > 1`.
    PowerLaw {
        coeff: f64,
        exponent: f64,
    },
    /// `M = Φ⁻¹`.
    InverseOf(Box<NStarFunction>),
    /// Numeric conjugate of the inner function.
    Conjugate(Box<NFunction>),
    Closed {
        eval: RealFn,
        density: RealFn,
    },
}

/// A convex N-function `M(t) = ∫_0^{|t|} m(s) ds`.
#[derive(Clone)]
pub struct NFunction {
    form: NForm,
    label: String,
}

impl fmt::Debug for NFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NFunction").field("label", &self.label).finish()
    }
}

impl NFunction {
    pub fn power_law(coeff: f64, exponent: f64) -> Result<Self> {
        if !(coeff > 0.0 && coeff.is_finite() && exponent > 1.0 && exponent.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "power-law N-function needs coeff > 0 and exponent > 1, got {coeff}, {exponent}"
            )));
        }
        Ok(NFunction { form: NForm::PowerLaw { coeff, exponent }, label: format!("{coeff}*t^{exponent}") })
    }

    /// An N-function from closures for `M` and its density `m`.
    pub fn custom<E, D>(label: impl Into<String>, eval: E, density: D) -> Self
    where
        E: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        NFunction { form: NForm::Closed { eval: Arc::new(eval), density: Arc::new(density) }, label: label.into() }
    }

    pub(crate) fn inverse_of(phi: NStarFunction) -> Self {
        let label = format!("inverse of [{}]", phi.label());
        NFunction { form: NForm::InverseOf(Box::new(phi)), label }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.form, NForm::PowerLaw { .. } | NForm::Closed { .. })
    }

    pub fn try_eval(&self, t: f64) -> Result<f64> {
        if t.is_nan() {
            return Err(Error::Domain("N-function evaluated at NaN".into()));
        }
        let t = t.abs();
        if t == 0.0 {
            return Ok(0.0);
        }
        match &self.form {
            NForm::PowerLaw { coeff, exponent } => Ok(coeff * t.powf(*exponent)),
            NForm::InverseOf(phi) => phi.invert(t),
            NForm::Conjugate(inner) => {
                // Young equality at the maximiser s* = m̄(t): M̄(t) = t·s* − M(s*)
                let s = inner.generalized_inverse_density(t)?;
                Ok(t * s - inner.try_eval(s)?)
            }
            NForm::Closed { eval, .. } => Ok(eval(t)),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.try_eval(t).unwrap_or(f64::NAN)
    }

    /// Right derivative `m(s)`.
    pub fn density(&self, s: f64) -> f64 {
        let s = s.abs();
        match &self.form {
            NForm::PowerLaw { coeff, exponent } => coeff * exponent * s.powf(exponent - 1.0),
            NForm::InverseOf(phi) => match phi.invert(s) {
                Ok(x) => 1.0 / phi.density(x),
                Err(_) => f64::NAN,
            },
            NForm::Conjugate(inner) => inner.generalized_inverse_density(s).unwrap_or(f64::NAN),
            NForm::Closed { density, .. } => density(s),
        }
    }

    /// `m̄(t) = sup{s : m(s) <= t}`, the right-continuous generalised
    /// inverse of the density; at a jump of `m` this is the right end of the
    /// level set.
    pub fn generalized_inverse_density(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::Domain(format!("generalised inverse needs t >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        if let NForm::PowerLaw { coeff, exponent } = self.form {
            return Ok((t / (coeff * exponent)).powf(1.0 / (exponent - 1.0)));
        }
        roots::sup_level_set(|s| self.density(s), t, 1.0)
    }

    /// `M⁻¹(y)` for `y >= 0`.
    pub fn invert(&self, y: f64) -> Result<f64> {
        if y.is_nan() || y < 0.0 {
            return Err(Error::Domain(format!("inverse needs y >= 0, got {y}")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        match &self.form {
            NForm::PowerLaw { coeff, exponent } => Ok((y / coeff).powf(1.0 / exponent)),
            NForm::InverseOf(phi) => phi.try_eval(y),
            // M̄ is differentiable with derivative m̄
            NForm::Conjugate(inner) => roots::newton_increasing(
                |t| {
                    let s = inner.generalized_inverse_density(t)?;
                    Ok((t * s - inner.try_eval(s)?, s))
                },
                y,
                1.0,
            ),
            _ => roots::sup_level_set(|t| self.eval(t), y, 1.0),
        }
    }

    /// `M̄`, closed-form for power laws.
    pub fn conjugate(&self) -> NFunction {
        match self.form {
            NForm::PowerLaw { coeff, exponent } => {
                let r = exponent;
                let e = r / (r - 1.0);
                let c = (r - 1.0) / r * (r * coeff).powf(-1.0 / (r - 1.0));
                NFunction::power_law(c, e).expect("conjugate of a valid power law")
            }
            _ => self.conjugate_numeric(),
        }
    }

    /// `M̄` through the generalised inverse of the density and the Young
    /// equality, regardless of any closed form.
    pub fn conjugate_numeric(&self) -> NFunction {
        NFunction { form: NForm::Conjugate(Box::new(self.clone())), label: format!("conj[{}]", self.label) }
    }

    /// Validate that the density is non-decreasing on a log grid, then
    /// conjugate numerically.
    pub fn conjugate_checked(&self) -> Result<NFunction> {
        let grid = super::log_grid(1e-8, 1e8, 81);
        let vals: Vec<f64> = grid.iter().map(|&s| self.density(s)).collect();
        for (i, w) in vals.windows(2).enumerate() {
            if !(w[1] >= w[0] * (1.0 - 1e-12)) {
                return Err(Error::InvalidInput(format!(
                    "N-function density decreases between s = {} and s = {}",
                    grid[i],
                    grid[i + 1]
                )));
            }
        }
        Ok(self.conjugate())
    }

    /// `M⁻¹` as an N*-function.
    pub fn inverse_nstar(&self) -> NStarFunction {
        match &self.form {
            NForm::PowerLaw { coeff, exponent } => {
                NStarFunction::power_law(1.0 / exponent, coeff.powf(-1.0 / exponent))
                    .expect("inverse of a valid power law")
            }
            NForm::InverseOf(phi) => (**phi).clone(),
            _ => NStarFunction::inverse_of(self.clone()),
        }
    }
}

/// `M̄(t) = ∫_0^t m̄(s) ds` by quadrature of the generalised inverse. Slower
/// than [`NFunction::eval`] on a conjugate; kept as an independent route.
pub fn conjugate_by_quadrature(m: &NFunction, t: f64, quad: &QuadConfig) -> f64 {
    integrate_smooth(|s| m.generalized_inverse_density(s).unwrap_or(f64::NAN), 0.0, t.abs(), quad)
}
