//! Monotone bracketing and bisection.
//!
//! Every inversion in the crate reduces to locating the boundary of a level
//! set `{x >= 0 : f(x) <= target}` of a non-decreasing `f`. For strictly
//! increasing continuous `f` the boundary is the root of `f(x) = target`;
//! at a jump of `f` it is the supremum of the level set.

use crate::error::{Error, Result};

const MAX_BRACKET_STEPS: usize = 2100;
const MAX_BISECTIONS: usize = 400;

/// Supremum of `{x >= 0 : f(x) <= target}` for a non-decreasing `f`.
///
/// The bracket is grown geometrically from `hint`, then closed by bisection
/// until the two ends are adjacent floats. Fails when the level set is
/// unbounded within the representable range.
pub fn sup_level_set<F>(f: F, target: f64, hint: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if target.is_nan() {
        return Err(Error::Domain("level-set target is NaN".into()));
    }
    let start = if hint.is_finite() && hint > 0.0 { hint } else { 1.0 };
    let (mut lo, mut hi);
    if f(start) <= target {
        lo = start;
        hi = start * 2.0;
        let mut steps = 0;
        while f(hi) <= target {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps > MAX_BRACKET_STEPS || !hi.is_finite() {
                return Err(Error::NonConvergence(format!("level set of target {target} is unbounded")));
            }
        }
    } else {
        hi = start;
        lo = start * 0.5;
        let mut steps = 0;
        while f(lo) > target {
            hi = lo;
            lo *= 0.5;
            steps += 1;
            if steps > MAX_BRACKET_STEPS || lo == 0.0 {
                lo = 0.0;
                break;
            }
        }
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Root of `f(x) = target` for a continuous increasing `f` with `f(0) = 0`,
/// stopping early once the residual is within `abs_tol`.
pub fn solve_increasing<F>(f: F, target: f64, abs_tol: f64, hint: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut hi = if hint.is_finite() && hint > 0.0 { hint } else { 1.0 };
    let mut lo = 0.0;
    let mut steps = 0;
    loop {
        let v = f(hi);
        if (v - target).abs() <= abs_tol {
            return Ok(hi);
        }
        if v > target {
            break;
        }
        lo = hi;
        hi *= 2.0;
        steps += 1;
        if steps > MAX_BRACKET_STEPS || !hi.is_finite() {
            return Err(Error::NonConvergence(format!("no bracket for target {target}")));
        }
    }
    if lo == 0.0 {
        // shrink toward the origin so bisection starts from a tight bracket
        let mut cand = hi * 0.5;
        for _ in 0..MAX_BRACKET_STEPS {
            if cand == 0.0 {
                break;
            }
            let v = f(cand);
            if (v - target).abs() <= abs_tol {
                return Ok(cand);
            }
            if v < target {
                lo = cand;
                break;
            }
            hi = cand;
            cand *= 0.5;
        }
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if (v - target).abs() <= abs_tol {
            return Ok(mid);
        }
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Root of `f(x) = target` for a continuous strictly increasing `f` with
/// `f(0) = 0`, where `fd(x)` returns `(f(x), f'(x))`. Newton steps are
/// kept inside a shrinking bracket and replaced by bisection whenever they
/// would leave it.
pub fn newton_increasing<F>(fd: F, target: f64, hint: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    if !(target >= 0.0) {
        return Err(Error::Domain(format!("newton target must be >= 0, got {target}")));
    }
    if target == 0.0 {
        return Ok(0.0);
    }
    let mut x = if hint.is_finite() && hint > 0.0 { hint } else { 1.0 };
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    let mut v = fd(x)?;
    for _ in 0..MAX_BRACKET_STEPS {
        if v.0 <= target {
            lo = x;
        } else {
            hi = x;
        }
        if lo > 0.0 && hi.is_finite() {
            break;
        }
        x = if hi.is_finite() { x * 0.5 } else { x * 2.0 };
        if x == 0.0 || !x.is_finite() {
            break;
        }
        v = fd(x)?;
    }
    if !hi.is_finite() {
        return Err(Error::NonConvergence(format!("no bracket for target {target}")));
    }
    for _ in 0..MAX_BISECTIONS {
        let residual = v.0 - target;
        if residual.abs() <= 2.0 * f64::EPSILON * target {
            return Ok(x);
        }
        if residual <= 0.0 {
            lo = lo.max(x);
        } else {
            hi = hi.min(x);
        }
        let newton = x - residual / v.1;
        let next = if newton > lo && newton < hi && newton.is_finite() { newton } else { lo + 0.5 * (hi - lo) };
        if next <= lo || next >= hi {
            break;
        }
        x = next;
        v = fd(x)?;
    }
    Ok(x)
}

/// Root of `g(k) = 0` on `[lo, hi]` given `g(lo) <= 0 <= g(hi)` and `g`
/// non-decreasing. Returns the left end of the final bracket.
pub fn bisect_bracketed<G>(g: G, mut lo: f64, mut hi: f64) -> f64
where
    G: Fn(f64) -> f64,
{
    for _ in 0..MAX_BISECTIONS {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if g(hi).abs() < g(lo).abs() {
        hi
    } else {
        lo
    }
}
