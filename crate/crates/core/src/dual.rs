//! Linear functionals on `L_Φ`: the coefficient representation over atoms,
//! its norm formula with a brute-force cross-check, and the two constructive
//! demonstrations on non-atomic spaces (halving towards a zero dual, and the
//! failure of local convexity).

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lphi::{luxemburg_norm, modular, SlackReport, SLACK_TOL};
use crate::measure::{disjoint_positive_family, find_subset_with_mass, MeasurableFn, MeasureSpace};
use crate::nstar::{growth_factor, log_grid, NStarFunction};

/// Largest atom count the brute-force search accepts.
pub const BRUTE_FORCE_MAX_ATOMS: usize = 8;

/// `U(f) = Σ u_i f̄_i` over the atoms of an atomic space.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicFunctional {
    coefficients: Vec<f64>,
    space: Arc<MeasureSpace>,
}

impl AtomicFunctional {
    pub fn new(space: &Arc<MeasureSpace>, coefficients: Vec<f64>) -> Result<Self> {
        if !space.is_atomic() {
            return Err(Error::NotApplicable("atomic functionals need an atomic space".into()));
        }
        if coefficients.len() != space.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for {} atoms",
                coefficients.len(),
                space.len()
            )));
        }
        if let Some(u) = coefficients.iter().find(|u| !u.is_finite()) {
            return Err(Error::InvalidInput(format!("coefficients must be finite, got {u}")));
        }
        Ok(AtomicFunctional { coefficients, space: Arc::clone(space) })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    /// `Φ⁻¹(1/a_i)·χ_{A_i}`, a unit-norm function concentrated on atom `i`.
    pub fn single_atom_witness(&self, phi: &NStarFunction, i: usize) -> Result<MeasurableFn> {
        let height = phi.invert(1.0 / self.space.weight(i))?;
        MeasurableFn::indicator(&self.space, i..i + 1, height)
    }
}

pub fn evaluate_functional(u: &AtomicFunctional, f: &MeasurableFn) -> Result<f64> {
    if f.space().as_ref() != u.space.as_ref() {
        return Err(Error::DimensionMismatch("function and functional live on different spaces".into()));
    }
    Ok(u.coefficients.iter().zip(f.values()).map(|(c, v)| c * v).sum())
}

/// `S = max_i |u_i|·Φ⁻¹(1/a_i)`.
pub fn functional_norm_formula(u: &AtomicFunctional, phi: &NStarFunction) -> Result<f64> {
    let mut s = 0.0f64;
    for (i, c) in u.coefficients.iter().enumerate() {
        if *c != 0.0 {
            s = s.max(c.abs() * phi.invert(1.0 / u.space.weight(i))?);
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceResult {
    pub value: f64,
    pub witness: Vec<f64>,
    pub candidates: usize,
}

/// Maximises `|U(f)|` over `ρ(f) <= 1` (equivalently `‖f‖_Φ <= 1`).
///
/// Candidates are the single-atom witnesses plus `budget` seeded random
/// directions normalised by the Luxemburg norm; every candidate is then
/// improved by pairwise coordinate ascent that moves modular mass between
/// two atoms along the constraint surface `ρ(f) = 1`.
pub fn operator_norm_bruteforce(
    u: &AtomicFunctional,
    phi: &NStarFunction,
    budget: usize,
    seed: u64,
) -> Result<BruteForceResult> {
    let n = u.space.len();
    if n > BRUTE_FORCE_MAX_ATOMS {
        return Err(Error::Capacity { requested: n, available: BRUTE_FORCE_MAX_ATOMS });
    }
    let masses = u.space.weights();
    // work with modular shares b_i = Φ(|f_i|)·a_i, Σ b_i = 1, signs aligned with u
    let objective = |shares: &[f64]| -> Result<f64> {
        let mut total = 0.0;
        for i in 0..n {
            if shares[i] > 0.0 {
                total += u.coefficients[i].abs() * phi.invert(shares[i] / masses[i])?;
            }
        }
        Ok(total)
    };

    let mut starts: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut s = vec![0.0; n];
            s[i] = 1.0;
            s
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget {
        let f = MeasurableFn::random_with(&u.space, &mut rng, -1.0, 1.0);
        let norm = luxemburg_norm(phi, &f)?.value;
        if norm == 0.0 {
            continue;
        }
        let unit = f.scale(1.0 / norm);
        let shares: Vec<f64> = unit.values().iter().zip(&masses).map(|(v, a)| phi.eval(*v) * a).collect();
        let total: f64 = shares.iter().sum();
        starts.push(shares.iter().map(|b| b / total).collect());
    }

    const STEPS: usize = 16;
    let mut best = (f64::NEG_INFINITY, vec![0.0; n]);
    let candidates = starts.len();
    for mut shares in starts {
        let mut value = objective(&shares)?;
        for _sweep in 0..8 {
            let mut improved = false;
            for i in 0..n {
                for j in (i + 1)..n {
                    let pool = shares[i] + shares[j];
                    if pool <= 0.0 {
                        continue;
                    }
                    for step in 0..=STEPS {
                        let mut trial = shares.clone();
                        trial[i] = pool * step as f64 / STEPS as f64;
                        trial[j] = pool - trial[i];
                        let v = objective(&trial)?;
                        if v > value * (1.0 + 1e-15) {
                            value = v;
                            shares = trial;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                break;
            }
        }
        if value > best.0 {
            best = (value, shares);
        }
    }
    let witness = best
        .1
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let h = if *b > 0.0 { phi.invert(b / masses[i])? } else { 0.0 };
            Ok(h.copysign(u.coefficients[i]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BruteForceResult { value: best.0.max(0.0), witness, candidates })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalvingConfig {
    pub iterations: usize,
    /// Fraction of the Φ-modular mass assigned to the first piece.
    pub theta: f64,
    pub functional_tol: f64,
}

impl Default for HalvingConfig {
    fn default() -> Self {
        HalvingConfig { iterations: 20, theta: 0.5, functional_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalvingStep {
    pub iteration: usize,
    pub modular: f64,
    /// `|φ(f_n)| = |∫ f_n·u dμ|`.
    pub functional_value: f64,
    /// Cells in the support of the chosen piece.
    pub split_size: usize,
    /// Reference curve `(c_Φ·max(θ, 1−θ))ⁿ·ρ(f₀)`.
    pub bound: f64,
    /// `ρ(f_n) <= c·max(θ,1−θ)·ρ(f_{n−1}) + grid error`, with `c` the exact
    /// doubling ratio on the values involved.
    pub step_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalvingTrace {
    pub theta: f64,
    pub c_phi: f64,
    pub steps: Vec<HalvingStep>,
    pub all_steps_ok: bool,
    pub functional_floor_ok: bool,
}

impl HalvingTrace {
    pub fn modular_ratio(&self) -> f64 {
        let first = self.steps.first().map_or(0.0, |s| s.modular);
        let last = self.steps.last().map_or(0.0, |s| s.modular);
        if first == 0.0 {
            0.0
        } else {
            last / first
        }
    }

    pub fn decay_factor(&self) -> f64 {
        self.c_phi * self.theta.max(1.0 - self.theta)
    }
}

/// Repeatedly splits `f_n` into two pieces by Φ-modular mass, keeps the one
/// on which the kernel functional `φ(g) = ∫g·u dμ` is larger, and doubles it.
/// The modular shrinks geometrically while `|φ|` never decreases, so no
/// bounded kernel gives a continuous functional.
pub fn dual_zero_halving(
    phi: &NStarFunction,
    f0: &MeasurableFn,
    kernel: &MeasurableFn,
    cfg: &HalvingConfig,
) -> Result<HalvingTrace> {
    if f0.space().is_atomic() {
        return Err(Error::IndivisibleAtoms);
    }
    if !f0.same_space(kernel) {
        return Err(Error::DimensionMismatch("kernel lives on a different space".into()));
    }
    if !(cfg.theta > 0.0 && cfg.theta < 1.0) {
        return Err(Error::InvalidInput(format!("theta must lie in (0, 1), got {}", cfg.theta)));
    }
    let space = Arc::clone(f0.space());
    let functional = |g: &MeasurableFn| -> f64 {
        g.values().iter().zip(kernel.values()).zip(space.weights()).map(|((a, b), w)| a * b * w).sum()
    };
    let c_phi = growth_factor(phi, &log_grid(1e-6, 1e6, 121));
    let factor = c_phi * cfg.theta.max(1.0 - cfg.theta);
    let support = |g: &MeasurableFn| g.values().iter().filter(|v| **v != 0.0).count();

    let rho0 = modular(phi, f0).value;
    let phi0 = functional(f0).abs();
    let mut steps = vec![HalvingStep {
        iteration: 0,
        modular: rho0,
        functional_value: phi0,
        split_size: support(f0),
        bound: rho0,
        step_ok: true,
    }];
    let mut f = f0.clone();
    let mut rho = rho0;
    for n in 1..=cfg.iterations {
        let nu: Vec<f64> = f.values().iter().enumerate().map(|(i, v)| phi.eval(v.abs()) * space.weight(i)).collect();
        let max_cell = nu.iter().cloned().fold(0.0, f64::max);
        let set = find_subset_with_mass(&space, &nu, cfg.theta * rho)?;
        let g1 = f.restrict(&set);
        let g2 = f.restrict_complement(&set);
        let (v1, v2) = (functional(&g1).abs(), functional(&g2).abs());
        let chosen = if v1 >= v2 { g1 } else { g2 };
        let c_step = chosen
            .values()
            .iter()
            .filter(|v| **v != 0.0)
            .map(|v| phi.eval(2.0 * v.abs()) / phi.eval(v.abs()))
            .fold(0.0, f64::max);
        f = chosen.scale(2.0);
        let next = modular(phi, &f).value;
        let allowed = c_step * (cfg.theta.max(1.0 - cfg.theta) * rho + max_cell);
        steps.push(HalvingStep {
            iteration: n,
            modular: next,
            functional_value: functional(&f).abs(),
            split_size: support(&f),
            bound: rho0 * factor.powi(n as i32),
            step_ok: next <= allowed * (1.0 + 1e-12) + SLACK_TOL * 1e-3,
        });
        rho = next;
    }
    let all_steps_ok = steps.iter().all(|s| s.step_ok);
    let functional_floor_ok = steps.iter().all(|s| s.functional_value >= phi0 - cfg.functional_tol);
    Ok(HalvingTrace { theta: cfg.theta, c_phi, steps, all_steps_ok, functional_floor_ok })
}

/// Input for the halving demonstration on `[0, L]`: `f₀ = c·(x/L)^20` and the
/// kernel `u = χ_[0, L/20]`, with `c` chosen so that `φ(f₀) >= 1`.
///
/// The steep profile keeps the halving split away from the kernel's support,
/// so the support of `f_n` contracts slowly and stays many cells wide.
pub fn standard_halving_input(space: &Arc<MeasureSpace>) -> Result<(MeasurableFn, MeasurableFn)> {
    let length = match space.as_ref() {
        MeasureSpace::Interval { length, .. } => *length,
        MeasureSpace::Atomic { .. } => return Err(Error::IndivisibleAtoms),
    };
    let shape = MeasurableFn::sampled(space, |x| (x / length).powi(20))?;
    let kernel = MeasurableFn::sampled(space, |x| if x < length / 20.0 { 1.0 } else { 0.0 })?;
    let raw = shape.zip_with(&kernel, |a, b| a * b)?.integrate(|v| v);
    if raw <= 0.0 {
        return Err(Error::InvalidInput("interval too coarse for the halving demo".into()));
    }
    Ok((shape.scale((1.0 + 1e-9) / raw), kernel))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonconvexityTrace {
    pub epsilon: f64,
    /// `ρ(h_m)` for `m = 1..=n`.
    pub modular: Vec<f64>,
    /// `ρ(h_m) >= ε` for every `m`.
    pub lower_bound_ok: bool,
    pub monotone: bool,
}

impl NonconvexityTrace {
    pub fn last(&self) -> f64 {
        self.modular.last().copied().unwrap_or(0.0)
    }
}

/// Averages of `n` disjoint bumps `f_k = Φ⁻¹(ε/μ(A_k))·χ_{A_k}`, each of
/// modular exactly `ε`: `h_m = (1/m)Σ_{k<=m} f_k`. Convex combinations of
/// points in the `ε`-ball leave it, so no convex neighbourhood of zero is small.
pub fn nonconvexity_demo(
    phi: &NStarFunction,
    space: &Arc<MeasureSpace>,
    epsilon: f64,
    n: usize,
) -> Result<NonconvexityTrace> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    let pieces = disjoint_positive_family(space, n)?;
    let mut sum = vec![0.0; space.len()];
    let mut trace = Vec::with_capacity(n);
    for (m, piece) in pieces.iter().enumerate() {
        let height = phi.invert(epsilon / space.mass_of(piece))?;
        for v in &mut sum[piece.clone()] {
            *v += height;
        }
        let h = MeasurableFn::new(space, sum.iter().map(|v| v / (m + 1) as f64).collect())?;
        trace.push(modular(phi, &h).value);
    }
    let lower_bound_ok = trace.iter().all(|r| *r >= epsilon * (1.0 - 1e-9));
    let monotone = trace.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
    Ok(NonconvexityTrace { epsilon, modular: trace, lower_bound_ok, monotone })
}

/// Evaluation at a single atom, `f ↦ f̄_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomWitness {
    pub atom: usize,
    pub mass: f64,
    space: Arc<MeasureSpace>,
}

impl AtomWitness {
    pub fn evaluate(&self, f: &MeasurableFn) -> Result<f64> {
        if f.space().as_ref() != self.space.as_ref() {
            return Err(Error::DimensionMismatch("function lives on a different space".into()));
        }
        Ok(f.values()[self.atom])
    }

    /// `|f̄_B| <= Φ⁻¹(1/a_B)·‖f‖_Φ`.
    pub fn bound_check(&self, phi: &NStarFunction, f: &MeasurableFn) -> Result<SlackReport> {
        let lhs = self.evaluate(f)?.abs();
        let rhs = phi.invert(1.0 / self.mass)? * luxemburg_norm(phi, f)?.value;
        let slack = rhs - lhs;
        Ok(SlackReport { lhs, rhs, slack, pass: slack >= -(SLACK_TOL + 1e-9 * rhs) })
    }
}

pub fn atom_dual_witness(space: &Arc<MeasureSpace>, atom: usize) -> Result<AtomWitness> {
    if !space.is_atomic() {
        return Err(Error::NotApplicable("the sampled interval has no atoms".into()));
    }
    if atom >= space.len() {
        return Err(Error::InvalidInput(format!("atom {atom} out of range for {} atoms", space.len())));
    }
    Ok(AtomWitness { atom, mass: space.weight(atom), space: Arc::clone(space) })
}

/// Random coefficients in `[-1, 1]` on `atoms` random masses in `[0.05, 2]`.
pub fn random_functional(atoms: usize, seed: u64) -> Result<AtomicFunctional> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let masses = (0..atoms).map(|_| rng.gen_range(0.05..2.0)).collect();
    let space = Arc::new(MeasureSpace::atomic(masses)?);
    let coefficients = (0..atoms).map(|_| rng.gen_range(-1.0..1.0)).collect();
    AtomicFunctional::new(&space, coefficients)
}
