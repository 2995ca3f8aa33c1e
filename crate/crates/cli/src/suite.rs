//! The `check` suite: each inequality evaluated on seeded random inputs,
//! summarised by the range of its signed slack.

use std::sync::Arc;

use nstar_core::lphi::{
    convergence_equivalence, intersection_check, l1_embedding_bound_check, modular_to_norm_bound_check,
    product_identity_check, quasi_triangle_check, reversed_jensen_check, young_type_check,
};
use nstar_core::measure::{simple_approximation, MeasurableFn, MeasureSpace};
use nstar_core::nstar::{delta2_auto, log_grid, Delta2Status, NStarFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CHECKS: &[&str] = &[
    "quasi_triangle",
    "young",
    "reversed_jensen",
    "l1_embedding",
    "modular_bound",
    "product_identity",
    "intersection",
    "convergence",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub samples: usize,
    pub seed: u64,
    /// Allowed negative slack, relative to `max(1, |rhs|)`.
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub slack_min: f64,
    pub slack_max: f64,
    pub samples: usize,
    pub pass: bool,
    pub notes: Vec<String>,
}

impl CheckRecord {
    fn new(name: &str) -> Self {
        CheckRecord {
            name: name.into(),
            slack_min: f64::INFINITY,
            slack_max: f64::NEG_INFINITY,
            samples: 0,
            pass: true,
            notes: Vec::new(),
        }
    }

    fn add(&mut self, slack: f64, scale: f64, tol: f64) {
        self.slack_min = self.slack_min.min(slack);
        self.slack_max = self.slack_max.max(slack);
        self.samples += 1;
        if !(slack >= -tol * scale.abs().max(1.0)) {
            self.pass = false;
        }
    }
}

/// Expands `all` and comma-separated names, rejecting unknown checks.
pub fn select(spec: &str) -> Result<Vec<&'static str>, String> {
    let mut out = Vec::new();
    for name in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if name == "all" {
            out.extend_from_slice(CHECKS);
        } else {
            match CHECKS.iter().find(|c| **c == name) {
                Some(c) => out.push(*c),
                None => return Err(format!("unknown check `{name}` (expected all or one of: {})", CHECKS.join(", "))),
            }
        }
    }
    out.dedup();
    if out.is_empty() {
        return Err("no checks selected".into());
    }
    Ok(out)
}

fn random_fn(space: &Arc<MeasureSpace>, rng: &mut ChaCha8Rng) -> MeasurableFn {
    let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
    MeasurableFn::random_with(space, rng, -1.0, 1.0).scale(scale)
}

pub fn run_suite(
    phi: &NStarFunction,
    space: &Arc<MeasureSpace>,
    checks: &[&str],
    cfg: &SuiteConfig,
) -> nstar_core::Result<Vec<CheckRecord>> {
    let needs_k = checks.iter().any(|c| matches!(*c, "quasi_triangle" | "modular_bound"));
    let phi = match (needs_k, phi.delta2()) {
        (true, None) => {
            let cert = delta2_auto(phi, &log_grid(1e-3, 1e3, 25))?;
            phi.clone().with_delta2(cert)
        }
        _ => phi.clone(),
    };
    let needs_hat = checks.iter().any(|c| matches!(*c, "young" | "product_identity" | "intersection"));
    let hat = needs_hat.then(|| phi.complementary());
    let tol = cfg.tol;

    let mut records = Vec::with_capacity(checks.len());
    for (index, name) in checks.iter().enumerate() {
        let mut rng =
            ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64));
        let mut rec = CheckRecord::new(name);
        match *name {
            "quasi_triangle" => {
                let cert = phi.delta2().expect("attached above");
                if cert.status == Delta2Status::PerXOnly {
                    rec.notes.push(format!("k = {} is the largest per-x solution on the grid", cert.k()));
                }
                for _ in 0..cfg.samples {
                    let (f, g) = (random_fn(space, &mut rng), random_fn(space, &mut rng));
                    let r = quasi_triangle_check(&phi, &f, &g)?;
                    rec.add(r.k - r.ratio, r.k, tol);
                }
            }
            "young" => {
                let hat = hat.as_ref().expect("built above");
                for _ in 0..cfg.samples {
                    let (f, g) = (random_fn(space, &mut rng), random_fn(space, &mut rng));
                    let r = young_type_check(&phi, hat, &f, &g)?;
                    rec.add(r.slack, r.rhs, tol);
                }
            }
            "reversed_jensen" => {
                for _ in 0..cfg.samples {
                    let r = reversed_jensen_check(&phi, &random_fn(space, &mut rng))?;
                    rec.add(r.slack, r.rhs, tol);
                }
            }
            "l1_embedding" => {
                for _ in 0..cfg.samples {
                    let r = l1_embedding_bound_check(&phi, &random_fn(space, &mut rng))?;
                    rec.add(r.slack, r.rhs, tol);
                }
            }
            "modular_bound" => {
                let mut skipped = 0;
                for _ in 0..cfg.samples {
                    let f = random_fn(space, &mut rng);
                    let c = rng.gen_range(0.5..20.0);
                    let r = modular_to_norm_bound_check(&phi, &f, c)?;
                    if r.skipped {
                        skipped += 1;
                    } else {
                        rec.add(r.bound - r.norm, r.bound, tol);
                    }
                }
                if skipped > 0 {
                    rec.notes.push(format!("{skipped} samples had modular >= c and were skipped"));
                }
            }
            "product_identity" => {
                let hat = hat.as_ref().expect("built above");
                let alphas: Vec<f64> = (0..cfg.samples.max(1)).map(|_| 10f64.powf(rng.gen_range(-4.0..4.0))).collect();
                let r = product_identity_check(&phi, hat, &alphas);
                for p in &r.points {
                    rec.add((p.product - p.alpha).min(2.0 * p.alpha - p.product), p.alpha, tol);
                }
                if !r.product_pass {
                    rec.pass = false;
                }
                let grid = log_grid(1e-4, 1e4, 17);
                let diag = product_identity_check(&phi, hat, &grid);
                if let Some(alpha) = diag.sum_counterexamples.first() {
                    let p = diag.points.iter().find(|p| p.alpha == *alpha).expect("listed point");
                    rec.notes.push(format!(
                        "sum form alpha < Phi + Phi_hat <= 2 alpha fails at {} of {} grid points, e.g. alpha = {:.6e}: sum = {:.6e} (diagnostic only)",
                        diag.sum_counterexamples.len(),
                        grid.len(),
                        p.alpha,
                        p.sum
                    ));
                }
            }
            "intersection" => {
                let hat = hat.as_ref().expect("built above");
                for _ in 0..cfg.samples {
                    let r = intersection_check(&phi, hat, &random_fn(space, &mut rng));
                    rec.add((r.product_integral - r.l1).min(2.0 * r.l1 - r.product_integral), r.l1, tol);
                    if !r.pass {
                        rec.pass = false;
                    }
                }
            }
            "convergence" => {
                const THRESHOLD: f64 = 1e-3;
                for _ in 0..cfg.samples {
                    // unscaled targets: level 20 truncates at height 20
                    let f = MeasurableFn::random_with(space, &mut rng, -1.0, 1.0);
                    let seq: Vec<_> = (1..=20).map(|n| simple_approximation(&f, n)).collect();
                    let r = convergence_equivalence(&phi, &seq, &f, THRESHOLD)?;
                    let (d, q) = *r.pairs.last().expect("twenty levels");
                    rec.add(THRESHOLD - d.max(q), THRESHOLD, f64::INFINITY);
                    if !r.verdict {
                        rec.pass = false;
                        rec.notes.push(format!("metric {d:e} and norm {q:e} disagree about the threshold {THRESHOLD}"));
                    }
                    if !(r.metric_monotone && r.norm_monotone) {
                        rec.pass = false;
                        rec.notes.push("a trajectory was not monotone".into());
                    }
                }
            }
            other => unreachable!("unvalidated check `{other}`"),
        }
        records.push(rec);
    }
    Ok(records)
}
