use std::sync::Arc;

use nstar_core::lphi::{luxemburg_norm, metric, modular};
use nstar_core::measure::{MeasurableFn, MeasureSpace};
use nstar_core::nstar::{growth_factor, log_grid, DensityFunction, NStarFunction};
use nstar_core::quadrature::QuadConfig;
use proptest::prelude::*;

fn family(index: usize, p: f64) -> NStarFunction {
    match index % 4 {
        0 => NStarFunction::power(p).unwrap(),
        1 => NStarFunction::power_scaled(p).unwrap(),
        2 => NStarFunction::alpha_exp(1.0 / p).unwrap(),
        _ => NStarFunction::log_sqrt(),
    }
}

fn atoms_and_values() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..12).prop_flat_map(|n| {
        (
            prop::collection::vec(0.05f64..3.0, n),
            prop::collection::vec(-10.0f64..10.0, n),
            prop::collection::vec(-10.0f64..10.0, n),
            prop::collection::vec(-10.0f64..10.0, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn norm_is_absolutely_homogeneous(
        (masses, v, _, _) in atoms_and_values(), c in -50.0f64..50.0, fam in 0usize..4, p in 0.15f64..0.9
    ) {
        let phi = family(fam, p);
        let space = Arc::new(MeasureSpace::atomic(masses).unwrap());
        let f = MeasurableFn::new(&space, v).unwrap();
        let n = luxemburg_norm(&phi, &f).unwrap().value;
        let nc = luxemburg_norm(&phi, &f.scale(c)).unwrap().value;
        prop_assert!((nc - c.abs() * n).abs() <= 1e-9 * (1.0 + nc));
    }

    #[test]
    fn normalised_functions_lie_on_the_unit_sphere(
        (masses, v, _, _) in atoms_and_values(), fam in 0usize..4, p in 0.15f64..0.9
    ) {
        let phi = family(fam, p);
        let space = Arc::new(MeasureSpace::atomic(masses).unwrap());
        let f = MeasurableFn::new(&space, v).unwrap();
        prop_assume!(!f.is_zero());
        let n = luxemburg_norm(&phi, &f).unwrap().value;
        let rho = modular(&phi, &f.scale(1.0 / n)).value;
        prop_assert!((rho - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn metric_satisfies_the_triangle_inequality(
        (masses, a, b, c) in atoms_and_values(), fam in 0usize..4, p in 0.15f64..0.9
    ) {
        let phi = family(fam, p);
        let space = Arc::new(MeasureSpace::atomic(masses).unwrap());
        let (f, g, h) = (
            MeasurableFn::new(&space, a).unwrap(),
            MeasurableFn::new(&space, b).unwrap(),
            MeasurableFn::new(&space, c).unwrap(),
        );
        let direct = metric(&phi, &f, &h).unwrap();
        let via = metric(&phi, &f, &g).unwrap() + metric(&phi, &g, &h).unwrap();
        prop_assert!(direct <= via * (1.0 + 1e-12) + 1e-12);
        prop_assert_eq!(metric(&phi, &f, &g).unwrap(), metric(&phi, &g, &f).unwrap());
    }

    #[test]
    fn invert_undoes_eval(x in 0.0f64..1e3, fam in 0usize..4, p in 0.15f64..0.9) {
        let phi = family(fam, p);
        let back = phi.invert(phi.eval(x)).unwrap();
        prop_assert!((back - x).abs() <= 1e-9 * (1.0 + x));
    }

    #[test]
    fn young_inequality_pointwise(x in 0.0f64..100.0, b in 0.0f64..100.0, fam in 0usize..4, p in 0.15f64..0.9) {
        let phi = family(fam, p);
        let m = phi.inverse_nfunction();
        let conj = m.conjugate();
        // M = Φ⁻¹ explodes for exponential families; sample a through Φ so M(a) = x
        let a = phi.eval(x);
        let (ma, cb) = (m.eval(a), conj.eval(b));
        prop_assert!(a * b <= ma + cb + 1e-9 * (1.0 + a * b));
    }

    #[test]
    fn product_sandwich_pointwise(alpha in 1e-4f64..1e4, fam in 0usize..4, p in 0.15f64..0.9) {
        let phi = family(fam, p);
        let hat = phi.complementary();
        let prod = phi.eval(alpha) * hat.eval(alpha);
        prop_assert!(prod >= alpha * (1.0 - 1e-9) && prod <= 2.0 * alpha * (1.0 + 1e-9));
    }
}

#[test]
fn density_quadrature_matches_closed_forms() {
    let grid = log_grid(1e-6, 1e6, 25);
    let quad = QuadConfig::default();
    for phi in [
        NStarFunction::power(0.3).unwrap(),
        NStarFunction::power_scaled(0.5).unwrap(),
        NStarFunction::alpha_exp(1.5).unwrap(),
        NStarFunction::log_sqrt(),
    ] {
        let closed = phi.clone();
        let density = DensityFunction::new("closed-form density", true, move |t| closed.density(t));
        let numeric = NStarFunction::from_density(density, quad).unwrap();
        for &x in &grid {
            let (a, b) = (phi.eval(x), numeric.eval(x));
            assert!((a - b).abs() <= quad.tol * a, "{} at {x}: {a} vs {b}", phi.label());
        }
    }
}

#[test]
fn growth_factor_is_at_most_two() {
    let grid = log_grid(1e-6, 1e6, 61);
    for p in [0.1, 0.5, 0.9] {
        let c = growth_factor(&NStarFunction::power(p).unwrap(), &grid);
        assert!((c - 2f64.powf(p)).abs() <= 1e-10);
    }
    assert!(growth_factor(&NStarFunction::log_sqrt(), &grid) <= 2.0 + 1e-12);
    assert!(growth_factor(&NStarFunction::alpha_exp(3.0).unwrap(), &grid) <= 2.0 + 1e-12);
}
