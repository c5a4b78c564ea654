use std::sync::OnceLock;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dmy_core::counterexample::{build_f, CounterexampleBundle, CounterexampleConfig, PhiProfile};
use dmy_core::dynamics::{
    basin_raster, classify_omega, find_periodic, multipliers, ray_samples, verify_invariant_ray,
    NewtonConfig, OmegaConfig, OmegaKind,
};
use dmy_core::sampling::{Region, Sampling};
use dmy_core::spectral::{eig2, operator_norm, spectral_radius, spectrum_over};
use dmy_core::{compose, fd_jacobian, iterate, Mat2, PlanarMap, Point2};

fn desk() -> &'static CounterexampleBundle {
    static BUNDLE: OnceLock<CounterexampleBundle> = OnceLock::new();
    BUNDLE.get_or_init(|| build_f(1.01, 0.005, 0.05, &CounterexampleConfig::default()).unwrap())
}

fn variants() -> Vec<PlanarMap> {
    let profile = PhiProfile::new(20.0, 2.0, 0.05).unwrap();
    let shear = PlanarMap::linear(Mat2::new(0.3, -1.2, 0.7, 0.9)).unwrap();
    vec![
        shear.clone(),
        PlanarMap::szlenk(1.01).unwrap(),
        PlanarMap::ga(1.01, 0.005).unwrap(),
        PlanarMap::radial(profile),
        compose(&PlanarMap::szlenk(1.1).unwrap(), &shear),
        desk().f.clone(),
    ]
}

fn point(bound: f64) -> impl Strategy<Value = Point2> {
    (-bound..bound, -bound..bound).prop_map(|(x, y)| Point2::new(x, y))
}

fn max_abs_diff(a: &Mat2, b: &Mat2) -> f64 {
    (*a - *b).max_abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn analytic_jacobian_matches_central_differences(p in point(50.0)) {
        for map in variants() {
            let j = map.jacobian(p).unwrap();
            let fd = fd_jacobian(&map, p, 1e-6).unwrap();
            let tol = (1e-6 * j.max_abs()).max(1e-9);
            prop_assert!(max_abs_diff(&j, &fd) < tol, "{} at {:?}: {:?} vs {:?}", map.describe(), p, j, fd);
        }
    }

    #[test]
    fn ga_is_szlenk_minus_shift(p in point(100.0), k in 1.0001f64..1.15, a in 0.0001f64..0.99) {
        let f = PlanarMap::szlenk(k).unwrap();
        let g = PlanarMap::ga(k, a).unwrap();
        let fp = f.eval(p).unwrap();
        let gp = g.eval(p).unwrap();
        prop_assert_eq!(gp, Point2::new(fp.x - a * p.x, fp.y - a * p.y));
        prop_assert_eq!(g.jacobian(p).unwrap(), f.jacobian(p).unwrap().shift_diag(a));
    }

    #[test]
    fn origin_is_fixed(k in 1.0001f64..1.15, a in 0.0001f64..0.99) {
        for map in [PlanarMap::szlenk(k).unwrap(), PlanarMap::ga(k, a).unwrap()] {
            prop_assert_eq!(map.eval(Point2::ORIGIN).unwrap(), Point2::ORIGIN);
        }
    }

    #[test]
    fn compose_is_associative(p in point(20.0)) {
        let a = PlanarMap::ga(1.05, 0.1).unwrap();
        let b = PlanarMap::linear(Mat2::rotation(0.7).scale(0.9)).unwrap();
        let c = PlanarMap::szlenk(1.1).unwrap();
        let left = compose(&compose(&a, &b), &c).eval(p).unwrap();
        let right = compose(&a, &compose(&b, &c)).eval(p).unwrap();
        prop_assert!(left.distance(right) <= 1e-12 * left.norm().max(1.0));
    }

    #[test]
    fn identity_is_neutral_for_compose(p in point(50.0)) {
        let id = PlanarMap::identity();
        for map in variants() {
            let q = map.eval(p).unwrap();
            prop_assert_eq!(compose(&id, &map).eval(p).unwrap(), q);
            prop_assert_eq!(compose(&map, &id).eval(p).unwrap(), q);
            prop_assert_eq!(compose(&id, &map).jacobian(p).unwrap(), map.jacobian(p).unwrap());
        }
    }

    #[test]
    fn spectrum_shifts_by_a(p in point(50.0), a in 0.0001f64..0.99) {
        let f = eig2(&PlanarMap::szlenk(1.01).unwrap().jacobian(p).unwrap());
        let g = eig2(&PlanarMap::ga(1.01, a).unwrap().jacobian(p).unwrap());
        for (lf, lg) in f.as_array().iter().zip(g.as_array()) {
            prop_assert!((lf.re - a - lg.re).abs() <= 1e-10);
            prop_assert!((lf.im - lg.im).abs() <= 1e-10);
        }
    }

    #[test]
    fn squash_is_identity_on_inner_disc(r in 0.0f64..=20.0, theta in 0.0f64..std::f64::consts::TAU) {
        let h = &desk().h;
        let p = Point2::from_polar(r.min(desk().inner_radius()), theta);
        prop_assert_eq!(h.eval(p).unwrap(), p);
    }

    #[test]
    fn squash_scales_norm_by_phi(log_r in -3.0f64..120.0, theta in 0.0f64..std::f64::consts::TAU) {
        let b = desk();
        let p = Point2::from_polar(10f64.powf(log_r / 2.3), theta);
        let q = b.h.eval(p).unwrap();
        let expected = b.profile.eval(p.norm()) * p.norm();
        prop_assert!((q.norm() - expected).abs() <= 1e-14 * expected);
    }

    #[test]
    fn omega_verdict_is_stable_under_larger_budget(p in point(15.0)) {
        let map = &desk().f;
        let short = OmegaConfig { max_iterations: 300, ..OmegaConfig::default() };
        let long = OmegaConfig { max_iterations: 3000, ..OmegaConfig::default() };
        let a = classify_omega(map, p, &short).unwrap();
        let b = classify_omega(map, p, &long).unwrap();
        if a.kind != OmegaKind::Undecided {
            prop_assert_eq!(a, b);
        }
    }
}

#[test]
fn eig2_identities_over_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100_000 {
        let m = Mat2::new(
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-10.0..10.0),
        );
        let e = eig2(&m);
        let sum = e.lambda1 + e.lambda2;
        let prod = e.lambda1 * e.lambda2;
        let scale = m.max_abs().max(1.0);
        assert!(
            (sum.re - m.trace()).abs() <= 1e-10 * scale && sum.im.abs() <= 1e-10 * scale,
            "{m:?}"
        );
        assert!(
            (prod.re - m.det()).abs() <= 1e-10 * scale * scale
                && prod.im.abs() <= 1e-10 * scale * scale,
            "{m:?}"
        );
        assert!(spectral_radius(&m) <= operator_norm(&m) + 1e-12, "{m:?}");
    }
}

#[test]
fn multipliers_do_not_depend_on_anchor_point() {
    let map = &desk().f;
    let orbit = find_periodic(map, 4, Point2::new(10.0, 0.0), &NewtonConfig::default()).unwrap();
    let base = orbit.multipliers;
    for shift in 1..4 {
        let mut rotated = orbit.points.clone();
        rotated.rotate_left(shift);
        let m = multipliers(map, &rotated).unwrap();
        for (a, b) in base.as_array().iter().zip(m.as_array()) {
            assert!((a - b).norm() <= 1e-8, "{base:?} vs {m:?}");
        }
    }
}

#[test]
fn newton_orbit_closes_under_eval() {
    for (map, seed) in [
        (desk().f.clone(), Point2::new(10.0, 0.0)),
        (PlanarMap::szlenk(1.01).unwrap(), Point2::new(9.5, 0.1)),
        (PlanarMap::ga(1.01, 0.005).unwrap(), Point2::new(10.0, 0.0)),
    ] {
        let o = find_periodic(&map, 4, seed, &NewtonConfig::default()).unwrap();
        assert!(o.residual < 1e-10);
        for i in 0..4 {
            let next = map.eval(o.points[i]).unwrap();
            assert!(
                next.distance(o.points[(i + 1) % 4]) <= 10.0 * o.residual + 1e-12,
                "{o:?}"
            );
        }
    }
}

#[test]
fn long_run_iteration_shadows_the_saddle_cycle() {
    let map = &desk().f;
    let o = find_periodic(map, 4, Point2::new(10.0, 0.0), &NewtonConfig::default()).unwrap();
    assert!(o.hyperbolic);
    let growth = o.multipliers.max_modulus();
    let run = iterate(map, o.points[0], 40_000).unwrap();
    assert!(!run.escaped);
    for (n, p) in run.points.iter().enumerate() {
        let guard = 1e-6 * growth.powf(n as f64 / 4.0).max(1.0);
        let dev = p.distance(o.points[n % 4]);
        assert!(dev <= guard, "step {n}: deviation {dev} > {guard}");
        if n < 400 {
            assert!(dev <= 1e-6, "step {n}: {dev}");
        }
    }
}

#[test]
fn reports_and_basins_are_bitwise_reproducible() {
    let map = &desk().f;
    let sampling = Sampling::Multi {
        parts: vec![
            Sampling::random(Region::square(40.0).unwrap(), 5000, 3),
            Sampling::log_polar(1e-3, 1e50, 300, 16),
        ],
    };
    let a = serde_json::to_string(&spectrum_over(map, &sampling).unwrap()).unwrap();
    let b = serde_json::to_string(&spectrum_over(map, &sampling).unwrap()).unwrap();
    assert_eq!(a, b);

    let cfg = OmegaConfig::default();
    let g1 = basin_raster(&PlanarMap::szlenk(1.01).unwrap(), 30.0, (48, 40), &cfg).unwrap();
    let g2 = basin_raster(&PlanarMap::szlenk(1.01).unwrap(), 30.0, (48, 40), &cfg).unwrap();
    assert_eq!(g1.cells, g2.cells);
}

#[test]
fn axis_is_not_an_invariant_ray_of_f() {
    let verdict = verify_invariant_ray(&desk().f, &ray_samples(0.0, 100.0, 200), 1e-9).unwrap();
    assert!(!verdict.passed);
    assert!(verdict.max_deviation > 1.0);

    let half = PlanarMap::linear(Mat2::diag(0.5, 0.5)).unwrap();
    let verdict = verify_invariant_ray(&half, &ray_samples(0.0, 100.0, 200), 1e-9).unwrap();
    assert!(verdict.passed);
    assert_eq!(verdict.max_deviation, 0.0);
}
