//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use dmy_core::counterexample::{
    run_pipeline, verify_counterexample, CounterexampleConfig, PhiProfile,
};
use dmy_core::dynamics::{
    basin_raster, classify_omega, dissipativity_bound, DissipativityConfig, OmegaConfig, OmegaKind,
    CODE_ORIGIN,
};
use dmy_core::sampling::{log_space, Region, Sampling};
use dmy_core::spectral::{eig2, sample_norm_sup, spectrum_over, Strategy};
use dmy_core::{compose, fd_jacobian, iterate, Mat2, PlanarMap, Point2};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn szlenk_period_four() -> Outcome {
    let f = ok(PlanarMap::szlenk(1.01))?;
    let p = Point2::new(10.0, 0.0);
    let q = ok(iterate(&f, p, 4))?.points[4];
    let err = q.distance(p);
    ensure(err < 1e-9, || format!("|F^4(10,0) - (10,0)| = {err:e}"))?;
    Ok(format!("|F^4(10,0) - (10,0)| = {err:e}"))
}

fn szlenk_spectrum_field() -> Outcome {
    let k = 1.01;
    let f = ok(PlanarMap::szlenk(k))?;
    let bound = 3f64.sqrt() * k / 2.0 + 1e-12;
    let sampling = Sampling::grid(ok(Region::square(30.0))?, 201, 201);
    let report = ok(spectrum_over(&f, &sampling))?;
    let max = report.max_modulus.map(|m| m.value).unwrap_or(f64::NAN);
    ensure(report.samples == 40401 && report.flagged == 0, || {
        "grid incomplete".into()
    })?;
    ensure(max < bound, || format!("max modulus {max} >= {bound}"))?;
    let mut axis = 0;
    for p in sampling.points() {
        let e = eig2(&ok(f.jacobian(p))?);
        if p.x * p.y == 0.0 {
            axis += 1;
            ensure(e.max_modulus() <= 1e-12, || {
                format!("nonzero eigenvalue on axis at {p:?}: {e:?}")
            })?;
        } else if (p.x * p.y).abs() > 1e-9 {
            ensure(!e.is_real() && e.lambda1 == e.lambda2.conj(), || {
                format!("real spectrum at {p:?}: {e:?}")
            })?;
        }
    }
    ensure(axis == 401, || {
        format!("expected 401 axis samples, got {axis}")
    })?;
    Ok(format!(
        "max |lambda| = {max:.10} < {bound:.10}, {axis} axis samples with lambda = 0"
    ))
}

fn jacobian_oracle() -> Outcome {
    let bundle = ok(dmy_core::counterexample::build_f(
        1.01,
        0.005,
        0.05,
        &CounterexampleConfig::default(),
    ))?;
    let linear = ok(PlanarMap::linear(Mat2::new(0.3, -1.2, 0.7, 0.9)))?;
    let maps = vec![
        linear.clone(),
        ok(PlanarMap::szlenk(1.01))?,
        ok(PlanarMap::ga(1.01, 0.005))?,
        bundle.h.clone(),
        compose(&ok(PlanarMap::szlenk(1.1))?, &linear),
        bundle.f.clone(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = Point2::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
        for map in &maps {
            let j = ok(map.jacobian(p))?;
            let fd = ok(fd_jacobian(map, p, 1e-6))?;
            let scale = j.max_abs().max(1e-3);
            let err = (j - fd).max_abs();
            ensure(err < (1e-6 * j.max_abs()).max(1e-9), || {
                format!("{} at {p:?}: error {err:e}", map.describe())
            })?;
            worst = worst.max(err / scale);
        }
    }
    Ok(format!(
        "6 variants x 1000 points, worst relative error {worst:.2e}"
    ))
}

fn spectrum_shift() -> Outcome {
    let (k, a) = (1.01, 0.005);
    let f = ok(PlanarMap::szlenk(k))?;
    let g = ok(PlanarMap::ga(k, a))?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = Point2::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
        let ef = eig2(&ok(f.jacobian(p))?);
        let eg = eig2(&ok(g.jacobian(p))?);
        for (lf, lg) in ef.as_array().iter().zip(eg.as_array()) {
            let d = (lf.re - a - lg.re).abs().max((lf.im - lg.im).abs());
            worst = worst.max(d);
        }
    }
    ensure(worst <= 1e-10, || {
        format!("max componentwise deviation {worst:e}")
    })?;
    Ok(format!("max componentwise deviation {worst:.2e}"))
}

fn counterexample_pipeline() -> Outcome {
    let cfg = CounterexampleConfig::default();
    let result = ok(run_pipeline(1.01, 0.005, 0.05, &cfg))?;
    let report = &result.report;
    for c in &report.checks {
        ensure(c.passed, || format!("{} failed: {}", c.name, c.detail))?;
    }
    ensure(report.checks.len() == 6 && report.passed, || {
        "verdict false".into()
    })?;
    let sr = report.check("sr-bound").ok_or("missing sr-bound")?;
    ensure(sr.samples >= 10_000 && sr.extreme <= 0.95 + 1e-9, || {
        format!("{sr:?}")
    })?;
    let tail = report
        .check("tail-contraction")
        .ok_or("missing tail-contraction")?;
    ensure(tail.extreme <= 0.5, || format!("{tail:?}"))?;
    let phi = report.check("phi-envelope").ok_or("missing phi-envelope")?;
    ensure(phi.samples >= 10_000, || format!("{phi:?}"))?;
    let orbit = report.orbit.as_ref().ok_or("no orbit")?;
    ensure(
        orbit.residual < 1e-10 && orbit.distance_from_unit_circle() >= 1e-3,
        || format!("{orbit:?}"),
    )?;
    ensure(
        report
            .check("origin-fixed")
            .is_some_and(|c| c.extreme == 0.0),
        || "origin moved".into(),
    )?;
    // re-verification of the same bundle is identical
    ensure(
        ok(verify_counterexample(&result.bundle, &cfg))? == *report,
        || "re-verification differs".into(),
    )?;
    Ok(format!(
        "6/6 checks, sr(Df) <= {:.4} over {} samples, tail ratio {:.4}, multipliers {:.4} / {:.1e}",
        sr.extreme,
        sr.samples,
        tail.extreme,
        orbit.multipliers.lambda1.norm(),
        orbit.multipliers.lambda2.norm()
    ))
}

fn phi_profile() -> Outcome {
    let p = ok(PhiProfile::new(20.0, 2.0, 0.05))?;
    let tail = 20.0 * 121f64.exp();
    ensure((p.tail_radius - tail).abs() <= 1e-12 * tail, || {
        format!("tail radius {}", p.tail_radius)
    })?;
    for r in [0.0, 1e-3, 1.0, 10.0, 19.999, 20.0] {
        ensure(p.eval(r) == 1.0, || format!("phi({r}) = {}", p.eval(r)))?;
    }
    for r in [tail, tail * 1.5, 1e54, 1e60] {
        ensure(p.eval(r) == 0.25, || format!("phi({r:e}) = {}", p.eval(r)))?;
    }
    let radii = log_space(1e-3, 1e60, 10_000);
    let mut prev = f64::INFINITY;
    let mut worst: f64 = 0.0;
    for &r in &radii {
        let v = p.eval(r);
        ensure(v <= prev, || format!("phi increases at r = {r:e}"))?;
        prev = v;
        worst = worst.max(p.deriv_times_r(r).abs());
    }
    ensure(worst <= 0.00625, || format!("max |phi'(r) r| = {worst}"))?;
    Ok(format!(
        "flat on [0,20], floor 0.25 from 20e^121, monotone, max |phi' r| = {worst}"
    ))
}

fn omega_desk_checks() -> Outcome {
    let cfg = OmegaConfig::default();
    let linear = ok(PlanarMap::linear(Mat2::diag(0.5, 0.3)))?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let p = Point2::new(rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0));
        let v = ok(classify_omega(&linear, p, &cfg))?;
        ensure(v.kind == OmegaKind::ConvergesToOrigin, || {
            format!("{p:?}: {v:?}")
        })?;
    }
    let f = ok(PlanarMap::szlenk(1.01))?;
    let cycle = ok(classify_omega(&f, Point2::new(10.0, 0.0), &cfg))?;
    ensure(
        matches!(cycle.kind, OmegaKind::Periodic { period: 4, .. }),
        || format!("(10,0): {cycle:?}"),
    )?;
    let out = ok(classify_omega(&f, Point2::new(20.0, 0.0), &cfg))?;
    let OmegaKind::Escaping { first_escape } = out.kind else {
        return Err(format!("(20,0): {out:?}"));
    };
    Ok(format!(
        "100/100 linear seeds to origin, (10,0) period 4, (20,0) escapes at step {first_escape}"
    ))
}

fn dissipativity() -> Outcome {
    let cfg = DissipativityConfig::default();
    let expand = ok(PlanarMap::linear(Mat2::diag(2.0, 2.0)))?;
    let b = ok(dissipativity_bound(&expand, 20.0, 0.5, &cfg))?;
    ensure(b.m_sampled == 2.0 && b.s0 == 120.0 && b.mu == 0.75, || {
        format!("{b:?}")
    })?;
    let bundle = ok(dmy_core::counterexample::build_f(
        1.01,
        0.005,
        0.05,
        &CounterexampleConfig::default(),
    ))?;
    let t = ok(dissipativity_bound(
        &bundle.f,
        bundle.profile.tail_radius,
        0.5,
        &cfg,
    ))?;
    ensure(t.passed && t.mu == 0.75, || format!("{t:?}"))?;
    Ok(format!(
        "diag(2,2): S0 = {}, mu = {}; f outside r_tail: mu = {}, worst |f(p)|/|p| = {:.4}",
        b.s0, b.mu, t.mu, t.contraction_worst_ratio
    ))
}

fn run_dmy(args: &[&str]) -> Result<(), String> {
    let out = ok(Command::new(env!("CARGO_BIN_EXE_dmy")).args(args).output())?;
    ensure(out.status.code() == Some(0), || {
        format!(
            "dmy {args:?} exited {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn determinism() -> Outcome {
    let dir = ok(tempfile::tempdir())?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let (a, b) = (path("a.pgm"), path("b.pgm"));
    for out in [&a, &b] {
        run_dmy(&[
            "basin",
            "--map",
            "counterexample",
            "--half-width",
            "15",
            "--resolution",
            "64x64",
            "--out",
            out,
        ])?;
    }
    let (pa, pb) = (ok(fs::read(&a))?, ok(fs::read(&b))?);
    ensure(pa == pb, || "basin PGMs differ".into())?;
    let (ja, jb) = (path("a.json"), path("b.json"));
    for out in [&ja, &jb] {
        run_dmy(&[
            "counterexample",
            "--k",
            "1.01",
            "--a",
            "0.005",
            "--out",
            out,
        ])?;
    }
    let read = |p: &str| -> Result<Value, String> {
        ok(serde_json::from_str(&ok(fs::read_to_string(p))?))
    };
    let (va, vb) = (read(&ja)?, read(&jb)?);
    ensure(
        va["result"]["verification"] == vb["result"]["verification"],
        || "verdicts differ".into(),
    )?;
    ensure(va["passed"] == true && vb["passed"] == true, || {
        "counterexample verdict false".into()
    })?;
    Ok(format!(
        "basin PGM identical ({} bytes), counterexample verdicts identical",
        pa.len()
    ))
}

fn global_contraction() -> Outcome {
    let m = ok(PlanarMap::linear(Mat2::diag(0.6, 0.6)))?;
    let sup = ok(sample_norm_sup(
        &m,
        &ok(Region::square(100.0))?,
        &Strategy::Grid { nx: 101, ny: 101 },
    ))?;
    ensure(sup.value == 0.6, || format!("norm sup {}", sup.value))?;
    let grid = ok(basin_raster(&m, 100.0, (64, 64), &OmegaConfig::default()))?;
    let origin = grid.count(CODE_ORIGIN);
    ensure(origin == 64 * 64, || {
        format!("only {origin} of 4096 cells in the origin basin")
    })?;
    Ok(format!(
        "sup ||Df|| = {} < 1, {origin}/4096 cells in the origin basin",
        sup.value
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "Szlenk period-4 exactness",
            szlenk_period_four,
            Duration::from_millis(1),
        ),
        (
            "Szlenk spectrum field",
            szlenk_spectrum_field,
            Duration::from_secs(5),
        ),
        (
            "Jacobian oracle agreement",
            jacobian_oracle,
            Duration::from_secs(1),
        ),
        ("spectrum shift identity", spectrum_shift, Duration::MAX),
        (
            "counterexample pipeline",
            counterexample_pipeline,
            Duration::from_secs(60),
        ),
        ("phi profile", phi_profile, Duration::MAX),
        (
            "omega desk checks",
            omega_desk_checks,
            Duration::from_secs(1),
        ),
        ("dissipativity arithmetic", dissipativity, Duration::MAX),
        ("determinism", determinism, Duration::MAX),
        ("global contraction", global_contraction, Duration::MAX),
    ];
    let mut failures = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if outcome.is_ok() && elapsed > *budget {
            outcome = Err(format!("took {elapsed:?}, budget {budget:?}"));
        }
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS {name} ({elapsed:.2?}): {detail}",
                i + 1
            ),
            Err(detail) => {
                failures += 1;
                println!(
                    "criterion {:>2} FAIL {name} ({elapsed:.2?}): {detail}",
                    i + 1
                );
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
