use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_f, CounterexampleBundle, CounterexampleConfig, F_SR_BOUND};
use crate::dynamics::{find_periodic, NewtonConfig, PeriodicOrbit};
use crate::error::{DmyError, Result};
use crate::geometry::Point2;
use crate::sampling::{log_space, Sampling};
use crate::spectral::spectral_radius;

/// Largest radius used for tail checks.
pub const TAIL_CAP: f64 = 1e60;

/// Slack on the sampled spectral-radius bound.
pub const SR_SLACK: f64 = 1e-9;

/// Tail contraction ratio `|f(p)|/|p|` required beyond the tail radius.
pub const TAIL_RATIO: f64 = 0.5;

pub const ORBIT_RESIDUAL: f64 = 1e-10;

/// Required distance of each multiplier modulus from 1.
pub const MULTIPLIER_GAP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub samples: usize,
    /// The extreme value the verdict was decided on.
    pub extreme: f64,
    pub witness: Option<Point2>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub k: f64,
    pub a: f64,
    pub inner_radius: f64,
    pub c_raw: f64,
    pub c_used: f64,
    pub eps: f64,
    pub floor: f64,
    pub tail_radius: f64,
    pub checks: Vec<CheckRecord>,
    pub orbit: Option<PeriodicOrbit>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Index and value of the largest entry (first on ties).
fn argmax(values: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|(_, b)| v > b || v.is_nan()) {
            best = Some((i, v));
            if v.is_nan() {
                break;
            }
        }
    }
    best
}

fn check_origin(bundle: &CounterexampleBundle) -> CheckRecord {
    let (passed, extreme, detail) = match bundle.f.eval(Point2::ORIGIN) {
        Ok(q) => (
            q == Point2::ORIGIN,
            q.norm(),
            format!("f(0,0) = ({}, {})", q.x, q.y),
        ),
        Err(e) => (false, f64::NAN, e.to_string()),
    };
    CheckRecord {
        name: "origin-fixed".into(),
        passed,
        samples: 1,
        extreme,
        witness: (!passed).then_some(Point2::ORIGIN),
        detail,
    }
}

fn check_det_jh(bundle: &CounterexampleBundle, points: &[Point2]) -> CheckRecord {
    let dets: Vec<f64> = points
        .par_iter()
        .map(|p| bundle.h.jacobian(*p).map_or(f64::NAN, |j| j.det()))
        .collect();
    // minimise det by maximising -det
    let neg: Vec<f64> = dets.iter().map(|d| -d).collect();
    let (i, worst) = argmax(&neg).map_or((0, f64::NAN), |(i, v)| (i, -v));
    let passed = worst > 0.0;
    CheckRecord {
        name: "det-jh-positive".into(),
        passed,
        samples: points.len(),
        extreme: worst,
        witness: (!passed).then(|| points[i]),
        detail: format!("min det JH = {worst}"),
    }
}

fn check_sr(bundle: &CounterexampleBundle, points: &[Point2]) -> CheckRecord {
    let radii: Vec<f64> = points
        .par_iter()
        .map(|p| {
            bundle
                .f
                .jacobian(*p)
                .map_or(f64::NAN, |j| spectral_radius(&j))
        })
        .collect();
    let (i, worst) = argmax(&radii).unwrap_or((0, f64::NAN));
    let passed = worst <= F_SR_BOUND + SR_SLACK;
    CheckRecord {
        name: "sr-bound".into(),
        passed,
        samples: points.len(),
        extreme: worst,
        witness: Some(points[i]),
        detail: format!("max sampled sr(Df) = {worst} (bound {F_SR_BOUND})"),
    }
}

fn check_tail(bundle: &CounterexampleBundle, cfg: &CounterexampleConfig) -> CheckRecord {
    let r_tail = bundle.profile.tail_radius;
    if r_tail > TAIL_CAP {
        return CheckRecord {
            name: "tail-contraction".into(),
            passed: false,
            samples: 0,
            extreme: f64::NAN,
            witness: None,
            detail: format!("tail radius {r_tail:e} exceeds the sampling cap {TAIL_CAP:e}"),
        };
    }
    let points = Sampling::log_polar(r_tail, TAIL_CAP, cfg.tail_radii, cfg.tail_angles).points();
    let ratios: Vec<f64> = points
        .par_iter()
        .map(|p| bundle.f.eval(*p).map_or(f64::NAN, |q| q.norm() / p.norm()))
        .collect();
    let (i, worst) = argmax(&ratios).unwrap_or((0, f64::NAN));
    let passed = worst <= TAIL_RATIO;
    CheckRecord {
        name: "tail-contraction".into(),
        passed,
        samples: points.len(),
        extreme: worst,
        witness: Some(points[i]),
        detail: format!("max |f(p)|/|p| = {worst} over |p| in [{r_tail:e}, {TAIL_CAP:e}]"),
    }
}

fn check_orbit(bundle: &CounterexampleBundle) -> (CheckRecord, Option<PeriodicOrbit>) {
    let inner = bundle.inner_radius();
    let seed = Point2::new(inner / 2.0, 0.0);
    let cfg = NewtonConfig {
        tol: ORBIT_RESIDUAL,
        max_steps: 100,
    };
    match find_periodic(&bundle.f, 4, seed, &cfg) {
        Ok(orbit) => {
            let gap = orbit.distance_from_unit_circle();
            let inside = orbit
                .points
                .iter()
                .all(|p| p.norm() > 0.0 && p.norm() < inner);
            let p0 = orbit.points[0];
            let minimal = orbit.points[1..]
                .iter()
                .all(|p| p.distance(p0) > 1e-6 * p0.norm());
            let passed =
                orbit.residual < ORBIT_RESIDUAL && gap >= MULTIPLIER_GAP && inside && minimal;
            let record = CheckRecord {
                name: "period-4-orbit".into(),
                passed,
                samples: 4,
                extreme: orbit.residual,
                witness: Some(p0),
                detail: format!(
                    "residual {:e}, multiplier moduli {} and {}, gap from unit circle {gap}, inside punctured R-ball: {inside}, minimal period 4: {minimal}",
                    orbit.residual,
                    orbit.multipliers.lambda1.norm(),
                    orbit.multipliers.lambda2.norm()
                ),
            };
            (record, Some(orbit))
        }
        Err(e) => (
            CheckRecord {
                name: "period-4-orbit".into(),
                passed: false,
                samples: 0,
                extreme: f64::NAN,
                witness: Some(seed),
                detail: format!("Newton search failed: {e}"),
            },
            None,
        ),
    }
}

fn check_phi(bundle: &CounterexampleBundle, cfg: &CounterexampleConfig) -> CheckRecord {
    let p = &bundle.profile;
    let budget = p.eps / 8.0;
    let mut failures: Vec<String> = Vec::new();
    let mut witness = None;
    let mut fail = |msg: String, r: f64, failures: &mut Vec<String>| {
        if witness.is_none() {
            witness = Some(Point2::new(r, 0.0));
        }
        failures.push(msg);
    };

    if !(p.eps > 0.0 && p.eps < 1.0 / (8.0 * p.norm_bound)) {
        fail(
            format!("eps {} outside (0, 1/(8C))", p.eps),
            0.0,
            &mut failures,
        );
    }
    let mut radii = vec![0.0];
    radii.extend(log_space(1e-3, TAIL_CAP, cfg.phi_samples));
    let mut prev = f64::INFINITY;
    let mut worst_slope: f64 = 0.0;
    for &r in &radii {
        let v = p.eval(r);
        let s = p.deriv_times_r(r);
        worst_slope = worst_slope.max(s.abs());
        if !(p.floor..=1.0).contains(&v) {
            fail(
                format!("phi({r:e}) = {v} outside [floor, 1]"),
                r,
                &mut failures,
            );
        }
        if r <= p.inner_radius && v != 1.0 {
            fail(
                format!("phi({r:e}) = {v} != 1 inside the flat disc"),
                r,
                &mut failures,
            );
        }
        if r >= p.tail_radius && v != p.floor {
            fail(
                format!("phi({r:e}) = {v} != floor beyond the tail radius"),
                r,
                &mut failures,
            );
        }
        if v > prev {
            fail(format!("phi increases at r = {r:e}"), r, &mut failures);
        }
        if s > 0.0 || s.abs() > budget {
            fail(
                format!("phi'(r)·r = {s} outside [-eps/8, 0] at r = {r:e}"),
                r,
                &mut failures,
            );
        }
        prev = v;
    }
    let passed = failures.is_empty();
    CheckRecord {
        name: "phi-envelope".into(),
        passed,
        samples: radii.len(),
        extreme: worst_slope,
        witness,
        detail: if passed {
            format!("max |phi'(r)·r| = {worst_slope} <= eps/8 = {budget}")
        } else {
            format!("{} violation(s); first: {}", failures.len(), failures[0])
        },
    }
}

/// Runs every check on `bundle`. Failed checks are verdicts, never errors.
pub fn verify_counterexample(
    bundle: &CounterexampleBundle,
    cfg: &CounterexampleConfig,
) -> Result<VerificationReport> {
    cfg.validate()?;
    let sweep = cfg.sweep_sampling(bundle.profile.tail_radius)?.points();
    let (orbit_record, orbit) = check_orbit(bundle);
    let checks = vec![
        check_origin(bundle),
        check_det_jh(bundle, &sweep),
        check_sr(bundle, &sweep),
        check_tail(bundle, cfg),
        orbit_record,
        check_phi(bundle, cfg),
    ];
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerificationReport {
        k: bundle.k,
        a: bundle.a,
        inner_radius: bundle.inner_radius(),
        c_raw: bundle.c_raw,
        c_used: bundle.c_used,
        eps: bundle.profile.eps,
        floor: bundle.profile.floor,
        tail_radius: bundle.profile.tail_radius,
        checks,
        orbit,
        passed,
    })
}

/// Outcome of [`run_pipeline`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    pub bundle: CounterexampleBundle,
    pub report: VerificationReport,
    /// Every `a` tried, in order; the last one is the bundle's.
    pub a_attempts: Vec<f64>,
}

/// How many times `a` is halved when the period-4 search fails.
pub const MAX_A_HALVINGS: usize = 8;

/// Builds and verifies `f`, halving `a` while the period-4 search fails.
pub fn run_pipeline(
    k: f64,
    a: f64,
    eps_init: f64,
    cfg: &CounterexampleConfig,
) -> Result<PipelineResult> {
    let mut a_attempts = Vec::new();
    let mut a_try = a;
    loop {
        a_attempts.push(a_try);
        let bundle = build_f(k, a_try, eps_init, cfg)?;
        let report = verify_counterexample(&bundle, cfg)?;
        let orbit_ok = report.orbit.is_some();
        if orbit_ok || a_attempts.len() > MAX_A_HALVINGS {
            return Ok(PipelineResult {
                bundle,
                report,
                a_attempts,
            });
        }
        a_try *= 0.5;
        if a_try <= 0.0 {
            return Err(DmyError::InvalidParameter(
                "a underflowed while halving".into(),
            ));
        }
    }
}
