//! Closed-form 2x2 eigenvalues and norms, and sampled surrogates for a
//! map's Jacobian spectrum `Spec(f) = ∪ₚ eig(Df_p)`.
//!
//! Every verdict here holds at sample resolution only; reports carry the
//! sampling layout so a caller can refine it.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DmyError, Result};
use crate::geometry::{Mat2, Point2};
use crate::map::PlanarMap;
use crate::sampling::{Region, Sampling};

/// Eigenvalues of a 2x2 real matrix.
///
/// Real pairs are ordered `lambda1 >= lambda2`; complex pairs have
/// `lambda1.im > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub lambda1: Complex64,
    pub lambda2: Complex64,
}

impl EigenPair {
    pub fn is_real(&self) -> bool {
        self.lambda1.im == 0.0 && self.lambda2.im == 0.0
    }

    pub fn max_modulus(&self) -> f64 {
        self.lambda1.norm().max(self.lambda2.norm())
    }

    pub fn min_modulus(&self) -> f64 {
        self.lambda1.norm().min(self.lambda2.norm())
    }

    pub fn as_array(&self) -> [Complex64; 2] {
        [self.lambda1, self.lambda2]
    }
}

/// `(a11 - a22)² + 4·a12·a21`, equal to `tr² - 4·det` but free of the
/// cancellation in that form and invariant under `M ↦ M - s·I`.
pub fn discriminant(m: &Mat2) -> f64 {
    let d = m.a11 - m.a22;
    d * d + 4.0 * m.a12 * m.a21
}

/// Real-eigenvalue test used by the samplers: `disc >= -1e-12·max(1, tr²)`.
pub fn has_real_spectrum(m: &Mat2) -> bool {
    let tr = m.trace();
    discriminant(m) >= -1e-12 * (tr * tr).max(1.0)
}

pub fn eig2(m: &Mat2) -> EigenPair {
    let tr = m.trace();
    let disc = discriminant(m);
    if disc >= 0.0 {
        let s = disc.sqrt();
        // larger-magnitude root first, then Vieta for the other
        let big = 0.5 * (tr + s.copysign(tr));
        let small = if big != 0.0 { m.det() / big } else { 0.0 };
        let (l1, l2) = if big >= small {
            (big, small)
        } else {
            (small, big)
        };
        EigenPair {
            lambda1: Complex64::new(l1, 0.0),
            lambda2: Complex64::new(l2, 0.0),
        }
    } else {
        let re = 0.5 * tr;
        let im = 0.5 * (-disc).sqrt();
        EigenPair {
            lambda1: Complex64::new(re, im),
            lambda2: Complex64::new(re, -im),
        }
    }
}

pub fn spectral_radius(m: &Mat2) -> f64 {
    eig2(m).max_modulus()
}

/// Largest singular value in closed form:
/// `σ_max = (sqrt((a11+a22)² + (a12-a21)²) + sqrt((a11-a22)² + (a12+a21)²)) / 2`.
pub fn operator_norm(m: &Mat2) -> f64 {
    let p = (m.a11 + m.a22).hypot(m.a12 - m.a21);
    let q = (m.a11 - m.a22).hypot(m.a12 + m.a21);
    0.5 * (p + q)
}

/// A real eigenvalue seen during a sweep, with the first sample that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealEigenvalue {
    pub value: f64,
    pub at: Point2,
}

/// An extreme value and where it was attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Located {
    pub value: f64,
    pub at: Point2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub map: String,
    pub sampling: Sampling,
    pub samples: usize,
    /// Samples where evaluation overflowed.
    pub flagged: usize,
    pub first_flagged_at: Option<Point2>,
    pub max_modulus: Option<Located>,
    pub min_real: Option<Located>,
    pub max_real: Option<Located>,
    /// Number of samples whose Jacobian has a real spectrum.
    pub real_count: usize,
    pub first_real_at: Option<Point2>,
    /// Distinct real eigenvalues, sorted ascending, each with its first location.
    pub real_eigenvalues: Vec<RealEigenvalue>,
    pub checks: Vec<Verdict>,
}

/// Outcome of one sampled check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    pub witness: Option<Point2>,
    pub witness_value: Option<f64>,
    pub detail: String,
}

impl Verdict {
    pub fn pass(check: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            passed: true,
            witness: None,
            witness_value: None,
            detail: detail.into(),
        }
    }

    pub fn fail(
        check: impl Into<String>,
        at: Option<Point2>,
        value: Option<f64>,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            check: check.into(),
            passed: false,
            witness: at,
            witness_value: value,
            detail: detail.into(),
        }
    }
}

enum SampleOutcome {
    Ok(Mat2),
    Flagged,
}

fn jacobians(map: &PlanarMap, points: &[Point2]) -> Result<Vec<SampleOutcome>> {
    points
        .par_iter()
        .map(|p| match map.jacobian(*p) {
            Ok(j) => Ok(SampleOutcome::Ok(j)),
            Err(DmyError::NumericOverflow { .. }) => Ok(SampleOutcome::Flagged),
            Err(e) => Err(e),
        })
        .collect()
}

fn keep_max(slot: &mut Option<Located>, value: f64, at: Point2) {
    if slot.is_none_or(|cur| value > cur.value) {
        *slot = Some(Located { value, at });
    }
}

fn keep_min(slot: &mut Option<Located>, value: f64, at: Point2) {
    if slot.is_none_or(|cur| value < cur.value) {
        *slot = Some(Located { value, at });
    }
}

/// Sweeps the Jacobian spectrum of `map` over `sampling`.
///
/// Jacobians are evaluated in parallel; the reduction runs in sample order so
/// ties resolve to the lowest sample index and the report is bitwise
/// reproducible.
pub fn spectrum_over(map: &PlanarMap, sampling: &Sampling) -> Result<SpectrumReport> {
    sampling.validate()?;
    let points = sampling.points();
    let outcomes = jacobians(map, &points)?;

    let mut report = SpectrumReport {
        map: map.describe(),
        sampling: sampling.clone(),
        samples: points.len(),
        flagged: 0,
        first_flagged_at: None,
        max_modulus: None,
        min_real: None,
        max_real: None,
        real_count: 0,
        first_real_at: None,
        real_eigenvalues: Vec::new(),
        checks: Vec::new(),
    };
    let mut reals: Vec<RealEigenvalue> = Vec::new();

    for (p, outcome) in points.iter().zip(outcomes) {
        let j = match outcome {
            SampleOutcome::Ok(j) => j,
            SampleOutcome::Flagged => {
                report.flagged += 1;
                report.first_flagged_at.get_or_insert(*p);
                continue;
            }
        };
        let pair = eig2(&j);
        keep_max(&mut report.max_modulus, pair.max_modulus(), *p);
        if has_real_spectrum(&j) {
            report.real_count += 1;
            report.first_real_at.get_or_insert(*p);
            for lambda in pair.as_array() {
                // near-real complex pairs count with their real part
                let value = lambda.re;
                keep_min(&mut report.min_real, value, *p);
                keep_max(&mut report.max_real, value, *p);
                reals.push(RealEigenvalue { value, at: *p });
            }
        }
    }

    // stable sort keeps first-seen location for equal values
    reals.sort_by(|a, b| a.value.total_cmp(&b.value));
    reals.dedup_by(|later, earlier| later.value == earlier.value);
    report.real_eigenvalues = reals;
    Ok(report)
}

/// Grid or seeded-random sweep over `region`.
pub fn sample_spectrum(
    map: &PlanarMap,
    region: &Region,
    strategy: &Strategy,
) -> Result<SpectrumReport> {
    spectrum_over(map, &strategy.over(*region))
}

/// Sampling strategy over a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    Grid { nx: usize, ny: usize },
    Random { n: usize, seed: u64 },
}

impl Strategy {
    pub fn over(&self, region: Region) -> Sampling {
        match *self {
            Strategy::Grid { nx, ny } => Sampling::grid(region, nx, ny),
            Strategy::Random { n, seed } => Sampling::random(region, n, seed),
        }
    }
}

fn flagged_verdict(report: &SpectrumReport, check: &str) -> Option<Verdict> {
    (report.flagged > 0).then(|| {
        Verdict::fail(
            check,
            report.first_flagged_at,
            None,
            format!(
                "{} sample(s) overflowed and could not be checked",
                report.flagged
            ),
        )
    })
}

/// All sampled eigenvalue moduli are `< radius`.
pub fn check_ball(report: &SpectrumReport, radius: f64) -> Verdict {
    let check = format!("ball:{radius}");
    if let Some(v) = flagged_verdict(report, &check) {
        return v;
    }
    match report.max_modulus {
        Some(m) if m.value >= radius => Verdict::fail(
            check,
            Some(m.at),
            Some(m.value),
            format!("eigenvalue modulus {} reaches radius {radius}", m.value),
        ),
        Some(m) => Verdict::pass(check, format!("max modulus {} < {radius}", m.value)),
        None => Verdict::pass(check, "no samples"),
    }
}

/// No sampled real eigenvalue lies in `[lo, hi)`.
pub fn check_interval_free(report: &SpectrumReport, lo: f64, hi: f64) -> Verdict {
    let check = format!("interval-free:{lo}:{hi}");
    if let Some(v) = flagged_verdict(report, &check) {
        return v;
    }
    match report
        .real_eigenvalues
        .iter()
        .find(|r| r.value >= lo && r.value < hi)
    {
        Some(r) => Verdict::fail(
            check,
            Some(r.at),
            Some(r.value),
            format!("real eigenvalue {} lies in [{lo}, {hi})", r.value),
        ),
        None => Verdict::pass(check, format!("no real eigenvalue in [{lo}, {hi})")),
    }
}

/// No sampled eigenvalue is real.
pub fn check_real_free(report: &SpectrumReport) -> Verdict {
    let check = "real-free";
    if let Some(v) = flagged_verdict(report, check) {
        return v;
    }
    if report.real_count == 0 {
        return Verdict::pass(check, "every sampled spectrum is a non-real conjugate pair");
    }
    let value = report
        .real_eigenvalues
        .iter()
        .find(|r| Some(r.at) == report.first_real_at)
        .map(|r| r.value);
    Verdict::fail(
        check,
        report.first_real_at,
        value,
        format!("{} sample(s) have real eigenvalues", report.real_count),
    )
}

/// Supremum of `‖Df_p‖` over a sample set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSup {
    pub value: f64,
    pub at: Point2,
    pub samples: usize,
    pub flagged: usize,
}

pub fn norm_sup_over(map: &PlanarMap, sampling: &Sampling) -> Result<NormSup> {
    sampling.validate()?;
    let points = sampling.points();
    let outcomes = jacobians(map, &points)?;
    let mut best: Option<Located> = None;
    let mut flagged = 0;
    for (p, outcome) in points.iter().zip(outcomes) {
        match outcome {
            SampleOutcome::Ok(j) => keep_max(&mut best, operator_norm(&j), *p),
            SampleOutcome::Flagged => flagged += 1,
        }
    }
    let best = best.unwrap_or(Located {
        value: 0.0,
        at: Point2::ORIGIN,
    });
    Ok(NormSup {
        value: best.value,
        at: best.at,
        samples: points.len(),
        flagged,
    })
}

pub fn sample_norm_sup(map: &PlanarMap, region: &Region, strategy: &Strategy) -> Result<NormSup> {
    norm_sup_over(map, &strategy.over(*region))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn eig2_examples() {
        let e = eig2(&Mat2::diag(2.0, 3.0));
        assert_eq!((e.lambda1.re, e.lambda2.re), (3.0, 2.0));
        assert!(e.is_real());

        let e = eig2(&Mat2::new(0.0, -1.0, 1.0, 0.0));
        assert_eq!(e.lambda1, Complex64::new(0.0, 1.0));
        assert_eq!(e.lambda2, Complex64::new(0.0, -1.0));

        let e = eig2(&Mat2::new(0.0, 0.0, 1.0, 0.0));
        assert_eq!(e.lambda1, Complex64::new(0.0, 0.0));
        assert_eq!(e.lambda2, Complex64::new(0.0, 0.0));

        let k = 1.01;
        let m = Mat2::new(2.0 * k / 9.0, -7.0 * k / 9.0, 7.0 * k / 9.0, -2.0 * k / 9.0);
        let e = eig2(&m);
        let im = k * 5f64.sqrt() / 3.0;
        assert!(close(e.lambda1, Complex64::new(0.0, im), 1e-15));
        assert!(close(e.lambda2, Complex64::new(0.0, -im), 1e-15));
        assert!((im - 0.752_81).abs() < 1e-5);
    }

    #[test]
    fn spectral_radius_examples() {
        assert_eq!(spectral_radius(&Mat2::IDENTITY), 1.0);
        assert_eq!(spectral_radius(&Mat2::new(0.0, -0.5, 0.5, 0.0)), 0.5);
        let k = 1.01;
        let m = Mat2::new(2.0 * k / 9.0, -7.0 * k / 9.0, 7.0 * k / 9.0, -2.0 * k / 9.0);
        let sr = spectral_radius(&m);
        assert!(sr < 3f64.sqrt() * k / 2.0);
        assert!((sr - 0.752_81).abs() < 1e-5);
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(operator_norm(&Mat2::diag(3.0, -4.0)), 4.0);
        assert_eq!(operator_norm(&Mat2::new(0.0, 1.0, 0.0, 0.0)), 1.0);
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((operator_norm(&Mat2::new(1.0, 1.0, 0.0, 1.0)) - golden).abs() < 1e-15);
    }

    #[test]
    fn operator_norm_matches_unit_vector_search() {
        // brute-force oracle: max |Mv| over 10⁶ unit vectors
        let m = Mat2::new(1.0, 1.0, 0.0, 1.0);
        let n = 1_000_000;
        let brute = (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                m.apply(Point2::from_polar(1.0, t)).norm()
            })
            .fold(0.0, f64::max);
        assert!((brute - operator_norm(&m)).abs() < 1e-6);
    }

    fn report_for(m: Mat2) -> SpectrumReport {
        let map = PlanarMap::linear(m).unwrap();
        sample_spectrum(
            &map,
            &Region::square(5.0).unwrap(),
            &Strategy::Grid { nx: 5, ny: 5 },
        )
        .unwrap()
    }

    #[test]
    fn identity_report_hits_interval() {
        let r = report_for(Mat2::IDENTITY);
        let v = check_interval_free(&r, 1.0, 1.1);
        assert!(!v.passed);
        assert_eq!(v.witness_value, Some(1.0));
        assert!(check_interval_free(&r, 0.0, 0.5).passed);
    }

    #[test]
    fn rotation_report_is_real_free() {
        let r = report_for(Mat2::new(0.0, -0.5, 0.5, 0.0));
        assert!(check_real_free(&r).passed);
        assert_eq!(r.real_count, 0);
        assert!(check_ball(&r, 0.51).passed);
        assert!(!check_ball(&r, 0.5).passed);
    }

    #[test]
    fn contraction_report() {
        let r = report_for(Mat2::diag(0.5, 0.5));
        assert_eq!(r.max_modulus.unwrap().value, 0.5);
        assert_eq!(r.real_count, r.samples);
        assert_eq!(r.real_eigenvalues.len(), 1);
    }

    #[test]
    fn norm_sup_of_linear_is_exact() {
        let m = Mat2::new(0.3, -1.2, 0.7, 0.1);
        let map = PlanarMap::linear(m).unwrap();
        let s = sample_norm_sup(
            &map,
            &Region::square(3.0).unwrap(),
            &Strategy::Random { n: 50, seed: 1 },
        )
        .unwrap();
        assert_eq!(s.value, operator_norm(&m));
        let map = PlanarMap::linear(Mat2::diag(0.6, 0.6)).unwrap();
        let s = sample_norm_sup(
            &map,
            &Region::square(100.0).unwrap(),
            &Strategy::Grid { nx: 11, ny: 11 },
        )
        .unwrap();
        assert_eq!(s.value, 0.6);
    }
}
