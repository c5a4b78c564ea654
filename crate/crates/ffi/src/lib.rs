//! C ABI over `dmy-core`.
//!
//! Every fallible function returns a [`DmyStatus`]; on failure the message is
//! available from [`dmy_last_error`] on the same thread. Maps and orbits are
//! opaque handles released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dmy_core::counterexample::{run_pipeline, CounterexampleConfig};
use dmy_core::dynamics::{find_periodic, NewtonConfig, PeriodicOrbit};
use dmy_core::output::json_string;
use dmy_core::spectral::{eig2, operator_norm, spectral_radius};
use dmy_core::{compose, DmyError, Mat2, PlanarMap, Point2};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmyStatus {
    Ok = 0,
    InvalidParameter = 1,
    NonFiniteInput = 2,
    NumericOverflow = 3,
    SingularNewton = 4,
    NoConvergence = 5,
    EpsilonSearchExhausted = 6,
    NullPointer = 7,
    Io = 8,
    Internal = 9,
}

/// Opaque planar map.
pub struct DmyMap(PlanarMap);

/// Opaque periodic orbit.
pub struct DmyOrbit(PeriodicOrbit);

/// Summary of a counterexample verification run.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DmyVerification {
    pub passed: bool,
    pub checks_passed: u32,
    pub checks_total: u32,
    /// The `a` finally used (halved when the period-4 search failed).
    pub a: f64,
    pub inner_radius: f64,
    pub c_used: f64,
    pub eps: f64,
    pub tail_radius: f64,
    /// Sampled spectral radius of `Df`.
    pub f_sr: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &DmyError) -> DmyStatus {
    match e {
        DmyError::InvalidParameter(_) | DmyError::Input(_) => DmyStatus::InvalidParameter,
        DmyError::NonFiniteInput { .. } => DmyStatus::NonFiniteInput,
        DmyError::NumericOverflow { .. } => DmyStatus::NumericOverflow,
        DmyError::SingularNewton { .. } => DmyStatus::SingularNewton,
        DmyError::NoConvergence { .. } => DmyStatus::NoConvergence,
        DmyError::EpsilonSearchExhausted { .. } => DmyStatus::EpsilonSearchExhausted,
        DmyError::Io(_) | DmyError::Json(_) => DmyStatus::Io,
    }
}

enum Failure {
    Core(DmyError),
    Null(&'static str),
}

impl From<DmyError> for Failure {
    fn from(e: DmyError) -> Self {
        Failure::Core(e)
    }
}

/// Runs `body`, translating errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> DmyStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => DmyStatus::Ok,
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer passed for {what}"));
            DmyStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic".into());
            DmyStatus::Internal
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn store_map(out: *mut *mut DmyMap, map: PlanarMap) -> Result<(), Failure> {
    *deref_mut(out, "out")? = Box::into_raw(Box::new(DmyMap(map)));
    Ok(())
}

/// Last error message on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn dmy_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dmy_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dmy_map_szlenk(k: f64, out: *mut *mut DmyMap) -> DmyStatus {
    guard(|| store_map(out, PlanarMap::szlenk(k)?))
}

/// `G_a = F - a·Id`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dmy_map_ga(k: f64, a: f64, out: *mut *mut DmyMap) -> DmyStatus {
    guard(|| store_map(out, PlanarMap::ga(k, a)?))
}

/// Linear map `[[a11, a12], [a21, a22]]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dmy_map_linear(
    a11: f64,
    a12: f64,
    a21: f64,
    a22: f64,
    out: *mut *mut DmyMap,
) -> DmyStatus {
    guard(|| store_map(out, PlanarMap::linear(Mat2::new(a11, a12, a21, a22))?))
}

/// The counterexample `f = H ∘ G_a` built with default sampling.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dmy_map_counterexample(
    k: f64,
    a: f64,
    eps: f64,
    out: *mut *mut DmyMap,
) -> DmyStatus {
    guard(|| {
        let bundle =
            dmy_core::counterexample::build_f(k, a, eps, &CounterexampleConfig::default())?;
        store_map(out, bundle.f)
    })
}

/// `outer ∘ inner`; both inputs stay owned by the caller.
///
/// # Safety
/// `outer` and `inner` must be live handles and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dmy_map_compose(
    outer: *const DmyMap,
    inner: *const DmyMap,
    out: *mut *mut DmyMap,
) -> DmyStatus {
    guard(|| {
        let (o, i) = (deref(outer, "outer")?, deref(inner, "inner")?);
        store_map(out, compose(&o.0, &i.0))
    })
}

/// # Safety
/// `map` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dmy_map_free(map: *mut DmyMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// # Safety
/// `map` must be a live handle; `out_x`, `out_y` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dmy_map_eval(
    map: *const DmyMap,
    x: f64,
    y: f64,
    out_x: *mut f64,
    out_y: *mut f64,
) -> DmyStatus {
    guard(|| {
        let q = deref(map, "map")?.0.eval(Point2::new(x, y))?;
        *deref_mut(out_x, "out_x")? = q.x;
        *deref_mut(out_y, "out_y")? = q.y;
        Ok(())
    })
}

/// Jacobian at `(x, y)`, written row-major to `out[0..4]`.
///
/// # Safety
/// `map` must be a live handle; `out` valid for 4 writes.
#[no_mangle]
pub unsafe extern "C" fn dmy_map_jacobian(
    map: *const DmyMap,
    x: f64,
    y: f64,
    out: *mut f64,
) -> DmyStatus {
    guard(|| {
        let j = deref(map, "map")?.0.jacobian(Point2::new(x, y))?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let rows = j.to_rows();
        std::slice::from_raw_parts_mut(out, 4)
            .copy_from_slice(&[rows[0][0], rows[0][1], rows[1][0], rows[1][1]]);
        Ok(())
    })
}

/// Eigenvalues of `[[a11, a12], [a21, a22]]` as `re1, im1, re2, im2` in `out[0..4]`.
///
/// # Safety
/// `out` must be valid for 4 writes.
#[no_mangle]
pub unsafe extern "C" fn dmy_eig2(
    a11: f64,
    a12: f64,
    a21: f64,
    a22: f64,
    out: *mut f64,
) -> DmyStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let e = eig2(&Mat2::new(a11, a12, a21, a22));
        let v = [e.lambda1.re, e.lambda1.im, e.lambda2.re, e.lambda2.im];
        std::slice::from_raw_parts_mut(out, 4).copy_from_slice(&v);
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn dmy_spectral_radius(a11: f64, a12: f64, a21: f64, a22: f64) -> f64 {
    spectral_radius(&Mat2::new(a11, a12, a21, a22))
}

#[no_mangle]
pub extern "C" fn dmy_operator_norm(a11: f64, a12: f64, a21: f64, a22: f64) -> f64 {
    operator_norm(&Mat2::new(a11, a12, a21, a22))
}

/// Newton search for a period-`period` orbit from `(x, y)`.
///
/// # Safety
/// `map` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dmy_find_periodic(
    map: *const DmyMap,
    period: usize,
    x: f64,
    y: f64,
    tol: f64,
    max_steps: usize,
    out: *mut *mut DmyOrbit,
) -> DmyStatus {
    guard(|| {
        let cfg = NewtonConfig { tol, max_steps };
        let orbit = find_periodic(&deref(map, "map")?.0, period, Point2::new(x, y), &cfg)?;
        *deref_mut(out, "out")? = Box::into_raw(Box::new(DmyOrbit(orbit)));
        Ok(())
    })
}

/// # Safety
/// `orbit` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dmy_orbit_free(orbit: *mut DmyOrbit) {
    if !orbit.is_null() {
        drop(Box::from_raw(orbit));
    }
}

/// Period of the orbit, or 0 for a null handle.
///
/// # Safety
/// `orbit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dmy_orbit_period(orbit: *const DmyOrbit) -> usize {
    orbit.as_ref().map_or(0, |o| o.0.period)
}

/// Closure residual `|f^n(p0) - p0|`, NaN for a null handle.
///
/// # Safety
/// `orbit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dmy_orbit_residual(orbit: *const DmyOrbit) -> f64 {
    orbit.as_ref().map_or(f64::NAN, |o| o.0.residual)
}

/// # Safety
/// `orbit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dmy_orbit_hyperbolic(orbit: *const DmyOrbit) -> bool {
    orbit.as_ref().is_some_and(|o| o.0.hyperbolic)
}

/// Point `index` of the orbit.
///
/// # Safety
/// `orbit` must be a live handle; `out_x`, `out_y` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dmy_orbit_point(
    orbit: *const DmyOrbit,
    index: usize,
    out_x: *mut f64,
    out_y: *mut f64,
) -> DmyStatus {
    guard(|| {
        let o = &deref(orbit, "orbit")?.0;
        let p = o.points.get(index).ok_or_else(|| {
            DmyError::InvalidParameter(format!(
                "orbit index {index} out of range for period {}",
                o.period
            ))
        })?;
        *deref_mut(out_x, "out_x")? = p.x;
        *deref_mut(out_y, "out_y")? = p.y;
        Ok(())
    })
}

/// Multipliers as `re1, im1, re2, im2` in `out[0..4]`.
///
/// # Safety
/// `orbit` must be a live handle and `out` valid for 4 writes.
#[no_mangle]
pub unsafe extern "C" fn dmy_orbit_multipliers(orbit: *const DmyOrbit, out: *mut f64) -> DmyStatus {
    guard(|| {
        let m = deref(orbit, "orbit")?.0.multipliers;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let v = [m.lambda1.re, m.lambda1.im, m.lambda2.re, m.lambda2.im];
        std::slice::from_raw_parts_mut(out, 4).copy_from_slice(&v);
        Ok(())
    })
}

/// Builds and verifies the counterexample. `report_json`, when not null,
/// receives the full report as a string to release with [`dmy_string_free`].
///
/// # Safety
/// `out` must be valid for writes; `report_json` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dmy_verify_counterexample(
    k: f64,
    a: f64,
    eps: f64,
    out: *mut DmyVerification,
    report_json: *mut *mut c_char,
) -> DmyStatus {
    guard(|| {
        let out = deref_mut(out, "out")?;
        let result = run_pipeline(k, a, eps, &CounterexampleConfig::default())?;
        let r = &result.report;
        *out = DmyVerification {
            passed: r.passed,
            checks_passed: r.checks.iter().filter(|c| c.passed).count() as u32,
            checks_total: r.checks.len() as u32,
            a: r.a,
            inner_radius: r.inner_radius,
            c_used: r.c_used,
            eps: r.eps,
            tail_radius: r.tail_radius,
            f_sr: result.bundle.f_sr,
        };
        if let Some(slot) = report_json.as_mut() {
            let text = json_string(&result)?;
            *slot = CString::new(text)
                .map_err(|e| DmyError::Input(e.to_string()))?
                .into_raw();
        }
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dmy_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
