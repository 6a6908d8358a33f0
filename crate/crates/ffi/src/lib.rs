//! C interface to `steklov-iso`.
//!
//! Objects are opaque handles created by `si_*_from_json` or `si_solve` and
//! released by the matching `si_*_free`. Every fallible call returns an
//! [`SiStatus`]; on failure the message is available from
//! [`si_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use steklov_iso::ball::{logconvex_ball_gamma1, power_ball_spectrum, solve_radial_ode};
use steklov_iso::fem::{solve_on_mesh, triangulate, SpectrumResult};
use steklov_iso::geometry::{weighted_perimeter, weighted_volume, Domain, DomainConfig};
use steklov_iso::isoperimetry::check_isop;
use steklov_iso::verify::{verify, Context, Theorem, VerifyOptions};
use steklov_iso::weights::{WeightConfig, WeightSpec};
use steklov_iso::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Domain = 4,
    Weight = 5,
    Numerical = 6,
    Unsupported = 7,
    Panic = 8,
}

/// Planar domain.
pub struct SiDomain(Domain);

/// Weight record; log-convex horizons are fixed when the weight is used.
pub struct SiWeight(WeightConfig);

/// Finite element spectrum, `γ₀` first.
pub struct SiSpectrum(SpectrumResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SiStatus {
    match e {
        Error::InvalidArgument(_) | Error::AlphaOutOfRange { .. } | Error::DimTooSmall(_) | Error::EllOutOfRange { .. } => {
            SiStatus::InvalidArgument
        }
        Error::Config(_) | Error::Io(_) => SiStatus::Parse,
        Error::DegenerateDomain(_) | Error::OriginOnBoundary { .. } | Error::MeshFailure(_) => SiStatus::Domain,
        Error::WeightInvalid(_) | Error::SingularEvaluation { .. } | Error::OutsideHorizon { .. } => SiStatus::Weight,
        Error::DimensionUnsupported(_) | Error::IntegrabilityViolation { .. } => SiStatus::Unsupported,
        _ => SiStatus::Numerical,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), (SiStatus, String)>) -> SiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SiStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SiStatus::Panic
        }
    }
}

fn lib<T>(r: steklov_iso::Result<T>) -> Result<T, (SiStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (SiStatus, String) {
    (SiStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SiStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (SiStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), (SiStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = v;
    Ok(())
}

unsafe fn obj<'a, T>(p: *const T, what: &str) -> Result<&'a T, (SiStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

fn parse<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, (SiStatus, String)> {
    serde_json::from_str(text)
        .map_err(|e| (SiStatus::Parse, format!("{what}: line {} column {}: {e}", e.line(), e.column())))
}

fn build_weight(w: &SiWeight, horizon: f64) -> Result<WeightSpec, (SiStatus, String)> {
    lib(w.0.build(2, horizon))
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn si_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn si_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a domain from a JSON record such as
/// `{"shape":"polygon","vertices":[[x,y],...]}` or `{"shape":"disc","radius":1}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn si_domain_from_json(json: *const c_char, out: *mut *mut SiDomain) -> SiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg: DomainConfig = parse(str_arg(json, "json")?, "domain")?;
        let dom = lib(cfg.build())?;
        *out = Box::into_raw(Box::new(SiDomain(dom)));
        Ok(())
    })
}

/// # Safety
/// `d` must come from [`si_domain_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn si_domain_free(d: *mut SiDomain) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// `∫_Ω |x|^ell dx`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn si_domain_weighted_volume(d: *const SiDomain, ell: f64, out: *mut f64) -> SiStatus {
    guard(|| {
        let d = obj(d, "domain")?;
        let v = lib(weighted_volume(&d.0, ell))?;
        put(out, v)
    })
}

/// `∫_∂Ω |x|^k ds`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn si_domain_weighted_perimeter(d: *const SiDomain, k: f64, out: *mut f64) -> SiStatus {
    guard(|| {
        let d = obj(d, "domain")?;
        let v = lib(weighted_perimeter(&d.0, k))?;
        put(out, v)
    })
}

/// Margin `P_k(Ω) − C |Ω|_ℓ^{(k+1)/(ℓ+2)}` of the weighted isoperimetric
/// inequality in the plane.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn si_isop_margin(d: *const SiDomain, k: f64, ell: f64, out: *mut f64) -> SiStatus {
    guard(|| {
        let d = obj(d, "domain")?;
        let m = lib(check_isop(&d.0, k, ell, 2))?;
        put(out, m.margin)
    })
}

/// Parses a weight record such as `{"kind":"power","alpha":0,"beta":0}` or
/// `{"kind":"logconvex","family":"quadratic","a":1}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn si_weight_from_json(json: *const c_char, out: *mut *mut SiWeight) -> SiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg: WeightConfig = parse(str_arg(json, "json")?, "weight")?;
        lib(cfg.build(2, 1.0))?;
        *out = Box::into_raw(Box::new(SiWeight(cfg)));
        Ok(())
    })
}

/// # Safety
/// `w` must come from [`si_weight_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn si_weight_free(w: *mut SiWeight) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// First nontrivial Steklov eigenvalue of the centred disc of radius `radius`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn si_ball_gamma1(w: *const SiWeight, radius: f64, out: *mut f64) -> SiStatus {
    guard(|| {
        let w = obj(w, "weight")?;
        let g = match build_weight(w, radius)? {
            WeightSpec::Power(wp) => lib(power_ball_spectrum(&wp, radius, 1))?.gamma1(),
            WeightSpec::LogConvex(lw) => logconvex_ball_gamma1(&lib(solve_radial_ode(&lw, radius, 2, 256))?),
        };
        put(out, g)
    })
}

/// Finite element Steklov spectrum on a mesh of size `h`, `n_eigs` nontrivial
/// eigenvalues plus `γ₀`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn si_solve(
    d: *const SiDomain,
    w: *const SiWeight,
    h: f64,
    n_eigs: usize,
    out: *mut *mut SiSpectrum,
) -> SiStatus {
    guard(|| {
        let (d, w) = (obj(d, "domain")?, obj(w, "weight")?);
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = build_weight(w, 2.0 * d.0.max_radius())?;
        let mesh = lib(triangulate(&d.0, h))?;
        let res = lib(solve_on_mesh(&mesh, &spec, n_eigs))?;
        *out = Box::into_raw(Box::new(SiSpectrum(res)));
        Ok(())
    })
}

/// Number of eigenvalues held, `γ₀` included. Zero for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn si_spectrum_len(s: *const SiSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.0.eigenvalues.len())
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn si_spectrum_eigenvalue(s: *const SiSpectrum, i: usize, out: *mut f64) -> SiStatus {
    guard(|| {
        let s = obj(s, "spectrum")?;
        let v = *s.0.eigenvalues.get(i).ok_or_else(|| {
            (SiStatus::InvalidArgument, format!("index {i} out of range (len {})", s.0.eigenvalues.len()))
        })?;
        put(out, v)
    })
}

/// # Safety
/// `s` must come from [`si_solve`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn si_spectrum_free(s: *mut SiSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Runs one theorem check and returns the report as JSON in `*out`, to be
/// released with [`si_string_free`]. `theorem` is one of `T1.1`, `T1.2`,
/// `T1.4`, `T1.5`, `C1.3`.
///
/// # Safety
/// Pointers must be valid; `theorem` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn si_verify_json(
    theorem: *const c_char,
    d: *const SiDomain,
    w: *const SiWeight,
    h: f64,
    refinements: usize,
    out: *mut *mut c_char,
) -> SiStatus {
    guard(|| {
        let theorem: Theorem = lib(str_arg(theorem, "theorem")?.parse())?;
        let (d, w) = (obj(d, "domain")?, obj(w, "weight")?);
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = build_weight(w, 2.0 * d.0.max_radius())?;
        let opts = VerifyOptions { h, refinements, ..VerifyOptions::default() };
        let ctx = lib(Context::new(d.0.clone(), spec, opts))?;
        let report = lib(verify(theorem, &ctx))?;
        let text = serde_json::to_string(&report).map_err(|e| (SiStatus::Numerical, e.to_string()))?;
        *out = CString::new(text).map_err(|e| (SiStatus::Numerical, e.to_string()))?.into_raw();
        Ok(())
    })
}
