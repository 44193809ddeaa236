//! C ABI over the tdoa2d library.
//!
//! Conventions: every fallible call returns a `Tdoa2dStatus` and writes its
//! results through out-pointers; handles are opaque and freed with their
//! matching `_free` function; strings returned by the library are freed with
//! `tdoa2d_string_free`. Panics never cross the boundary; they surface as
//! `TDOA2D_STATUS_PANICKED`. The header is generated into `include/tdoa2d.h`
//! at build time.

use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use tdoa2d::bifurcation::{asymptotes, build_quintic, PointRegion, QuinticCurve};
use tdoa2d::geometry::{make_config, RationalPoint, ReceiverConfig, Vec2};
use tdoa2d::localizer::localize;
use tdoa2d::rational::parse_rational;
use tdoa2d::tdoa::{classify_tau, ellipse_value, tau2_forward, TauRegion, TdoaPair};
use tdoa2d::Error;

// ---- status codes ----

/// Call outcome; `Ok` is zero, every other value is an error.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tdoa2dStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The three receivers lie on one line.
    CollinearReceivers = 3,
    /// A receiver-normalized quantity was requested at that receiver.
    AtReceiver = 4,
    /// Projection onto the curve hit a vanishing gradient.
    GradientVanishes = 5,
    /// A rational literal could not be parsed.
    InvalidRational = 6,
    /// Structurally invalid input.
    InvalidInput = 7,
    /// An internal panic was caught at the boundary.
    Panicked = 100,
}

fn status_of(err: &Error) -> Tdoa2dStatus {
    match err {
        Error::CollinearReceivers => Tdoa2dStatus::CollinearReceivers,
        Error::AtReceiver(_) => Tdoa2dStatus::AtReceiver,
        Error::GradientVanishes => Tdoa2dStatus::GradientVanishes,
        Error::InvalidRational(_) => Tdoa2dStatus::InvalidRational,
        Error::InvalidInput(_) => Tdoa2dStatus::InvalidInput,
    }
}

/// Static name for a status code; never null, unknown codes map to "unknown".
#[no_mangle]
pub extern "C" fn tdoa2d_error_name(code: i32) -> *const c_char {
    let name: &'static [u8] = match code {
        0 => b"ok\0",
        1 => b"null argument\0",
        2 => b"invalid utf-8\0",
        3 => b"collinear receivers\0",
        4 => b"at receiver\0",
        5 => b"gradient vanishes\0",
        6 => b"invalid rational\0",
        7 => b"invalid input\0",
        100 => b"panicked\0",
        _ => b"unknown\0",
    };
    name.as_ptr() as *const c_char
}

fn guard<F: FnOnce() -> Tdoa2dStatus>(f: F) -> Tdoa2dStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(Tdoa2dStatus::Panicked)
}

// ---- opaque handles ----

/// Opaque receiver configuration handle.
pub struct Tdoa2dConfig {
    inner: ReceiverConfig,
}

/// Opaque curve handle; owns the exact polynomial and its float mirror.
pub struct Tdoa2dCurve {
    inner: QuinticCurve,
}

// ---- region codes ----

/// Measurement-pair region, mirroring the library classification.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tdoa2dTauRegion {
    OutsideImage = 0,
    InteriorUnique = 1,
    InteriorAmbiguous = 2,
    OnEllipse = 3,
    OnPolytopeBoundary = 4,
    ExcludedTangency = 5,
}

/// Plane-point region relative to the curve.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tdoa2dPointRegion {
    UniqueRegion = 0,
    AmbiguousRegion = 1,
    OnCurve = 2,
}

fn tau_region_code(r: TauRegion) -> Tdoa2dTauRegion {
    match r {
        TauRegion::OutsideImage => Tdoa2dTauRegion::OutsideImage,
        TauRegion::InteriorUnique => Tdoa2dTauRegion::InteriorUnique,
        TauRegion::InteriorAmbiguous => Tdoa2dTauRegion::InteriorAmbiguous,
        TauRegion::OnEllipse => Tdoa2dTauRegion::OnEllipse,
        TauRegion::OnPolytopeBoundary => Tdoa2dTauRegion::OnPolytopeBoundary,
        TauRegion::ExcludedTangency => Tdoa2dTauRegion::ExcludedTangency,
    }
}

fn point_region_code(r: PointRegion) -> Tdoa2dPointRegion {
    match r {
        PointRegion::UniqueRegion => Tdoa2dPointRegion::UniqueRegion,
        PointRegion::AmbiguousRegion => Tdoa2dPointRegion::AmbiguousRegion,
        PointRegion::OnCurve => Tdoa2dPointRegion::OnCurve,
    }
}

// ---- configuration ----

/// # Safety
/// The six coordinate pointers must be NUL-terminated strings valid for the
/// duration of the call; `out` must be a valid writable pointer. On success
/// `*out` owns a handle that must be released with `tdoa2d_config_free`.
#[no_mangle]
pub unsafe extern "C" fn tdoa2d_config_new_rational(
    x0: *const c_char,
    y0: *const c_char,
    x1: *const c_char,
    y1: *const c_char,
    x2: *const c_char,
    y2: *const c_char,
    out: *mut *mut Tdoa2dConfig,
) -> Tdoa2dStatus {
    let args = [x0, y0, x1, y1, x2, y2];
    if out.is_null() || args.iter().any(|p| p.is_null()) {
        return Tdoa2dStatus::NullArgument;
    }
    let mut text = [""; 6];
    for (slot, &ptr) in text.iter_mut().zip(args.iter()) {
        match CStr::from_ptr(ptr).to_str() {
            Ok(s) => *slot = s,
            Err(_) => return Tdoa2dStatus::InvalidUtf8,
        }
    }
    guard(|| {
        let coord = |s: &str| parse_rational(s);
        let point = |x: &str, y: &str| -> Result<RationalPoint, Error> {
            Ok(RationalPoint::new(coord(x)?, coord(y)?))
        };
        let built = point(text[0], text[1]).and_then(|m0| {
            let m1 = point(text[2], text[3])?;
            let m2 = point(text[4], text[5])?;
            make_config(m0, m1, m2)
        });
        match built {
            Ok(config) => {
                *out = Box::into_raw(Box::new(Tdoa2dConfig { inner: config }));
                Tdoa2dStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// # Safety
/// `out` must be a valid writable pointer. On success `*out` owns a handle
/// that must be released with `tdoa2d_config_free`.
#[no_mangle]
pub unsafe extern "C" fn tdoa2d_config_new_f64(
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
    out: *mut *mut Tdoa2dConfig,
) -> Tdoa2dStatus {
    if out.is_null() {
        return Tdoa2dStatus::NullArgument;
    }
    guard(|| {
        match ReceiverConfig::from_f64([[x0, y0], [x1, y1], [x2, y2]]) {
            Ok(config) => {
                *out = Box::into_raw(Box::new(Tdoa2dConfig { inner: config }));
                Tdoa2dStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// # Safety
/// `config` must be a pointer returned by a `tdoa2d_config_new_*` call, not
/// yet freed; null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn tdoa2d_config_free(config: *mut Tdoa2dConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

// ---- forward map, classification, localization ----

/// # Safety
/// `config` must be a live configuration handle; `tau1` and `tau2` must be
/// valid writable pointers.
#[no_mangle]
pub unsafe extern "C" fn tdoa2d_forward(
    config: *const Tdoa2dConfig,
    x: f64,
    y: f64,
    tau1: *mut f64,
    tau2: *mut f64,
) -> Tdoa2dStatus {
    if config.is_null() || tau1.is_null() || tau2.is_null() {
        return Tdoa2dStatus::NullArgument;
    }
    guard(|| {
        let tau = tau2_forward(&(*config).inner, Vec2::new(x, y));
        *tau1 = tau.tau1;
        *tau2 = tau.tau2;
        Tdoa2dStatus::Ok
    })
}

/// # Safety
/// `config` must be a live configuration handle; `value` must be a valid
/// writable pointer.
#[no_mangle]
pub unsafe extern "C" fn tdoa2d_ellipse_value(
    config: *const Tdoa2dConfig,
    tau1: f64,
    tau2: f64,
    value: *mut f64,
) -> Tdoa2dStatus {
    if config.is_null() || value.is_null() {
        return Tdoa2dStatus::NullArgument;
    }
    guard(|| {
        *value = ellipse_value(&(*config).inner, TdoaPair::new(tau1, tau2));
        Tdoa2dStatus::Ok
    })
}

/// # Safety
/// `config` must be a live configuration handle; `region` and
/// `expected_count` must be valid writable pointers.
#[no_mangle]
pub unsafe extern "C" fn tdoa2d_classify_tau(
    config: *const Tdoa2dConfig,
    tau1: f64,
    tau2: f64,
    region: *mut Tdoa2dTauRegion,
    expected_count: *mut u8,
) -> Tdoa2dStatus {
    if config.is_null() || region.is_null() || expected_count.is_null() {
        return Tdoa2dStatus::NullArgument;
    }
    guard(|| {
        let cl = classify_tau(&(*config).inner, TdoaPair::new(tau1, tau2));
        *region = tau_region_code(cl.region);
        *expected_count = cl.expected_preimages;
        Tdoa2dStatus::Ok
    })
}

/// # Safety
/// `config` must be a live configuration handle. `positions` must point to at
/// least 4 writable doubles (x, y per source), `d0` to at least 2, and
/// `count` and `degenerate` must be valid writable pointers. Only the first
/// `*count` sources (at most 2) are written.
#[no_mangle]
pub unsafe extern "C" fn tdoa2d_localize(
    config: *const Tdoa2dConfig,
    tau1: f64,
    tau2: f64,
    positions: *mut f64,
    d0: *mut f64,
    count: *mut u32,
    degenerate: *mut bool,
) -> Tdoa2dStatus {
    if config.is_null()
        || positions.is_null()
        || d0.is_null()
        || count.is_null()
        || degenerate.is_null()
    {
        return Tdoa2dStatus::NullArgument;
    }
    guard(|| {
        let result = localize(&(*config).inner, TdoaPair::new(tau1, tau2));
        for (k, s) in result.solutions.iter().take(2).enumerate() {
            *positions.add(2 * k) = s.position.x;
            *positions.add(2 * k + 1) = s.position.y;
            *d0.add(k) = s.d0;
        }
        *count = result.solutions.len().min(2) as u32;
        *degenerate = result.degenerate_linear;
        Tdoa2dStatus::Ok
    })
}

/// # Safety
/// `config` must be a live configuration handle; `abc` must point to at least
/// 9 writable doubles, filled as (a, b, c) per asymptote line `a x + b y + c`.
#[no_mangle]
pub unsafe extern "C" fn tdoa2d_asymptotes(
    config: *const Tdoa2dConfig,
    abc: *mut f64,
) -> Tdoa2dStatus {
    if config.is_null() || abc.is_null() {
        return Tdoa2dStatus::NullArgument;
    }
    guard(|| {
        for (k, line) in asymptotes(&(*config).inner).iter().enumerate() {
            *abc.add(3 * k) = line.a;
            *abc.add(3 * k + 1) = line.b;
            *abc.add(3 * k + 2) = line.c;
        }
        Tdoa2dStatus::Ok
    })
}

// ---- curve handle ----

/// # Safety
/// `config` must be a live configuration handle; `out` must be a valid
/// writable pointer. On success `*out` owns a handle that must be released
/// with `tdoa2d_curve_free`.
#[no_mangle]
pub unsafe extern "C" fn tdoa2d_curve_new(
    config: *const Tdoa2dConfig,
    out: *mut *mut Tdoa2dCurve,
) -> Tdoa2dStatus {
    if config.is_null() || out.is_null() {
        return Tdoa2dStatus::NullArgument;
    }
    guard(|| {
        let curve = build_quintic(&(*config).inner);
        *out = Box::into_raw(Box::new(Tdoa2dCurve { inner: curve }));
        Tdoa2dStatus::Ok
    })
}

/// # Safety
/// `curve` must be a pointer returned by `tdoa2d_curve_new`, not yet freed;
/// null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn tdoa2d_curve_free(curve: *mut Tdoa2dCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// # Safety
/// `curve` must be a live curve handle; `value` must be a valid writable
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn tdoa2d_curve_eval(
    curve: *const Tdoa2dCurve,
    x: f64,
    y: f64,
    value: *mut f64,
) -> Tdoa2dStatus {
    if curve.is_null() || value.is_null() {
        return Tdoa2dStatus::NullArgument;
    }
    guard(|| {
        *value = (*curve).inner.eval(Vec2::new(x, y));
        Tdoa2dStatus::Ok
    })
}

/// # Safety
/// `curve` must be a live curve handle; `region` must be a valid writable
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn tdoa2d_curve_classify(
    curve: *const Tdoa2dCurve,
    x: f64,
    y: f64,
    region: *mut Tdoa2dPointRegion,
) -> Tdoa2dStatus {
    if curve.is_null() || region.is_null() {
        return Tdoa2dStatus::NullArgument;
    }
    guard(|| {
        *region = point_region_code((*curve).inner.classify(Vec2::new(x, y)));
        Tdoa2dStatus::Ok
    })
}

/// # Safety
/// `curve` must be a live curve handle; `distance` must be a valid writable
/// pointer. Fails with `GradientVanishes` where the first-order distance is
/// undefined.
#[no_mangle]
pub unsafe extern "C" fn tdoa2d_curve_sampson_distance(
    curve: *const Tdoa2dCurve,
    x: f64,
    y: f64,
    distance: *mut f64,
) -> Tdoa2dStatus {
    if curve.is_null() || distance.is_null() {
        return Tdoa2dStatus::NullArgument;
    }
    guard(|| match (*curve).inner.sampson_distance(Vec2::new(x, y)) {
        Ok(d) => {
            *distance = d;
            Tdoa2dStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// # Safety
/// `curve` must be a live curve handle; `out` must be a valid writable
/// pointer. On success `*out` owns a NUL-terminated JSON string that must be
/// released with `tdoa2d_string_free`.
#[no_mangle]
pub unsafe extern "C" fn tdoa2d_curve_poly_json(
    curve: *const Tdoa2dCurve,
    normalized: bool,
    out: *mut *mut c_char,
) -> Tdoa2dStatus {
    if curve.is_null() || out.is_null() {
        return Tdoa2dStatus::NullArgument;
    }
    guard(|| {
        let poly = if normalized {
            (*curve).inner.normalized()
        } else {
            (*curve).inner.f().clone()
        };
        let json = tdoa2d::formats::poly_to_json(&poly);
        match CString::new(json) {
            Ok(s) => {
                *out = s.into_raw();
                Tdoa2dStatus::Ok
            }
            Err(_) => Tdoa2dStatus::InvalidInput,
        }
    })
}

/// # Safety
/// `s` must be a string returned by this library, not yet freed; null is a
/// no-op.
#[no_mangle]
pub unsafe extern "C" fn tdoa2d_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
