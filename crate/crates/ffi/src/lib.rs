//! C ABI over `minkowski-ramsey`.
//!
//! Every fallible function returns an [`MrStatus`]. On failure the message
//! of the last error on the calling thread is available from
//! [`mr_last_error_message`] until the next failing call. Strings returned
//! through `char **` are owned by the caller and freed with
//! [`mr_string_free`]; norms are freed with [`mr_norm_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use minkowski_ramsey::progression::{verify_copy, GeoProgression};
use minkowski_ramsey::search::{find_copy, CopyCertificate, SearchConfig};
use minkowski_ramsey::{oracle, Error, Norm, Vec2};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MrStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// The library rejected the input; see the last error.
    DomainError = 3,
    Panic = 4,
}

/// Opaque norm handle.
pub struct MrNorm(Norm);

thread_local! {
    static LAST_ERROR: RefCell<Option<(CString, CString)>> = const { RefCell::new(None) };
}

fn set_error(kind: &str, message: &str) {
    let clean = |s: &str| CString::new(s.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some((clean(kind), clean(message))));
}

fn fail(e: Error) -> MrStatus {
    set_error(e.kind(), &e.to_string());
    MrStatus::DomainError
}

fn guard(f: impl FnOnce() -> MrStatus) -> MrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("Panic", "panic inside minkowski-ramsey");
            MrStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, MrStatus> {
    if s.is_null() {
        set_error("NullArgument", "string argument is null");
        return Err(MrStatus::NullArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("InvalidUtf8", "string argument is not UTF-8");
        MrStatus::InvalidUtf8
    })
}

fn null_arg() -> MrStatus {
    set_error("NullArgument", "pointer argument is null");
    MrStatus::NullArgument
}

fn give_string(s: String, out: *mut *mut c_char) {
    let c = CString::new(s).expect("JSON has no interior nul");
    unsafe { *out = c.into_raw() };
}

/// Kind of the last error on this thread (e.g. `"PreconditionViolated"`),
/// or null. Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mr_last_error_kind() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |(k, _)| k.as_ptr()))
}

/// Message of the last error on this thread, or null.
#[no_mangle]
pub extern "C" fn mr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |(_, m)| m.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn mr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a norm from its JSON description.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mr_norm_from_json(json: *const c_char, out: *mut *mut MrNorm) -> MrStatus {
    guard(|| {
        if out.is_null() {
            return null_arg();
        }
        let json = match text(json) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match Norm::from_json(json) {
            Ok(n) => {
                *out = Box::into_raw(Box::new(MrNorm(n)));
                MrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Polygonal norm from `count` vertices stored as `x0, y0, x1, y1, …`.
///
/// # Safety
/// `xy` must point to `2 * count` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mr_norm_polygon(xy: *const f64, count: usize, out: *mut *mut MrNorm) -> MrStatus {
    guard(|| {
        if xy.is_null() || out.is_null() {
            return null_arg();
        }
        let coords = std::slice::from_raw_parts(xy, 2 * count);
        let vertices = coords.chunks_exact(2).map(|c| Vec2::new(c[0], c[1])).collect();
        match Norm::polygon(vertices) {
            Ok(n) => {
                *out = Box::into_raw(Box::new(MrNorm(n)));
                MrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// ℓp norm, `1 <= p <= inf`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mr_norm_lp(p: f64, out: *mut *mut MrNorm) -> MrStatus {
    guard(|| {
        if out.is_null() {
            return null_arg();
        }
        match Norm::lp(p) {
            Ok(n) => {
                *out = Box::into_raw(Box::new(MrNorm(n)));
                MrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `norm` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mr_norm_free(norm: *mut MrNorm) {
    if !norm.is_null() {
        drop(Box::from_raw(norm));
    }
}

/// # Safety
/// `norm` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mr_norm_eval(norm: *const MrNorm, x: f64, y: f64, out: *mut f64) -> MrStatus {
    guard(|| {
        if norm.is_null() || out.is_null() {
            return null_arg();
        }
        let p = Vec2::new(x, y);
        if !p.is_finite() {
            return fail(Error::NonFinite);
        }
        *out = (*norm).0.eval(p);
        MrStatus::Ok
    })
}

/// Smallest N-length of a side of the unit polygon.
///
/// # Safety
/// `norm` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mr_norm_min_side_length(norm: *const MrNorm, out: *mut f64) -> MrStatus {
    guard(|| {
        if norm.is_null() || out.is_null() {
            return null_arg();
        }
        match (*norm).0.as_polygonal() {
            Some(p) => {
                *out = p.min_side_length();
                MrStatus::Ok
            }
            None => fail(Error::PreconditionViolated("norm is not polygonal".into())),
        }
    })
}

/// Searches for a monochromatic copy of the first `prefix` points of `G(q)`
/// under a built-in oracle and returns the certificate as JSON.
///
/// # Safety
/// `norm` must be a live handle, `oracle_name` a nul-terminated string and
/// `cert_json` writable.
#[no_mangle]
pub unsafe extern "C" fn mr_find_copy(
    norm: *const MrNorm,
    oracle_name: *const c_char,
    q: f64,
    prefix: usize,
    seed: u64,
    cert_json: *mut *mut c_char,
) -> MrStatus {
    guard(|| {
        if norm.is_null() || cert_json.is_null() {
            return null_arg();
        }
        let name = match text(oracle_name) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let norm = &(*norm).0;
        let o = match oracle::parse(name, norm) {
            Ok(o) => o,
            Err(e) => return fail(e),
        };
        let cfg = SearchConfig { seed, ..SearchConfig::new(q, prefix) };
        match find_copy(norm, o.as_ref(), &cfg) {
            Ok(out) => {
                give_string(serde_json::to_string(&out.certificate).expect("certificate serializes"), cert_json);
                MrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Checks the distances of a certificate against `G(q)` within `tol`.
/// Colours are not rechecked.
///
/// # Safety
/// `cert_json` must be a nul-terminated string; `accepted` and
/// `max_deviation` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mr_verify_copy(
    cert_json: *const c_char,
    tol: f64,
    accepted: *mut bool,
    max_deviation: *mut f64,
) -> MrStatus {
    guard(|| {
        if accepted.is_null() || max_deviation.is_null() {
            return null_arg();
        }
        let json = match text(cert_json) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let run = || -> Result<(bool, f64), Error> {
            let cert: CopyCertificate = serde_json::from_str(json).map_err(|e| Error::Malformed(e.to_string()))?;
            let norm = Norm::from_spec(&cert.norm)?;
            let g = GeoProgression::new(cert.points.q, cert.points.points.len())?;
            let v = verify_copy(&norm, &g, &cert.points, tol)?;
            Ok((v.accepted, v.max_deviation))
        };
        match run() {
            Ok((a, d)) => {
                *accepted = a;
                *max_deviation = d;
                MrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
