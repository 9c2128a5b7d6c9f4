//! C ABI over the tempered-geometry kernels.
//!
//! Every function returns a [`TgStatus`] and writes its result through an out-pointer.
//! Co-simplex points are opaque [`TgPoint`] handles created by `tg_point_*` constructors
//! and released with [`tg_point_free`]. After a failure, [`tg_last_error`] describes it.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tempered_geometry::diffapprox::{diff_hilbert, SmoothingConfig};
use tempered_geometry::tgeometry::{t_funk_cosimplex, t_hilbert_cosimplex, t_hilbert_raw};
use tempered_geometry::{CoSimplexPoint, Error, Temperature};

/// Outcome of an FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidTemperature = 2,
    Domain = 3,
    Dimension = 4,
    TemperatureMismatch = 5,
    OutsideDomain = 6,
    NoConvergence = 7,
    Panic = 8,
    Other = 9,
}

/// Opaque handle to a point of the tempered co-simplex.
pub struct TgPoint(CoSimplexPoint);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> TgStatus {
    match err {
        Error::InvalidTemperature(_) => TgStatus::InvalidTemperature,
        Error::Domain { .. } => TgStatus::Domain,
        Error::Dimension { .. } => TgStatus::Dimension,
        Error::TemperatureMismatch { .. } => TgStatus::TemperatureMismatch,
        Error::OutsideDomain { .. } => TgStatus::OutsideDomain,
        Error::NoConvergence { .. } => TgStatus::NoConvergence,
        _ => TgStatus::Other,
    }
}

enum Failure {
    Null,
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, storing its value in `out`; failures and panics become status codes.
fn guard<T>(out: *mut T, f: impl FnOnce() -> Result<T, Failure>) -> TgStatus {
    if out.is_null() {
        set_last_error("null output pointer".into());
        return TgStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            // SAFETY: `out` is non-null and the caller guarantees it is writable.
            unsafe { out.write(v) };
            TgStatus::Ok
        }
        Ok(Err(Failure::Null)) => {
            set_last_error("null input pointer".into());
            TgStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            TgStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be null or point to `len` readable doubles.
unsafe fn slice<'a>(ptr: *const f64, len: usize) -> Result<&'a [f64], Failure> {
    if ptr.is_null() {
        return Err(Failure::Null);
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

/// # Safety
/// `p` must be null or a live handle from a `tg_point_*` constructor.
unsafe fn point<'a>(p: *const TgPoint) -> Result<&'a CoSimplexPoint, Failure> {
    p.as_ref().map(|h| &h.0).ok_or(Failure::Null)
}

fn temp(t: f64) -> Result<Temperature, Failure> {
    Ok(Temperature::new(t)?)
}

/// Message of the last failed call on this thread; valid until the next failing call.
#[no_mangle]
pub extern "C" fn tg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `out` must be a writable double.
#[no_mangle]
pub unsafe extern "C" fn tg_log_t(x: f64, t: f64, out: *mut f64) -> TgStatus {
    guard(out, || Ok(tempered_geometry::log_t(x, temp(t)?)?))
}

/// # Safety
/// `out` must be a writable double.
#[no_mangle]
pub unsafe extern "C" fn tg_exp_t(y: f64, t: f64, out: *mut f64) -> TgStatus {
    guard(out, || Ok(tempered_geometry::exp_t(y, temp(t)?)))
}

/// # Safety
/// `out` must be a writable double.
#[no_mangle]
pub unsafe extern "C" fn tg_t_add(a: f64, b: f64, t: f64, out: *mut f64) -> TgStatus {
    guard(out, || Ok(tempered_geometry::t_add(a, b, temp(t)?)?))
}

/// # Safety
/// `out` must be a writable double.
#[no_mangle]
pub unsafe extern "C" fn tg_t_sub(a: f64, b: f64, t: f64, out: *mut f64) -> TgStatus {
    guard(out, || Ok(tempered_geometry::t_sub(a, b, temp(t)?)?))
}

/// A point from co-simplex values (their co-densities must sum to one).
///
/// # Safety
/// `values` must point to `len` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tg_point_new(
    values: *const f64,
    len: usize,
    t: f64,
    out: *mut *mut TgPoint,
) -> TgStatus {
    guard(out, || {
        let p = CoSimplexPoint::new(slice(values, len)?.to_vec(), temp(t)?)?;
        Ok(Box::into_raw(Box::new(TgPoint(p))))
    })
}

/// A point from a probability vector.
///
/// # Safety
/// `probs` must point to `len` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tg_point_from_probability(
    probs: *const f64,
    len: usize,
    t: f64,
    out: *mut *mut TgPoint,
) -> TgStatus {
    guard(out, || {
        let p = CoSimplexPoint::from_probability(slice(probs, len)?, temp(t)?)?;
        Ok(Box::into_raw(Box::new(TgPoint(p))))
    })
}

/// The co-simplex point on the ray of a positive vector.
///
/// # Safety
/// `raw` must point to `len` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tg_point_from_raw(
    raw: *const f64,
    len: usize,
    t: f64,
    out: *mut *mut TgPoint,
) -> TgStatus {
    guard(out, || {
        let p = CoSimplexPoint::from_raw(slice(raw, len)?, temp(t)?)?;
        Ok(Box::into_raw(Box::new(TgPoint(p))))
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tg_point_free(p: *mut TgPoint) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tg_point_dim(p: *const TgPoint, out: *mut usize) -> TgStatus {
    guard(out, || Ok(point(p)?.dim()))
}

/// Copies the co-simplex values into `buf`, which must hold exactly the point's dimension.
///
/// # Safety
/// `p` must be a live handle and `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tg_point_values(p: *const TgPoint, buf: *mut f64, len: usize) -> TgStatus {
    let mut written = 0usize;
    guard(&mut written, || {
        let v = point(p)?.values();
        if buf.is_null() {
            return Err(Failure::Null);
        }
        if len != v.len() {
            return Err(Error::Dimension {
                op: "tg_point_values",
                left: v.len(),
                right: len,
            }
            .into());
        }
        ptr::copy_nonoverlapping(v.as_ptr(), buf, len);
        Ok(len)
    })
}

/// # Safety
/// `p`, `q` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tg_hilbert(
    p: *const TgPoint,
    q: *const TgPoint,
    out: *mut f64,
) -> TgStatus {
    guard(out, || Ok(t_hilbert_cosimplex(point(p)?, point(q)?)?))
}

/// # Safety
/// `p`, `q` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tg_funk(p: *const TgPoint, q: *const TgPoint, out: *mut f64) -> TgStatus {
    guard(out, || Ok(t_funk_cosimplex(point(p)?, point(q)?)?))
}

/// Tempered Hilbert distance between the rays of two positive vectors.
///
/// # Safety
/// `p`, `q` must point to `len` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tg_hilbert_raw(
    p: *const f64,
    q: *const f64,
    len: usize,
    t: f64,
    out: *mut f64,
) -> TgStatus {
    guard(out, || {
        let (p, q) = (slice(p, len)?, slice(q, len)?);
        if let Some(v) = p.iter().chain(q).find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::Domain {
                op: "tg_hilbert_raw",
                detail: format!("entry {v} is not positive"),
            }
            .into());
        }
        Ok(t_hilbert_raw(p, q, temp(t)?))
    })
}

/// Differentiable tempered Hilbert distance with smoothing `smoothing` and max-temperature
/// mismatch `delta` (0 for none).
///
/// # Safety
/// `p`, `q` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tg_diff_hilbert(
    p: *const TgPoint,
    q: *const TgPoint,
    smoothing: f64,
    delta: f64,
    out: *mut f64,
) -> TgStatus {
    guard(out, || {
        let cfg = SmoothingConfig::new(smoothing, delta)?;
        Ok(diff_hilbert(point(p)?, point(q)?, cfg)?)
    })
}
