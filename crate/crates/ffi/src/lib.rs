//! C ABI over `khessian`.
//!
//! Every fallible call returns a [`KhStatus`]; on failure the message is
//! kept per thread and read back with [`kh_last_error`]. Fields are opaque
//! handles owned by the caller and released with [`kh_field_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use khessian::besov::{besov_norm, embedding_case, BesovParams, Embedding, NormMethod};
use khessian::hessian::pair_direct;
use khessian::minor_algebra::{k_trace, SquareMatrix};
use khessian::{Error, GridBox, GridField, GridSpec, Sampling};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KhStatus {
    Ok = 0,
    Domain = 1,
    Evaluation = 2,
    Construction = 3,
    Quadrature = 4,
    Parse = 5,
    Io = 6,
    NullPointer = 7,
    Panic = 8,
}

/// Norm estimators accepted by [`kh_besov_norm`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KhNormMethod {
    Gagliardo = 0,
    Dyadic = 1,
}

/// Opaque sampled field.
pub struct KhGridField {
    inner: GridField,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> KhStatus {
    match e {
        Error::Domain(_) => KhStatus::Domain,
        Error::Evaluation { .. } => KhStatus::Evaluation,
        Error::Construction(_) => KhStatus::Construction,
        Error::Quadrature(_) => KhStatus::Quadrature,
        Error::Parse(_) => KhStatus::Parse,
        Error::Io(_) => KhStatus::Io,
    }
}

/// Runs `f`, translating errors and panics into a status plus last-error text.
fn guard(f: impl FnOnce() -> Result<(), KhStatusError>) -> KhStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KhStatus::Ok,
        Ok(Err(KhStatusError(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            KhStatus::Panic
        }
    }
}

struct KhStatusError(KhStatus, String);

impl From<Error> for KhStatusError {
    fn from(e: Error) -> Self {
        KhStatusError(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> KhStatusError {
    KhStatusError(KhStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], KhStatusError> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn field_arg<'a>(p: *const KhGridField, what: &str) -> Result<&'a GridField, KhStatusError> {
    p.as_ref().map(|f| &f.inner).ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), KhStatusError> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn kh_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a field from row-major samples (last axis fastest).
///
/// # Safety
/// `lower`, `upper` and `points` must hold `dim` entries and `samples`
/// `len` entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kh_field_new(
    dim: usize,
    lower: *const f64,
    upper: *const f64,
    points: *const usize,
    periodic: bool,
    samples: *const f64,
    len: usize,
    out: *mut *mut KhGridField,
) -> KhStatus {
    guard(|| {
        let lower = slice_arg(lower, dim, "lower")?.to_vec();
        let upper = slice_arg(upper, dim, "upper")?.to_vec();
        let points = slice_arg(points, dim, "points")?.to_vec();
        let samples = slice_arg(samples, len, "samples")?.to_vec();
        let sampling = if periodic { Sampling::Periodic } else { Sampling::Closed };
        let spec = GridSpec::new(GridBox::new(lower, upper)?, points, sampling)?;
        let field = GridField::new(spec, samples)?;
        write_out(out, Box::into_raw(Box::new(KhGridField { inner: field })))
    })
}

/// Reads a field from the library's text format.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kh_field_read(path: *const c_char, out: *mut *mut KhGridField) -> KhStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| KhStatusError(KhStatus::Parse, "path is not UTF-8".into()))?;
        let field = GridField::read_file(path)?;
        write_out(out, Box::into_raw(Box::new(KhGridField { inner: field })))
    })
}

/// Releases a field. Null is ignored.
///
/// # Safety
/// `field` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kh_field_free(field: *mut KhGridField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Number of samples, or 0 for null.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kh_field_len(field: *const KhGridField) -> usize {
    field.as_ref().map_or(0, |f| f.inner.samples().len())
}

/// Copies the samples into `buf`, which must hold [`kh_field_len`] values.
///
/// # Safety
/// `buf` must be writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn kh_field_samples(field: *const KhGridField, buf: *mut f64, len: usize) -> KhStatus {
    guard(|| {
        let f = field_arg(field, "field")?;
        let s = f.samples();
        if len != s.len() {
            return Err(KhStatusError(KhStatus::Domain, format!("buffer holds {len} values, field has {}", s.len())));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(s.as_ptr(), buf, len);
        Ok(())
    })
}

/// `int F_k[u] phi dx` on the shared grid.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kh_pair_direct(
    u: *const KhGridField,
    k: usize,
    phi: *const KhGridField,
    out: *mut f64,
) -> KhStatus {
    guard(|| {
        let v = pair_direct(field_arg(u, "u")?, k, field_arg(phi, "phi")?)?.value;
        write_out(out, v)
    })
}

/// Total Besov norm `||u||_{s,p}`. `budget` and `seed` only affect the
/// Gagliardo estimator.
///
/// # Safety
/// `u` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kh_besov_norm(
    u: *const KhGridField,
    s: f64,
    p: f64,
    method: KhNormMethod,
    budget: usize,
    seed: u64,
    out: *mut f64,
) -> KhStatus {
    guard(|| {
        let method = match method {
            KhNormMethod::Gagliardo => NormMethod::Gagliardo,
            KhNormMethod::Dyadic => NormMethod::Dyadic,
        };
        let r = besov_norm(field_arg(u, "u")?, BesovParams::new(s, p)?, method, budget, seed)?;
        write_out(out, r.total)
    })
}

/// Sum of the principal `k x k` minors of a row-major `dim x dim` matrix.
///
/// # Safety
/// `matrix` must hold `dim * dim` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn kh_k_trace(matrix: *const f64, dim: usize, k: usize, out: *mut f64) -> KhStatus {
    guard(|| {
        let data = slice_arg(matrix, dim * dim, "matrix")?.to_vec();
        let a = SquareMatrix::new(dim, data)?;
        write_out(out, k_trace(&a, k)?)
    })
}

/// Whether `B(s, p)` embeds in `B_loc(2 - 2/k, k)` in dimension `n`.
///
/// # Safety
/// `holds` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kh_embedding_holds(s: f64, p: f64, k: usize, n: usize, holds: *mut bool) -> KhStatus {
    guard(|| {
        let e = embedding_case(s, p, k, n)?;
        write_out(holds, e == Embedding::Holds)
    })
}
