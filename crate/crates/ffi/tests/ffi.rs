//! Exercises the C ABI from Rust through raw pointers.

use std::ffi::{CStr, CString};
use std::ptr;

use khessian_ffi::*;

fn last_error() -> String {
    let p = kh_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

/// `0.5 x^2 + 1.5 y^2` on a closed 41 x 41 grid over `[-1, 1]^2`.
fn quadratic(points: usize) -> Vec<f64> {
    let h = 2.0 / (points - 1) as f64;
    let mut out = Vec::with_capacity(points * points);
    for i in 0..points {
        for j in 0..points {
            let (x, y) = (-1.0 + i as f64 * h, -1.0 + j as f64 * h);
            out.push(0.5 * x * x + 1.5 * y * y);
        }
    }
    out
}

fn make_field(samples: &[f64], points: usize) -> *mut KhGridField {
    let (lo, hi, pts) = ([-1.0, -1.0], [1.0, 1.0], [points, points]);
    let mut f = ptr::null_mut();
    let st = unsafe {
        kh_field_new(2, lo.as_ptr(), hi.as_ptr(), pts.as_ptr(), false, samples.as_ptr(), samples.len(), &mut f)
    };
    assert_eq!(st, KhStatus::Ok);
    assert!(!f.is_null());
    f
}

#[test]
fn field_round_trip_and_pairing() {
    let samples = quadratic(41);
    let u = make_field(&samples, 41);
    assert_eq!(unsafe { kh_field_len(u) }, 41 * 41);
    let mut back = vec![0.0; 41 * 41];
    assert_eq!(unsafe { kh_field_samples(u, back.as_mut_ptr(), back.len()) }, KhStatus::Ok);
    assert_eq!(back, samples);

    // det D^2 u = 3, against phi = 1 the pairing is 3 * area = 12
    let ones = vec![1.0; 41 * 41];
    let phi = make_field(&ones, 41);
    let mut v = 0.0;
    assert_eq!(unsafe { kh_pair_direct(u, 2, phi, &mut v) }, KhStatus::Ok);
    assert!((v - 12.0).abs() < 1e-9, "{v}");
    assert_eq!(unsafe { kh_pair_direct(u, 1, phi, &mut v) }, KhStatus::Ok);
    assert!((v - 16.0).abs() < 1e-9, "{v}");

    let mut norm = 0.0;
    let st = unsafe { kh_besov_norm(u, 1.5, 2.0, KhNormMethod::Gagliardo, 2000, 1, &mut norm) };
    assert_eq!(st, KhStatus::Ok);
    assert!(norm.is_finite() && norm > 0.0);
    unsafe {
        kh_field_free(u);
        kh_field_free(phi);
        kh_field_free(ptr::null_mut());
    }
}

#[test]
fn errors_set_status_and_message() {
    let samples = quadratic(41);
    let mut f = ptr::null_mut();
    let (lo, hi, pts) = ([-1.0, -1.0], [1.0, 1.0], [41usize, 40]);
    let st = unsafe { kh_field_new(2, lo.as_ptr(), hi.as_ptr(), pts.as_ptr(), false, samples.as_ptr(), samples.len(), &mut f) };
    assert_eq!(st, KhStatus::Domain);
    assert!(f.is_null());
    assert!(!last_error().is_empty());

    let u = make_field(&samples, 41);
    let mut v = 0.0;
    assert_eq!(unsafe { kh_pair_direct(u, 3, u, &mut v) }, KhStatus::Domain);
    assert!(last_error().contains("k must lie"));
    assert_eq!(unsafe { kh_pair_direct(u, 2, ptr::null(), &mut v) }, KhStatus::NullPointer);
    assert_eq!(unsafe { kh_pair_direct(u, 2, u, ptr::null_mut()) }, KhStatus::NullPointer);
    // a successful call clears the message
    assert_eq!(unsafe { kh_pair_direct(u, 2, u, &mut v) }, KhStatus::Ok);
    assert!(kh_last_error().is_null());
    unsafe { kh_field_free(u) };

    let missing = CString::new("/nonexistent/field.txt").unwrap();
    assert_eq!(unsafe { kh_field_read(missing.as_ptr(), &mut f) }, KhStatus::Io);
}

#[test]
fn reads_field_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.txt");
    std::fs::write(&path, "1; 0; 1; 4\n0\n1\n2\n3\n").unwrap();
    let c = CString::new(path.to_str().unwrap()).unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { kh_field_read(c.as_ptr(), &mut f) }, KhStatus::Ok);
    assert_eq!(unsafe { kh_field_len(f) }, 4);
    unsafe { kh_field_free(f) };
    std::fs::write(&path, "1; 0; 1; 4\n0\nx\n2\n3\n").unwrap();
    assert_eq!(unsafe { kh_field_read(c.as_ptr(), &mut f) }, KhStatus::Parse);
}

#[test]
fn scalar_entry_points() {
    // k-traces of diag(1, 2, 3): 6, 11, 6
    let m = [1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0];
    for (k, want) in [(1, 6.0), (2, 11.0), (3, 6.0)] {
        let mut v = 0.0;
        assert_eq!(unsafe { kh_k_trace(m.as_ptr(), 3, k, &mut v) }, KhStatus::Ok);
        assert!((v - want).abs() < 1e-12);
    }
    let mut holds = false;
    assert_eq!(unsafe { kh_embedding_holds(4.0 / 3.0, 3.0, 3, 3, &mut holds) }, KhStatus::Ok);
    assert!(holds);
    assert_eq!(unsafe { kh_embedding_holds(1.1, 2.0, 3, 3, &mut holds) }, KhStatus::Ok);
    assert!(!holds);
    let v = unsafe { CStr::from_ptr(kh_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/khessian.h")).unwrap();
    for sym in [
        "kh_last_error", "kh_version", "kh_field_new", "kh_field_read", "kh_field_free", "kh_field_len",
        "kh_field_samples", "kh_pair_direct", "kh_besov_norm", "kh_k_trace", "kh_embedding_holds",
        "KH_STATUS_NULL_POINTER", "typedef struct KhGridField KhGridField",
    ] {
        assert!(header.contains(sym), "{sym} missing from header");
    }
}
