use std::ffi::{CStr, CString};
use std::ptr;

use quatrank_ffi::*;

struct Handle(*mut QrMatrix);

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { qr_matrix_free(self.0) }
    }
}

fn from_literals(rows: &[&[&str]]) -> Handle {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(qr_matrix_new(rows.len(), cols, &mut m), QrStatus::Ok);
        for (i, row) in rows.iter().enumerate() {
            for (j, lit) in row.iter().enumerate() {
                let lit = CString::new(*lit).unwrap();
                assert_eq!(qr_matrix_set(m, i, j, lit.as_ptr()), QrStatus::Ok);
            }
        }
    }
    Handle(m)
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { qr_string_free(p) };
    s
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(qr_last_error()) }.to_str().unwrap().to_owned()
}

fn get(m: &Handle, i: usize, j: usize) -> String {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { qr_matrix_get(m.0, i, j, &mut s) }, QrStatus::Ok);
    take_string(s)
}

#[test]
fn entries_round_trip_through_json() {
    let m = from_literals(&[&["1/2+i", "0"], &["-k", "3"]]);
    assert_eq!(unsafe { (qr_matrix_rows(m.0), qr_matrix_cols(m.0)) }, (2, 2));
    assert_eq!(get(&m, 0, 0), "1/2+i");

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { qr_matrix_to_json(m.0, &mut json) }, QrStatus::Ok);
    let json = CString::new(take_string(json)).unwrap();
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { qr_matrix_from_json(json.as_ptr(), &mut back) }, QrStatus::Ok);
    let back = Handle(back);
    assert_eq!(get(&back, 1, 0), "-k");

    let mut r = 0;
    assert_eq!(unsafe { qr_rank(back.0, &mut r) }, QrStatus::Ok);
    assert_eq!(r, 2);
}

#[test]
fn errors_set_status_and_message() {
    let m = from_literals(&[&["1"]]);
    let bad = CString::new("1+*j").unwrap();
    assert_eq!(unsafe { qr_matrix_set(m.0, 0, 0, bad.as_ptr()) }, QrStatus::Parse);
    assert!(last_error().contains("parse error"));

    let one = CString::new("1").unwrap();
    assert_eq!(unsafe { qr_matrix_set(m.0, 1, 0, one.as_ptr()) }, QrStatus::IndexOutOfRange);

    let mut r = 0;
    assert_eq!(unsafe { qr_rank(ptr::null(), &mut r) }, QrStatus::NullPointer);
    assert_eq!(unsafe { qr_rank(m.0, ptr::null_mut()) }, QrStatus::NullPointer);

    let doc = CString::new(r#"{"rows": 2, "cols": 1, "entries": [["1"]]}"#).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { qr_matrix_from_json(doc.as_ptr(), &mut out) }, QrStatus::DimensionMismatch);
    assert!(out.is_null());
}

#[test]
fn solves_the_ijk_instance() {
    let (a, b, c, d, e) = (
        from_literals(&[&["k"]]),
        from_literals(&[&["i"]]),
        from_literals(&[&["0"]]),
        from_literals(&[&["j"]]),
        from_literals(&[&["0"]]),
    );
    let mut ok = false;
    assert_eq!(unsafe { qr_is_consistent(a.0, b.0, c.0, d.0, e.0, &mut ok) }, QrStatus::Ok);
    assert!(ok);

    let (mut x, mut y) = (ptr::null_mut(), ptr::null_mut());
    let status = unsafe { qr_solve(a.0, b.0, c.0, d.0, e.0, QrSolveMode::Particular, &mut x, &mut y) };
    assert_eq!(status, QrStatus::Ok);
    let (x, _y) = (Handle(x), Handle(y));
    assert_eq!(get(&x, 0, 0), "1");
}

#[test]
fn reports_inconsistency_with_the_equality() {
    let (a, zero, one) = (from_literals(&[&["1"]]), from_literals(&[&["0"]]), from_literals(&[&["1"]]));
    let (mut x, mut y) = (ptr::null_mut(), ptr::null_mut());
    let status = unsafe { qr_solve(a.0, zero.0, zero.0, one.0, one.0, QrSolveMode::MinRankX, &mut x, &mut y) };
    assert_eq!(status, QrStatus::Inconsistent);
    assert!(last_error().contains("r[A C B] = r[C B]"));
    assert!(x.is_null() && y.is_null());
}

#[test]
fn extremal_and_decomposition() {
    let one = from_literals(&[&["1"]]);
    let (mut hi, mut lo) = (9, 9);
    let status = unsafe { qr_extremal_p(one.0, one.0, one.0, one.0, one.0, &mut hi, &mut lo) };
    assert_eq!(status, QrStatus::Ok);
    assert_eq!((lo, hi), (0, 1));

    let mut doc = ptr::null_mut();
    assert_eq!(unsafe { qr_decompose_json(one.0, one.0, one.0, one.0, one.0, &mut doc) }, QrStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(doc)).unwrap();
    assert_eq!(v["dims"]["m3"], 1);
    assert!(v["transforms"]["P_inv"].is_object());
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/quatrank.h")).unwrap();
    for name in [
        "qr_last_error",
        "qr_string_free",
        "qr_matrix_new",
        "qr_matrix_from_json",
        "qr_matrix_to_json",
        "qr_matrix_free",
        "qr_matrix_rows",
        "qr_matrix_cols",
        "qr_matrix_set",
        "qr_matrix_get",
        "qr_rank",
        "qr_is_consistent",
        "qr_solve",
        "qr_extremal_p",
        "qr_decompose_json",
        "typedef struct QrMatrix QrMatrix",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
