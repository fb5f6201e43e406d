use std::ffi::{CStr, CString};
use std::ptr;

use rearrange_ffi::*;

const BOX: &str = r#"{
    "measure": {"background_density": "1"},
    "function": {"pieces": [{"from": "-1/2", "to": "1/2", "value": "1"}]}
}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    rr_string_free(s);
    out
}

fn last_error() -> Option<String> {
    let p = rr_last_error_message();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned())
}

fn load(json: &str) -> *mut RrInstance {
    let mut h = ptr::null_mut();
    let status = unsafe { rr_instance_from_json(c(json).as_ptr(), &mut h) };
    assert_eq!(status, RrStatus::Ok, "{:?}", last_error());
    h
}

#[test]
fn box_queries() {
    let h = load(BOX);
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(rr_maximal_at(h, c("3/2").as_ptr(), &mut s), RrStatus::Ok);
        assert_eq!(take(s), "1/2");

        let mut v = 0.0;
        assert_eq!(rr_maximal_at_f64(h, 0.25, &mut v), RrStatus::Ok);
        assert_eq!(v, 1.0);

        assert_eq!(rr_superlevel_json(h, c("1/2").as_ptr(), &mut s), RrStatus::Ok);
        let level: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(level["measure"], "3");

        assert_eq!(rr_rearrange_json(h, &mut s), RrStatus::Ok);
        let fstar: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(fstar["pieces"][0]["from"], "-1/2");

        let mut norms = [0.0; 4];
        assert_eq!(rr_weak_norms(h, c("2").as_ptr(), norms.as_mut_ptr()), RrStatus::Ok);
        assert!(norms[0] / norms[2] <= 1.0 + 2f64.sqrt() + 1e-12);
        rr_instance_free(h);
    }
    assert!(last_error().is_none());
}

#[test]
fn cp_bracket() {
    let (mut lo, mut hi) = (0.0, 0.0);
    let status = unsafe { rr_cp_constant(c("2").as_ptr(), c("1e-12").as_ptr(), &mut lo, &mut hi) };
    assert_eq!(status, RrStatus::Ok);
    let exact = 1.0 + 2f64.sqrt();
    assert!(lo <= exact && exact <= hi && hi - lo <= 1e-12);
}

#[test]
fn error_codes() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(rr_instance_from_json(c("{").as_ptr(), &mut h), RrStatus::Parse);
        assert!(last_error().unwrap().contains("parse"));
        assert!(h.is_null());
        assert_eq!(rr_instance_from_json(ptr::null(), &mut h), RrStatus::NullPointer);

        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(rr_cp_constant(c("1").as_ptr(), c("1e-9").as_ptr(), &mut lo, &mut hi), RrStatus::Domain);

        let h = load(BOX);
        let mut s = ptr::null_mut();
        assert_eq!(rr_superlevel_json(h, c("0").as_ptr(), &mut s), RrStatus::Argument);
        assert_eq!(rr_maximal_at(h, c("x").as_ptr(), &mut s), RrStatus::Parse);
        assert_eq!(rr_maximal_at(ptr::null(), c("0").as_ptr(), &mut s), RrStatus::NullPointer);
        rr_instance_free(h);
        rr_instance_free(ptr::null_mut());
        rr_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/rearrange.h");
    for name in [
        "rr_instance_from_json",
        "rr_instance_free",
        "rr_maximal_at",
        "rr_maximal_at_f64",
        "rr_superlevel_json",
        "rr_rearrange_json",
        "rr_weak_norms",
        "rr_cp_constant",
        "rr_last_error_message",
        "rr_string_free",
        "typedef struct RrInstance RrInstance",
        "RR_STATUS_INFINITE_LEVEL_SET = 7",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
