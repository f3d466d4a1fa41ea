use std::ffi::{CStr, CString};
use std::ptr;

use rsc_fixpoint_ffi::*;

fn last_error() -> String {
    let p = rsc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn gallery(id: &str, params: &[f64]) -> *mut RscMapping {
    let id = CString::new(id).unwrap();
    let mut m = ptr::null_mut();
    let st = unsafe { rsc_mapping_from_gallery(id.as_ptr(), params.as_ptr(), params.len(), &mut m) };
    assert_eq!(st, RscStatus::Ok);
    m
}

#[test]
fn evaluate_gallery_mapping() {
    let m = gallery("constant", &[0.25]);
    unsafe {
        assert_eq!(rsc_mapping_dim(m), 1);
        let mut y = [0.0];
        assert_eq!(rsc_mapping_evaluate(m, [0.9].as_ptr(), 1, y.as_mut_ptr()), RscStatus::Ok);
        assert_eq!(y[0], 0.25);
        let st = rsc_mapping_evaluate(m, [2.0].as_ptr(), 1, y.as_mut_ptr());
        assert_eq!(st, RscStatus::OutsideDomain);
        assert!(last_error().contains("outside the domain"));
        rsc_mapping_free(m);
    }
}

#[test]
fn dsl_parse_error_reports_location() {
    let name = CString::new("gap").unwrap();
    let src = CString::new("domain interval 0 1\npiece [0,0.5) : x\npiece [0.6,1] : x\n").unwrap();
    let mut m = ptr::null_mut();
    let st = unsafe { rsc_mapping_from_dsl(name.as_ptr(), src.as_ptr(), &mut m) };
    assert_eq!(st, RscStatus::Parse);
    assert!(m.is_null());
    assert!(last_error().starts_with("3:7:"), "{}", last_error());
}

#[test]
fn null_and_utf8_arguments() {
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(rsc_mapping_from_dsl(ptr::null(), ptr::null(), &mut m), RscStatus::NullPointer);
        let bad = [0xffu8, 0];
        assert_eq!(rsc_mapping_load(bad.as_ptr().cast(), &mut m), RscStatus::InvalidUtf8);
        assert_eq!(rsc_mapping_dim(ptr::null()), 0);
        rsc_mapping_free(ptr::null_mut());
        rsc_trace_free(ptr::null_mut());
        rsc_string_free(ptr::null_mut());
    }
}

#[test]
fn classify_returns_json_reports() {
    let m = gallery("identity", &[]);
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(rsc_classify_json(m, 11, 0, 0, 1e-9, 1e-12, &mut out), RscStatus::Ok);
        let text = CStr::from_ptr(out).to_str().unwrap().to_owned();
        rsc_string_free(out);
        rsc_mapping_free(m);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let rsc = v.as_array().unwrap().iter().find(|r| r["condition"] == "rsc").unwrap();
        assert_eq!(rsc["verdict"], "fail");
    }
}

#[test]
fn iteration_trace_accessors() {
    let m = gallery("halving", &[]);
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(rsc_run_iteration(m, 0.5, [1.0].as_ptr(), 1, 10, 0.0, &mut t), RscStatus::Ok);
        assert_eq!(rsc_trace_len(t), 10);
        assert_eq!(rsc_trace_dim(t), 1);
        let (mut n, mut x, mut r) = (0usize, [0.0], 0.0);
        assert_eq!(rsc_trace_row(t, 3, &mut n, x.as_mut_ptr(), 1, &mut r), RscStatus::Ok);
        assert_eq!((n, x[0], r), (4, 0.421875, 0.2109375));
        assert_eq!(rsc_trace_row(t, 10, &mut n, ptr::null_mut(), 0, ptr::null_mut()), RscStatus::Input);
        let mut reason = RscStopReason::ResidualTol;
        assert_eq!(rsc_trace_stop_reason(t, &mut reason), RscStatus::Ok);
        assert_eq!(reason, RscStopReason::MaxIter);
        rsc_trace_free(t);

        let st = rsc_run_iteration(m, 0.2, [1.0].as_ptr(), 1, 10, 0.0, &mut t);
        assert_eq!(st, RscStatus::Input);
        assert!(last_error().contains("[1/2, 1)"));
        rsc_mapping_free(m);
    }
}

#[test]
fn modulus_and_norm_switch() {
    let (mut delta, mut uc) = (0.0, false);
    unsafe {
        assert_eq!(rsc_estimate_modulus(2.0, 2, 1.0, 20_000, 1, &mut delta, &mut uc), RscStatus::Ok);
        assert!((delta - (1.0 - 3f64.sqrt() / 2.0)).abs() < 1e-3);
        assert!(uc);
        assert_eq!(rsc_estimate_modulus(1.0, 2, 1.0, 2_000, 1, &mut delta, &mut uc), RscStatus::Ok);
        assert!(delta.abs() < 1e-9 && !uc);
        assert_eq!(rsc_estimate_modulus(0.5, 2, 1.0, 10, 1, &mut delta, &mut uc), RscStatus::Input);

        let m = gallery("planar-rotation", &[]);
        assert_eq!(rsc_mapping_set_norm(m, f64::INFINITY), RscStatus::Ok);
        assert_eq!(rsc_mapping_set_norm(m, 0.3), RscStatus::Input);
        rsc_mapping_free(m);
    }
}
