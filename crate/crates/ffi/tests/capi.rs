use std::ffi::{c_char, CStr, CString};
use std::ptr;

use reduction_engine_ffi::*;

fn last_error() -> String {
    let p = rfe_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { rfe_string_free(p) };
    s
}

fn engine(spec: &str) -> Result<*mut RfeEngine, RfeStatus> {
    let spec = CString::new(spec).unwrap();
    let mut out = ptr::null_mut();
    match unsafe { rfe_engine_new(spec.as_ptr(), 42, &mut out) } {
        RfeStatus::Ok => Ok(out),
        s => {
            assert!(out.is_null());
            Err(s)
        }
    }
}

const SQRT2: &str = r#"{"algebraics":[{"name":"r2","minpoly":[-2,0,1]}],"constraints":{"custom":["r2 - 1"]}}"#;

#[test]
fn sqrt2_maps_through_the_abi() {
    let e = engine(SQRT2).unwrap();
    let mut deg = 0;
    assert_eq!(unsafe { rfe_engine_degree(e, &mut deg) }, RfeStatus::Ok);
    assert_eq!(deg, 2);

    let mut list = ptr::null_mut();
    assert_eq!(
        unsafe { rfe_engine_find_maps(e, RfeMode::Strict, 2, 50, 3, &mut list) },
        RfeStatus::Ok
    );
    assert_eq!(unsafe { rfe_map_list_len(list) }, 3);
    let (mut p, mut a) = (0, 0);
    assert_eq!(unsafe { rfe_map_get(list, 0, &mut p, &mut a) }, RfeStatus::Ok);
    assert_eq!(p, 7);
    assert!(a == 3 || a == 4);

    let name = CString::new("r2").unwrap();
    let mut img = 0;
    assert_eq!(
        unsafe { rfe_map_image(list, 0, name.as_ptr(), &mut img) },
        RfeStatus::Ok
    );
    assert_eq!(img * img % 7, 2);

    let expr = CString::new("(r2 + 1)^2").unwrap();
    let mut v = 0;
    assert_eq!(
        unsafe { rfe_map_apply(e, list, 0, expr.as_ptr(), &mut v) },
        RfeStatus::Ok
    );
    assert_eq!(v, (img + 1) * (img + 1) % 7);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { rfe_map_list_to_json(list, &mut json) }, RfeStatus::Ok);
    let maps: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
    assert_eq!(maps.as_array().unwrap().len(), 3);
    assert_eq!(maps[0]["p"], serde_json::json!(7));

    assert_eq!(
        unsafe { rfe_map_get(list, 9, &mut p, &mut a) },
        RfeStatus::InvalidArgument
    );
    assert!(last_error().contains('9'));
    let bad = CString::new("x").unwrap();
    assert_ne!(unsafe { rfe_map_image(list, 0, bad.as_ptr(), &mut img) }, RfeStatus::Ok);

    unsafe {
        rfe_map_list_free(list);
        rfe_engine_free(e);
    }
}

#[test]
fn empty_search_is_an_empty_list() {
    let e = engine(r#"{"algebraics":[{"name":"i","minpoly":[1,0,1]}],"constraints":{"custom":["i"]}}"#).unwrap();
    let mut list = ptr::null_mut();
    assert_eq!(
        unsafe { rfe_engine_find_maps(e, RfeMode::Strict, 2, 3, 5, &mut list) },
        RfeStatus::Ok
    );
    assert_eq!(unsafe { rfe_map_list_len(list) }, 0);
    assert_eq!(
        unsafe { rfe_engine_find_maps(e, RfeMode::Strict, 9, 3, 5, &mut list) },
        RfeStatus::InvalidArgument
    );
    unsafe {
        rfe_map_list_free(list);
        rfe_engine_free(e);
    }
}

#[test]
fn error_codes() {
    assert_eq!(engine("{").unwrap_err(), RfeStatus::InvalidArgument);
    assert_eq!(
        engine(r#"{"algebraics":[{"name":"i","minpoly":[]}]}"#).unwrap_err(),
        RfeStatus::InvalidArgument
    );
    assert_eq!(
        engine(r#"{"algebraics":[{"name":"s","minpoly":[-4,0,1]}]}"#).unwrap_err(),
        RfeStatus::NotADomain
    );
    assert_eq!(
        engine(r#"{"algebraics":[{"name":"r2","minpoly":[-2,0,1]}],"constraints":{"custom":["r2 +"]}}"#).unwrap_err(),
        RfeStatus::ParseError
    );
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { rfe_engine_new(ptr::null(), 0, &mut out) },
        RfeStatus::NullPointer
    );
    assert!(!last_error().is_empty());
    let mut deg = 0;
    assert_eq!(
        unsafe { rfe_engine_degree(ptr::null(), &mut deg) },
        RfeStatus::NullPointer
    );
    assert_eq!(unsafe { rfe_map_list_len(ptr::null()) }, 0);
    unsafe {
        rfe_engine_free(ptr::null_mut());
        rfe_map_list_free(ptr::null_mut());
        rfe_string_free(ptr::null_mut());
    }
}

#[test]
fn density_through_the_abi() {
    let coeffs = [-2i64, 0, 1];
    let pred = CString::new("1,1=1/2;2=1/2").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { rfe_density_scan(coeffs.as_ptr(), coeffs.len(), 1000, pred.as_ptr(), &mut out) },
        RfeStatus::Ok
    );
    let r: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(r["counts"]["1,1"], serde_json::json!(80));
    assert_eq!(r["counts"]["2"], serde_json::json!(87));

    let sq = [1i64, 2, 1];
    assert_eq!(
        unsafe { rfe_density_scan(sq.as_ptr(), sq.len(), 100, ptr::null(), &mut out) },
        RfeStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { rfe_density_scan(ptr::null(), 3, 100, ptr::null(), &mut out) },
        RfeStatus::NullPointer
    );
}

#[test]
fn harness_through_the_abi() {
    let cfg = CString::new(r#"{"application":"sumprod","size":4,"trials":3,"seed":1}"#).unwrap();
    let (mut out, mut passed) = (ptr::null_mut(), -1);
    assert_eq!(
        unsafe { rfe_harness_run(cfg.as_ptr(), &mut out, &mut passed) },
        RfeStatus::Ok
    );
    assert_eq!(passed, 1);
    let r: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(r["failed"], serde_json::json!(0));
    assert_eq!(r["trials"].as_array().unwrap().len(), 3);

    let bad = CString::new(r#"{"application":"sumprod","colour":1}"#).unwrap();
    assert_eq!(
        unsafe { rfe_harness_run(bad.as_ptr(), &mut out, &mut passed) },
        RfeStatus::InvalidArgument
    );
    let bad = CString::new(r#"{"application":"nope"}"#).unwrap();
    assert_eq!(
        unsafe { rfe_harness_run(bad.as_ptr(), &mut out, &mut passed) },
        RfeStatus::InvalidArgument
    );
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(rfe_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/reduction_engine.h");
    let src = include_str!("../src/lib.rs");
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| {
            l.trim_start()
                .strip_prefix("pub unsafe extern \"C\" fn ")
                .or(l.trim_start().strip_prefix("pub extern \"C\" fn "))
        })
        .map(|l| l.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15, "{exports:?}");
    for f in exports {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    for c in [
        "RFE_STATUS_OK = 0",
        "RFE_STATUS_NOT_A_DOMAIN = 4",
        "RFE_MODE_RELAXED = 1",
        "typedef struct RfeEngine RfeEngine;",
    ] {
        assert!(header.contains(c), "{c}");
    }
}
