//! C ABI over the reduction engine.
//!
//! Every fallible function returns an [`RfeStatus`]; on failure the message
//! is available from [`rfe_last_error`] on the same thread. Handles are
//! opaque and must be released with their matching `*_free` function.
//! Strings returned through `char **` out-parameters are owned by the caller
//! and released with [`rfe_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Deserialize;

use reduction_engine::arith::IntPoly;
use reduction_engine::domain::{ConstraintSet, Domain, SpecFile};
use reduction_engine::harness::{self, Application, DomainChoice, HarnessConfig};
use reduction_engine::reduce::{
    apply_map, density_scan, find_maps, parse_predictions, parse_prime_range, Mode, PrimeSearchConfig, ReductionMap,
};
use reduction_engine::specialize::{specialize, SpecializationResult, SpecializeBudget};
use reduction_engine::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RfeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    NotADomain = 4,
    NotFound = 5,
    Precision = 6,
    Internal = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RfeMode {
    Strict = 0,
    Relaxed = 1,
}

/// A loaded presentation with its constraints and integer specialization.
pub struct RfeEngine {
    domain: Domain,
    constraints: ConstraintSet,
    specialization: SpecializationResult,
}

/// Maps found by [`rfe_engine_find_maps`], in ascending prime order.
pub struct RfeMapList {
    maps: Vec<ReductionMap>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> RfeStatus {
    match e {
        Error::InvalidArgument(_) => RfeStatus::InvalidArgument,
        Error::Parse { .. } => RfeStatus::ParseError,
        Error::NotADomain(_) => RfeStatus::NotADomain,
        Error::Specialization { .. } => RfeStatus::NotFound,
        Error::Precision { .. } => RfeStatus::Precision,
        Error::Internal(_) => RfeStatus::Internal,
    }
}

struct Fail(RfeStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(RfeStatus::InvalidArgument, msg.into())
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RfeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RfeStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside the reduction engine");
            RfeStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(RfeStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut()
        .ok_or_else(|| Fail(RfeStatus::NullPointer, format!("{what} is null")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(RfeStatus::NullPointer, format!("{what} is null")))
}

fn c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail(RfeStatus::Internal, "output contains a NUL byte".into()))
}

fn map_at(list: &RfeMapList, index: usize) -> Result<&ReductionMap, Fail> {
    list.maps
        .get(index)
        .ok_or_else(|| invalid(format!("map index {index} out of range (have {})", list.maps.len())))
}

fn to_u64(x: &BigUint) -> Result<u64, Fail> {
    x.to_u64()
        .ok_or_else(|| Fail(RfeStatus::Internal, "value does not fit in 64 bits".into()))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rfe_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rfe_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rfe_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a JSON spec and specializes its transcendentals with `seed`.
///
/// # Safety
/// `spec_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rfe_engine_new(spec_json: *const c_char, seed: u64, out: *mut *mut RfeEngine) -> RfeStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let spec = SpecFile::from_json(str_arg(spec_json, "spec_json")?)?;
        let loaded = spec.load()?;
        let specialization = specialize(&loaded.domain, &loaded.constraints, seed, SpecializeBudget::default())?;
        *out = Box::into_raw(Box::new(RfeEngine {
            domain: loaded.domain,
            constraints: loaded.constraints,
            specialization,
        }));
        Ok(())
    })
}

/// # Safety
/// `engine` must come from [`rfe_engine_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rfe_engine_free(engine: *mut RfeEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Degree of the primitive-element polynomial `f_theta`.
///
/// # Safety
/// `engine` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rfe_engine_degree(engine: *const RfeEngine, out: *mut usize) -> RfeStatus {
    guard(|| {
        let e = handle(engine, "engine")?;
        *out_arg(out, "out")? = e.domain.composition().f_theta.deg0();
        Ok(())
    })
}

/// Scans primes in `[p_min, p_max]` for up to `max_maps` verified maps.
/// Finding none is success with an empty list.
///
/// # Safety
/// `engine` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rfe_engine_find_maps(
    engine: *const RfeEngine,
    mode: RfeMode,
    p_min: u64,
    p_max: u64,
    max_maps: usize,
    out: *mut *mut RfeMapList,
) -> RfeStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let e = handle(engine, "engine")?;
        let mode = match mode {
            RfeMode::Strict => Mode::Strict,
            RfeMode::Relaxed => Mode::Relaxed,
        };
        let cfg = PrimeSearchConfig::new(p_min, p_max, mode, max_maps)?;
        let maps = find_maps(&e.domain, &e.constraints, &e.specialization, &cfg)?;
        *out = Box::into_raw(Box::new(RfeMapList { maps }));
        Ok(())
    })
}

/// # Safety
/// `list` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rfe_map_list_len(list: *const RfeMapList) -> usize {
    list.as_ref().map_or(0, |l| l.maps.len())
}

/// Prime and root `a` of map `index`.
///
/// # Safety
/// `list` must be a live handle; `p` and `a` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rfe_map_get(list: *const RfeMapList, index: usize, p: *mut u64, a: *mut u64) -> RfeStatus {
    guard(|| {
        let m = map_at(handle(list, "list")?, index)?;
        *out_arg(p, "p")? = to_u64(&m.p)?;
        *out_arg(a, "a")? = to_u64(&m.a)?;
        Ok(())
    })
}

/// Image of the generator `name` under map `index`.
///
/// # Safety
/// `list` must be a live handle, `name` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rfe_map_image(
    list: *const RfeMapList,
    index: usize,
    name: *const c_char,
    out: *mut u64,
) -> RfeStatus {
    guard(|| {
        let m = map_at(handle(list, "list")?, index)?;
        let name = str_arg(name, "name")?;
        let v = m
            .images
            .get(name)
            .ok_or_else(|| invalid(format!("no generator named {name:?}")))?;
        *out_arg(out, "out")? = to_u64(v)?;
        Ok(())
    })
}

/// Image of the expression `expr` under map `index`.
///
/// # Safety
/// Handles must be live and from the same engine; `expr` NUL-terminated;
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rfe_map_apply(
    engine: *const RfeEngine,
    list: *const RfeMapList,
    index: usize,
    expr: *const c_char,
    out: *mut u64,
) -> RfeStatus {
    guard(|| {
        let e = handle(engine, "engine")?;
        let m = map_at(handle(list, "list")?, index)?;
        let x = e.domain.parse(str_arg(expr, "expr")?)?;
        *out_arg(out, "out")? = to_u64(&apply_map(m, &x)?)?;
        Ok(())
    })
}

/// The whole list as a JSON array.
///
/// # Safety
/// `list` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rfe_map_list_to_json(list: *const RfeMapList, out: *mut *mut c_char) -> RfeStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let l = handle(list, "list")?;
        *out = c_string(serde_json::to_string(&l.maps).map_err(|e| Fail(RfeStatus::Internal, e.to_string()))?)?;
        Ok(())
    })
}

/// # Safety
/// `list` must come from [`rfe_engine_find_maps`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rfe_map_list_free(list: *mut RfeMapList) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}

/// Factorization-pattern counts of `sum coeffs[k] z^k` modulo primes up to
/// `bound`, as a JSON object. `predict` may be null.
///
/// # Safety
/// `coeffs` must point to `len` values; `predict` null or NUL-terminated;
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rfe_density_scan(
    coeffs: *const i64,
    len: usize,
    bound: u64,
    predict: *const c_char,
    out: *mut *mut c_char,
) -> RfeStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        if coeffs.is_null() {
            return Err(Fail(RfeStatus::NullPointer, "coeffs is null".into()));
        }
        let g = IntPoly::from_i64s(std::slice::from_raw_parts(coeffs, len));
        let pred = if predict.is_null() {
            None
        } else {
            Some(parse_predictions(str_arg(predict, "predict")?)?)
        };
        let report = density_scan(&g, bound, pred.as_ref())?;
        *out = c_string(serde_json::to_string(&report).map_err(|e| Fail(RfeStatus::Internal, e.to_string()))?)?;
        Ok(())
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HarnessRequest {
    application: String,
    size: Option<usize>,
    trials: Option<usize>,
    #[serde(default)]
    seed: u64,
    domain: Option<String>,
    primes: Option<String>,
    mode: Option<String>,
    #[serde(default)]
    allow_small_primes: bool,
    #[serde(default)]
    exhaustive: bool,
    support: Option<Vec<String>>,
    samples: Option<usize>,
}

impl HarnessRequest {
    fn config(self) -> Result<HarnessConfig, Fail> {
        let app: Application = self.application.parse()?;
        let mut cfg = HarnessConfig::new(app);
        cfg.size = self.size.unwrap_or(cfg.size);
        cfg.trials = self.trials.unwrap_or(cfg.trials);
        cfg.seed = self.seed;
        if let Some(d) = self.domain {
            cfg.domain = d.parse::<DomainChoice>()?;
        }
        if let Some(p) = self.primes {
            (cfg.p_min, cfg.p_max) = parse_prime_range(&p)?;
        }
        if let Some(m) = self.mode {
            cfg.mode = m.parse()?;
        }
        cfg.require_large_prime = !self.allow_small_primes;
        cfg.exhaustive = self.exhaustive;
        if let Some(s) = self.support {
            cfg.support = s;
        }
        cfg.samples = self.samples.unwrap_or(cfg.samples);
        Ok(cfg)
    }
}

/// Runs a harness described by a JSON object such as
/// `{"application": "sumprod", "size": 8, "trials": 50, "seed": 42}` and
/// returns the report as JSON. `passed` is set to 1 when no trial failed
/// and at least one was conclusive.
///
/// # Safety
/// `config_json` must be NUL-terminated; `out` and `passed` writable.
#[no_mangle]
pub unsafe extern "C" fn rfe_harness_run(
    config_json: *const c_char,
    out: *mut *mut c_char,
    passed: *mut i32,
) -> RfeStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let passed = out_arg(passed, "passed")?;
        let req: HarnessRequest = serde_json::from_str(str_arg(config_json, "config_json")?)
            .map_err(|e| invalid(format!("harness config: {e}")))?;
        let report = harness::run(&req.config()?)?;
        *passed = report.success() as i32;
        *out = c_string(serde_json::to_string(&report).map_err(|e| Fail(RfeStatus::Internal, e.to_string()))?)?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_error() -> String {
        let p = rfe_last_error();
        assert!(!p.is_null());
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }

    #[test]
    fn guard_maps_errors_and_panics() {
        assert_eq!(guard(|| Ok(())), RfeStatus::Ok);
        assert_eq!(guard(|| Err(invalid("bad"))), RfeStatus::InvalidArgument);
        assert_eq!(last_error(), "bad");
        assert_eq!(guard(|| panic!("boom")), RfeStatus::Panic);
        assert!(last_error().contains("panic"));
    }

    #[test]
    fn error_statuses() {
        assert_eq!(status_of(&Error::NotADomain("x".into())), RfeStatus::NotADomain);
        assert_eq!(
            status_of(&Error::InvalidArgument("x".into())),
            RfeStatus::InvalidArgument
        );
        set_error("a\0b");
        assert_eq!(last_error(), "a b");
    }

    #[test]
    fn null_arguments() {
        unsafe {
            assert!(str_arg(ptr::null(), "s").is_err());
            assert!(out_arg::<u64>(ptr::null_mut(), "o").is_err());
            assert!(handle::<RfeEngine>(ptr::null(), "h").is_err());
        }
    }
}
