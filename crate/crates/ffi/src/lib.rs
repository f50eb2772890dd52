//! C ABI for fractal-sft.
//!
//! Every fallible function returns an [`FsftStatus`]; on failure the message is
//! available from [`fsft_last_error_message`] on the same thread. Strings
//! returned by this library must be released with [`fsft_string_free`], handles
//! with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fractal_sft::analysis::{analyze_ifs, IfsOptions};
use fractal_sft::beta_exp::{self, BetaSystem, SftClassification};
use fractal_sft::cli::{self, Request, EXIT_HYPOTHESIS, EXIT_MALFORMED, EXIT_OK, EXIT_VERIFY};
use fractal_sft::exactnum::{rat, Poly};
use fractal_sft::ifs_core::{load_ifs_json, Ifs};
use fractal_sft::open_map::{self, Hole, OpenMapError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FsftStatus {
    Ok = 0,
    Malformed = 1,
    Hypothesis = 2,
    VerifyFailed = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    Panic = 6,
}

/// Finite-type classification codes of the univoque shift.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FsftClassification {
    SftInteriorHit = 0,
    SftRightEndpointHit = 1,
    NotSftLeftEndpointHit = 2,
    NotSftNeverHits = 3,
    Unresolved = 4,
}

/// Opaque β-system handle.
pub struct FsftBeta {
    sys: BetaSystem,
}

/// Opaque IFS handle.
pub struct FsftIfs {
    ifs: Ifs,
}

/// Opaque doubling-map hole handle.
pub struct FsftHole {
    hole: Hole,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg.into()));
}

fn fail(status: FsftStatus, msg: impl Into<String>) -> FsftStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning panics into `FsftStatus::Panic`.
fn guard(f: impl FnOnce() -> FsftStatus) -> FsftStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned());
            fail(FsftStatus::Panic, msg.unwrap_or_else(|| "panic".into()))
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, FsftStatus> {
    if s.is_null() {
        return Err(fail(FsftStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(FsftStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

fn to_c_string(s: String) -> *mut c_char {
    // interior NULs cannot occur in serde_json output or error messages we build
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn beta_status(e: &beta_exp::BetaError) -> FsftStatus {
    match e {
        beta_exp::BetaError::OutOfRange | beta_exp::BetaError::OutOfDomain | beta_exp::BetaError::Num(_) => FsftStatus::Malformed,
        _ => FsftStatus::Hypothesis,
    }
}

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn fsft_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or NULL. Free with `fsft_string_free`.
#[no_mangle]
pub extern "C" fn fsft_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().clone().map(to_c_string).unwrap_or(ptr::null_mut()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fsft_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs a JSON request (the format accepted by `--sweep`, one object) and
/// returns the JSON report and the CLI exit code.
///
/// # Safety
/// `request` must be a NUL-terminated string; `report` and `exit_code` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fsft_run_json(request: *const c_char, report: *mut *mut c_char, exit_code: *mut i32) -> FsftStatus {
    guard(|| {
        if report.is_null() || exit_code.is_null() {
            return fail(FsftStatus::NullPointer, "null output pointer");
        }
        let text = match read_str(request) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let req: Request = match serde_json::from_str(text) {
            Ok(r) => r,
            Err(e) => return fail(FsftStatus::Malformed, format!("request: {e}")),
        };
        let out = cli::run(&req);
        *report = to_c_string(serde_json::to_string(&out.report).expect("serializable"));
        *exit_code = out.code;
        match out.code {
            EXIT_OK => FsftStatus::Ok,
            EXIT_MALFORMED => fail(FsftStatus::Malformed, out.report["error"].as_str().unwrap_or("malformed input").to_string()),
            EXIT_HYPOTHESIS => fail(FsftStatus::Hypothesis, out.report["error"].as_str().unwrap_or("hypothesis failure").to_string()),
            EXIT_VERIFY => fail(FsftStatus::VerifyFailed, "oracle cross-check failed"),
            c => fail(FsftStatus::Panic, format!("unexpected exit code {c}")),
        }
    })
}

/// Builds the β-system for the real root in (1, 2) of the integer polynomial
/// with ascending coefficients `coeffs[0..len]`.
///
/// # Safety
/// `coeffs` must point to `len` readable values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fsft_beta_new(coeffs: *const i64, len: usize, out: *mut *mut FsftBeta) -> FsftStatus {
    guard(|| {
        if coeffs.is_null() || out.is_null() {
            return fail(FsftStatus::NullPointer, "null argument");
        }
        let c = std::slice::from_raw_parts(coeffs, len);
        match BetaSystem::new(&Poly::from_ints(c)) {
            Ok(sys) => {
                *out = Box::into_raw(Box::new(FsftBeta { sys }));
                FsftStatus::Ok
            }
            Err(e) => fail(beta_status(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `h` must come from `fsft_beta_new` and not have been freed; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn fsft_beta_free(h: *mut FsftBeta) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Classifies the univoque shift; `bound` = 0 uses the default orbit bound.
///
/// # Safety
/// `h` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fsft_beta_classify(h: *const FsftBeta, bound: usize, out: *mut FsftClassification, step: *mut usize) -> FsftStatus {
    guard(|| {
        let (Some(h), false) = (h.as_ref(), out.is_null()) else {
            return fail(FsftStatus::NullPointer, "null argument");
        };
        let bound = if bound == 0 { beta_exp::DEFAULT_BOUND } else { bound };
        match beta_exp::classify_sft(&h.sys, bound) {
            Ok(c) => {
                let (code, k) = match c {
                    SftClassification::SftInteriorHit(k) => (FsftClassification::SftInteriorHit, k),
                    SftClassification::SftRightEndpointHit(k) => (FsftClassification::SftRightEndpointHit, k),
                    SftClassification::NotSftLeftEndpointHit(k) => (FsftClassification::NotSftLeftEndpointHit, k),
                    SftClassification::NotSftNeverHits => (FsftClassification::NotSftNeverHits, 0),
                    SftClassification::Unresolved(k) => (FsftClassification::Unresolved, k),
                };
                *out = code;
                if !step.is_null() {
                    *step = k;
                }
                FsftStatus::Ok
            }
            Err(e) => fail(beta_status(&e), e.to_string()),
        }
    })
}

/// Hausdorff dimension of the univoque set; `bound` = 0 uses the default.
///
/// # Safety
/// `h` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fsft_beta_dimension(h: *const FsftBeta, bound: usize, out: *mut f64) -> FsftStatus {
    guard(|| {
        let (Some(h), false) = (h.as_ref(), out.is_null()) else {
            return fail(FsftStatus::NullPointer, "null argument");
        };
        let bound = if bound == 0 { beta_exp::DEFAULT_BOUND } else { bound };
        match beta_exp::univoque_dimension(&h.sys, bound) {
            Ok(d) => {
                *out = d.result.dimension;
                FsftStatus::Ok
            }
            Err(e) => fail(beta_status(&e), e.to_string()),
        }
    })
}

/// Loads an IFS from its JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fsft_ifs_from_json(json: *const c_char, out: *mut *mut FsftIfs) -> FsftStatus {
    guard(|| {
        if out.is_null() {
            return fail(FsftStatus::NullPointer, "null output pointer");
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match load_ifs_json(text) {
            Ok(ifs) => {
                *out = Box::into_raw(Box::new(FsftIfs { ifs }));
                FsftStatus::Ok
            }
            Err(e) => fail(FsftStatus::Malformed, e.to_string()),
        }
    })
}

/// # Safety
/// `h` must come from `fsft_ifs_from_json` and not have been freed; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn fsft_ifs_free(h: *mut FsftIfs) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// dim K and dim U of an exactly overlapping IFS.
///
/// # Safety
/// `h` must be a live handle; `dim_k` and `dim_u` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fsft_ifs_dimensions(h: *const FsftIfs, dim_k: *mut f64, dim_u: *mut f64) -> FsftStatus {
    guard(|| {
        let (Some(h), false, false) = (h.as_ref(), dim_k.is_null(), dim_u.is_null()) else {
            return fail(FsftStatus::NullPointer, "null argument");
        };
        match analyze_ifs(&h.ifs, &IfsOptions::default()) {
            Ok(a) => {
                *dim_k = a.dim_k.dimension;
                *dim_u = a.dim_u.dimension;
                FsftStatus::Ok
            }
            Err(e) if e.is_hypothesis_failure() => fail(FsftStatus::Hypothesis, e.to_string()),
            Err(e) => fail(FsftStatus::Malformed, e.to_string()),
        }
    })
}

/// Hole [a_num/a_den, b_num/b_den) for the doubling map.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fsft_hole_new(a_num: i64, a_den: i64, b_num: i64, b_den: i64, out: *mut *mut FsftHole) -> FsftStatus {
    guard(|| {
        if out.is_null() {
            return fail(FsftStatus::NullPointer, "null output pointer");
        }
        if a_den == 0 || b_den == 0 {
            return fail(FsftStatus::Malformed, "zero denominator");
        }
        match Hole::new(rat(a_num, a_den), rat(b_num, b_den)) {
            Ok(hole) => {
                *out = Box::into_raw(Box::new(FsftHole { hole }));
                FsftStatus::Ok
            }
            Err(e) => fail(FsftStatus::Malformed, e.to_string()),
        }
    })
}

/// # Safety
/// `h` must come from `fsft_hole_new` and not have been freed; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn fsft_hole_free(h: *mut FsftHole) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Hausdorff dimension of the survivor set; 0 when it is countable.
///
/// # Safety
/// `h` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fsft_hole_dimension(h: *const FsftHole, out: *mut f64) -> FsftStatus {
    guard(|| {
        let (Some(h), false) = (h.as_ref(), out.is_null()) else {
            return fail(FsftStatus::NullPointer, "null argument");
        };
        let analysis = match open_map::hole_partition(&h.hole) {
            Ok(a) => a,
            Err(e) => return fail(FsftStatus::Hypothesis, e.to_string()),
        };
        match open_map::survivor_dimension(&analysis) {
            Ok(r) => {
                *out = r.dimension;
                FsftStatus::Ok
            }
            Err(OpenMapError::EmptySurvivor) => {
                *out = 0.0;
                FsftStatus::Ok
            }
            Err(e) => fail(FsftStatus::Hypothesis, e.to_string()),
        }
    })
}
