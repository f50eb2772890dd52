use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use fractal_sft_ffi::*;

fn last_error() -> String {
    let p = fsft_last_error_message();
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { fsft_string_free(p) };
    s
}

#[test]
fn beta_handle() {
    let coeffs = [1i64, 0, -2, -1, 1];
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { fsft_beta_new(coeffs.as_ptr(), coeffs.len(), &mut h) }, FsftStatus::Ok);
    let mut c = FsftClassification::Unresolved;
    assert_eq!(unsafe { fsft_beta_classify(h, 0, &mut c, ptr::null_mut()) }, FsftStatus::Ok);
    assert_eq!(c, FsftClassification::NotSftNeverHits);
    let mut d = 0.0;
    assert_eq!(unsafe { fsft_beta_dimension(h, 0, &mut d) }, FsftStatus::Ok);
    assert!((d - 0.88521083).abs() < 1e-7);
    unsafe { fsft_beta_free(h) };
}

#[test]
fn golden_mean_is_a_hypothesis_failure() {
    let coeffs = [-1i64, -1, 1];
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { fsft_beta_new(coeffs.as_ptr(), coeffs.len(), &mut h) }, FsftStatus::Ok);
    let mut c = FsftClassification::Unresolved;
    assert_eq!(unsafe { fsft_beta_classify(h, 0, &mut c, ptr::null_mut()) }, FsftStatus::Hypothesis);
    assert!(!last_error().is_empty());
    unsafe { fsft_beta_free(h) };
}

#[test]
fn ifs_handle() {
    let json = CString::new(include_str!("../../core/fixtures/q_family_4.json")).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { fsft_ifs_from_json(json.as_ptr(), &mut h) }, FsftStatus::Ok);
    let (mut k, mut u) = (0.0, 0.0);
    assert_eq!(unsafe { fsft_ifs_dimensions(h, &mut k, &mut u) }, FsftStatus::Ok);
    assert!(u < k && k < 1.0);
    unsafe { fsft_ifs_free(h) };

    let bad = CString::new("{\"maps\": []}").unwrap();
    assert_eq!(unsafe { fsft_ifs_from_json(bad.as_ptr(), &mut h) }, FsftStatus::Malformed);
}

#[test]
fn null_and_utf8_checks() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { fsft_ifs_from_json(ptr::null(), &mut h) }, FsftStatus::NullPointer);
    let bytes = [0xffu8, 0xfe, 0];
    assert_eq!(unsafe { fsft_ifs_from_json(bytes.as_ptr().cast(), &mut h) }, FsftStatus::InvalidUtf8);
    assert_eq!(unsafe { fsft_hole_dimension(ptr::null(), ptr::null_mut()) }, FsftStatus::NullPointer);
    assert_eq!(unsafe { fsft_hole_new(1, 0, 1, 2, &mut ptr::null_mut()) }, FsftStatus::Malformed);
    unsafe { fsft_string_free(ptr::null_mut()) };
}

#[test]
fn run_json_codes() {
    let mut report = ptr::null_mut();
    let mut code = -1;
    let req = CString::new(r#"{"command": "hole-dim", "a": "(01010)", "b": "(10010)"}"#).unwrap();
    assert_eq!(unsafe { fsft_run_json(req.as_ptr(), &mut report, &mut code) }, FsftStatus::Ok);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(report) }.to_str().unwrap()).unwrap();
    assert_eq!(v["result"]["dimension"]["dimension"], 0.0);
    unsafe { fsft_string_free(report) };

    let req = CString::new(r#"{"command": "uk-family", "lambda": "1/2"}"#).unwrap();
    assert_eq!(unsafe { fsft_run_json(req.as_ptr(), &mut report, &mut code) }, FsftStatus::Hypothesis);
    assert_eq!(code, 2);
    unsafe { fsft_string_free(report) };

    let req = CString::new("not json").unwrap();
    assert_eq!(unsafe { fsft_run_json(req.as_ptr(), &mut report, &mut code) }, FsftStatus::Malformed);
    assert!(last_error().starts_with("request"));
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(fsft_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_generated() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/fractal_sft.h")).unwrap();
    for f in ["fsft_run_json", "fsft_beta_new", "fsft_hole_dimension", "fsft_last_error_message", "FSFT_STATUS_NULL_POINTER"] {
        assert!(h.contains(f), "{f} missing from header");
    }
}

/// Compiles the C smoke test against the header and the static library.
#[test]
fn c_program_links() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let exe = std::env::current_exe().unwrap();
    let target_dir = exe.parent().unwrap().parent().unwrap();
    let lib = target_dir.join("libfractal_sft_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let out_dir = tempfile::tempdir().unwrap();
    let bin = out_dir.path().join("smoke");
    let status = Command::new(&cc)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}

fn which_cc() -> Result<String, ()> {
    for c in ["cc", "gcc", "clang"] {
        if Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(c.to_string());
        }
    }
    Err(())
}
