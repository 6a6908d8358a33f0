use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use steklov_iso_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = si_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn domain(json: &str) -> *mut SiDomain {
    let mut d = ptr::null_mut();
    assert_eq!(si_domain_from_json(c(json).as_ptr(), &mut d), SiStatus::Ok);
    d
}

unsafe fn weight(json: &str) -> *mut SiWeight {
    let mut w = ptr::null_mut();
    assert_eq!(si_weight_from_json(c(json).as_ptr(), &mut w), SiStatus::Ok);
    w
}

#[test]
fn geometry_and_ball() {
    unsafe {
        let d = domain(r#"{"shape":"polygon","vertices":[[-1,-1],[1,-1],[1,1],[-1,1]]}"#);
        let mut v = 0.0;
        assert_eq!(si_domain_weighted_volume(d, 0.0, &mut v), SiStatus::Ok);
        assert!((v - 4.0).abs() < 1e-12);
        assert_eq!(si_domain_weighted_perimeter(d, 0.0, &mut v), SiStatus::Ok);
        assert!((v - 8.0).abs() < 1e-12);
        assert_eq!(si_isop_margin(d, 0.0, 0.0, &mut v), SiStatus::Ok);
        assert!((v - (8.0 - 2.0 * (4.0 * std::f64::consts::PI).sqrt())).abs() < 1e-10);

        let w = weight(r#"{"kind":"power","alpha":1,"beta":0}"#);
        assert_eq!(si_ball_gamma1(w, 3.0, &mut v), SiStatus::Ok);
        assert!((v - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
        si_weight_free(w);

        let w = weight(r#"{"kind":"logconvex","family":"constant","c":0}"#);
        assert_eq!(si_ball_gamma1(w, 2.0, &mut v), SiStatus::Ok);
        assert!((v - 0.5).abs() < 1e-8);
        si_weight_free(w);
        si_domain_free(d);
    }
}

#[test]
fn spectrum_handle() {
    unsafe {
        let d = domain(r#"{"shape":"disc","radius":1}"#);
        let w = weight(r#"{"kind":"power","alpha":0,"beta":0}"#);
        let mut s = ptr::null_mut();
        assert_eq!(si_solve(d, w, 0.1, 2, &mut s), SiStatus::Ok);
        assert_eq!(si_spectrum_len(s), 3);
        let mut g = 0.0;
        assert_eq!(si_spectrum_eigenvalue(s, 1, &mut g), SiStatus::Ok);
        assert!((g - 1.0).abs() < 5e-3);
        assert_eq!(si_spectrum_eigenvalue(s, 3, &mut g), SiStatus::InvalidArgument);
        assert!(last_error().contains("out of range"));
        si_spectrum_free(s);
        assert_eq!(si_spectrum_len(ptr::null()), 0);
        si_weight_free(w);
        si_domain_free(d);
    }
}

#[test]
fn verify_returns_json() {
    unsafe {
        let d = domain(r#"{"shape":"polygon","vertices":[[-1,-1],[1,-1],[1,1],[-1,1]],"id":"sq"}"#);
        let w = weight(r#"{"kind":"power","alpha":0,"beta":-1}"#);
        let mut out = ptr::null_mut();
        assert_eq!(si_verify_json(c("T1.1").as_ptr(), d, w, 0.2, 1, &mut out), SiStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
        assert_eq!(report["status"], "verified");
        assert_eq!(report["domain_id"], "sq");
        si_string_free(out);

        assert_eq!(si_verify_json(c("T7").as_ptr(), d, w, 0.2, 1, &mut out), SiStatus::Parse);
        assert!(last_error().contains("unknown theorem"));
        si_weight_free(w);
        si_domain_free(d);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut d = ptr::null_mut();
        assert_eq!(si_domain_from_json(ptr::null(), &mut d), SiStatus::NullPointer);
        assert_eq!(si_domain_from_json(c("{").as_ptr(), &mut d), SiStatus::Parse);
        assert!(last_error().contains("line 1"));
        let bowtie = r#"{"shape":"polygon","vertices":[[-1,-1],[1,1],[1,-1],[-1,1]]}"#;
        assert_eq!(si_domain_from_json(c(bowtie).as_ptr(), &mut d), SiStatus::Domain);
        assert!(d.is_null());

        let mut w = ptr::null_mut();
        let bad = r#"{"kind":"power","alpha":-3,"beta":0}"#;
        assert_eq!(si_weight_from_json(c(bad).as_ptr(), &mut w), SiStatus::InvalidArgument);
        let concave = r#"{"kind":"logconvex","family":"power","a":1,"p":0.5}"#;
        assert_ne!(si_weight_from_json(c(concave).as_ptr(), &mut w), SiStatus::Ok);

        let mut v = 0.0;
        assert_eq!(si_domain_weighted_volume(ptr::null(), 0.0, &mut v), SiStatus::NullPointer);
        let ok = domain(r#"{"shape":"disc","radius":1}"#);
        assert_eq!(si_domain_weighted_volume(ok, 0.0, ptr::null_mut()), SiStatus::NullPointer);
        assert_eq!(si_domain_weighted_volume(ok, 0.0, &mut v), SiStatus::Ok);
        assert!(si_last_error_message().is_null());
        si_domain_free(ok);
        si_domain_free(ptr::null_mut());
        si_string_free(ptr::null_mut());
    }
}

fn target_dir() -> PathBuf {
    // <target>/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let lib = target_dir().join("libsteklov_iso_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "steklov_iso.h"
int main(void) {
    SiDomain *d = NULL;
    SiWeight *w = NULL;
    double v = 0.0;
    if (si_domain_from_json("{\"shape\":\"disc\",\"radius\":2}", &d) != SI_STATUS_OK) return 1;
    if (si_weight_from_json("{\"kind\":\"power\",\"alpha\":0,\"beta\":0}", &w) != SI_STATUS_OK) return 2;
    if (si_ball_gamma1(w, 2.0, &v) != SI_STATUS_OK) return 3;
    printf("%.12f\n", v);
    if (si_domain_from_json("not json", &d) != SI_STATUS_PARSE) return 4;
    if (si_last_error_message() == NULL) return 5;
    si_weight_free(w);
    si_domain_free(d);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("probe");
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I", include])
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0.500000000000");
}
