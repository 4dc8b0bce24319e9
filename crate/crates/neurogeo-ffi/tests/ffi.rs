//! Round-trips through the C ABI from Rust, exercising ownership and
//! status-code behavior exactly as a C caller would.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use neurogeo_ffi::{
    ng_last_error, ng_run_dim, ng_run_reproduce, ng_session_free, ng_session_new,
    ng_session_set_config_json, ng_session_set_pretty, ng_session_set_prime,
    ng_session_set_seed, ng_string_free, ng_version, NgSession, NgStatus,
};

const MLP_CONFIG: &str =
    r#"{"arch": {"type": "mlp", "widths": [2, 2, 1], "activation": [0, 0, 1, 1]}}"#;

struct Session(*mut NgSession);

impl Session {
    fn new() -> Self {
        let raw = ng_session_new();
        assert!(!raw.is_null());
        Session(raw)
    }

    fn set_config(&self, text: &str) {
        let text = CString::new(text).unwrap();
        assert_eq!(
            ng_session_set_config_json(self.0, text.as_ptr()),
            NgStatus::NgOk
        );
    }

    fn last_error(&self) -> Option<String> {
        let raw = ng_last_error(self.0);
        (!raw.is_null())
            .then(|| unsafe { CStr::from_ptr(raw) }.to_str().unwrap().to_string())
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        ng_session_free(self.0);
    }
}

/// Runs `f` with an out-pointer, returning the status and the report text.
fn with_report<F>(f: F) -> (NgStatus, Option<String>)
where
    F: FnOnce(*mut *mut c_char) -> NgStatus,
{
    let mut out: *mut c_char = ptr::null_mut();
    let status = f(&mut out);
    let text = (!out.is_null()).then(|| {
        let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_string();
        ng_string_free(out);
        text
    });
    (status, text)
}

#[test]
fn version_is_a_static_nul_terminated_string() {
    let raw = ng_version();
    assert!(!raw.is_null());
    let text = unsafe { CStr::from_ptr(raw) }.to_str().unwrap();
    assert_eq!(text, env!("CARGO_PKG_VERSION"));
}

#[test]
fn reproduce_round_trip_matches_every_reference_item() {
    let session = Session::new();
    for target in ["D1", "D2", "cubics"] {
        let target_c = CString::new(target).unwrap();
        let (status, text) =
            with_report(|out| ng_run_reproduce(session.0, target_c.as_ptr(), out));
        assert_eq!(status, NgStatus::NgOk, "{target}");
        let report: serde_json::Value = serde_json::from_str(&text.unwrap()).unwrap();
        assert_eq!(report["schema"], "neurogeo/1", "{target}");
        assert_eq!(report["result"]["allPass"], true, "{target}");
        assert_eq!(session.last_error(), None, "{target}");
    }
}

#[test]
fn dim_with_inline_config_reports_the_rank() {
    let session = Session::new();
    session.set_config(MLP_CONFIG);
    assert_eq!(ng_session_set_seed(session.0, 7), NgStatus::NgOk);
    let (status, text) = with_report(|out| ng_run_dim(session.0, out));
    assert_eq!(status, NgStatus::NgOk);
    let report: serde_json::Value = serde_json::from_str(&text.unwrap()).unwrap();
    assert_eq!(report["seed"], 7);
    assert_eq!(report["result"]["rank"]["rank"], 6);
    assert_eq!(report["result"]["rankEqualsParams"], true);
}

#[test]
fn pretty_sessions_render_indented_reports() {
    let session = Session::new();
    session.set_config(MLP_CONFIG);
    assert_eq!(ng_session_set_pretty(session.0, true), NgStatus::NgOk);
    let (status, text) = with_report(|out| ng_run_dim(session.0, out));
    assert_eq!(status, NgStatus::NgOk);
    assert!(text.unwrap().lines().count() > 1);
}

#[test]
fn malformed_config_fails_with_a_message_and_no_report() {
    let session = Session::new();
    session.set_config("{not json");
    let (status, text) = with_report(|out| ng_run_dim(session.0, out));
    assert_eq!(status, NgStatus::NgConfigError);
    assert_eq!(text, None);
    assert!(!session.last_error().unwrap().is_empty());
}

#[test]
fn missing_arch_section_is_a_config_error() {
    let session = Session::new();
    let (status, text) = with_report(|out| ng_run_dim(session.0, out));
    assert_eq!(status, NgStatus::NgConfigError);
    assert_eq!(text, None);
    assert!(session.last_error().unwrap().contains("arch"));
}

#[test]
fn forced_small_prime_goes_inconclusive_with_a_report() {
    let session = Session::new();
    session.set_config(MLP_CONFIG);
    assert_eq!(ng_session_set_prime(session.0, 3), NgStatus::NgOk);
    let (status, text) = with_report(|out| ng_run_dim(session.0, out));
    assert_eq!(status, NgStatus::NgInconclusive);
    let report: serde_json::Value = serde_json::from_str(&text.unwrap()).unwrap();
    assert_eq!(report["result"]["rank"]["conclusive"], false);
}

#[test]
fn unknown_reproduce_target_is_a_config_error() {
    let session = Session::new();
    let target = CString::new("D9").unwrap();
    let (status, text) = with_report(|out| ng_run_reproduce(session.0, target.as_ptr(), out));
    assert_eq!(status, NgStatus::NgConfigError);
    assert_eq!(text, None);
    assert!(session.last_error().unwrap().contains("D9"));
}

#[test]
fn null_pointers_are_rejected_not_dereferenced() {
    let mut out: *mut c_char = ptr::null_mut();
    assert_eq!(ng_run_dim(ptr::null_mut(), &mut out), NgStatus::NgConfigError);
    assert!(out.is_null());
    assert_eq!(ng_session_set_seed(ptr::null_mut(), 1), NgStatus::NgConfigError);
    assert!(ng_last_error(ptr::null()).is_null());
    ng_string_free(ptr::null_mut());
    ng_session_free(ptr::null_mut());

    let session = Session::new();
    assert_eq!(ng_run_dim(session.0, ptr::null_mut()), NgStatus::NgConfigError);
    assert!(session.last_error().unwrap().contains("out_report"));
    let (status, _) = with_report(|out| ng_run_reproduce(session.0, ptr::null(), out));
    assert_eq!(status, NgStatus::NgConfigError);
}

#[test]
fn clearing_the_config_restores_the_empty_document() {
    let session = Session::new();
    session.set_config(MLP_CONFIG);
    assert_eq!(
        ng_session_set_config_json(session.0, ptr::null()),
        NgStatus::NgOk
    );
    let (status, _) = with_report(|out| ng_run_dim(session.0, out));
    assert_eq!(status, NgStatus::NgConfigError);
    assert!(session.last_error().unwrap().contains("arch"));
}

#[test]
fn generated_header_declares_the_full_surface() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/neurogeo.h"
    ))
    .expect("build script wrote the header");
    for needle in [
        "#ifndef NEUROGEO_H",
        "typedef struct NgSession NgSession;",
        "NG_OK = 0",
        "NG_CONFIG_ERROR = 2",
        "NG_CHECK_FAILED = 3",
        "NG_INCONCLUSIVE = 4",
        "ng_session_new",
        "ng_session_set_config_json",
        "ng_run_dim",
        "ng_run_singular",
        "ng_run_exposed",
        "ng_run_fibers",
        "ng_run_reproduce",
        "ng_last_error",
        "ng_string_free",
        "ng_version",
    ] {
        assert!(header.contains(needle), "header lacks {needle:?}");
    }
}
