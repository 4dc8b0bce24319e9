//! C ABI for the `neurogeo` toolkit.
//!
//! The surface mirrors the command-line interface: a session carries the
//! JSON configuration document and the deterministic options, and each
//! `ng_run_*` entry point produces the same JSON report the corresponding
//! CLI command prints. Status codes coincide with the CLI exit codes.
//!
//! Ownership rules:
//! - every `*mut NgSession` from [`ng_session_new`] is released with
//!   [`ng_session_free`];
//! - every `char*` written through an `out_report` parameter is released
//!   with [`ng_string_free`];
//! - [`ng_last_error`] borrows from the session and stays valid until the
//!   next call on that session.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use neurogeo::cli::{exit_code, run, Cli, Command, Outcome};
use neurogeo::error::NgError;

/// Status of an FFI call; numeric values match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NgStatus {
    /// The command ran and every check it performs succeeded.
    NgOk = 0,
    /// Configuration, argument, or I/O problem; no report is produced.
    NgConfigError = 2,
    /// A stored reference value failed to reproduce, or an internal
    /// cross-check tripped. Reproduction mismatches still yield a report.
    NgCheckFailed = 3,
    /// A probabilistic rank stayed inconclusive; the report is produced
    /// and flags the affected quantities.
    NgInconclusive = 4,
}

/// Opaque session: configuration document plus deterministic options.
pub struct NgSession {
    config_json: Option<String>,
    seed: u64,
    trials: Option<usize>,
    prime: Option<u64>,
    degree_cap: Option<u32>,
    pretty: bool,
    last_error: Option<CString>,
}

impl NgSession {
    fn cli(&self, command: Command) -> Cli {
        Cli {
            command,
            config: None,
            seed: self.seed,
            trials: self.trials,
            prime: self.prime,
            degree_cap: self.degree_cap,
            out: None,
            pretty: self.pretty,
            config_inline: self.config_json.clone(),
        }
    }

    fn record_error(&mut self, message: &str) {
        let sanitized: String =
            message.chars().map(|c| if c == '\0' { ' ' } else { c }).collect();
        self.last_error = CString::new(sanitized).ok();
    }
}

fn status_of_code(code: i32) -> NgStatus {
    match code {
        0 => NgStatus::NgOk,
        3 => NgStatus::NgCheckFailed,
        4 => NgStatus::NgInconclusive,
        _ => NgStatus::NgConfigError,
    }
}

fn status_of_error(err: &NgError) -> NgStatus {
    status_of_code(exit_code(err))
}

/// Runs one command on the session, storing the report or the error.
fn dispatch(
    session: *mut NgSession,
    command: Command,
    out_report: *mut *mut c_char,
) -> NgStatus {
    let Some(session) = (unsafe { session.as_mut() }) else {
        return NgStatus::NgConfigError;
    };
    if out_report.is_null() {
        session.record_error("out_report must not be null");
        return NgStatus::NgConfigError;
    }
    unsafe { *out_report = ptr::null_mut() };
    session.last_error = None;
    let cli = session.cli(command);
    let result = catch_unwind(AssertUnwindSafe(|| run(&cli)));
    match result {
        Ok(Ok(Outcome { text, code })) => match CString::new(text) {
            Ok(text) => {
                unsafe { *out_report = text.into_raw() };
                status_of_code(code)
            }
            Err(_) => {
                session.record_error("report contained an interior NUL byte");
                NgStatus::NgCheckFailed
            }
        },
        Ok(Err(err)) => {
            session.record_error(&err.to_string());
            status_of_error(&err)
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| (*s).to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic in library code".to_string());
            session.record_error(&message);
            NgStatus::NgCheckFailed
        }
    }
}

/// Allocates a session with default options: seed 0, library-default
/// trials, no fixed prime, no degree cap, compact output, no configuration.
#[no_mangle]
pub extern "C" fn ng_session_new() -> *mut NgSession {
    Box::into_raw(Box::new(NgSession {
        config_json: None,
        seed: 0,
        trials: None,
        prime: None,
        degree_cap: None,
        pretty: false,
        last_error: None,
    }))
}

/// Releases a session. Passing NULL is a no-op.
#[no_mangle]
pub extern "C" fn ng_session_free(session: *mut NgSession) {
    if !session.is_null() {
        drop(unsafe { Box::from_raw(session) });
    }
}

/// Stores the JSON configuration document (same schema as the CLI's
/// `--config` file). NULL clears it. The text is validated when a command
/// runs, not here; this only requires valid UTF-8.
#[no_mangle]
pub extern "C" fn ng_session_set_config_json(
    session: *mut NgSession,
    config_json: *const c_char,
) -> NgStatus {
    let Some(session) = (unsafe { session.as_mut() }) else {
        return NgStatus::NgConfigError;
    };
    if config_json.is_null() {
        session.config_json = None;
        return NgStatus::NgOk;
    }
    match unsafe { CStr::from_ptr(config_json) }.to_str() {
        Ok(text) => {
            session.config_json = Some(text.to_string());
            NgStatus::NgOk
        }
        Err(_) => {
            session.record_error("configuration text is not valid UTF-8");
            NgStatus::NgConfigError
        }
    }
}

/// Sets the seed driving every randomized step.
#[no_mangle]
pub extern "C" fn ng_session_set_seed(session: *mut NgSession, seed: u64) -> NgStatus {
    let Some(session) = (unsafe { session.as_mut() }) else {
        return NgStatus::NgConfigError;
    };
    session.seed = seed;
    NgStatus::NgOk
}

/// Sets the number of trials per probabilistic rank computation; 0 restores
/// the library default.
#[no_mangle]
pub extern "C" fn ng_session_set_trials(session: *mut NgSession, trials: usize) -> NgStatus {
    let Some(session) = (unsafe { session.as_mut() }) else {
        return NgStatus::NgConfigError;
    };
    session.trials = (trials > 0).then_some(trials);
    NgStatus::NgOk
}

/// Fixes the first prime of every modular rank probe; 0 restores random
/// primes. A second random prime always confirms each probe.
#[no_mangle]
pub extern "C" fn ng_session_set_prime(session: *mut NgSession, prime: u64) -> NgStatus {
    let Some(session) = (unsafe { session.as_mut() }) else {
        return NgStatus::NgConfigError;
    };
    session.prime = (prime > 0).then_some(prime);
    NgStatus::NgOk
}

/// Caps the degree searched during implicitization; 0 restores the default.
#[no_mangle]
pub extern "C" fn ng_session_set_degree_cap(
    session: *mut NgSession,
    degree_cap: u32,
) -> NgStatus {
    let Some(session) = (unsafe { session.as_mut() }) else {
        return NgStatus::NgConfigError;
    };
    session.degree_cap = (degree_cap > 0).then_some(degree_cap);
    NgStatus::NgOk
}

/// Chooses between indented (true) and compact (false) report JSON.
#[no_mangle]
pub extern "C" fn ng_session_set_pretty(session: *mut NgSession, pretty: bool) -> NgStatus {
    let Some(session) = (unsafe { session.as_mut() }) else {
        return NgStatus::NgConfigError;
    };
    session.pretty = pretty;
    NgStatus::NgOk
}

/// Generic rank of the parametrization Jacobian versus the parameter count.
/// Writes the JSON report through `out_report` on any in-band outcome.
#[no_mangle]
pub extern "C" fn ng_run_dim(
    session: *mut NgSession,
    out_report: *mut *mut c_char,
) -> NgStatus {
    dispatch(session, Command::Dim, out_report)
}

/// Singularity tests for the configured subnetwork family.
#[no_mangle]
pub extern "C" fn ng_run_singular(
    session: *mut NgSession,
    out_report: *mut *mut c_char,
) -> NgStatus {
    dispatch(session, Command::Singular, out_report)
}

/// Exposedness dimension count for the configured family.
#[no_mangle]
pub extern "C" fn ng_run_exposed(
    session: *mut NgSession,
    out_report: *mut *mut c_char,
) -> NgStatus {
    dispatch(session, Command::Exposed, out_report)
}

/// Fiber structure: scaling counts, sparse-activation decomposition, and
/// scaling rigidity, as configured.
#[no_mangle]
pub extern "C" fn ng_run_fibers(
    session: *mut NgSession,
    out_report: *mut *mut c_char,
) -> NgStatus {
    dispatch(session, Command::Fibers, out_report)
}

/// Re-derives a stored reference data set and diffs every item. `target`
/// is one of "D1", "D2", or "cubics".
#[no_mangle]
pub extern "C" fn ng_run_reproduce(
    session: *mut NgSession,
    target: *const c_char,
    out_report: *mut *mut c_char,
) -> NgStatus {
    let Some(session_ref) = (unsafe { session.as_mut() }) else {
        return NgStatus::NgConfigError;
    };
    if target.is_null() {
        session_ref.record_error("target must not be null");
        return NgStatus::NgConfigError;
    }
    let target = match unsafe { CStr::from_ptr(target) }.to_str() {
        Ok(text) => text.to_string(),
        Err(_) => {
            session_ref.record_error("target is not valid UTF-8");
            return NgStatus::NgConfigError;
        }
    };
    dispatch(session, Command::Reproduce { target }, out_report)
}

/// Message of the most recent failure on this session, or NULL when the
/// last call succeeded. Borrowed; valid until the next call on the session.
#[no_mangle]
pub extern "C" fn ng_last_error(session: *const NgSession) -> *const c_char {
    let Some(session) = (unsafe { session.as_ref() }) else {
        return ptr::null();
    };
    session.last_error.as_ref().map_or(ptr::null(), |m| m.as_ptr())
}

/// Releases a string returned through an `out_report` parameter. Passing
/// NULL is a no-op.
#[no_mangle]
pub extern "C" fn ng_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(unsafe { CString::from_raw(text) });
    }
}

/// Version of the bindings as a static string; do not free.
#[no_mangle]
pub extern "C" fn ng_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
