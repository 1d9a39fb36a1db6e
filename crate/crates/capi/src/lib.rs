//! C ABI over the surfacenav session.
//!
//! Sessions are opaque heap handles. Commands go in and events come out as
//! the same UTF-8 JSON messages the engine uses at its host boundary. Every
//! fallible call returns an [`SnStatus`]; the message for the most recent
//! failure on the calling thread is available from [`sn_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use surfacenav::plotdata::{
    generate_sample, parse_dataset, Format, KindHint, SampleConfig, SampleKind,
};
use surfacenav::session::{parse_command, serialize_event, Session, SessionConfig};

pub const SN_SAMPLE_SINUSOIDAL: u32 = 0;
pub const SN_SAMPLE_SPECTRAL: u32 = 1;

pub const SN_FORMAT_CSV: u32 = 0;
pub const SN_FORMAT_JSON: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidCommand = 3,
    InvalidData = 4,
    InvalidArgument = 5,
    Panic = 6,
}

/// Opaque session handle.
pub struct SnSession {
    inner: Session,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(message).expect("nul bytes removed"));
}

fn guard(f: impl FnOnce() -> Result<(), (SnStatus, String)>) -> SnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SnStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SnStatus::Panic
        }
    }
}

fn into_c_string(text: String) -> *mut c_char {
    CString::new(text.replace('\0', " "))
        .expect("nul bytes removed")
        .into_raw()
}

fn boxed(session: Session) -> *mut SnSession {
    Box::into_raw(Box::new(SnSession { inner: session }))
}

/// Message describing the last failed call on this thread. The pointer stays
/// valid until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn sn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a session over a built-in sample (`SN_SAMPLE_*`).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sn_session_new_sample(sample: u32, out: *mut *mut SnSession) -> SnStatus {
    guard(|| {
        if out.is_null() {
            return Err((SnStatus::NullArgument, "out is null".into()));
        }
        let kind = match sample {
            SN_SAMPLE_SINUSOIDAL => SampleKind::Sinusoidal,
            SN_SAMPLE_SPECTRAL => SampleKind::Spectral,
            other => return Err((SnStatus::InvalidArgument, format!("unknown sample {other}"))),
        };
        let dataset = generate_sample(kind, &SampleConfig::default_for(kind))
            .map_err(|e| (SnStatus::InvalidData, e.to_string()))?;
        let session = Session::new(dataset, SessionConfig::default())
            .map_err(|e| (SnStatus::InvalidData, e.to_string()))?;
        *out = boxed(session);
        Ok(())
    })
}

/// Creates a session from CSV or JSON bytes (`SN_FORMAT_*`).
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` to writable storage
/// for one handle.
#[no_mangle]
pub unsafe extern "C" fn sn_session_new_from_bytes(
    data: *const u8,
    len: usize,
    format: u32,
    out: *mut *mut SnSession,
) -> SnStatus {
    guard(|| {
        if data.is_null() || out.is_null() {
            return Err((SnStatus::NullArgument, "data or out is null".into()));
        }
        let format = match format {
            SN_FORMAT_CSV => Format::Csv,
            SN_FORMAT_JSON => Format::Json,
            other => return Err((SnStatus::InvalidArgument, format!("unknown format {other}"))),
        };
        let bytes = std::slice::from_raw_parts(data, len);
        let dataset = parse_dataset(bytes, format, KindHint::Auto)
            .map_err(|e| (SnStatus::InvalidData, e.to_string()))?;
        let session = Session::new(dataset, SessionConfig::default())
            .map_err(|e| (SnStatus::InvalidData, e.to_string()))?;
        *out = boxed(session);
        Ok(())
    })
}

/// Releases a session. Null is ignored.
///
/// # Safety
/// `session` must be null or a handle from a `sn_session_new_*` call that
/// has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sn_session_free(session: *mut SnSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Dispatches one JSON command and returns the resulting events as a JSON
/// array in `*out_events` (free with [`sn_string_free`]).
///
/// # Safety
/// `session` must be a live handle, `command` a nul-terminated string, and
/// `out_events` valid writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn sn_session_dispatch(
    session: *mut SnSession,
    command: *const c_char,
    out_events: *mut *mut c_char,
) -> SnStatus {
    guard(|| {
        if session.is_null() || command.is_null() || out_events.is_null() {
            return Err((SnStatus::NullArgument, "null argument".into()));
        }
        let text = CStr::from_ptr(command)
            .to_str()
            .map_err(|_| (SnStatus::InvalidUtf8, "command is not UTF-8".into()))?;
        let cmd = parse_command(text)
            .map_err(|e| (SnStatus::InvalidCommand, format!("invalid command: {e}")))?;
        let events = (*session).inner.dispatch(cmd);
        let body: Vec<String> = events.iter().map(serialize_event).collect();
        *out_events = into_c_string(format!("[{}]", body.join(",")));
        Ok(())
    })
}

/// Newline-joined transcript of every event since the dataset was loaded.
///
/// # Safety
/// `session` must be a live handle and `out` valid writable storage for one
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn sn_session_transcript(
    session: *const SnSession,
    out: *mut *mut c_char,
) -> SnStatus {
    guard(|| {
        if session.is_null() || out.is_null() {
            return Err((SnStatus::NullArgument, "null argument".into()));
        }
        *out = into_c_string((*session).inner.transcript());
        Ok(())
    })
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn sn_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version string"),
        };
    VERSION.as_ptr()
}
