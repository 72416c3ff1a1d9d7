//! C ABI for tracekit.
//!
//! A model is parsed once into an opaque [`TkModel`] handle. Query functions
//! return newly allocated, NUL-terminated UTF-8 strings that the caller frees
//! with [`tk_string_free`]. Every function returns a [`TkStatus`]; on failure
//! [`tk_last_error_message`] describes the problem for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tracekit::cli::{export_dot, render_diagnostics, to_json, JsonReport};
use tracekit::dsl::{parse_model, print_canonical};
use tracekit::impact::ImpactError;
use tracekit::{
    build_graph, coverage_stats, default_propagation, impact, impact_report, Model, RuleConfig,
    TraceGraph,
};

/// Result codes. `TK_OK` is zero; everything else is a failure.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TkStatus {
    TkOk = 0,
    TkNullArgument = 1,
    TkInvalidUtf8 = 2,
    TkParseError = 3,
    TkUnknownEntity = 4,
    TkEmptyChangeSet = 5,
    TkPanic = 6,
}

/// Parsed model plus its trace graph.
pub struct TkModel {
    file: String,
    model: Model,
    graph: TraceGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(message).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: TkStatus, message: impl Into<String>) -> TkStatus {
    set_error(message);
    status
}

fn guard(f: impl FnOnce() -> TkStatus) -> TkStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(TkStatus::TkPanic, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, TkStatus> {
    if p.is_null() {
        return Err(fail(TkStatus::TkNullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        fail(
            TkStatus::TkInvalidUtf8,
            format!("{what} is not valid UTF-8"),
        )
    })
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> TkStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            TkStatus::TkOk
        }
        Err(_) => fail(TkStatus::TkInvalidUtf8, "output contains a NUL byte"),
    }
}

unsafe fn with_model(
    model: *const TkModel,
    out: *mut *mut c_char,
    f: impl FnOnce(&TkModel) -> Result<String, TkStatus>,
) -> TkStatus {
    guard(|| {
        if model.is_null() || out.is_null() {
            return fail(TkStatus::TkNullArgument, "null argument");
        }
        *out = ptr::null_mut();
        match f(&*model) {
            Ok(s) => write_string(out, s),
            Err(status) => status,
        }
    })
}

/// Parses `source`. On success stores a new handle in `*out`; on a parse
/// failure the rendered diagnostics are available from
/// `tk_last_error_message`. `filename` may be null.
///
/// # Safety
/// `source` and `filename` must be null or NUL-terminated; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn tk_model_parse(
    source: *const c_char,
    filename: *const c_char,
    out: *mut *mut TkModel,
) -> TkStatus {
    guard(|| {
        if out.is_null() {
            return fail(TkStatus::TkNullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let source = match read_str(source, "source") {
            Ok(s) => s,
            Err(s) => return s,
        };
        let file = if filename.is_null() {
            "<input>"
        } else {
            match read_str(filename, "filename") {
                Ok(s) => s,
                Err(s) => return s,
            }
        };
        match parse_model(source, file) {
            Ok(model) => {
                let graph = build_graph(&model);
                *out = Box::into_raw(Box::new(TkModel {
                    file: file.to_owned(),
                    model,
                    graph,
                }));
                TkStatus::TkOk
            }
            Err(diags) => fail(TkStatus::TkParseError, render_diagnostics(&diags)),
        }
    })
}

/// # Safety
/// `model` must be null or a handle from `tk_model_parse` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tk_model_free(model: *mut TkModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of entities in the model, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tk_model_entity_count(model: *const TkModel) -> usize {
    if model.is_null() {
        0
    } else {
        (*model).model.entity_count()
    }
}

/// Rule findings and coverage as a JSON report, default rule settings.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tk_check_json(model: *const TkModel, out: *mut *mut c_char) -> TkStatus {
    with_model(model, out, |m| {
        Ok(to_json(&JsonReport::new(
            &m.file,
            &m.model,
            &m.graph,
            &RuleConfig::default(),
        )))
    })
}

/// Coverage percentages and counts as JSON.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tk_stats_json(model: *const TkModel, out: *mut *mut c_char) -> TkStatus {
    with_model(model, out, |m| {
        Ok(to_json(&coverage_stats(&m.model, &m.graph)))
    })
}

/// Impact of changing the comma-separated ids in `changed`, default
/// propagation, as a JSON object with `result` and `report`.
///
/// # Safety
/// `model` must be a live handle; `changed` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tk_impact_json(
    model: *const TkModel,
    changed: *const c_char,
    out: *mut *mut c_char,
) -> TkStatus {
    with_model(model, out, |m| {
        let changed = read_str(changed, "changed")?;
        let ids = changed.split(',').map(str::trim).filter(|s| !s.is_empty());
        let result = impact(&m.model, &m.graph, ids, &default_propagation()).map_err(|e| {
            let status = match e {
                ImpactError::EmptyChangeSet => TkStatus::TkEmptyChangeSet,
                ImpactError::UnknownReference(_) => TkStatus::TkUnknownEntity,
            };
            fail(status, e.to_string())
        })?;
        let report = impact_report(&result, &m.model);
        Ok(to_json(
            &serde_json::json!({ "result": result, "report": report }),
        ))
    })
}

/// Graphviz DOT rendering of the trace graph.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tk_export_dot(model: *const TkModel, out: *mut *mut c_char) -> TkStatus {
    with_model(model, out, |m| Ok(export_dot(&m.model, &m.graph)))
}

/// Canonical DSL text for the model.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tk_print_canonical(
    model: *const TkModel,
    out: *mut *mut c_char,
) -> TkStatus {
    with_model(model, out, |m| Ok(print_canonical(&m.model)))
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failure on this thread, or null. Owned by the
/// library and valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn tk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
