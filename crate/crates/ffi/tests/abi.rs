use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::ptr;

use tracekit_ffi::*;

const CLEAN: &str = r#"
requirement AR-1 : acquirer { text: "the train shall stop" }
requirement STR-1 : technical { text: "brake within 800 m" safety: true criticality: high }
element C-1 : physical { name: "brake unit" }
testcase TC-1 { method: test }
risk RK-1 { description: "overrun" severity: catastrophic likelihood: remote tolerability: tolerable }
link derive AR-1 -> STR-1
link satisfy C-1 -> STR-1
link verify TC-1 -> AR-1
link verify TC-1 -> STR-1
link covers STR-1 -> RK-1
"#;

fn parse(src: &str) -> (TkStatus, *mut TkModel) {
    let src = CString::new(src).unwrap();
    let name = CString::new("m.sreq").unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { tk_model_parse(src.as_ptr(), name.as_ptr(), &mut out) };
    (status, out)
}

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { tk_string_free(s) };
    text
}

fn last_error() -> Option<String> {
    let p = tk_last_error_message();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned())
}

#[test]
fn parse_query_free() {
    let (status, m) = parse(CLEAN);
    assert_eq!(status, TkStatus::TkOk);
    assert_eq!(unsafe { tk_model_entity_count(m) }, 5);

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { tk_check_json(m, &mut out) }, TkStatus::TkOk);
    let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(report["schema_version"], "1");
    assert_eq!(report["findings"].as_array().unwrap().len(), 0);

    assert_eq!(unsafe { tk_stats_json(m, &mut out) }, TkStatus::TkOk);
    let stats: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(stats["risk_coverage"], 100.0);

    let changed = CString::new("AR-1").unwrap();
    assert_eq!(
        unsafe { tk_impact_json(m, changed.as_ptr(), &mut out) },
        TkStatus::TkOk
    );
    let imp: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    let ids: Vec<&str> = imp["result"]["impacted"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["id"].as_str().unwrap())
        .collect();
    assert_eq!(ids, ["C-1", "RK-1", "STR-1", "TC-1"]);

    assert_eq!(unsafe { tk_export_dot(m, &mut out) }, TkStatus::TkOk);
    assert!(take(out).starts_with("digraph trace {"));

    assert_eq!(unsafe { tk_print_canonical(m, &mut out) }, TkStatus::TkOk);
    let canon = take(out);
    let (status, m2) = parse(&canon);
    assert_eq!(status, TkStatus::TkOk);
    assert_eq!(unsafe { tk_print_canonical(m2, &mut out) }, TkStatus::TkOk);
    assert_eq!(take(out), canon);

    unsafe {
        tk_model_free(m);
        tk_model_free(m2);
    }
}

#[test]
fn parse_error_reports_diagnostics() {
    let (status, m) = parse("requirement R1 : acquirer { text: \"open }");
    assert_eq!(status, TkStatus::TkParseError);
    assert!(m.is_null());
    let msg = last_error().unwrap();
    assert!(msg.starts_with("m.sreq:1:"), "{msg}");
    assert!(msg.contains("P001"), "{msg}");
}

#[test]
fn impact_errors() {
    let (_, m) = parse(CLEAN);
    let mut out = ptr::null_mut();
    let nope = CString::new("NOPE").unwrap();
    assert_eq!(
        unsafe { tk_impact_json(m, nope.as_ptr(), &mut out) },
        TkStatus::TkUnknownEntity
    );
    assert!(out.is_null());
    assert_eq!(last_error().unwrap(), "unknown entity 'NOPE'");
    let empty = CString::new(" , ").unwrap();
    assert_eq!(
        unsafe { tk_impact_json(m, empty.as_ptr(), &mut out) },
        TkStatus::TkEmptyChangeSet
    );
    unsafe { tk_model_free(m) };
}

#[test]
fn null_and_utf8_arguments() {
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { tk_check_json(ptr::null(), &mut out) },
        TkStatus::TkNullArgument
    );
    let mut handle = ptr::null_mut();
    assert_eq!(
        unsafe { tk_model_parse(ptr::null(), ptr::null(), &mut handle) },
        TkStatus::TkNullArgument
    );
    let bad = [0xffu8 as c_char, 0];
    assert_eq!(
        unsafe { tk_model_parse(bad.as_ptr(), ptr::null(), &mut handle) },
        TkStatus::TkInvalidUtf8
    );
    assert_eq!(unsafe { tk_model_entity_count(ptr::null()) }, 0);
    unsafe {
        tk_model_free(ptr::null_mut());
        tk_string_free(ptr::null_mut());
    }
    // success clears the previous message
    let (status, m) = parse("");
    assert_eq!(status, TkStatus::TkOk);
    assert!(last_error().is_none());
    unsafe { tk_model_free(m) };
}

#[test]
fn header_declares_every_export() {
    let target = std::env::var_os("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../target"));
    let header = std::fs::read_to_string(target.join("include/tracekit.h")).unwrap();
    for name in [
        "tk_model_parse",
        "tk_model_free",
        "tk_model_entity_count",
        "tk_check_json",
        "tk_stats_json",
        "tk_impact_json",
        "tk_export_dot",
        "tk_print_canonical",
        "tk_string_free",
        "tk_last_error_message",
        "typedef struct TkModel TkModel;",
        "TK_UNKNOWN_ENTITY = 4",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

#[test]
fn c_program_links_against_header() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap().to_path_buf();
    if !lib_dir.join("libtracekit_ffi.so").exists() {
        eprintln!("shared library not built; skipping");
        return;
    }
    let target = std::env::var_os("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../target"));
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let status = std::process::Command::new(cc)
        .arg(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/smoke.c"))
        .arg("-I")
        .arg(target.join("include"))
        .arg("-L")
        .arg(&lib_dir)
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .arg("-ltracekit_ffi")
        .arg("-o")
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = std::process::Command::new(&bin).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        "unknown entity 'NOPE'\n"
    );
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "clang", "gcc"]
        .into_iter()
        .find(|c| {
            std::process::Command::new(c)
                .arg("--version")
                .output()
                .is_ok_and(|o| o.status.success())
        })
        .ok_or(())
}
