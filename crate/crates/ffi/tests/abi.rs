use std::ffi::{CStr, CString};
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::ptr;

use wellspec_ffi::*;

fn last_error() -> String {
    let p = ws_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn header_is_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../include/wellspec.h");
    assert!(header.exists());
    for (compiler, extra) in [("cc", vec!["-x", "c", "-std=c99"]), ("c++", vec!["-x", "c++"])] {
        let status = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror"])
            .args(&extra)
            .arg(&header)
            .status()
            .expect("compiler available");
        assert!(status.success(), "{compiler} rejected the header");
    }
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../include/wellspec.h")).unwrap();
    for f in [
        "ws_last_error",
        "ws_version",
        "ws_dataset_load_csv",
        "ws_dataset_from_arrays",
        "ws_dataset_free",
        "ws_dataset_shape",
        "ws_config_new",
        "ws_config_free",
        "ws_config_set_splits",
        "ws_config_set_seed",
        "ws_config_set_levels",
        "ws_config_set_gamma_hsic",
        "ws_analyze",
        "ws_report_free",
        "ws_report_p0",
        "ws_report_selected",
        "ws_report_json",
        "ws_string_free",
        "ws_codec",
    ] {
        assert!(text.contains(&format!("{f}(")), "missing {f}");
    }
}

#[test]
fn codec_three_point_identity() {
    let v = [1.0, 2.0, 3.0];
    let x = [0.0, 1.0, 3.0];
    let mut t = 0.0;
    assert_eq!(
        unsafe { ws_codec(v.as_ptr(), x.as_ptr(), 3, 1, 0, &mut t) },
        WsStatus::Ok
    );
    assert_eq!(t, -0.5);
    let c = [2.0; 3];
    assert_eq!(
        unsafe { ws_codec(c.as_ptr(), v.as_ptr(), 3, 1, 0, &mut t) },
        WsStatus::Undefined
    );
    assert!(t.is_nan());
    assert!(last_error().contains("undefined"));
}

#[test]
fn null_pointers_are_reported() {
    let mut t = 0.0;
    assert_eq!(
        unsafe { ws_codec(ptr::null(), ptr::null(), 3, 1, 0, &mut t) },
        WsStatus::NullPointer
    );
    assert!(last_error().contains("null"));
    let mut n = 0;
    assert_eq!(
        unsafe { ws_dataset_shape(ptr::null(), &mut n, &mut n) },
        WsStatus::NullPointer
    );
    unsafe {
        ws_dataset_free(ptr::null_mut());
        ws_report_free(ptr::null_mut());
        ws_config_free(ptr::null_mut());
        ws_string_free(ptr::null_mut());
    }
}

#[test]
fn bad_inputs_set_last_error() {
    let mut ds = ptr::null_mut();
    let path = CString::new("/nonexistent/file.csv").unwrap();
    let target = CString::new("y").unwrap();
    assert_eq!(
        unsafe { ws_dataset_load_csv(path.as_ptr(), target.as_ptr(), &mut ds) },
        WsStatus::InputError
    );
    assert!(ds.is_null());
    assert!(last_error().contains("nonexistent"));

    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "a,b\n1,2\n3,4").unwrap();
    let path = CString::new(f.path().to_str().unwrap()).unwrap();
    let missing = CString::new("z").unwrap();
    assert_eq!(
        unsafe { ws_dataset_load_csv(path.as_ptr(), missing.as_ptr(), &mut ds) },
        WsStatus::InputError
    );
    assert!(last_error().contains("'z'"));

    let bad = [0xffu8, 0];
    assert_eq!(
        unsafe { ws_dataset_load_csv(bad.as_ptr().cast(), missing.as_ptr(), &mut ds) },
        WsStatus::InvalidUtf8
    );

    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { ws_config_new(WsMode::Anm, &mut cfg) }, WsStatus::Ok);
    assert_eq!(unsafe { ws_config_set_levels(cfg, 1.5, 0.01) }, WsStatus::InputError);
    assert_eq!(unsafe { ws_config_set_splits(cfg, 0) }, WsStatus::InputError);
    unsafe { ws_config_free(cfg) };
}

#[test]
fn analyze_roundtrip() {
    let n = 120;
    let mut x = Vec::with_capacity(2 * n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let a = ((i * 37) % 101) as f64 / 50.0 - 1.0;
        let b = ((i * 53) % 89) as f64 / 44.0 - 1.0;
        let e = ((i * 71) % 97) as f64 / 97.0 - 0.5;
        x.extend([a, b]);
        y.push(a + 0.5 * b * b + 0.3 * e);
    }
    unsafe {
        let mut ds = ptr::null_mut();
        assert_eq!(
            ws_dataset_from_arrays(x.as_ptr(), y.as_ptr(), n, 2, &mut ds),
            WsStatus::Ok
        );
        let (mut rows, mut cols) = (0, 0);
        assert_eq!(ws_dataset_shape(ds, &mut rows, &mut cols), WsStatus::Ok);
        assert_eq!((rows, cols), (n, 2));

        let mut cfg = ptr::null_mut();
        assert_eq!(ws_config_new(WsMode::Anm, &mut cfg), WsStatus::Ok);
        assert_eq!(ws_config_set_splits(cfg, 2), WsStatus::Ok);
        assert_eq!(ws_config_set_seed(cfg, 11), WsStatus::Ok);
        assert_eq!(ws_config_set_gamma_hsic(cfg, true), WsStatus::Ok);

        let mut report = ptr::null_mut();
        assert_eq!(ws_analyze(ds, cfg, &mut report), WsStatus::Ok);
        let mut p0 = -1.0;
        assert_eq!(ws_report_p0(report, &mut p0), WsStatus::Ok);
        assert!((0.0..=1.0).contains(&p0));

        let mut len = 0;
        assert_eq!(ws_report_selected(report, ptr::null_mut(), 0, &mut len), WsStatus::Ok);
        let mut buf = vec![usize::MAX; len];
        assert_eq!(
            ws_report_selected(report, buf.as_mut_ptr(), len, &mut len),
            WsStatus::Ok
        );
        assert!(buf.iter().all(|&j| j < 2));

        let mut json = ptr::null_mut();
        assert_eq!(ws_report_json(report, &mut json), WsStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        ws_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!((v["p0"].as_f64().unwrap() - p0).abs() <= 1e-15 * p0.abs());
        assert_eq!(v["w_hat"].as_array().unwrap().len(), len);

        let mut again = ptr::null_mut();
        assert_eq!(ws_analyze(ds, cfg, &mut again), WsStatus::Ok);
        let mut p0b = -1.0;
        ws_report_p0(again, &mut p0b);
        assert_eq!(p0, p0b);

        ws_report_free(again);
        ws_report_free(report);
        ws_config_free(cfg);
        ws_dataset_free(ds);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ws_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
