// SPDX-License-Identifier: MIT OR Apache-2.0

use std::ffi::{CStr, CString};
use std::ptr;

use tsbench_ffi::*;

const WALK: &str =
    r#"{"id":"rw","n":3000,"seed":5,"generator":{"kind":"random_walk","sigma":1.0,"x0":0.0}}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { tsb_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let s = unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_str()
        .unwrap()
        .to_string();
    assert_eq!(n.min(255), s.len());
    s
}

fn generate(spec: &str) -> *mut TsbDataset {
    let mut ds = ptr::null_mut();
    let st = unsafe { tsb_dataset_generate(c(spec).as_ptr(), &mut ds) };
    assert_eq!(st, TsbStatus::Ok, "{}", last_error());
    ds
}

#[test]
fn dataset_round_trip_matches_core() {
    let ds = generate(WALK);
    let (mut n, mut ch) = (0usize, 0usize);
    unsafe {
        assert_eq!(tsb_dataset_n_steps(ds, &mut n), TsbStatus::Ok);
        assert_eq!(tsb_dataset_n_channels(ds, &mut ch), TsbStatus::Ok);
    }
    assert_eq!((n, ch), (3000, 1));
    let mut obs = vec![0.0; n];
    let mut clean = vec![0.0; n];
    unsafe {
        assert_eq!(
            tsb_dataset_observed(ds, 0, obs.as_mut_ptr(), n),
            TsbStatus::Ok
        );
        assert_eq!(
            tsb_dataset_clean(ds, 0, clean.as_mut_ptr(), n),
            TsbStatus::Ok
        );
    }
    let direct = tsbench::generate_dataset(&serde_json::from_str(WALK).unwrap()).unwrap();
    assert_eq!(obs, direct.series.observed(0));
    assert_eq!(clean, direct.series.clean(0));

    unsafe {
        assert_eq!(
            tsb_dataset_observed(ds, 0, obs.as_mut_ptr(), n - 1),
            TsbStatus::BufferSize
        );
        assert_eq!(
            tsb_dataset_observed(ds, 1, obs.as_mut_ptr(), n),
            TsbStatus::NotFound
        );
        tsb_dataset_free(ds);
    }
    assert!(last_error().contains("out of range"));
}

#[test]
fn evaluate_and_read_metrics() {
    let ds = generate(WALK);
    let protocol = c(r#"{"horizons":[10],"eval_on_original_scale":true}"#);
    let baselines = c(r#"[{"kind":"naive"},{"kind":"mean"}]"#);
    let mut report = ptr::null_mut();
    let st =
        unsafe { tsb_dataset_evaluate(ds, protocol.as_ptr(), baselines.as_ptr(), &mut report) };
    assert_eq!(st, TsbStatus::Ok, "{}", last_error());

    let metric = |model: &str, h: usize, m: &str| {
        let mut v = f64::NAN;
        let st = unsafe {
            tsb_report_metric(
                report,
                c("rw").as_ptr(),
                c(model).as_ptr(),
                h,
                c(m).as_ptr(),
                &mut v,
            )
        };
        (st, v)
    };
    let (st, oracle) = metric("oracle", 10, "mse_obs");
    assert_eq!(st, TsbStatus::Ok);
    let (_, naive) = metric("naive", 10, "mse_obs");
    assert_eq!(
        oracle, naive,
        "the naive forecast is the random-walk oracle"
    );
    let (_, mean) = metric("mean", 0, "mse_obs");
    assert!(mean > oracle);
    assert_eq!(metric("oracle", 10, "mse_true").0, TsbStatus::Ok);
    assert_eq!(metric("oracle", 96, "mse_obs").0, TsbStatus::NotFound);
    assert_eq!(metric("arima", 10, "mse_obs").0, TsbStatus::NotFound);
    assert_eq!(metric("oracle", 10, "r2").0, TsbStatus::NotFound);

    let json = unsafe { CStr::from_ptr(tsb_report_json(report)) }
        .to_str()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    assert_eq!(v["datasets"][0]["models"].as_array().unwrap().len(), 3);
    unsafe {
        tsb_report_free(report);
        tsb_dataset_free(ds);
    }
}

#[test]
fn error_codes() {
    let mut ds = ptr::null_mut();
    unsafe {
        assert_eq!(
            tsb_dataset_generate(ptr::null(), &mut ds),
            TsbStatus::NullPointer
        );
        assert_eq!(
            tsb_dataset_generate(c("{").as_ptr(), &mut ds),
            TsbStatus::InvalidJson
        );
        let bad = c(r#"{"id":"a","n":500,"seed":1,"generator":{"kind":"arma","phi":[1.5]}}"#);
        assert_eq!(
            tsb_dataset_generate(bad.as_ptr(), &mut ds),
            TsbStatus::Param
        );
        assert!(ds.is_null());
        let zero = c(r#"{"id":"a","n":0,"seed":1,"generator":{"kind":"white_noise","sigma":1.0}}"#);
        assert_eq!(
            tsb_dataset_generate(zero.as_ptr(), &mut ds),
            TsbStatus::Config
        );
        assert!(!last_error().is_empty());
        assert_eq!(
            tsb_suite_generate(c("name = 1").as_ptr(), c("/tmp").as_ptr()),
            TsbStatus::Config
        );
        tsb_dataset_free(ptr::null_mut());
        tsb_report_free(ptr::null_mut());
    }
    let v = unsafe { CStr::from_ptr(tsb_version()) }.to_str().unwrap();
    assert_eq!(v, tsbench::suite::ARTIFACT_VERSION);
}

#[test]
fn suite_evaluate_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let toml = c(r#"
name = "tiny"
[protocol]
horizons = [24]
[[baselines]]
kind = "naive"
[[datasets]]
id = "sine"
n = 1000
seed = 1
generator = { kind = "periodic", wave = "sine", amplitude = 1.0, frequency = 0.05 }
"#);
    let out = c(dir.path().to_str().unwrap());
    let mut report = ptr::null_mut();
    unsafe {
        assert_eq!(
            tsb_suite_generate(toml.as_ptr(), out.as_ptr()),
            TsbStatus::Ok,
            "{}",
            last_error()
        );
        assert_eq!(
            tsb_suite_evaluate(toml.as_ptr(), out.as_ptr(), &mut report),
            TsbStatus::Ok,
            "{}",
            last_error()
        );
    }
    assert!(dir.path().join("report.csv").exists());
    assert!(dir.path().join("sine.csv").exists());
    let mut v = f64::NAN;
    let st = unsafe {
        tsb_report_metric(
            report,
            c("sine").as_ptr(),
            c("oracle").as_ptr(),
            24,
            c("mse_obs").as_ptr(),
            &mut v,
        )
    };
    assert_eq!(st, TsbStatus::Ok);
    assert_eq!(v, 0.0);
    unsafe { tsb_report_free(report) };
}
