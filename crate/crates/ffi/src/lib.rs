// SPDX-License-Identifier: MIT OR Apache-2.0

//! C ABI over the benchmark engine.
//!
//! Every fallible function returns a [`TsbStatus`]. On failure the message is
//! kept per thread and can be read with [`tsb_last_error_message`]. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use tsbench::baselines::BaselineSpec;
use tsbench::eval::evaluate_builtin;
use tsbench::metrics::MetricRow;
use tsbench::suite::report::{DatasetReport, SuiteReport};
use tsbench::suite::{cmd_evaluate, cmd_generate, SuiteConfig, ARTIFACT_VERSION};
use tsbench::{generate_dataset, DatasetSpec, Error, EvalProtocol, SyntheticDataset};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TsbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidJson = 3,
    Config = 4,
    Param = 5,
    Domain = 6,
    DataMismatch = 7,
    Io = 8,
    NotFound = 9,
    BufferSize = 10,
    MetricAbsent = 11,
    Panic = 12,
}

/// A generated dataset.
pub struct TsbDataset {
    inner: SyntheticDataset,
}

/// Evaluation results for one or more datasets.
pub struct TsbReport {
    inner: SuiteReport,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> TsbStatus {
    match e {
        Error::Config(_) | Error::UnknownRecipe(_) => TsbStatus::Config,
        Error::Param(_)
        | Error::NonStationary { .. }
        | Error::NonInvertible { .. }
        | Error::ZeroVarianceSignal
        | Error::RegionOverflow { .. } => TsbStatus::Param,
        Error::MissingWindow { .. }
        | Error::IndexMismatch(_)
        | Error::DataMismatch(_)
        | Error::ShapeMismatch { .. }
        | Error::LengthMismatch { .. } => TsbStatus::DataMismatch,
        Error::Io { .. } => TsbStatus::Io,
        _ => TsbStatus::Domain,
    }
}

struct Fail(TsbStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TsbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_error();
            TsbStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TsbStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(TsbStatus::NullPointer, format!("`{what}` is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(TsbStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(TsbStatus::NullPointer, format!("`{what}` is null")))
}

fn json<T: serde::de::DeserializeOwned>(src: &str, what: &str) -> Result<T, Fail> {
    serde_json::from_str(src).map_err(|e| Fail(TsbStatus::InvalidJson, format!("{what}: {e}")))
}

fn out_ptr<T>(out: *mut T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        Err(Fail(TsbStatus::NullPointer, format!("`{what}` is null")))
    } else {
        Ok(())
    }
}

fn new_report(inner: SuiteReport) -> Result<*mut TsbReport, Fail> {
    let json = CString::new(inner.json()?)
        .map_err(|_| Fail(TsbStatus::Domain, "report JSON contains NUL".into()))?;
    Ok(Box::into_raw(Box::new(TsbReport { inner, json })))
}

/// Artifact version string; static, never freed.
#[no_mangle]
pub extern "C" fn tsb_version() -> *const c_char {
    static V: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version contains NUL"),
        };
    V.as_ptr()
}

/// Copies the last error of this thread into `buf` (NUL terminated, truncated
/// to `len`). Returns the full message length without the NUL, or 0 if the
/// last call succeeded.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn tsb_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Generates a dataset from its JSON spec.
///
/// # Safety
/// `spec_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsb_dataset_generate(
    spec_json: *const c_char,
    out: *mut *mut TsbDataset,
) -> TsbStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let spec: DatasetSpec = json(str_arg(spec_json, "spec_json")?, "dataset spec")?;
        let inner = generate_dataset(&spec)?;
        *out = Box::into_raw(Box::new(TsbDataset { inner }));
        Ok(())
    })
}

/// # Safety
/// `ds` must be null or a handle from [`tsb_dataset_generate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tsb_dataset_free(ds: *mut TsbDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// # Safety
/// `ds` must be a live dataset handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsb_dataset_n_steps(ds: *const TsbDataset, out: *mut usize) -> TsbStatus {
    guard(|| {
        out_ptr(out, "out")?;
        *out = handle(ds, "ds")?.inner.series.n_steps();
        Ok(())
    })
}

/// # Safety
/// `ds` must be a live dataset handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsb_dataset_n_channels(
    ds: *const TsbDataset,
    out: *mut usize,
) -> TsbStatus {
    guard(|| {
        out_ptr(out, "out")?;
        *out = handle(ds, "ds")?.inner.series.n_channels();
        Ok(())
    })
}

unsafe fn copy_channel(
    ds: *const TsbDataset,
    channel: usize,
    buf: *mut f64,
    len: usize,
    clean: bool,
) -> TsbStatus {
    guard(|| {
        out_ptr(buf, "buf")?;
        let s = &handle(ds, "ds")?.inner.series;
        if channel >= s.n_channels() {
            return Err(Fail(
                TsbStatus::NotFound,
                format!(
                    "channel {channel} out of range ({} channels)",
                    s.n_channels()
                ),
            ));
        }
        let values = if clean {
            s.clean(channel)
        } else {
            s.observed(channel)
        };
        if len != values.len() {
            return Err(Fail(
                TsbStatus::BufferSize,
                format!("buffer holds {len} values, channel has {}", values.len()),
            ));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, len);
        Ok(())
    })
}

/// Copies observed values of `channel` into `buf`, which must hold exactly
/// `n_steps` values.
///
/// # Safety
/// `ds` must be a live dataset handle; `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tsb_dataset_observed(
    ds: *const TsbDataset,
    channel: usize,
    buf: *mut f64,
    len: usize,
) -> TsbStatus {
    copy_channel(ds, channel, buf, len, false)
}

/// Copies the noise- and anomaly-free values of `channel` into `buf`.
///
/// # Safety
/// As for [`tsb_dataset_observed`].
#[no_mangle]
pub unsafe extern "C" fn tsb_dataset_clean(
    ds: *const TsbDataset,
    channel: usize,
    buf: *mut f64,
    len: usize,
) -> TsbStatus {
    copy_channel(ds, channel, buf, len, true)
}

/// Scores the oracle and `baselines_json` (a JSON array of baseline specs) on
/// one dataset. Null `protocol_json` uses the default protocol; null
/// `baselines_json` scores the oracle only.
///
/// # Safety
/// `ds` must be a live dataset handle; string arguments must be null or
/// NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsb_dataset_evaluate(
    ds: *const TsbDataset,
    protocol_json: *const c_char,
    baselines_json: *const c_char,
    out: *mut *mut TsbReport,
) -> TsbStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let ds = &handle(ds, "ds")?.inner;
        let protocol: EvalProtocol = match opt_str_arg(protocol_json, "protocol_json")? {
            Some(s) => json(s, "protocol")?,
            None => EvalProtocol::default(),
        };
        protocol.validate()?;
        let baselines: Vec<BaselineSpec> = match opt_str_arg(baselines_json, "baselines_json")? {
            Some(s) => json(s, "baselines")?,
            None => Vec::new(),
        };
        for b in &baselines {
            b.validate()?;
        }
        let (models, skipped) = evaluate_builtin(ds, &protocol, &baselines)?;
        let report = SuiteReport {
            suite: ds.id().to_string(),
            artifact_version: ARTIFACT_VERSION.to_string(),
            protocol,
            datasets: vec![DatasetReport {
                id: ds.id().to_string(),
                channels: ds.series.channel_names().to_vec(),
                oracle_classes: ds.classes.clone(),
                models,
                skipped_baselines: skipped,
            }],
            radar: None,
            radar_skipped: Vec::new(),
            degradation: None,
        };
        *out = new_report(report)?;
        Ok(())
    })
}

/// Writes every dataset of a TOML suite into `out_dir`.
///
/// # Safety
/// String arguments must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn tsb_suite_generate(
    suite_toml: *const c_char,
    out_dir: *const c_char,
) -> TsbStatus {
    guard(|| {
        let cfg = SuiteConfig::from_toml_str(str_arg(suite_toml, "suite_toml")?, "suite")?;
        cmd_generate(&cfg, Path::new(str_arg(out_dir, "out_dir")?))?;
        Ok(())
    })
}

/// Evaluates a TOML suite and writes the report files into `out_dir`.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsb_suite_evaluate(
    suite_toml: *const c_char,
    out_dir: *const c_char,
    out: *mut *mut TsbReport,
) -> TsbStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let cfg = SuiteConfig::from_toml_str(str_arg(suite_toml, "suite_toml")?, "suite")?;
        let report = cmd_evaluate(&cfg, Path::new(str_arg(out_dir, "out_dir")?), &[])?;
        *out = new_report(report)?;
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn tsb_report_free(report: *mut TsbReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// The report as JSON. The pointer stays valid until the report is freed.
///
/// # Safety
/// `report` must be a live report handle.
#[no_mangle]
pub unsafe extern "C" fn tsb_report_json(report: *const TsbReport) -> *const c_char {
    match report.as_ref() {
        Some(r) => r.json.as_ptr(),
        None => {
            set_error("`report` is null");
            ptr::null()
        }
    }
}

/// Looks up one metric. `horizon` 0 selects the mean over horizons; `metric`
/// is one of `mse_obs`, `mse_true`, `mae`, `rmse`, `mape`, `smape`.
/// Returns `MetricAbsent` when the metric is undefined for that row.
///
/// # Safety
/// `report` must be a live report handle; strings NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tsb_report_metric(
    report: *const TsbReport,
    dataset: *const c_char,
    model: *const c_char,
    horizon: usize,
    metric: *const c_char,
    out: *mut f64,
) -> TsbStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let r = &handle(report, "report")?.inner;
        let dataset = str_arg(dataset, "dataset")?;
        let model = str_arg(model, "model")?;
        let metric = str_arg(metric, "metric")?;
        let idx = MetricRow::NAMES
            .iter()
            .position(|n| *n == metric)
            .ok_or_else(|| Fail(TsbStatus::NotFound, format!("unknown metric `{metric}`")))?;
        let m = r.model(dataset, model).ok_or_else(|| {
            Fail(
                TsbStatus::NotFound,
                format!("no model `{model}` on dataset `{dataset}`"),
            )
        })?;
        let row = if horizon == 0 {
            &m.aggregate
        } else {
            &m.at(horizon)
                .ok_or_else(|| {
                    Fail(
                        TsbStatus::NotFound,
                        format!("horizon {horizon} was not evaluated"),
                    )
                })?
                .row
        };
        *out = row.values()[idx].ok_or_else(|| {
            Fail(
                TsbStatus::MetricAbsent,
                format!("`{metric}` is undefined for this row"),
            )
        })?;
        Ok(())
    })
}
