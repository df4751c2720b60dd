//! C interface to the wellspec toolkit.
//!
//! Every fallible call returns a [`WsStatus`]; on failure the message is kept
//! per thread and read back with [`ws_last_error`]. Objects cross the boundary
//! as opaque handles that the caller releases with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wellspec::indtest::HsicMethod;
use wellspec::rankdep::codec_t;
use wellspec::regress::Mode;
use wellspec::tabular::{load_csv, Dataset, RngStream};
use wellspec::wellspec::{alg3_multisplit, AnalysisConfig, WellSpecReport};
use wellspec::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Bad file, column, shape or parameter.
    InputError = 3,
    Internal = 4,
    Panic = 5,
    /// The statistic exists but is undefined for this input.
    Undefined = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WsMode {
    Anm = 0,
    Lsnm = 1,
}

pub struct WsDataset(Dataset);
pub struct WsConfig(AnalysisConfig);
pub struct WsReport(WellSpecReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Fail(WsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = if e.is_input_error() {
            WsStatus::InputError
        } else {
            WsStatus::Internal
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(WsStatus::NullPointer, format!("{what} is null"))
}

/// Run `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> WsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            WsStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            WsStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(WsStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn ws_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ws_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Load a CSV file with a header row; `target` names the response column.
///
/// # Safety
/// `path` and `target` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_dataset_load_csv(
    path: *const c_char,
    target: *const c_char,
    out: *mut *mut WsDataset,
) -> WsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let ds = load_csv(str_arg(path, "path")?, str_arg(target, "target")?)?;
        *out = Box::into_raw(Box::new(WsDataset(ds)));
        Ok(())
    })
}

/// Build a dataset from a row-major `n × p` matrix and a response vector.
/// Predictors are named `X1..Xp` and the response `Y`.
///
/// # Safety
/// `x` must hold `n * p` values, `y` must hold `n`, `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_dataset_from_arrays(
    x: *const f64,
    y: *const f64,
    n: usize,
    p: usize,
    out: *mut *mut WsDataset,
) -> WsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let len = n
            .checked_mul(p)
            .ok_or_else(|| Fail(WsStatus::InputError, "n * p overflows".into()))?;
        let x = slice_arg(x, len, "x")?;
        let y = slice_arg(y, n, "y")?;
        let x = ndarray::Array2::from_shape_vec((n, p), x.to_vec())
            .map_err(|e| Fail(WsStatus::InputError, e.to_string()))?;
        let names = (1..=p).map(|j| format!("X{j}")).collect();
        let ds = Dataset::new(names, x, "Y", y.to_vec())?;
        *out = Box::into_raw(Box::new(WsDataset(ds)));
        Ok(())
    })
}

/// # Safety
/// `ds` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ws_dataset_free(ds: *mut WsDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// # Safety
/// `ds` must be a live handle; `n` and `p` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_dataset_shape(ds: *const WsDataset, n: *mut usize, p: *mut usize) -> WsStatus {
    guard(|| {
        let ds = &handle(ds, "dataset")?.0;
        *out_arg(n, "n")? = ds.n();
        *out_arg(p, "p")? = ds.p();
        Ok(())
    })
}

/// Default settings for the given noise model.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_config_new(mode: WsMode, out: *mut *mut WsConfig) -> WsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let mode = match mode {
            WsMode::Anm => Mode::Anm,
            WsMode::Lsnm => Mode::Lsnm,
        };
        *out = Box::into_raw(Box::new(WsConfig(AnalysisConfig::new(mode))));
        Ok(())
    })
}

/// # Safety
/// `cfg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_config_free(cfg: *mut WsConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

unsafe fn with_config(cfg: *mut WsConfig, f: impl FnOnce(&mut AnalysisConfig)) -> WsStatus {
    guard(|| {
        let c = &mut cfg.as_mut().ok_or_else(|| null("config"))?.0;
        let mut next = c.clone();
        f(&mut next);
        next.validate()?;
        *c = next;
        Ok(())
    })
}

/// Number of random splits; each is used in both orientations.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_config_set_splits(cfg: *mut WsConfig, splits: usize) -> WsStatus {
    with_config(cfg, |c| c.splits = splits)
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_config_set_seed(cfg: *mut WsConfig, seed: u64) -> WsStatus {
    with_config(cfg, |c| c.master_seed = seed)
}

/// Global level and per-variable level.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_config_set_levels(cfg: *mut WsConfig, alpha: f64, alpha_tilde: f64) -> WsStatus {
    with_config(cfg, |c| {
        c.alpha = alpha;
        c.alpha_tilde = alpha_tilde;
    })
}

/// Use the gamma approximation instead of permutations for the kernel test.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_config_set_gamma_hsic(cfg: *mut WsConfig, gamma: bool) -> WsStatus {
    with_config(cfg, |c| {
        c.hsic = if gamma {
            HsicMethod::Gamma
        } else {
            HsicMethod::Permutation
        }
    })
}

/// Run the multisplit selection procedure.
///
/// # Safety
/// `ds` and `cfg` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_analyze(ds: *const WsDataset, cfg: *const WsConfig, out: *mut *mut WsReport) -> WsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let ds = &handle(ds, "dataset")?.0;
        let cfg = &handle(cfg, "config")?.0;
        let report = alg3_multisplit(ds, cfg, false)?;
        *out = Box::into_raw(Box::new(WsReport(report)));
        Ok(())
    })
}

/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ws_report_free(r: *mut WsReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Aggregated global p-value.
///
/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ws_report_p0(r: *const WsReport, out: *mut f64) -> WsStatus {
    guard(|| {
        *out_arg(out, "out")? = handle(r, "report")?.0.p0;
        Ok(())
    })
}

/// Selected predictor positions. Writes up to `cap` indices into `buf` and
/// the full count into `len`; pass `cap = 0` to query the size.
///
/// # Safety
/// `r` must be a live handle, `buf` must hold `cap` values, `len` writable.
#[no_mangle]
pub unsafe extern "C" fn ws_report_selected(
    r: *const WsReport,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> WsStatus {
    guard(|| {
        let w = &handle(r, "report")?.0.w_hat_idx;
        *out_arg(len, "len")? = w.len();
        if cap > 0 {
            if buf.is_null() {
                return Err(null("buf"));
            }
            let dst = std::slice::from_raw_parts_mut(buf, cap);
            for (d, s) in dst.iter_mut().zip(w) {
                *d = *s;
            }
        }
        Ok(())
    })
}

/// The report as JSON; release with [`ws_string_free`].
///
/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ws_report_json(r: *const WsReport, out: *mut *mut c_char) -> WsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let text =
            serde_json::to_string(&handle(r, "report")?.0).map_err(|e| Fail(WsStatus::Internal, e.to_string()))?;
        let c = CString::new(text).map_err(|e| Fail(WsStatus::Internal, e.to_string()))?;
        *out = c.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ws_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Rank dependence coefficient of `y` on the row-major `n × p` matrix `x`.
/// Returns [`WsStatus::Undefined`] when the response is constant.
///
/// # Safety
/// `y` must hold `n` values, `x` `n * p`, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ws_codec(
    y: *const f64,
    x: *const f64,
    n: usize,
    p: usize,
    seed: u64,
    out: *mut f64,
) -> WsStatus {
    let mut undefined = false;
    let status = guard(|| {
        let out = out_arg(out, "out")?;
        let len = n
            .checked_mul(p)
            .ok_or_else(|| Fail(WsStatus::InputError, "n * p overflows".into()))?;
        let y = slice_arg(y, n, "y")?;
        let x = slice_arg(x, len, "x")?;
        let x = ndarray::ArrayView2::from_shape((n, p), x).map_err(|e| Fail(WsStatus::InputError, e.to_string()))?;
        let stat = codec_t(y, x, &RngStream::new(seed).child(0), None)?;
        match stat.t_n_f64() {
            Some(t) => *out = t,
            None => {
                *out = f64::NAN;
                undefined = true;
            }
        }
        Ok(())
    });
    if status == WsStatus::Ok && undefined {
        set_error("coefficient undefined: response is constant");
        return WsStatus::Undefined;
    }
    status
}
