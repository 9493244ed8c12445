//! C ABI over `bf_cert`.
//!
//! Codes are passed around as opaque `BfcCode` handles. Every function
//! returns a `BfcStatus`; on failure a message is available from
//! `bfc_last_error` on the same thread. Strings returned through out
//! parameters are owned by the caller and released with `bfc_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bf_cert::bounds::capability::{capability, Radius};
use bf_cert::code::{girth, CodeSpecFile, Girth, ParityCheckMatrix, DEFAULT_GIRTH_CUTOFF};
use bf_cert::decoder::{BfConfig, Thresholds};
use bf_cert::keysearch::{rejection_sample_key, KeygenPolicy, ThresholdStrategy};
use bf_cert::montecarlo::{estimate_dfr, TrialPlan};
use bf_cert::pipeline::analyzer_for;
use bf_cert::subset::{compress, count_exceeding};
use bf_cert::Error;

/// Status codes returned by every `bfc_*` function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BfcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidSpec = 2,
    Dimension = 3,
    Config = 4,
    Domain = 5,
    Guard = 6,
    Precondition = 7,
    NoKey = 8,
    Io = 9,
    Utf8 = 10,
    Panic = 11,
}

/// Opaque parity-check matrix.
pub struct BfcCode {
    h: ParityCheckMatrix,
}

/// One-iteration correction capability of a code.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BfcCapability {
    pub n: u64,
    pub v_star: u64,
    pub delta: u64,
    /// Majority-logic radius; `u64::MAX` when unbounded.
    pub t_majority: u64,
    pub t_mu: u64,
    /// Smallest and largest threshold that guarantees correction of `t_mu`
    /// errors; both zero when `t_mu` is zero.
    pub b_lo: u64,
    pub b_hi: u64,
}

/// A DFR bound. `log2_bound` is `-inf` when the bound is exactly zero.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BfcBound {
    pub t: u64,
    pub b: u64,
    pub log2_bound: f64,
    pub numerator_bits: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BfcDfrEstimate {
    pub trials: u64,
    pub failures: u64,
    pub p_hat: f64,
    pub std_err: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> BfcStatus {
    match err {
        Error::InvalidSpec(_) | Error::Json(_) => BfcStatus::InvalidSpec,
        Error::Dimension { .. } => BfcStatus::Dimension,
        Error::Config(_) => BfcStatus::Config,
        Error::Domain(_) => BfcStatus::Domain,
        Error::Guard(_) => BfcStatus::Guard,
        Error::Precondition(_) => BfcStatus::Precondition,
        Error::NoKeyFound { .. } => BfcStatus::NoKey,
        Error::Io(_) | Error::Csv(_) => BfcStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Utf8,
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BfcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BfcStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            BfcStatus::NullPointer
        }
        Ok(Err(Failure::Utf8)) => {
            set_last_error("string argument is not valid UTF-8".into());
            BfcStatus::Utf8
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            BfcStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Utf8)
}

unsafe fn code_arg<'a>(code: *const BfcCode) -> Result<&'a ParityCheckMatrix, Failure> {
    code.as_ref().map(|c| &c.h).ok_or(Failure::Null("code"))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    let c = CString::new(s).map_err(|_| Failure::Utf8)?;
    out.write(c.into_raw());
    Ok(())
}

unsafe fn write_code(out: *mut *mut BfcCode, h: ParityCheckMatrix) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    out.write(Box::into_raw(Box::new(BfcCode { h })));
    Ok(())
}

/// The message for the last failing call on this thread, or null. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bfc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn bfc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a code from a JSON code spec.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfc_code_from_json(json: *const c_char, out: *mut *mut BfcCode) -> BfcStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let h = CodeSpecFile::from_json(text)?.build()?;
        write_code(out, h)
    })
}

/// Builds one of the bundled codes (`"C0"` to `"C8"`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfc_code_builtin(name: *const c_char, out: *mut *mut BfcCode) -> BfcStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let h = CodeSpecFile::builtin(name)?.build()?;
        write_code(out, h)
    })
}

/// Builds the two-circulant code `[H0 | H1]` of circulant size `p` from the
/// first-column supports of both blocks.
///
/// # Safety
/// `s0`/`s1` must point to `len0`/`len1` readable values; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn bfc_code_qc2(
    p: usize,
    s0: *const usize,
    len0: usize,
    s1: *const usize,
    len1: usize,
    out: *mut *mut BfcCode,
) -> BfcStatus {
    guard(|| {
        let s0 = slice_arg(s0, len0, "s0")?.to_vec();
        let s1 = slice_arg(s1, len1, "s1")?.to_vec();
        let h = CodeSpecFile::qc2(p, s0, s1).build()?;
        write_code(out, h)
    })
}

/// Releases a code handle. Null is ignored.
///
/// # Safety
/// `code` must come from a `bfc_code_*` constructor and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bfc_code_free(code: *mut BfcCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Code length; zero for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bfc_code_n(code: *const BfcCode) -> usize {
    code.as_ref().map_or(0, |c| c.h.n())
}

/// Number of parity checks; zero for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bfc_code_r(code: *const BfcCode) -> usize {
    code.as_ref().map_or(0, |c| c.h.r())
}

/// Tanner-graph girth. When no cycle up to the search cutoff exists,
/// `*exact` is set to 0 and `*girth_out` holds the lower bound.
///
/// # Safety
/// `code` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfc_code_girth(code: *const BfcCode, girth_out: *mut u32, exact: *mut bool) -> BfcStatus {
    guard(|| {
        let h = code_arg(code)?;
        let g = girth(h, DEFAULT_GIRTH_CUTOFF);
        write_out(girth_out, g.lower_bound() as u32, "girth_out")?;
        write_out(exact, matches!(g, Girth::Exact(_)), "exact")
    })
}

/// # Safety
/// `code` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfc_capability(code: *const BfcCode, out: *mut BfcCapability) -> BfcStatus {
    guard(|| {
        let report = capability(code_arg(code)?);
        let (b_lo, b_hi) = report
            .threshold_ranges
            .iter()
            .find(|r| r.t == report.t_mu)
            .map_or((0, 0), |r| (r.lo, r.hi));
        let cap = BfcCapability {
            n: report.n,
            v_star: report.v_star,
            delta: report.delta,
            t_majority: match report.t_majority {
                Radius::Finite(x) => x,
                Radius::Unbounded => u64::MAX,
            },
            t_mu: report.t_mu,
            b_lo,
            b_hi,
        };
        write_out(out, cap, "out")
    })
}

/// Failure-rate bound at error weight `t` and uniform threshold `b`. The QC
/// fast path is used for two-circulant codes. When `numerator` is non-null
/// it receives the exact unclamped numerator in decimal.
///
/// # Safety
/// `code` must be a live handle; `out` must be writable; `numerator` must be
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn bfc_bound(
    code: *const BfcCode,
    t: u64,
    b: u64,
    out: *mut BfcBound,
    numerator: *mut *mut c_char,
) -> BfcStatus {
    guard(|| {
        let h = code_arg(code)?;
        let (analyzer, _) = analyzer_for(h, t)?;
        let report = analyzer.th4(t, &Thresholds::Uniform(b as usize))?;
        emit_bound(t, b, &report, out, numerator)
    })
}

/// Like `bfc_bound`, with the threshold chosen to minimize the bound.
///
/// # Safety
/// As for `bfc_bound`.
#[no_mangle]
pub unsafe extern "C" fn bfc_bound_optimized(
    code: *const BfcCode,
    t: u64,
    out: *mut BfcBound,
    numerator: *mut *mut c_char,
) -> BfcStatus {
    guard(|| {
        let h = code_arg(code)?;
        let (analyzer, _) = analyzer_for(h, t)?;
        let (b, report) = analyzer.optimize(t)?;
        emit_bound(t, b, &report, out, numerator)
    })
}

unsafe fn emit_bound(
    t: u64,
    b: u64,
    report: &bf_cert::bounds::BoundReport,
    out: *mut BfcBound,
    numerator: *mut *mut c_char,
) -> Result<(), Failure> {
    let bound = BfcBound { t, b, log2_bound: report.log2_bound, numerator_bits: report.numerator_bits() };
    write_out(out, bound, "out")?;
    if !numerator.is_null() {
        write_string(numerator, report.numerator.to_string())?;
    }
    Ok(())
}

/// One bit-flipping iteration with uniform threshold `b` on the error with
/// support `error[0..len]`. `*decoded` is set when the decoder output equals
/// the error exactly.
///
/// # Safety
/// `code` must be a live handle; `error` must point to `len` readable
/// values; `decoded` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfc_decode(
    code: *const BfcCode,
    error: *const usize,
    len: usize,
    b: u64,
    decoded: *mut bool,
) -> BfcStatus {
    guard(|| {
        let h = code_arg(code)?;
        let support = slice_arg(error, len, "error")?;
        let mut e = vec![false; h.n()];
        for &i in support {
            if i >= h.n() {
                return Err(Error::Domain(format!("error position {i} outside code of length {}", h.n())).into());
            }
            e[i] ^= true;
        }
        let s = h.syndrome(&e)?;
        let out = bf_cert::decoder::bf_decode(h, &s, &BfConfig::single(b as usize))?;
        write_out(decoded, out.e_prime == e, "decoded")
    })
}

/// Monte Carlo DFR estimate at weight `t`, threshold `b`. Stops after 100
/// failures or `max_trials` trials. `workers == 0` uses the global pool.
///
/// # Safety
/// `code` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfc_estimate_dfr(
    code: *const BfcCode,
    t: usize,
    b: u64,
    max_trials: u64,
    seed: u64,
    workers: usize,
    out: *mut BfcDfrEstimate,
) -> BfcStatus {
    guard(|| {
        let h = code_arg(code)?;
        let mut plan = TrialPlan::new(t, max_trials, seed);
        plan.workers = workers;
        let est = estimate_dfr(h, &plan, &Thresholds::Uniform(b as usize))?;
        let value = BfcDfrEstimate { trials: est.trials, failures: est.failures, p_hat: est.p_hat, std_err: est.std_err };
        write_out(out, value, "out")
    })
}

/// Number of size-`m` subsets of `values[0..len]` whose sum exceeds `alpha`,
/// written as a decimal string.
///
/// # Safety
/// `values` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfc_count_exceeding(
    values: *const i64,
    len: usize,
    m: u64,
    alpha: u64,
    out: *mut *mut c_char,
) -> BfcStatus {
    guard(|| {
        let cv = compress(slice_arg(values, len, "values")?)?;
        let count = count_exceeding(&cv, m, alpha)?;
        write_string(out, count.to_string())
    })
}

/// Rejection-samples a two-circulant key whose certified bound at weight `t`
/// is below `2^target_log2`. `b == 0` optimizes the threshold per key. The
/// key record is written as JSON.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bfc_keygen(
    p: usize,
    v: usize,
    t: u64,
    target_log2: i64,
    b: u64,
    max_attempts: u64,
    seed: u64,
    out: *mut *mut c_char,
) -> BfcStatus {
    guard(|| {
        let mut policy = KeygenPolicy::new(p, v, t, target_log2, seed);
        policy.max_attempts = max_attempts;
        if b > 0 {
            policy.strategy = ThresholdStrategy::Fixed(b);
        }
        let key = rejection_sample_key(&policy)?;
        write_string(out, serde_json::to_string(&key).map_err(Error::from)?)
    })
}
