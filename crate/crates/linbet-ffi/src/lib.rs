//! C ABI for the linbet simulator: opaque handles, integer status codes and
//! a thread-local last-error message. Every out-pointer is written only on
//! `LINBET_STATUS_OK`.

use std::cell::RefCell;
use std::ffi::{CStr, CString, c_char};
use std::panic::{AssertUnwindSafe, catch_unwind};

use linbet::harness::{AggregateCurve, RunRecord};
use linbet::{AlgoConfig, AlgoKind, BanditInstance, Error, InstanceSpec};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinbetStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    InvalidConfig = 3,
    Runtime = 4,
    Utf8 = 5,
    Json = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn status_of(err: &Error) -> LinbetStatus {
    match err {
        Error::InvalidInput(_) => LinbetStatus::InvalidInput,
        Error::InvalidConfig(_) => LinbetStatus::InvalidConfig,
        Error::Json(_) => LinbetStatus::Json,
        _ => LinbetStatus::Runtime,
    }
}

fn fail(err: Error) -> LinbetStatus {
    let code = status_of(&err);
    set_error(&err.to_string());
    code
}

fn guard(f: impl FnOnce() -> LinbetStatus) -> LinbetStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic");
            LinbetStatus::Panic
        }
    }
}

unsafe fn cstr<'a>(ptr: *const c_char) -> Result<&'a str, LinbetStatus> {
    if ptr.is_null() {
        set_error("null string pointer");
        return Err(LinbetStatus::NullPointer);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        LinbetStatus::Utf8
    })
}

/// Opaque bandit instance handle.
pub struct LinbetInstance {
    inner: BanditInstance,
}

/// Opaque result handle: per-repetition trajectories plus the aggregate.
pub struct LinbetRunResult {
    records: Vec<RunRecord>,
    aggregate: AggregateCurve,
}

/// Last error message for this thread; valid until the next failing call.
#[unsafe(no_mangle)]
pub extern "C" fn linbet_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Build a named dataset instance (s1-s4), deterministically in `seed`.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn linbet_instance_from_dataset(
    dataset: *const c_char,
    seed: u64,
    out: *mut *mut LinbetInstance,
) -> LinbetStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return LinbetStatus::NullPointer;
        }
        let name = match unsafe { cstr(dataset) } {
            Ok(s) => s.to_string(),
            Err(code) => return code,
        };
        match BanditInstance::generate(&InstanceSpec::Dataset { dataset: name }, seed) {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(LinbetInstance { inner })) };
                LinbetStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Deserialize an instance from its JSON form.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn linbet_instance_from_json(
    json: *const c_char,
    out: *mut *mut LinbetInstance,
) -> LinbetStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return LinbetStatus::NullPointer;
        }
        let text = match unsafe { cstr(json) } {
            Ok(s) => s,
            Err(code) => return code,
        };
        match BanditInstance::from_json(text) {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(LinbetInstance { inner })) };
                LinbetStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Serialize an instance; free the string with `linbet_string_free`.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn linbet_instance_to_json(
    instance: *const LinbetInstance,
    out: *mut *mut c_char,
) -> LinbetStatus {
    guard(|| {
        if instance.is_null() || out.is_null() {
            set_error("null pointer");
            return LinbetStatus::NullPointer;
        }
        let inst = unsafe { &*instance };
        match inst.inner.to_json() {
            Ok(json) => {
                let c = CString::new(json.replace('\0', " ")).unwrap();
                unsafe { *out = c.into_raw() };
                LinbetStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[unsafe(no_mangle)]
pub unsafe extern "C" fn linbet_instance_free(instance: *mut LinbetInstance) {
    if !instance.is_null() {
        drop(unsafe { Box::from_raw(instance) });
    }
}

#[unsafe(no_mangle)]
pub unsafe extern "C" fn linbet_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Run `reps` seeded repetitions of one algorithm ("menu", "tofu", "mom" or
/// "crt") with default parameters inherited from the instance.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn linbet_run(
    instance: *const LinbetInstance,
    algo: *const c_char,
    horizon: u64,
    reps: u32,
    seed: u64,
    out: *mut *mut LinbetRunResult,
) -> LinbetStatus {
    guard(|| {
        if instance.is_null() || out.is_null() {
            set_error("null pointer");
            return LinbetStatus::NullPointer;
        }
        let name = match unsafe { cstr(algo) } {
            Ok(s) => s,
            Err(code) => return code,
        };
        let kind = match AlgoKind::parse(name) {
            Ok(k) => k,
            Err(e) => return fail(e),
        };
        let inst = unsafe { &*instance };
        let cfg = AlgoConfig::new(kind);
        let result = linbet::run_experiment(&inst.inner, &cfg, horizon, reps, seed)
            .and_then(|records| {
                let aggregate = linbet::aggregate(&records)?;
                Ok(LinbetRunResult { records, aggregate })
            });
        match result {
            Ok(res) => {
                unsafe { *out = Box::into_raw(Box::new(res)) };
                LinbetStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of repetitions in a result (0 for a null handle).
#[unsafe(no_mangle)]
pub unsafe extern "C" fn linbet_result_reps(result: *const LinbetRunResult) -> u32 {
    if result.is_null() {
        return 0;
    }
    unsafe { &*result }.records.len() as u32
}

/// Effective rounds per repetition (0 for a null handle).
#[unsafe(no_mangle)]
pub unsafe extern "C" fn linbet_result_rounds(result: *const LinbetRunResult) -> u64 {
    if result.is_null() {
        return 0;
    }
    unsafe { &*result }
        .records
        .first()
        .map(|r| r.rounds() as u64)
        .unwrap_or(0)
}

/// Final cumulative pseudo-regret of one repetition.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn linbet_result_final_regret(
    result: *const LinbetRunResult,
    rep: u32,
    out: *mut f64,
) -> LinbetStatus {
    unsafe { rep_scalar(result, rep, out, RunRecord::final_regret) }
}

/// Final cumulative payoff of one repetition.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn linbet_result_final_payoff(
    result: *const LinbetRunResult,
    rep: u32,
    out: *mut f64,
) -> LinbetStatus {
    unsafe { rep_scalar(result, rep, out, RunRecord::final_payoff) }
}

unsafe fn rep_scalar(
    result: *const LinbetRunResult,
    rep: u32,
    out: *mut f64,
    get: impl Fn(&RunRecord) -> f64,
) -> LinbetStatus {
    if result.is_null() || out.is_null() {
        set_error("null pointer");
        return LinbetStatus::NullPointer;
    }
    let res = unsafe { &*result };
    match res.records.get(rep as usize) {
        Some(r) => {
            unsafe { *out = get(r) };
            LinbetStatus::Ok
        }
        None => {
            set_error("repetition index out of range");
            LinbetStatus::InvalidInput
        }
    }
}

/// Copy the mean cumulative-regret curve into a caller-owned buffer of
/// `len` doubles; `len` must equal `linbet_result_rounds`.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn linbet_result_mean_cum_regret(
    result: *const LinbetRunResult,
    buf: *mut f64,
    len: usize,
) -> LinbetStatus {
    guard(|| {
        if result.is_null() || buf.is_null() {
            set_error("null pointer");
            return LinbetStatus::NullPointer;
        }
        let res = unsafe { &*result };
        let curve = &res.aggregate.mean_cum_regret;
        if len != curve.len() {
            set_error("buffer length does not match the number of rounds");
            return LinbetStatus::InvalidInput;
        }
        unsafe { std::ptr::copy_nonoverlapping(curve.as_ptr(), buf, len) };
        LinbetStatus::Ok
    })
}

/// Serialize the per-round trajectories as CSV; free with `linbet_string_free`.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn linbet_result_to_csv(
    result: *const LinbetRunResult,
    out: *mut *mut c_char,
) -> LinbetStatus {
    guard(|| {
        if result.is_null() || out.is_null() {
            set_error("null pointer");
            return LinbetStatus::NullPointer;
        }
        let res = unsafe { &*result };
        let text = match linbet::harness::runs_csv_string(&res.records) {
            Ok(text) => text,
            Err(e) => return fail(e),
        };
        let c = CString::new(text.replace('\0', " ")).unwrap();
        unsafe { *out = c.into_raw() };
        LinbetStatus::Ok
    })
}

#[unsafe(no_mangle)]
pub unsafe extern "C" fn linbet_result_free(result: *mut LinbetRunResult) {
    if !result.is_null() {
        drop(unsafe { Box::from_raw(result) });
    }
}
