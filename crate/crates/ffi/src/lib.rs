//! C ABI over the `weierstrass` crate.
//!
//! Every call returns a [`WsStatus`]; on failure the message is available
//! from [`ws_last_error_message`] on the same thread until the next call.
//! Engines are opaque handles created by [`ws_engine_new`] and released by
//! [`ws_engine_free`]. Strings returned through `char **` out-parameters are
//! owned by the caller and must be released with [`ws_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use weierstrass::eisenstein::{eisenstein_coefficients, EisensteinWeight, QTruncation};
use weierstrass::reduction::{reduce, ModularQuantity};
use weierstrass::symbolic::{differentiate, parse_expr, DiffVar};
use weierstrass::verify::run_identity_suite;
use weierstrass::{Engine, Error, TolerancePolicy, UpperHalfPoint};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ZeroArgument = 3,
    NotInUpperHalfPlane = 4,
    PoleProximity = 5,
    ConvergenceDomain = 6,
    NonTermination = 7,
    DegenerateConfiguration = 8,
    NearSingular = 9,
    Overflow = 10,
    InvalidPolicy = 11,
    Parse = 12,
    Config = 13,
    BufferTooSmall = 14,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WsFunction {
    Wp = 0,
    Wp1 = 1,
    Zeta = 2,
    E2 = 3,
    E4 = 4,
    E6 = 5,
    G2 = 6,
    G3 = 7,
    Delta = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WsVar {
    Z = 0,
    Tau = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WsComplex {
    pub re: f64,
    pub im: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WsValue {
    pub re: f64,
    pub im: f64,
    pub est_error: f64,
}

/// Reduction data: `γ = [[a, b], [c, d]]` with `γτ = τ*`, `z = s·(z* + m + nτ*)` with `s = cτ + d`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WsReduction {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub tau_star: WsComplex,
    pub m: i64,
    pub n: i64,
    pub z_star: WsComplex,
    pub scale: WsComplex,
}

/// Opaque evaluation engine.
pub struct WsEngine {
    engine: Engine,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> WsStatus {
    match e {
        Error::ZeroArgument => WsStatus::ZeroArgument,
        Error::NotInUpperHalfPlane { .. } => WsStatus::NotInUpperHalfPlane,
        Error::PoleProximity { .. } => WsStatus::PoleProximity,
        Error::ConvergenceDomain(_) => WsStatus::ConvergenceDomain,
        Error::NonTermination { .. } => WsStatus::NonTermination,
        Error::DegenerateConfiguration(_) => WsStatus::DegenerateConfiguration,
        Error::NearSingular { .. } => WsStatus::NearSingular,
        Error::Overflow(_) => WsStatus::Overflow,
        Error::InvalidPolicy(_) => WsStatus::InvalidPolicy,
        Error::Parse { .. } => WsStatus::Parse,
        Error::Config(_) => WsStatus::Config,
    }
}

struct Fail(WsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(WsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status and the last-error message.
fn guarded(f: impl FnOnce() -> Result<(), Fail>) -> WsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            WsStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            WsStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(WsStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(WsStatus::InvalidUtf8, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn complex(v: WsComplex) -> Complex64 {
    Complex64::new(v.re, v.im)
}

fn ws_complex(v: Complex64) -> WsComplex {
    WsComplex { re: v.re, im: v.im }
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ws_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Engine with the default tolerances and truncation.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ws_engine_new(out: *mut *mut WsEngine) -> WsStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(WsEngine { engine: Engine::default() }));
        Ok(())
    })
}

/// Engine configured from `key = value` text (the tolerance config format).
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ws_engine_new_with_config(config: *const c_char, out: *mut *mut WsEngine) -> WsStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let policy = TolerancePolicy::from_config_str(read_str(config, "config")?)?;
        let engine = Engine::new(policy, QTruncation::default())?;
        *out = Box::into_raw(Box::new(WsEngine { engine }));
        Ok(())
    })
}

/// Releases an engine; null is ignored.
///
/// # Safety
/// `engine` must come from `ws_engine_new*` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ws_engine_free(engine: *mut WsEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Evaluates `func` at `(tau, z)`; `z` is ignored for the modular quantities.
///
/// # Safety
/// `engine` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ws_eval(
    engine: *const WsEngine,
    func: WsFunction,
    tau: WsComplex,
    z: WsComplex,
    out: *mut WsValue,
) -> WsStatus {
    guarded(|| {
        let e = &engine.as_ref().ok_or_else(|| null("engine"))?.engine;
        if out.is_null() {
            return Err(null("out"));
        }
        let t = UpperHalfPoint::new(complex(tau))?;
        let z = complex(z);
        let (value, est_error) = match func {
            WsFunction::Wp => e.wp_anywhere(t, z).map(|w| (w.value, w.est_error))?,
            WsFunction::Wp1 => e.wp_prime_anywhere(t, z).map(|w| (w.value, w.est_error))?,
            WsFunction::Zeta => e.zeta_anywhere(t, z).map(|w| (w.value, w.est_error))?,
            _ => {
                let which = match func {
                    WsFunction::E2 => ModularQuantity::E2,
                    WsFunction::E4 => ModularQuantity::E4,
                    WsFunction::E6 => ModularQuantity::E6,
                    WsFunction::G2 => ModularQuantity::G2,
                    WsFunction::G3 => ModularQuantity::G3,
                    _ => ModularQuantity::Delta,
                };
                e.modular_anywhere(t, which).map(|w| (w.value, w.est_error))?
            }
        };
        *out = WsValue { re: value.re, im: value.im, est_error };
        Ok(())
    })
}

/// Reduces `tau` into the fundamental domain and `z` into the period cell.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ws_reduce(tau: WsComplex, z: WsComplex, out: *mut WsReduction) -> WsStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let r = reduce(UpperHalfPoint::new(complex(tau))?, complex(z))?;
        *out = WsReduction {
            a: r.gamma.a,
            b: r.gamma.b,
            c: r.gamma.c,
            d: r.gamma.d,
            tau_star: ws_complex(r.tau_star.value()),
            m: r.m,
            n: r.n,
            z_star: ws_complex(r.z_star),
            scale: ws_complex(r.scale),
        };
        Ok(())
    })
}

/// Derivative of the expression text `expr` in `var`, as text.
///
/// # Safety
/// `expr` must be NUL-terminated; `out` must be valid. Free the result with
/// `ws_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ws_diff(expr: *const c_char, var: WsVar, out: *mut *mut c_char) -> WsStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let e = parse_expr(read_str(expr, "expr")?)?;
        let v = match var {
            WsVar::Z => DiffVar::Z,
            WsVar::Tau => DiffVar::Tau,
        };
        write_string(out, differentiate(&e, v).to_string())
    })
}

/// Runs the identity suite with the engine's tolerances. `all_passed` is set
/// to 1 or 0; `report_json`, if non-null, receives the JSON report.
///
/// # Safety
/// `engine` must be live; `all_passed` valid; `report_json` null or valid.
#[no_mangle]
pub unsafe extern "C" fn ws_verify(
    engine: *const WsEngine,
    seed: u64,
    all_passed: *mut i32,
    report_json: *mut *mut c_char,
) -> WsStatus {
    guarded(|| {
        let e = &engine.as_ref().ok_or_else(|| null("engine"))?.engine;
        if all_passed.is_null() {
            return Err(null("all_passed"));
        }
        let report = run_identity_suite(seed, e.policy())?;
        *all_passed = report.all_passed() as i32;
        if !report_json.is_null() {
            let text = serde_json::to_string(&report).map_err(|e| Fail(WsStatus::Config, e.to_string()))?;
            write_string(report_json, text)?;
        }
        Ok(())
    })
}

/// Integer q-coefficients `c_0 … c_order` of `E_weight` (`weight` ∈ {2, 4, 6}).
/// `out` must hold `order + 1` entries; `len` is its capacity.
///
/// # Safety
/// `out` must point to `len` writable `int64_t`.
#[no_mangle]
pub unsafe extern "C" fn ws_eisenstein_coefficients(weight: u32, order: usize, out: *mut i64, len: usize) -> WsStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let w = match weight {
            2 => EisensteinWeight::Two,
            4 => EisensteinWeight::Four,
            6 => EisensteinWeight::Six,
            _ => return Err(Fail(WsStatus::InvalidPolicy, format!("weight {weight} not in {{2, 4, 6}}"))),
        };
        if len < order + 1 {
            return Err(Fail(WsStatus::BufferTooSmall, format!("need {} entries, have {len}", order + 1)));
        }
        for (k, c) in eisenstein_coefficients(w, order).into_iter().enumerate() {
            *out.add(k) = i64::try_from(c).map_err(|_| Error::Overflow("eisenstein coefficient"))?;
        }
        Ok(())
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ws_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn ws_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
