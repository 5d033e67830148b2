//! C ABI for `eulerpade`.
//!
//! Every function returns an `EpStatus`; results come back through out
//! pointers. Objects are opaque handles released with their `_free`
//! function, strings returned by the library are released with
//! `ep_string_free`. After a failing call `ep_last_error` describes the error
//! on the calling thread.

#![allow(non_camel_case_types)]

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use eulerpade::certify::{certify_nonvanishing, theorem2_bounds, CertifyOutcome};
use eulerpade::cli::parse_elements;
use eulerpade::pade::{pade_construct, pade_order_check, PadeSystem};
use eulerpade::padics::euler_eval_certified;
use eulerpade::places::places_above;
use eulerpade::{Error, FieldElement, QuadraticField};

/// Result codes. `EP_UNDETERMINED` is not a failure: the output is written.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EpStatus {
    EP_OK = 0,
    EP_UNDETERMINED = 1,
    EP_NULL_POINTER = 2,
    EP_INVALID_UTF8 = 3,
    EP_PARSE = 4,
    EP_INVALID_INPUT = 5,
    EP_FIELD_MISMATCH = 6,
    EP_DIVISION_BY_ZERO = 7,
    EP_INVALID_PRIME = 8,
    EP_NOT_INTEGRAL = 9,
    EP_PRECISION = 10,
    EP_DOMAIN = 11,
    EP_PANIC = 99,
}

/// Opaque number field `Q` or `Q(sqrt d)`.
pub struct EpField(QuadraticField);

/// Opaque field element.
pub struct EpElement(FieldElement);

/// Opaque Padé system.
pub struct EpPadeSystem(PadeSystem);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EpStatus {
    match e {
        Error::Parse(_) => EpStatus::EP_PARSE,
        Error::FieldMismatch(..) => EpStatus::EP_FIELD_MISMATCH,
        Error::DivisionByZero | Error::ZeroElement => EpStatus::EP_DIVISION_BY_ZERO,
        Error::InvalidPrime(_) => EpStatus::EP_INVALID_PRIME,
        Error::NotIntegral(_) => EpStatus::EP_NOT_INTEGRAL,
        Error::PrecisionCapExceeded { .. } | Error::NoConvergenceEvidence(_) => EpStatus::EP_PRECISION,
        Error::DomainError(_) | Error::HeightTooSmall { .. } | Error::ScaleTooLarge => EpStatus::EP_DOMAIN,
        _ => EpStatus::EP_INVALID_INPUT,
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard(f: impl FnOnce() -> Result<EpStatus, (EpStatus, String)>) -> EpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            EpStatus::EP_PANIC
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (EpStatus, String)>;
}

impl<T> IntoFfi<T> for eulerpade::Result<T> {
    fn ffi(self) -> Result<T, (EpStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (EpStatus, String) {
    (EpStatus::EP_NULL_POINTER, format!("{what} is null"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (EpStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| (EpStatus::EP_INVALID_UTF8, format!("{what} is not UTF-8")))
}

unsafe fn read_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (EpStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (EpStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (EpStatus, String)> {
    let c = CString::new(s).map_err(|_| (EpStatus::EP_INVALID_INPUT, "string contains NUL".to_string()))?;
    write_out(out, c.into_raw())
}

fn json_text(v: &serde_json::Value) -> String {
    v.to_string()
}

/// Message for the last failing call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ep_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ep_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `Q` when `rational` is nonzero, otherwise `Q(sqrt d)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ep_field_new(d: i64, rational: i32, out: *mut *mut EpField) -> EpStatus {
    guard(|| {
        let field = if rational != 0 { QuadraticField::RATIONALS } else { QuadraticField::new(d).ffi()? };
        write_out(out, Box::into_raw(Box::new(EpField(field))))?;
        Ok(EpStatus::EP_OK)
    })
}

/// # Safety
/// `f` must come from `ep_field_new` (or be NULL).
#[no_mangle]
pub unsafe extern "C" fn ep_field_free(f: *mut EpField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Parses `"x"` or `"x,y"` (meaning `x + y sqrt d`).
///
/// # Safety
/// Pointers must be valid; `text` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ep_element_parse(
    field: *const EpField,
    text: *const c_char,
    out: *mut *mut EpElement,
) -> EpStatus {
    guard(|| {
        let field = read_ref(field, "field")?.0;
        let e = FieldElement::parse(field, read_str(text, "text")?).ffi()?;
        write_out(out, Box::into_raw(Box::new(EpElement(e))))?;
        Ok(EpStatus::EP_OK)
    })
}

/// # Safety
/// `e` must come from this library (or be NULL).
#[no_mangle]
pub unsafe extern "C" fn ep_element_free(e: *mut EpElement) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Arithmetic operation selector for `ep_element_arith`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub enum EpOp {
    EP_ADD = 0,
    EP_SUB = 1,
    EP_MUL = 2,
    EP_DIV = 3,
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ep_element_arith(
    a: *const EpElement,
    b: *const EpElement,
    op: EpOp,
    out: *mut *mut EpElement,
) -> EpStatus {
    guard(|| {
        let (a, b) = (&read_ref(a, "a")?.0, &read_ref(b, "b")?.0);
        let r = match op {
            EpOp::EP_ADD => a.checked_add(b),
            EpOp::EP_SUB => a.checked_sub(b),
            EpOp::EP_MUL => a.checked_mul(b),
            EpOp::EP_DIV => a.checked_div(b),
        }
        .ffi()?;
        write_out(out, Box::into_raw(Box::new(EpElement(r))))?;
        Ok(EpStatus::EP_OK)
    })
}

/// Element as `"x"` or `"x,y"`; free with `ep_string_free`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ep_element_to_string(e: *const EpElement, out: *mut *mut c_char) -> EpStatus {
    guard(|| {
        write_string(out, read_ref(e, "element")?.0.to_string())?;
        Ok(EpStatus::EP_OK)
    })
}

/// Norm as an exact rational string.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ep_element_norm(e: *const EpElement, out: *mut *mut c_char) -> EpStatus {
    guard(|| {
        let n = read_ref(e, "element")?.0.norm();
        write_string(out, eulerpade::numfield::format_rational(&n))?;
        Ok(EpStatus::EP_OK)
    })
}

/// Builds the Padé system for `alphas` (`"x,y;x,y;..."`, `m` entries).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ep_pade_construct(
    field: *const EpField,
    l: u32,
    mu: usize,
    alphas: *const c_char,
    out: *mut *mut EpPadeSystem,
) -> EpStatus {
    guard(|| {
        let field = read_ref(field, "field")?.0;
        let alphas = parse_elements(field, read_str(alphas, "alphas")?).ffi()?;
        let sys = pade_construct(alphas.len(), l, mu, &alphas).ffi()?;
        write_out(out, Box::into_raw(Box::new(EpPadeSystem(sys))))?;
        Ok(EpStatus::EP_OK)
    })
}

/// # Safety
/// `s` must come from `ep_pade_construct` (or be NULL).
#[no_mangle]
pub unsafe extern "C" fn ep_pade_free(s: *mut EpPadeSystem) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Order of the remainder series, computed up to `cutoff`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ep_pade_order(sys: *const EpPadeSystem, cutoff: usize, out: *mut usize) -> EpStatus {
    guard(|| {
        let order = pade_order_check(&read_ref(sys, "system")?.0, cutoff).ffi()?;
        write_out(out, order)?;
        Ok(EpStatus::EP_OK)
    })
}

/// The B-polynomials as JSON.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ep_pade_to_json(sys: *const EpPadeSystem, out: *mut *mut c_char) -> EpStatus {
    guard(|| {
        write_string(out, json_text(&read_ref(sys, "system")?.0.to_json()))?;
        Ok(EpStatus::EP_OK)
    })
}

/// JSON array of certified values of `F_v(alpha)` at the places above `p`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ep_eval_json(
    alpha: *const EpElement,
    p: u64,
    precision: u32,
    out: *mut *mut c_char,
) -> EpStatus {
    guard(|| {
        let alpha = &read_ref(alpha, "alpha")?.0;
        let values = places_above(alpha.field(), p)
            .ffi()?
            .iter()
            .map(|v| euler_eval_certified(v, alpha, precision).map(|c| c.to_json()))
            .collect::<eulerpade::Result<Vec<_>>>()
            .ffi()?;
        write_string(out, json_text(&serde_json::Value::Array(values)))?;
        Ok(EpStatus::EP_OK)
    })
}

/// Certificate search; writes the certificate or the undetermined report as
/// JSON and returns `EP_UNDETERMINED` in the latter case.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ep_certify_json(
    field: *const EpField,
    lambdas: *const c_char,
    alphas: *const c_char,
    p_min: u64,
    p_max: u64,
    max_precision: u32,
    out: *mut *mut c_char,
) -> EpStatus {
    guard(|| {
        let field = read_ref(field, "field")?.0;
        let lambdas = parse_elements(field, read_str(lambdas, "lambdas")?).ffi()?;
        let alphas = parse_elements(field, read_str(alphas, "alphas")?).ffi()?;
        let outcome = certify_nonvanishing(&lambdas, &alphas, p_min, p_max, max_precision).ffi()?;
        write_string(out, json_text(&outcome.to_json()))?;
        Ok(match outcome {
            CertifyOutcome::Nonzero(_) => EpStatus::EP_OK,
            CertifyOutcome::Undetermined(_) => EpStatus::EP_UNDETERMINED,
        })
    })
}

/// Effective bound report as JSON.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ep_bounds_json(m: u32, kappa: u32, c1: f64, log_h: f64, out: *mut *mut c_char) -> EpStatus {
    guard(|| {
        let rep = theorem2_bounds(m, kappa, c1, log_h).ffi()?;
        let v = serde_json::to_value(&rep).map_err(|e| (EpStatus::EP_INVALID_INPUT, e.to_string()))?;
        write_string(out, json_text(&v))?;
        Ok(EpStatus::EP_OK)
    })
}
