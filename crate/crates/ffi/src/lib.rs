//! C ABI over the `leibniz` crate.
//!
//! Values cross the boundary as opaque handles ([`LbzNumber`],
//! [`LbzBindings`]) owned by the caller and released with the matching
//! `_free` function. Every fallible call returns an [`LbzStatus`] and writes
//! its result through an out-pointer; on failure the out-pointer is left
//! untouched and [`lbz_last_error_message`] describes the error. Strings
//! returned through out-pointers are released with [`lbz_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use leibniz::calculus::{self, CalculusError};
use leibniz::dsl::transfer::TransferOptions;
use leibniz::dsl::{evaluate, identities_transfer_check, parse_str, Bindings, CanonError, EvalError};
use leibniz::gallery::{self, GalleryError};
use leibniz::report::ExampleId;
use leibniz::{rational, Classification, LcError, LcNumber, Rational};

/// Opaque series value.
pub struct LbzNumber(LcNumber);

/// Opaque variable environment used by evaluation.
pub struct LbzBindings(Bindings);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LbzStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    SyntaxError = 4,
    UnboundVariable = 5,
    DivisionByZero = 6,
    NegativeLeadingCoefficient = 7,
    IrrationalSquareRoot = 8,
    InfiniteOperand = 9,
    PrecisionExhausted = 10,
    NotFinite = 11,
    NotRational = 12,
    /// The computation finished but a checked claim does not hold; the
    /// result is still written.
    CheckFailed = 13,
    Panic = 14,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LbzClassification {
    Zero = 0,
    Infinitesimal = 1,
    Appreciable = 2,
    Infinite = 3,
}

impl From<Classification> for LbzClassification {
    fn from(c: Classification) -> Self {
        match c {
            Classification::Zero => LbzClassification::Zero,
            Classification::Infinitesimal => LbzClassification::Infinitesimal,
            Classification::Appreciable => LbzClassification::Appreciable,
            Classification::Infinite => LbzClassification::Infinite,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(LbzStatus, String);

type Outcome<T> = Result<T, Failure>;

impl From<LcError> for Failure {
    fn from(e: LcError) -> Self {
        let status = match e {
            LcError::DivisionByZero => LbzStatus::DivisionByZero,
            LcError::NegativeLeadingCoefficient => LbzStatus::NegativeLeadingCoefficient,
            LcError::IrrationalSquareRoot(_) => LbzStatus::IrrationalSquareRoot,
            LcError::InfiniteOperand => LbzStatus::InfiniteOperand,
            LcError::PrecisionExhausted(_) => LbzStatus::PrecisionExhausted,
        };
        Failure(status, e.to_string())
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        match e.arithmetic() {
            Some(source) => Failure(Failure::from(source.clone()).0, e.to_string()),
            None => Failure(LbzStatus::UnboundVariable, e.to_string()),
        }
    }
}

impl From<CalculusError> for Failure {
    fn from(e: CalculusError) -> Self {
        match e {
            CalculusError::Eval(inner) => inner.into(),
            CalculusError::Arithmetic(inner) => inner.into(),
            CalculusError::NotFinite { .. } => Failure(LbzStatus::NotFinite, e.to_string()),
            CalculusError::UnsupportedNode { .. } => Failure(LbzStatus::InvalidArgument, e.to_string()),
        }
    }
}

impl From<CanonError> for Failure {
    fn from(e: CanonError) -> Self {
        let status = match e {
            CanonError::DivisionByZero { .. } => LbzStatus::DivisionByZero,
            _ => LbzStatus::NotRational,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

// Runs `body`, converting failures and panics into a status code.
fn guard(body: impl FnOnce() -> Outcome<LbzStatus>) -> LbzStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => {
            if status == LbzStatus::Ok {
                set_last_error("");
            }
            status
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            LbzStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Outcome<&'a str> {
    if p.is_null() {
        return Err(Failure(LbzStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(LbzStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Outcome<&'a T> {
    p.as_ref().ok_or_else(|| Failure(LbzStatus::NullPointer, format!("{what} is null")))
}

fn check_out<T>(out: *mut T) -> Outcome<()> {
    if out.is_null() {
        return Err(Failure(LbzStatus::NullPointer, "output pointer is null".into()));
    }
    Ok(())
}

fn check_precision(precision: u32) -> Outcome<()> {
    if precision < 2 {
        return Err(Failure(LbzStatus::InvalidArgument, "precision must be at least 2".into()));
    }
    Ok(())
}

fn ratio_arg(num: i64, den: i64) -> Outcome<Rational> {
    if den == 0 {
        return Err(Failure(LbzStatus::InvalidArgument, "zero denominator".into()));
    }
    Ok(rational::ratio(num, den))
}

fn string_out(s: String) -> *mut c_char {
    CString::new(s).expect("no interior nul in generated text").into_raw()
}

unsafe fn put_number(out: *mut *mut LbzNumber, value: LcNumber) -> Outcome<LbzStatus> {
    check_out(out)?;
    *out = Box::into_raw(Box::new(LbzNumber(value)));
    Ok(LbzStatus::Ok)
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Outcome<LbzStatus> {
    check_out(out)?;
    *out = string_out(s);
    Ok(LbzStatus::Ok)
}

/// Message for the most recent failing call on this thread, or an empty
/// string. Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn lbz_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lbz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The real number `num/den`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lbz_number_real(num: i64, den: i64, precision: u32, out: *mut *mut LbzNumber) -> LbzStatus {
    guard(|| {
        check_precision(precision)?;
        put_number(out, LcNumber::real(ratio_arg(num, den)?, precision))
    })
}

/// `(coef_num/coef_den)·eps^(exp_num/exp_den)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lbz_number_monomial(
    coef_num: i64,
    coef_den: i64,
    exp_num: i64,
    exp_den: i64,
    precision: u32,
    out: *mut *mut LbzNumber,
) -> LbzStatus {
    guard(|| {
        check_precision(precision)?;
        let value = LcNumber::monomial(ratio_arg(coef_num, coef_den)?, ratio_arg(exp_num, exp_den)?, precision);
        put_number(out, value)
    })
}

/// The positive infinitesimal unit. Returns null for a precision below 2.
#[no_mangle]
pub extern "C" fn lbz_number_eps(precision: u32) -> *mut LbzNumber {
    if precision < 2 {
        return ptr::null_mut();
    }
    Box::into_raw(Box::new(LbzNumber(LcNumber::eps(precision))))
}

/// The infinite unit `H = 1/eps`. Returns null for a precision below 2.
#[no_mangle]
pub extern "C" fn lbz_number_h(precision: u32) -> *mut LbzNumber {
    if precision < 2 {
        return ptr::null_mut();
    }
    Box::into_raw(Box::new(LbzNumber(LcNumber::infinite_unit(precision))))
}

/// # Safety
/// `n` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lbz_number_clone(n: *const LbzNumber) -> *mut LbzNumber {
    match n.as_ref() {
        Some(n) => Box::into_raw(Box::new(LbzNumber(n.0.clone()))),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `n` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lbz_number_free(n: *mut LbzNumber) {
    if !n.is_null() {
        drop(Box::from_raw(n));
    }
}

unsafe fn binary(
    a: *const LbzNumber,
    b: *const LbzNumber,
    out: *mut *mut LbzNumber,
    op: impl FnOnce(&LcNumber, &LcNumber) -> Result<LcNumber, LcError>,
) -> LbzStatus {
    guard(|| {
        let (a, b) = (ref_arg(a, "a")?, ref_arg(b, "b")?);
        put_number(out, op(&a.0, &b.0)?)
    })
}

/// # Safety
/// `a`, `b` must be live handles and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lbz_number_add(
    a: *const LbzNumber,
    b: *const LbzNumber,
    out: *mut *mut LbzNumber,
) -> LbzStatus {
    binary(a, b, out, |a, b| Ok(a + b))
}

/// # Safety
/// `a`, `b` must be live handles and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lbz_number_sub(
    a: *const LbzNumber,
    b: *const LbzNumber,
    out: *mut *mut LbzNumber,
) -> LbzStatus {
    binary(a, b, out, |a, b| Ok(a - b))
}

/// # Safety
/// `a`, `b` must be live handles and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lbz_number_mul(
    a: *const LbzNumber,
    b: *const LbzNumber,
    out: *mut *mut LbzNumber,
) -> LbzStatus {
    binary(a, b, out, |a, b| Ok(a * b))
}

/// # Safety
/// `a`, `b` must be live handles and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lbz_number_div(
    a: *const LbzNumber,
    b: *const LbzNumber,
    out: *mut *mut LbzNumber,
) -> LbzStatus {
    binary(a, b, out, LcNumber::div)
}

/// # Safety
/// `a` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lbz_number_neg(a: *const LbzNumber, out: *mut *mut LbzNumber) -> LbzStatus {
    guard(|| put_number(out, -&ref_arg(a, "a")?.0))
}

/// # Safety
/// `a` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lbz_number_sqrt(a: *const LbzNumber, out: *mut *mut LbzNumber) -> LbzStatus {
    guard(|| put_number(out, ref_arg(a, "a")?.0.sqrt()?))
}

/// Writes -1, 0 or 1.
///
/// # Safety
/// `a`, `b` must be live handles and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lbz_number_compare(a: *const LbzNumber, b: *const LbzNumber, out: *mut i32) -> LbzStatus {
    guard(|| {
        let (a, b) = (ref_arg(a, "a")?, ref_arg(b, "b")?);
        check_out(out)?;
        *out = a.0.compare(&b.0) as i32;
        Ok(LbzStatus::Ok)
    })
}

/// # Safety
/// `a` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lbz_number_classify(a: *const LbzNumber, out: *mut LbzClassification) -> LbzStatus {
    guard(|| {
        let a = ref_arg(a, "a")?;
        check_out(out)?;
        *out = a.0.classify().into();
        Ok(LbzStatus::Ok)
    })
}

/// The shadow as `p/q` text.
///
/// # Safety
/// `a` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lbz_number_standard_part(a: *const LbzNumber, out: *mut *mut c_char) -> LbzStatus {
    guard(|| {
        let q = ref_arg(a, "a")?.0.standard_part()?;
        put_string(out, rational::format(&q))
    })
}

/// # Safety
/// `a` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lbz_number_to_string(a: *const LbzNumber, out: *mut *mut c_char) -> LbzStatus {
    guard(|| put_string(out, ref_arg(a, "a")?.0.to_string()))
}

/// # Safety
/// `a` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lbz_number_to_json(a: *const LbzNumber, out: *mut *mut c_char) -> LbzStatus {
    guard(|| put_string(out, ref_arg(a, "a")?.0.to_json().to_string()))
}

/// An empty environment. Returns null for a precision below 2.
#[no_mangle]
pub extern "C" fn lbz_bindings_new(precision: u32) -> *mut LbzBindings {
    if precision < 2 {
        return ptr::null_mut();
    }
    Box::into_raw(Box::new(LbzBindings(Bindings::new(precision))))
}

/// # Safety
/// `b` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lbz_bindings_free(b: *mut LbzBindings) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Binds `name` to a copy of `value`.
///
/// # Safety
/// `b` and `value` must be live handles; `name` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lbz_bindings_set(
    b: *mut LbzBindings,
    name: *const c_char,
    value: *const LbzNumber,
) -> LbzStatus {
    guard(|| {
        let env = b.as_mut().ok_or_else(|| Failure(LbzStatus::NullPointer, "bindings is null".into()))?;
        let name = str_arg(name, "name")?;
        if !leibniz::dsl::expr::is_valid_variable(name) {
            return Err(Failure(LbzStatus::InvalidArgument, format!("`{name}` cannot be bound")));
        }
        let value = ref_arg(value, "value")?;
        env.0.insert(name, value.0.clone());
        Ok(LbzStatus::Ok)
    })
}

unsafe fn env_arg(b: *const LbzBindings) -> Bindings {
    b.as_ref().map(|b| b.0.clone()).unwrap_or_default()
}

fn parse(src: &str) -> Outcome<leibniz::dsl::Expr> {
    parse_str(src).map_err(|e| Failure(LbzStatus::SyntaxError, e.to_string()))
}

/// Evaluates an expression. `bindings` may be null for the empty
/// environment at the default precision.
///
/// # Safety
/// `expr` must be a nul-terminated string, `bindings` null or live, and
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lbz_eval(
    expr: *const c_char,
    bindings: *const LbzBindings,
    out: *mut *mut LbzNumber,
) -> LbzStatus {
    guard(|| {
        let e = parse(str_arg(expr, "expr")?)?;
        put_number(out, evaluate(&e, &env_arg(bindings))?)
    })
}

/// Derivative of `expr` in `var` at the rational `point` (`p`, `p/q` or a
/// decimal), as JSON `{"quotient", "shadow", "discarded"}`.
///
/// # Safety
/// String arguments must be nul-terminated, `bindings` null or live, and
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lbz_derivative_at_json(
    expr: *const c_char,
    var: *const c_char,
    point: *const c_char,
    bindings: *const LbzBindings,
    out: *mut *mut c_char,
) -> LbzStatus {
    guard(|| {
        let e = parse(str_arg(expr, "expr")?)?;
        let var = str_arg(var, "var")?;
        let point = str_arg(point, "point")?;
        let at = rational::parse(point)
            .ok_or_else(|| Failure(LbzStatus::InvalidArgument, format!("`{point}` is not a rational number")))?;
        let d = calculus::derivative_at(&e, var, &at, &env_arg(bindings))?;
        put_string(out, serde_json::to_string(&d).expect("serializable"))
    })
}

/// Runs a worked example by id (`parallel_lines`, `infinitesimal_equality`,
/// `ellipse_parabola`, `product_rule`) and writes its report as JSON. A
/// report with a failing claim is written and `CheckFailed` returned.
///
/// # Safety
/// `example` must be a nul-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lbz_gallery_json(example: *const c_char, precision: u32, out: *mut *mut c_char) -> LbzStatus {
    guard(|| {
        check_precision(precision)?;
        let name = str_arg(example, "example")?;
        let id = ExampleId::parse(name)
            .ok_or_else(|| Failure(LbzStatus::InvalidArgument, format!("unknown example `{name}`")))?;
        let report = gallery::run_example(id, precision).map_err(|e| match e {
            GalleryError::Calculus(inner) => Failure::from(inner),
            broken => Failure(LbzStatus::CheckFailed, broken.to_string()),
        })?;
        put_string(out, report.to_json().to_string())?;
        if report.pass {
            Ok(LbzStatus::Ok)
        } else {
            Err(Failure(LbzStatus::CheckFailed, format!("{} failing claims", report.failures().count())))
        }
    })
}

/// Checks `lhs == rhs` as a rational identity and writes the transfer
/// report as JSON. A failed identity is written and `CheckFailed` returned.
///
/// # Safety
/// String arguments must be nul-terminated and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lbz_transfer_json(
    lhs: *const c_char,
    rhs: *const c_char,
    trials: u32,
    seed: u64,
    precision: u32,
    out: *mut *mut c_char,
) -> LbzStatus {
    guard(|| {
        check_precision(precision)?;
        let lhs = parse(str_arg(lhs, "lhs")?)?;
        let rhs = parse(str_arg(rhs, "rhs")?)?;
        let options = TransferOptions { trials: trials as usize, seed, precision };
        let report = identities_transfer_check(&lhs, &rhs, &options)?;
        put_string(out, serde_json::to_string(&report).expect("serializable"))?;
        if report.passed() {
            Ok(LbzStatus::Ok)
        } else {
            Err(Failure(LbzStatus::CheckFailed, "not an identity".into()))
        }
    })
}
