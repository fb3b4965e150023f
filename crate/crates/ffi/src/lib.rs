//! C interface to `tp_mahler`.
//!
//! Objects cross the boundary as opaque pointers created by a `tpm_*`
//! constructor and released by the matching `tpm_*_free`. Every fallible
//! call returns a [`TpmStatus`]; on failure the message is kept per thread
//! and can be read with [`tpm_last_error`]. Strings handed out by the
//! library are owned by the caller and must be released with
//! [`tpm_string_free`].
//!
//! Panics never unwind into the caller: they are caught and reported as
//! [`TpmStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tp_mahler::arith::format_rational;
use tp_mahler::auxiliary::{build_aux, AuxScheme};
use tp_mahler::coeffs::{
    check_functional_equation, check_golden, check_p_integrality, check_vanishing, generate,
};
use tp_mahler::eval::{eval_product, eval_via_log_series, ApproxValue, ComplexRational};
use tp_mahler::{Algorithm, CoeffTable, Error, Prime};

/// Result code of every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TpmStatus {
    Ok = 0,
    InvalidArgument = 1,
    Precondition = 2,
    Internal = 3,
    NullPointer = 4,
    Parse = 5,
    Panic = 6,
}

/// Coefficient generator.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TpmAlgorithm {
    LogExp = 0,
    Cauchy = 1,
    Diff = 2,
}

/// Certified evaluation route.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TpmMethod {
    Product = 0,
    LogSeries = 1,
}

/// Exact coefficient table `t_p(0..=N)`.
pub struct TpmCoeffTable {
    inner: CoeffTable,
}

/// Complex ball enclosing a value of `T_p`.
pub struct TpmValue {
    inner: ApproxValue,
    terms: usize,
}

/// Auxiliary polynomial scheme.
pub struct TpmAuxScheme {
    inner: AuxScheme,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: TpmStatus,
    message: String,
}

impl Failure {
    fn null(what: &str) -> Self {
        Failure {
            status: TpmStatus::NullPointer,
            message: format!("{what} is null"),
        }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            status: TpmStatus::InvalidArgument,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Precondition(_) => TpmStatus::Precondition,
            Error::Internal(_) => TpmStatus::Internal,
            Error::Parse { .. } | Error::Json(_) | Error::Csv(_) => TpmStatus::Parse,
            _ => TpmStatus::InvalidArgument,
        };
        Failure {
            status,
            message: e.to_string(),
        }
    }
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard<F>(f: F) -> TpmStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TpmStatus::Ok,
        Ok(Err(failure)) => {
            set_last_error(&failure.message);
            failure.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            TpmStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::null(what))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure::invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure::invalid("string contains NUL"))?;
    write_out(out, c.into_raw(), "out")
}

fn prime(p: u64) -> Result<Prime, Failure> {
    Ok(Prime::new(p)?)
}

/// Message of the last failed call on this thread, or null if none.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tpm_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Forgets the stored error message.
#[no_mangle]
pub extern "C" fn tpm_clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tpm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tpm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Computes `t_p(0..=order)` with the chosen generator.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn tpm_coeffs_generate(
    p: u64,
    order: usize,
    algorithm: TpmAlgorithm,
    out: *mut *mut TpmCoeffTable,
) -> TpmStatus {
    guard(|| {
        let alg = match algorithm {
            TpmAlgorithm::LogExp => Algorithm::LogExp,
            TpmAlgorithm::Cauchy => Algorithm::CauchyRecurrence,
            TpmAlgorithm::Diff => Algorithm::DiffRecurrence,
        };
        let table = generate(alg, prime(p)?, order);
        write_out(
            out,
            Box::into_raw(Box::new(TpmCoeffTable { inner: table })),
            "out",
        )
    })
}

/// Reads a table from the JSON form written by [`tpm_coeffs_to_json`].
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tpm_coeffs_from_json(
    json: *const c_char,
    out: *mut *mut TpmCoeffTable,
) -> TpmStatus {
    guard(|| {
        let table = CoeffTable::from_json(read_str(json, "json")?)?;
        write_out(
            out,
            Box::into_raw(Box::new(TpmCoeffTable { inner: table })),
            "out",
        )
    })
}

/// Highest index `N` in the table, or 0 for a null handle.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tpm_coeffs_order(table: *const TpmCoeffTable) -> usize {
    table.as_ref().map_or(0, |t| t.inner.order())
}

/// The prime of the table, or 0 for a null handle.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tpm_coeffs_prime(table: *const TpmCoeffTable) -> u64 {
    table.as_ref().map_or(0, |t| t.inner.p().get())
}

/// `t_p(n)` as a newly allocated `"num/den"` string, e.g. `"3/25"` or `"0/1"`.
///
/// # Safety
/// `table` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tpm_coeffs_entry(
    table: *const TpmCoeffTable,
    n: usize,
    out: *mut *mut c_char,
) -> TpmStatus {
    guard(|| {
        let t = as_ref(table, "table")?;
        let v = t.inner.get(n).ok_or_else(|| {
            Failure::invalid(format!("index {n} exceeds order {}", t.inner.order()))
        })?;
        write_string(out, format_rational(v))
    })
}

/// The table as CSV with header `p,n,numerator,denominator`.
///
/// # Safety
/// `table` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tpm_coeffs_to_csv(
    table: *const TpmCoeffTable,
    out: *mut *mut c_char,
) -> TpmStatus {
    guard(|| {
        let csv = as_ref(table, "table")?.inner.to_csv_string()?;
        write_string(out, csv)
    })
}

/// The table as a JSON document.
///
/// # Safety
/// `table` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tpm_coeffs_to_json(
    table: *const TpmCoeffTable,
    out: *mut *mut c_char,
) -> TpmStatus {
    guard(|| {
        let json = as_ref(table, "table")?.inner.to_json()?;
        write_string(out, json)
    })
}

/// Runs the vanishing, denominator, functional-equation and reference-value
/// audits and stores the total number of violations in `violations`.
///
/// # Safety
/// `table` must be a live handle and `violations` writable.
#[no_mangle]
pub unsafe extern "C" fn tpm_coeffs_verify(
    table: *const TpmCoeffTable,
    violations: *mut usize,
) -> TpmStatus {
    guard(|| {
        let t = &as_ref(table, "table")?.inner;
        let total = [
            check_vanishing(t),
            check_p_integrality(t),
            check_functional_equation(t),
            check_golden(t),
        ]
        .iter()
        .map(|r| r.violations.len())
        .sum();
        write_out(violations, total, "violations")
    })
}

/// Releases a table. Null is ignored.
///
/// # Safety
/// `table` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tpm_coeffs_free(table: *mut TpmCoeffTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Certified value of `T_p(alpha)` at `prec` bits.
///
/// `alpha` uses the command-line syntax: `"1/2"`, `"-0.4"`, `"1/3-1/4i"`.
///
/// # Safety
/// `alpha` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tpm_eval(
    p: u64,
    alpha: *const c_char,
    method: TpmMethod,
    prec: u32,
    out: *mut *mut TpmValue,
) -> TpmStatus {
    guard(|| {
        let p = prime(p)?;
        let point: ComplexRational = read_str(alpha, "alpha")?.parse()?;
        if prec == 0 {
            return Err(Failure::invalid("precision must be positive"));
        }
        let report = match method {
            TpmMethod::Product => eval_product(p, &point, None, prec)?,
            TpmMethod::LogSeries => eval_via_log_series(p, &point, None, prec)?,
        };
        let value = TpmValue {
            inner: report.value,
            terms: report.terms_used,
        };
        write_out(out, Box::into_raw(Box::new(value)), "out")
    })
}

/// Real part of the ball centre as a double (NaN for a null handle).
///
/// # Safety
/// `value` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tpm_value_re(value: *const TpmValue) -> f64 {
    value.as_ref().map_or(f64::NAN, |v| v.inner.real_part())
}

/// Imaginary part of the ball centre as a double (NaN for a null handle).
///
/// # Safety
/// `value` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tpm_value_im(value: *const TpmValue) -> f64 {
    value
        .as_ref()
        .map_or(f64::NAN, |v| v.inner.imaginary_part())
}

/// Upper bound on the ball radius as a double (NaN for a null handle).
///
/// # Safety
/// `value` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tpm_value_radius(value: *const TpmValue) -> f64 {
    value.as_ref().map_or(f64::NAN, |v| v.inner.error_radius())
}

/// Number of series terms or product factors used (0 for a null handle).
///
/// # Safety
/// `value` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tpm_value_terms(value: *const TpmValue) -> usize {
    value.as_ref().map_or(0, |v| v.terms)
}

/// Real part of the centre in decimal, with every digit the precision carries.
///
/// # Safety
/// `value` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tpm_value_re_string(
    value: *const TpmValue,
    out: *mut *mut c_char,
) -> TpmStatus {
    guard(|| write_string(out, as_ref(value, "value")?.inner.re_string()))
}

/// Imaginary part of the centre in decimal.
///
/// # Safety
/// `value` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tpm_value_im_string(
    value: *const TpmValue,
    out: *mut *mut c_char,
) -> TpmStatus {
    guard(|| write_string(out, as_ref(value, "value")?.inner.im_string()))
}

/// Releases a value. Null is ignored.
///
/// # Safety
/// `value` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tpm_value_free(value: *mut TpmValue) {
    if !value.is_null() {
        drop(Box::from_raw(value));
    }
}

/// Builds the auxiliary scheme of degree `degree` for `T_p`, from a table of
/// order `degree² + degree`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tpm_aux_build(
    p: u64,
    degree: usize,
    out: *mut *mut TpmAuxScheme,
) -> TpmStatus {
    guard(|| {
        let order = degree
            .checked_mul(degree)
            .and_then(|d| d.checked_add(degree))
            .ok_or_else(|| Failure::invalid("degree too large"))?;
        let table = generate(Algorithm::CauchyRecurrence, prime(p)?, order);
        let scheme = build_aux(&table, degree)?;
        write_out(
            out,
            Box::into_raw(Box::new(TpmAuxScheme { inner: scheme })),
            "out",
        )
    })
}

/// First index where the scheme's Taylor expansion is nonzero (0 for null).
///
/// # Safety
/// `scheme` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tpm_aux_vanishing_order(scheme: *const TpmAuxScheme) -> usize {
    scheme.as_ref().map_or(0, |s| s.inner.achieved_vanishing)
}

/// Dimension of the solution space the scheme was picked from (0 for null).
///
/// # Safety
/// `scheme` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tpm_aux_nullity(scheme: *const TpmAuxScheme) -> usize {
    scheme.as_ref().map_or(0, |s| s.inner.nullity)
}

/// The scheme as JSON with keys `p`, `P`, `d`, `achieved_vanishing`.
///
/// # Safety
/// `scheme` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tpm_aux_to_json(
    scheme: *const TpmAuxScheme,
    out: *mut *mut c_char,
) -> TpmStatus {
    guard(|| {
        let json = as_ref(scheme, "scheme")?.inner.to_json()?;
        write_string(out, json)
    })
}

/// Releases a scheme. Null is ignored.
///
/// # Safety
/// `scheme` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tpm_aux_free(scheme: *mut TpmAuxScheme) {
    if !scheme.is_null() {
        drop(Box::from_raw(scheme));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failure_codes_follow_error_kind() {
        let f: Failure = Error::Precondition("x".into()).into();
        assert_eq!(f.status, TpmStatus::Precondition);
        let f: Failure = Error::Parse {
            line: 2,
            msg: "bad".into(),
        }
        .into();
        assert_eq!(f.status, TpmStatus::Parse);
        let f: Failure = Error::NotPrime(4).into();
        assert_eq!(f.status, TpmStatus::InvalidArgument);
    }

    #[test]
    fn panics_become_status() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, TpmStatus::Panic);
        let msg = unsafe { CStr::from_ptr(tpm_last_error()) }
            .to_str()
            .unwrap();
        assert_eq!(msg, "panic: boom");
    }
}
