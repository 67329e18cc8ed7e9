//! C ABI over `seqspace`.
//!
//! Specs are parsed into opaque handles that the caller frees with the
//! matching `*_free` function. Every fallible call returns a
//! [`SeqspaceStatus`]; on failure the message is available from
//! [`seqspace_last_error`] on the same thread. Strings handed out by the
//! library are released with [`seqspace_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::{c_char, c_double, c_int, size_t};
use num_rational::BigRational;
use seqspace::input::{parse_exponents, parse_lambda, parse_matrix, parse_seq};
use seqspace::lambda_ops::{inverse_transform, lambda_transform, s_operator};
use seqspace::matrix::MatrixSpec;
use seqspace::matrix_class::{classify, subset_sup, Target};
use seqspace::paranorm::{membership, Space};
use seqspace::{Error, ExponentSeq, LambdaSeq, Mode, SeqSpec, Thresholds, VerdictTag};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqspaceStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidInput = 4,
    HypothesisViolated = 5,
    Unsupported = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqspaceVerdict {
    ConvergentNumeric = 0,
    DivergentNumeric = 1,
    Inconclusive = 2,
}

/// Values accepted by the `mode` parameters.
#[repr(C)]
pub enum SeqspaceMode {
    Float = 0,
    Rational = 1,
}

/// Values accepted by the `space` parameter of [`seqspace_membership`].
#[repr(C)]
pub enum SeqspaceSpace {
    Ellp = 0,
    EllLambda = 1,
    C0Lambda = 2,
}

/// Values accepted by the `target` parameter of [`seqspace_classify_json`].
#[repr(C)]
pub enum SeqspaceTarget {
    Lq = 0,
    C0q = 1,
    Cq = 2,
    LinfQ = 3,
}

pub struct SeqspaceLambda(LambdaSeq);
pub struct SeqspaceSequence(SeqSpec);
pub struct SeqspaceExponents(ExponentSeq);
pub struct SeqspaceMatrix(MatrixSpec);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(SeqspaceStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse(_) => SeqspaceStatus::ParseError,
            Error::HypothesisViolated(_) | Error::MixedExponents | Error::ConjugateUndefined(_) => {
                SeqspaceStatus::HypothesisViolated
            }
            Error::UnsupportedCondition(_) | Error::BruteForceTooLarge(_) => SeqspaceStatus::Unsupported,
            _ if e.is_rational_unsupported() => SeqspaceStatus::Unsupported,
            _ => SeqspaceStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: SeqspaceStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

fn set_last_error(msg: Option<String>) {
    let c = msg.map(|m| CString::new(m.replace('\0', " ")).expect("interior NULs removed"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SeqspaceStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(None);
            SeqspaceStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(Some(msg));
            status
        }
        Err(_) => {
            set_last_error(Some("internal panic".into()));
            SeqspaceStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return fail(SeqspaceStatus::NullPointer, format!("{what} is NULL"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(SeqspaceStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(SeqspaceStatus::NullPointer, format!("{what} is NULL")))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return fail(SeqspaceStatus::NullPointer, "output pointer is NULL");
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn store_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return fail(SeqspaceStatus::NullPointer, "output pointer is NULL");
    }
    *out = CString::new(s).expect("JSON has no interior NUL").into_raw();
    Ok(())
}

fn mode_from(mode: c_int) -> Result<Mode, Failure> {
    match mode {
        0 => Ok(Mode::Float),
        1 => Ok(Mode::Rational),
        other => fail(SeqspaceStatus::InvalidInput, format!("unknown mode {other}")),
    }
}

fn verdict_from(tag: VerdictTag) -> SeqspaceVerdict {
    match tag {
        VerdictTag::ConvergentNumeric => SeqspaceVerdict::ConvergentNumeric,
        VerdictTag::DivergentNumeric => SeqspaceVerdict::DivergentNumeric,
        VerdictTag::Inconclusive => SeqspaceVerdict::Inconclusive,
    }
}

/// Last error message on this thread, or NULL after a successful call.
/// The pointer stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn seqspace_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn seqspace_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn seqspace_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a λ generator (expression, list shorthand or JSON).
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn seqspace_lambda_parse(spec: *const c_char, out: *mut *mut SeqspaceLambda) -> SeqspaceStatus {
    guard(|| {
        let lambda = parse_lambda(text(spec, "spec")?)?;
        store(out, SeqspaceLambda(lambda))
    })
}

/// # Safety
/// `h` must be NULL or a handle from [`seqspace_lambda_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn seqspace_lambda_free(h: *mut SeqspaceLambda) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `spec` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn seqspace_sequence_parse(
    spec: *const c_char,
    out: *mut *mut SeqspaceSequence,
) -> SeqspaceStatus {
    guard(|| {
        let seq = parse_seq(text(spec, "spec")?)?;
        store(out, SeqspaceSequence(seq))
    })
}

/// # Safety
/// `h` must be NULL or a handle from [`seqspace_sequence_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn seqspace_sequence_free(h: *mut SeqspaceSequence) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Parses an exponent sequence. A NaN `bound` means no declared bound,
/// which is accepted only when one can be inferred from the spec.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn seqspace_exponents_parse(
    spec: *const c_char,
    bound: c_double,
    out: *mut *mut SeqspaceExponents,
) -> SeqspaceStatus {
    guard(|| {
        let bound = (!bound.is_nan()).then_some(bound);
        let p = parse_exponents(text(spec, "spec")?, bound)?;
        store(out, SeqspaceExponents(p))
    })
}

/// # Safety
/// `h` must be NULL or a handle from [`seqspace_exponents_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn seqspace_exponents_free(h: *mut SeqspaceExponents) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Parses a matrix spec. `lambda` may be NULL unless the spec is `lambda`.
///
/// # Safety
/// `spec` must be a NUL-terminated string, `lambda` NULL or a live handle,
/// and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn seqspace_matrix_parse(
    spec: *const c_char,
    lambda: *const SeqspaceLambda,
    out: *mut *mut SeqspaceMatrix,
) -> SeqspaceStatus {
    guard(|| {
        let lambda = lambda.as_ref().map(|l| &l.0);
        let m = parse_matrix(text(spec, "spec")?, lambda)?;
        store(out, SeqspaceMatrix(m))
    })
}

/// # Safety
/// `h` must be NULL or a handle from [`seqspace_matrix_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn seqspace_matrix_free(h: *mut SeqspaceMatrix) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

type SeqOp = fn(&LambdaSeq, &SeqSpec, usize) -> seqspace::Result<Vec<f64>>;
type ExactOp = fn(&LambdaSeq, &SeqSpec, usize) -> seqspace::Result<Vec<BigRational>>;

unsafe fn float_op(
    op: SeqOp,
    lambda: *const SeqspaceLambda,
    x: *const SeqspaceSequence,
    horizon: size_t,
    out: *mut c_double,
    out_len: size_t,
) -> SeqspaceStatus {
    guard(|| {
        let (lambda, x) = (handle(lambda, "lambda")?, handle(x, "sequence")?);
        if out.is_null() {
            return fail(SeqspaceStatus::NullPointer, "output buffer is NULL");
        }
        if out_len < horizon.saturating_add(1) {
            return fail(SeqspaceStatus::BufferTooSmall, format!("buffer needs {} entries", horizon as u128 + 1));
        }
        let values = op(&lambda.0, &x.0, horizon)?;
        std::slice::from_raw_parts_mut(out, values.len()).copy_from_slice(&values);
        Ok(())
    })
}

unsafe fn exact_op(
    op: ExactOp,
    lambda: *const SeqspaceLambda,
    x: *const SeqspaceSequence,
    horizon: size_t,
    out_json: *mut *mut c_char,
) -> SeqspaceStatus {
    guard(|| {
        let (lambda, x) = (handle(lambda, "lambda")?, handle(x, "sequence")?);
        let values = op(&lambda.0, &x.0, horizon)?;
        let strings: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        store_string(out_json, serde_json::to_string(&strings).expect("strings serialize"))
    })
}

/// Writes (Λx)_0..=(Λx)_horizon into `out`, which must hold `horizon + 1`
/// doubles.
///
/// # Safety
/// Handles must be live and `out` must point to `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn seqspace_transform(
    lambda: *const SeqspaceLambda,
    x: *const SeqspaceSequence,
    horizon: size_t,
    out: *mut c_double,
    out_len: size_t,
) -> SeqspaceStatus {
    float_op(lambda_transform::<f64>, lambda, x, horizon, out, out_len)
}

/// Writes (Λ⁻¹y)_0..=(Λ⁻¹y)_horizon into `out`.
///
/// # Safety
/// As for [`seqspace_transform`].
#[no_mangle]
pub unsafe extern "C" fn seqspace_inverse(
    lambda: *const SeqspaceLambda,
    y: *const SeqspaceSequence,
    horizon: size_t,
    out: *mut c_double,
    out_len: size_t,
) -> SeqspaceStatus {
    float_op(inverse_transform::<f64>, lambda, y, horizon, out, out_len)
}

/// Writes S(x)_0..=S(x)_horizon into `out`.
///
/// # Safety
/// As for [`seqspace_transform`].
#[no_mangle]
pub unsafe extern "C" fn seqspace_s_operator(
    lambda: *const SeqspaceLambda,
    x: *const SeqspaceSequence,
    horizon: size_t,
    out: *mut c_double,
    out_len: size_t,
) -> SeqspaceStatus {
    float_op(s_operator::<f64>, lambda, x, horizon, out, out_len)
}

/// Exact Λx as a JSON array of rational strings ("p/q" or "p").
///
/// # Safety
/// Handles must be live and `out_json` writable; free the result with
/// [`seqspace_string_free`].
#[no_mangle]
pub unsafe extern "C" fn seqspace_transform_exact(
    lambda: *const SeqspaceLambda,
    x: *const SeqspaceSequence,
    horizon: size_t,
    out_json: *mut *mut c_char,
) -> SeqspaceStatus {
    exact_op(lambda_transform::<BigRational>, lambda, x, horizon, out_json)
}

/// Exact Λ⁻¹y as a JSON array of rational strings.
///
/// # Safety
/// As for [`seqspace_transform_exact`].
#[no_mangle]
pub unsafe extern "C" fn seqspace_inverse_exact(
    lambda: *const SeqspaceLambda,
    y: *const SeqspaceSequence,
    horizon: size_t,
    out_json: *mut *mut c_char,
) -> SeqspaceStatus {
    exact_op(inverse_transform::<BigRational>, lambda, y, horizon, out_json)
}

unsafe fn space_from(space: c_int, lambda: *const SeqspaceLambda, p: &ExponentSeq) -> Result<Space, Failure> {
    let lam = || handle(lambda, "lambda").map(|l| l.0.clone());
    match space {
        0 => Ok(Space::Ellp(p.clone())),
        1 => Ok(Space::EllLambda(lam()?, p.clone())),
        2 => Ok(Space::C0Lambda(lam()?, p.clone())),
        other => fail(SeqspaceStatus::InvalidInput, format!("unknown space {other}")),
    }
}

/// Membership verdict for `x` in the space selected by `space` (a
/// [`SeqspaceSpace`] value). `lambda` may be NULL for ℓ(p). `out_estimate`
/// receives the paranorm estimate, or NaN for c₀(λ, p). Either output
/// pointer may be NULL. Default thresholds apply.
///
/// # Safety
/// Handles must be live; output pointers must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn seqspace_membership(
    x: *const SeqspaceSequence,
    space: c_int,
    lambda: *const SeqspaceLambda,
    p: *const SeqspaceExponents,
    horizon: size_t,
    mode: c_int,
    out_verdict: *mut SeqspaceVerdict,
    out_estimate: *mut c_double,
) -> SeqspaceStatus {
    guard(|| {
        let (x, p) = (handle(x, "sequence")?, handle(p, "exponents")?);
        let space = space_from(space, lambda, &p.0)?;
        let report = membership(&x.0, &space, horizon, mode_from(mode)?, &Thresholds::default())?;
        if let Some(v) = out_verdict.as_mut() {
            *v = verdict_from(report.verdict.tag);
        }
        if let Some(e) = out_estimate.as_mut() {
            *e = report.estimate.unwrap_or(f64::NAN);
        }
        Ok(())
    })
}

/// Classification report for `A` against `target` (a [`SeqspaceTarget`]
/// value), serialized as JSON.
///
/// # Safety
/// Handles must be live and `out_json` writable; free the result with
/// [`seqspace_string_free`].
#[no_mangle]
pub unsafe extern "C" fn seqspace_classify_json(
    matrix: *const SeqspaceMatrix,
    lambda: *const SeqspaceLambda,
    p: *const SeqspaceExponents,
    q: *const SeqspaceExponents,
    target: c_int,
    horizon: size_t,
    mode: c_int,
    out_json: *mut *mut c_char,
) -> SeqspaceStatus {
    guard(|| {
        let target = match target {
            0 => Target::Lq,
            1 => Target::C0q,
            2 => Target::Cq,
            3 => Target::LinfQ,
            other => return fail(SeqspaceStatus::InvalidInput, format!("unknown target {other}")),
        };
        if horizon < 1 {
            return fail(SeqspaceStatus::InvalidInput, "horizon must be at least 1");
        }
        let report = classify(
            &handle(matrix, "matrix")?.0,
            &handle(lambda, "lambda")?.0,
            &handle(p, "p")?.0,
            &handle(q, "q")?.0,
            target,
            horizon,
            mode_from(mode)?,
            &Thresholds::default(),
        )?;
        store_string(out_json, serde_json::to_string(&report).expect("report serializes"))
    })
}

/// sup over finite subsets F of |Σ_{k∈F} column_k|.
///
/// # Safety
/// `column` must point to `len` readable doubles (or be NULL with `len` 0);
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn seqspace_subset_sup(column: *const c_double, len: size_t, out: *mut c_double) -> SeqspaceStatus {
    guard(|| {
        let values: &[f64] = match (column.is_null(), len) {
            (_, 0) => &[],
            (true, _) => return fail(SeqspaceStatus::NullPointer, "column is NULL"),
            (false, n) => std::slice::from_raw_parts(column, n),
        };
        if out.is_null() {
            return fail(SeqspaceStatus::NullPointer, "output pointer is NULL");
        }
        *out = subset_sup(values);
        Ok(())
    })
}
