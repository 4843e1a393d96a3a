//! C interface to `quatrank`.
//!
//! Matrices cross the boundary as opaque [`QrMatrix`] handles; scalars cross
//! as quaternion literals such as `"1/2-3*i+k"`. Every function returns a
//! [`QrStatus`]. On failure, [`qr_last_error`] describes what went wrong.
//! Strings returned through out-parameters are owned by the caller and are
//! released with [`qr_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use quatrank::elimination::rank;
use quatrank::extremal::extremal_ranks_p;
use quatrank::io::{decomposition_to_value, matrix_from_json, matrix_to_json};
use quatrank::simdecomp::{simultaneous_decompose, verify_decomposition, QuintInput};
use quatrank::solver::{general_solution, is_consistent, min_rank_solution_witness, Which};
use quatrank::{Error, QMatrix, Quaternion};

/// Opaque matrix handle.
pub struct QrMatrix {
    inner: QMatrix,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    DimensionMismatch = 4,
    PreconditionViolated = 5,
    /// The equation has no solution.
    Inconsistent = 6,
    /// A witness failed to reach its closed-form rank, or a result failed
    /// verification.
    VerificationFailed = 7,
    Internal = 8,
    Io = 9,
    ZeroInverse = 10,
    IndexOutOfRange = 11,
    /// A Rust panic was caught at the boundary.
    Panic = 12,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QrSolveMode {
    /// Every free block of the general solution set to zero.
    Particular = 0,
    MinRankX = 1,
    MinRankY = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(QrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::ZeroInverse => QrStatus::ZeroInverse,
            Error::Parse { .. } => QrStatus::Parse,
            Error::DimensionMismatch(_) => QrStatus::DimensionMismatch,
            Error::PreconditionViolated(_) => QrStatus::PreconditionViolated,
            Error::Inconsistent { .. } => QrStatus::Inconsistent,
            Error::WitnessMissed { .. } => QrStatus::VerificationFailed,
            Error::InternalInconsistency(_) => QrStatus::Internal,
            Error::Io(_) => QrStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Outcome) -> QrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QrStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside quatrank");
            QrStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(QrStatus::NullPointer, format!("{what} is null"))
}

unsafe fn matrix<'a>(p: *const QrMatrix, what: &str) -> Result<&'a QMatrix, Failure> {
    p.as_ref().map(|m| &m.inner).ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(QrStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Outcome {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn handle(m: QMatrix) -> *mut QrMatrix {
    Box::into_raw(Box::new(QrMatrix { inner: m }))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).expect("library output has no interior nuls").into_raw()
}

unsafe fn quint(
    a: *const QrMatrix,
    b: *const QrMatrix,
    c: *const QrMatrix,
    d: *const QrMatrix,
    e: *const QrMatrix,
) -> Result<QuintInput, Failure> {
    Ok(QuintInput::new(
        matrix(a, "A")?.clone(),
        matrix(b, "B")?.clone(),
        matrix(c, "C")?.clone(),
        matrix(d, "D")?.clone(),
        matrix(e, "E")?.clone(),
    )?)
}

/// Message for the most recent failure on the calling thread, or null if
/// nothing has failed yet. The pointer stays valid until the next failing
/// call on the same thread and must not be freed.
#[no_mangle]
pub extern "C" fn qr_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn qr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a `rows × cols` zero matrix.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn qr_matrix_new(rows: usize, cols: usize, out: *mut *mut QrMatrix) -> QrStatus {
    guard(|| {
        let m = handle(QMatrix::zeros(rows, cols));
        put(out, m, "out").inspect_err(|_| drop(Box::from_raw(m)))
    })
}

/// Parses a JSON matrix document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qr_matrix_from_json(json: *const c_char, out: *mut *mut QrMatrix) -> QrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let m = matrix_from_json(text(json, "json")?)?;
        put(out, handle(m), "out")
    })
}

/// Serializes a matrix as a JSON document; free the result with
/// [`qr_string_free`].
///
/// # Safety
/// `m` must be a live handle; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qr_matrix_to_json(m: *const QrMatrix, out: *mut *mut c_char) -> QrStatus {
    guard(|| {
        let s = matrix_to_json(matrix(m, "matrix")?);
        put(out, owned_string(s), "out")
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `m` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn qr_matrix_free(m: *mut QrMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qr_matrix_rows(m: *const QrMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.rows())
}

/// Number of columns, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qr_matrix_cols(m: *const QrMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.cols())
}

fn check_index(m: &QMatrix, i: usize, j: usize) -> Outcome {
    if i < m.rows() && j < m.cols() {
        Ok(())
    } else {
        Err(Failure(QrStatus::IndexOutOfRange, format!("entry ({i},{j}) outside a {}x{} matrix", m.rows(), m.cols())))
    }
}

/// Sets entry `(i, j)` from a quaternion literal.
///
/// # Safety
/// `m` must be a live handle; `literal` must be a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qr_matrix_set(m: *mut QrMatrix, i: usize, j: usize, literal: *const c_char) -> QrStatus {
    guard(|| {
        let m = &mut m.as_mut().ok_or_else(|| null("matrix"))?.inner;
        check_index(m, i, j)?;
        m[(i, j)] = Quaternion::parse(text(literal, "literal")?)?;
        Ok(())
    })
}

/// Entry `(i, j)` in canonical literal form; free with [`qr_string_free`].
///
/// # Safety
/// `m` must be a live handle; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qr_matrix_get(m: *const QrMatrix, i: usize, j: usize, out: *mut *mut c_char) -> QrStatus {
    guard(|| {
        let m = matrix(m, "matrix")?;
        check_index(m, i, j)?;
        put(out, owned_string(m[(i, j)].to_string()), "out")
    })
}

/// Quaternion rank.
///
/// # Safety
/// `m` must be a live handle; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qr_rank(m: *const QrMatrix, out: *mut usize) -> QrStatus {
    guard(|| put(out, rank(matrix(m, "matrix")?), "out"))
}

/// Whether `B·X·D + C·Y·E = A` has a solution.
///
/// # Safety
/// All handles must be live; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qr_is_consistent(
    a: *const QrMatrix,
    b: *const QrMatrix,
    c: *const QrMatrix,
    d: *const QrMatrix,
    e: *const QrMatrix,
    out: *mut bool,
) -> QrStatus {
    guard(|| {
        let q = quint(a, b, c, d, e)?;
        put(out, is_consistent(&q)?.consistent(), "out")
    })
}

/// Solves `B·X·D + C·Y·E = A`, returning new handles for `X` and `Y`. An
/// unsolvable equation gives `QR_STATUS_INCONSISTENT` and names the failing
/// rank equality in the error message.
///
/// # Safety
/// All handles must be live; `x_out` and `y_out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qr_solve(
    a: *const QrMatrix,
    b: *const QrMatrix,
    c: *const QrMatrix,
    d: *const QrMatrix,
    e: *const QrMatrix,
    mode: QrSolveMode,
    x_out: *mut *mut QrMatrix,
    y_out: *mut *mut QrMatrix,
) -> QrStatus {
    guard(|| {
        if x_out.is_null() || y_out.is_null() {
            return Err(null("solution out-parameter"));
        }
        let q = quint(a, b, c, d, e)?;
        let report = is_consistent(&q)?;
        if let Some(eq) = report.first_failure() {
            return Err(Error::Inconsistent { equality: eq.name.to_string(), lhs: eq.lhs, rhs: eq.rhs }.into());
        }
        let (x, y) = match mode {
            QrSolveMode::Particular => general_solution(&q)?.particular()?,
            QrSolveMode::MinRankX => min_rank_solution_witness(&q, Which::X)?,
            QrSolveMode::MinRankY => min_rank_solution_witness(&q, Which::Y)?,
        };
        if !q.residual(&x, &y)?.is_zero() {
            return Err(Failure(QrStatus::VerificationFailed, "solution fails substitution".into()));
        }
        x_out.write(handle(x));
        y_out.write(handle(y));
        Ok(())
    })
}

/// Maximal and minimal rank of `A − B·X·D − C·Y·E`.
///
/// # Safety
/// All handles must be live; `max_out` and `min_out` must be valid for
/// writing.
#[no_mangle]
pub unsafe extern "C" fn qr_extremal_p(
    a: *const QrMatrix,
    b: *const QrMatrix,
    c: *const QrMatrix,
    d: *const QrMatrix,
    e: *const QrMatrix,
    max_out: *mut usize,
    min_out: *mut usize,
) -> QrStatus {
    guard(|| {
        if max_out.is_null() || min_out.is_null() {
            return Err(null("rank out-parameter"));
        }
        let rep = extremal_ranks_p(&quint(a, b, c, d, e)?)?;
        max_out.write(rep.max_rank);
        min_out.write(rep.min_rank);
        Ok(())
    })
}

/// Simultaneous decomposition as a JSON document, produced only after it
/// passes verification. Free the result with [`qr_string_free`].
///
/// # Safety
/// All handles must be live; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn qr_decompose_json(
    a: *const QrMatrix,
    b: *const QrMatrix,
    c: *const QrMatrix,
    d: *const QrMatrix,
    e: *const QrMatrix,
    out: *mut *mut c_char,
) -> QrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let q = quint(a, b, c, d, e)?;
        let dec = simultaneous_decompose(&q)?;
        let report = verify_decomposition(&q, &dec);
        if !report.passed() {
            return Err(Failure(QrStatus::VerificationFailed, report.to_string()));
        }
        let doc = serde_json::to_string_pretty(&decomposition_to_value(&dec)).expect("documents serialize");
        put(out, owned_string(doc), "out")
    })
}
