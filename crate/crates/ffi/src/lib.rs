//! C ABI over geoquant.
//!
//! Every fallible function returns a [`GqStatus`]; on failure a message is
//! available from [`gq_last_error`] on the same thread. Matrices and states are
//! opaque handles owned by the caller and released with the matching `_free`
//! function. Complex arrays are interleaved `re, im` doubles, row-major for
//! matrices. Strings returned through `char **` are released with
//! [`gq_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use geoquant::algebra::{jordan_product, lie_bracket, trace_form};
use geoquant::dual::star_eval;
use geoquant::kahler::{default_step, eigensolve_gradient_flow, expectation, Direction, StateVector};
use geoquant::kernel::{eig_hermitian, parse_matrix, serialize_matrix, unitary_exp, ComplexMatrix, Hermitian};
use geoquant::suites::standard_suites;
use geoquant::{Complex64, Error};
use serde_json::json;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotHermitian = 4,
    NumericalFailure = 5,
    NonConvergence = 6,
    Domain = 7,
    Parse = 8,
    Panic = 9,
}

/// Dense complex square matrix.
pub struct GqMatrix(ComplexMatrix);

/// State vector in the Hilbert space.
pub struct GqState(StateVector);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

struct Fail(GqStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::DimensionMismatch { .. } | Error::NotSquare { .. } => GqStatus::DimensionMismatch,
            Error::NotHermitian { .. } => GqStatus::NotHermitian,
            Error::NumericalFailure { .. } => GqStatus::NumericalFailure,
            Error::NonConvergence { .. } => GqStatus::NonConvergence,
            Error::Domain(_) => GqStatus::Domain,
            Error::Parse { .. } => GqStatus::Parse,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(GqStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(GqStatus::InvalidArgument, msg.into())
}

/// Runs `f`, recording any failure or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            GqStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GqStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn complex_slice(data: *const f64, count: usize) -> Result<Vec<Complex64>, Fail> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if data.is_null() {
        return Err(null("data"));
    }
    let raw = std::slice::from_raw_parts(data, 2 * count);
    Ok(raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

fn hermitian(m: &GqMatrix) -> Result<Hermitian, Fail> {
    Ok(Hermitian::new(m.0.clone())?)
}

fn boxed_matrix(m: ComplexMatrix) -> *mut GqMatrix {
    Box::into_raw(Box::new(GqMatrix(m)))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| invalid("string contains a nul byte"))?;
    put(out, c.into_raw(), "out")
}

/// Message describing the last failure on this thread, or an empty string.
/// The pointer stays valid until the next geoquant call on the same thread.
#[no_mangle]
pub extern "C" fn gq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates an n×n matrix from `2·n·n` interleaved doubles, row-major.
///
/// # Safety
/// `data` must point to `2·dim·dim` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gq_matrix_new(dim: usize, data: *const f64, out: *mut *mut GqMatrix) -> GqStatus {
    guard(|| {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        let entries = complex_slice(data, dim.checked_mul(dim).ok_or_else(|| invalid("dimension overflows"))?)?;
        let m = ComplexMatrix::from_row_major(entries)?;
        if !m.is_finite() {
            return Err(invalid("entries must be finite"));
        }
        put(out, boxed_matrix(m), "out")
    })
}

/// Parses a matrix in the `{"dim": n, "data": [[[re, im], ...], ...]}` format.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gq_matrix_from_json(json: *const c_char, out: *mut *mut GqMatrix) -> GqStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let m = parse_matrix(CStr::from_ptr(json).to_bytes())?;
        put(out, boxed_matrix(m), "out")
    })
}

/// Serializes a matrix to JSON; free the result with [`gq_string_free`].
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gq_matrix_to_json(m: *const GqMatrix, out: *mut *mut c_char) -> GqStatus {
    guard(|| put_string(out, serialize_matrix(&get(m, "matrix")?.0)))
}

/// Releases a matrix. Null is ignored.
///
/// # Safety
/// `m` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gq_matrix_free(m: *mut GqMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of a matrix, or 0 for null.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gq_matrix_dim(m: *const GqMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// Reads entry (i, j).
///
/// # Safety
/// `m` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gq_matrix_get(m: *const GqMatrix, i: usize, j: usize, re: *mut f64, im: *mut f64) -> GqStatus {
    guard(|| {
        let m = &get(m, "matrix")?.0;
        if i >= m.dim() || j >= m.dim() {
            return Err(invalid(format!("index ({i}, {j}) out of range for dimension {}", m.dim())));
        }
        let z = m[(i, j)];
        put(re, z.re, "re")?;
        put(im, z.im, "im")
    })
}

/// Lie bracket −i(AB − BA) of two Hermitian matrices.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gq_lie(a: *const GqMatrix, b: *const GqMatrix, out: *mut *mut GqMatrix) -> GqStatus {
    guard(|| {
        let c = lie_bracket(&hermitian(get(a, "a")?)?, &hermitian(get(b, "b")?)?)?;
        put(out, boxed_matrix(c.into_matrix()), "out")
    })
}

/// Jordan product (AB + BA)/2 of two Hermitian matrices.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gq_jordan(a: *const GqMatrix, b: *const GqMatrix, out: *mut *mut GqMatrix) -> GqStatus {
    guard(|| {
        let c = jordan_product(&hermitian(get(a, "a")?)?, &hermitian(get(b, "b")?)?)?;
        put(out, boxed_matrix(c.into_matrix()), "out")
    })
}

/// Trace form Tr(AB)/2.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gq_trace_form(a: *const GqMatrix, b: *const GqMatrix, out: *mut f64) -> GqStatus {
    guard(|| {
        let v = trace_form(&hermitian(get(a, "a")?)?, &hermitian(get(b, "b")?)?)?;
        put(out, v, "out")
    })
}

/// Star product of Â and B̂ evaluated at ξ: Tr(ξAB)/2.
///
/// # Safety
/// `a`, `b`, `xi` must be live handles; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gq_star(
    a: *const GqMatrix,
    b: *const GqMatrix,
    xi: *const GqMatrix,
    re: *mut f64,
    im: *mut f64,
) -> GqStatus {
    guard(|| {
        let z = star_eval(
            &hermitian(get(a, "a")?)?,
            &hermitian(get(b, "b")?)?,
            &hermitian(get(xi, "xi")?)?,
        )?;
        put(re, z.re, "re")?;
        put(im, z.im, "im")
    })
}

/// Eigen-decomposition of a Hermitian matrix. Writes `dim` ascending
/// eigenvalues to `values` and the eigenvectors, as columns, to `vectors`.
///
/// # Safety
/// `a` must be a live handle; `values` must hold `dim` doubles; `vectors`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn gq_eig(a: *const GqMatrix, values: *mut f64, vectors: *mut *mut GqMatrix) -> GqStatus {
    guard(|| {
        let s = eig_hermitian(&hermitian(get(a, "a")?)?)?;
        if values.is_null() {
            return Err(null("values"));
        }
        std::slice::from_raw_parts_mut(values, s.eigenvalues.len()).copy_from_slice(&s.eigenvalues);
        put(vectors, boxed_matrix(s.eigenvectors), "vectors")
    })
}

/// exp(−i t A / ħ) for Hermitian A.
///
/// # Safety
/// `a` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gq_unitary_exp(a: *const GqMatrix, t: f64, hbar: f64, out: *mut *mut GqMatrix) -> GqStatus {
    guard(|| {
        let u = unitary_exp(&hermitian(get(a, "a")?)?, t, hbar)?;
        put(out, boxed_matrix(u), "out")
    })
}

/// Creates a state from `2·dim` interleaved doubles.
///
/// # Safety
/// `data` must point to `2·dim` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gq_state_new(dim: usize, data: *const f64, out: *mut *mut GqState) -> GqStatus {
    guard(|| {
        let v = StateVector::new(complex_slice(data, dim)?)?;
        put(out, Box::into_raw(Box::new(GqState(v))), "out")
    })
}

/// Releases a state. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gq_state_free(s: *mut GqState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Dimension of a state, or 0 for null.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gq_state_dim(s: *const GqState) -> usize {
    s.as_ref().map_or(0, |s| s.0.dim())
}

/// Reads amplitude k.
///
/// # Safety
/// `s` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gq_state_get(s: *const GqState, k: usize, re: *mut f64, im: *mut f64) -> GqStatus {
    guard(|| {
        let s = &get(s, "state")?.0;
        let z = *s
            .amplitudes()
            .get(k)
            .ok_or_else(|| invalid(format!("index {k} out of range for dimension {}", s.dim())))?;
        put(re, z.re, "re")?;
        put(im, z.im, "im")
    })
}

/// Expectation value ⟨ψ|Aψ⟩/⟨ψ|ψ⟩.
///
/// # Safety
/// `a`, `psi` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gq_expectation(a: *const GqMatrix, psi: *const GqState, out: *mut f64) -> GqStatus {
    guard(|| {
        let e = expectation(&hermitian(get(a, "a")?)?, &get(psi, "psi")?.0)?;
        put(out, e, "out")
    })
}

/// Extremal eigenpair by gradient flow of the expectation function from
/// `psi0`. `descending` selects the smallest eigenvalue; `step <= 0` selects
/// the default step 0.1/‖A‖_F.
///
/// # Safety
/// `a`, `psi0` must be live handles; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn gq_eigensolve(
    a: *const GqMatrix,
    psi0: *const GqState,
    descending: bool,
    step: f64,
    tol: f64,
    max_iter: usize,
    eigenvalue: *mut f64,
    eigenvector: *mut *mut GqState,
    iterations: *mut usize,
) -> GqStatus {
    guard(|| {
        let a = hermitian(get(a, "a")?)?;
        let step = if step > 0.0 { step } else { default_step(&a) };
        let direction = if descending { Direction::Descent } else { Direction::Ascent };
        let pair = eigensolve_gradient_flow(&a, &get(psi0, "psi0")?.0, step, tol, max_iter, direction)?;
        put(eigenvalue, pair.eigenvalue, "eigenvalue")?;
        put(iterations, pair.iterations, "iterations")?;
        put(eigenvector, Box::into_raw(Box::new(GqState(pair.eigenvector))), "eigenvector")
    })
}

/// Runs the standard identity suites and writes a JSON document
/// `{"passed": bool, "reports": [...]}` to `out`. The status reports whether
/// the suites could run; `passed` whether every identity held.
///
/// # Safety
/// `passed` and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gq_verify(
    dim: usize,
    trials: usize,
    seed: u64,
    tol: f64,
    passed: *mut bool,
    out: *mut *mut c_char,
) -> GqStatus {
    guard(|| {
        if dim == 0 || trials == 0 {
            return Err(invalid("dim and trials must be at least 1"));
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(invalid("tol must be positive and finite"));
        }
        let reports = standard_suites(dim, trials, seed, tol);
        let ok = reports.iter().all(|r| r.passed);
        let doc = json!({
            "passed": ok,
            "reports": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        });
        put(passed, ok, "passed")?;
        put_string(out, doc.to_string())
    })
}
