//! C ABI over `rsc_fixpoint`.
//!
//! Mappings and traces are opaque handles created by `rsc_*` constructors and
//! released with the matching `*_free` function. Every fallible call returns
//! an [`RscStatus`]; on failure, [`rsc_last_error_message`] describes the
//! error for the calling thread. Strings returned through `char **` outputs
//! must be released with [`rsc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rsc_fixpoint::conditions::{classify, PairSamplePlan};
use rsc_fixpoint::iterate::{run_iteration, IterationConfig, IterationTrace, StopReason};
use rsc_fixpoint::mapping::{gallery, load_mapping, mapping_from_dsl, MappingDef};
use rsc_fixpoint::space::{estimate_modulus, Exponent, NormSpec};
use rsc_fixpoint::{Error, Tolerance};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RscStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Input = 3,
    Parse = 4,
    Dimension = 5,
    OutsideDomain = 6,
    NotFixed = 7,
    Io = 8,
    Internal = 9,
    Panic = 10,
}

/// Why an iteration stopped.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RscStopReason {
    ResidualTol = 0,
    MaxIter = 1,
}

/// Opaque mapping handle.
pub struct RscMapping {
    inner: MappingDef,
}

/// Opaque iteration trace handle.
pub struct RscTrace {
    inner: IterationTrace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RscStatus {
    match e {
        Error::Input(_) => RscStatus::Input,
        Error::Parse { .. } | Error::SourceParse(_) => RscStatus::Parse,
        Error::Dimension { .. } => RscStatus::Dimension,
        Error::OutsideDomain { .. } => RscStatus::OutsideDomain,
        Error::NotFixed { .. } => RscStatus::NotFixed,
        Error::Io(_) => RscStatus::Io,
        Error::Json(_) | Error::Csv(_) | Error::Internal(_) => RscStatus::Internal,
    }
}

struct Failure(RscStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard<F>(f: F) -> RscStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RscStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside rsc_fixpoint".into());
            RscStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(RscStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(RscStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn mapping_ref<'a>(m: *const RscMapping) -> Result<&'a MappingDef, Failure> {
    m.as_ref().map(|m| &m.inner).ok_or_else(|| null("mapping"))
}

unsafe fn trace_ref<'a>(t: *const RscTrace) -> Result<&'a IterationTrace, Failure> {
    t.as_ref().map(|t| &t.inner).ok_or_else(|| null("trace"))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| Failure(RscStatus::Internal, e.to_string()))?;
    write_out(out, c.into_raw(), "out")
}

fn exponent(p: f64) -> Result<Exponent, Failure> {
    if p == f64::INFINITY {
        Ok(Exponent::Infinity)
    } else {
        Ok(Exponent::new(p)?)
    }
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rsc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn rsc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a piecewise-affine mapping from DSL text.
///
/// # Safety
/// `name` and `source` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsc_mapping_from_dsl(
    name: *const c_char,
    source: *const c_char,
    out: *mut *mut RscMapping,
) -> RscStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let source = str_arg(source, "source")?;
        let m = mapping_from_dsl(name, source)?;
        write_out(out, Box::into_raw(Box::new(RscMapping { inner: m })), "out")
    })
}

/// Instantiates a gallery entry; `n_params == 0` selects its defaults.
///
/// # Safety
/// `id` must be a NUL-terminated string, `params` must point to `n_params`
/// doubles, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsc_mapping_from_gallery(
    id: *const c_char,
    params: *const f64,
    n_params: usize,
    out: *mut *mut RscMapping,
) -> RscStatus {
    guard(|| {
        let id = str_arg(id, "id")?;
        let params = slice_arg(params, n_params, "params")?;
        let m = gallery::build(id, params)?;
        write_out(out, Box::into_raw(Box::new(RscMapping { inner: m })), "out")
    })
}

/// Loads `gallery:<id>[:params]` or a DSL file path.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsc_mapping_load(source: *const c_char, out: *mut *mut RscMapping) -> RscStatus {
    guard(|| {
        let source = str_arg(source, "source")?;
        let m = load_mapping(source)?.mapping;
        write_out(out, Box::into_raw(Box::new(RscMapping { inner: m })), "out")
    })
}

/// # Safety
/// `m` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn rsc_mapping_free(m: *mut RscMapping) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of the mapping's domain, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rsc_mapping_dim(m: *const RscMapping) -> usize {
    m.as_ref().map_or(0, |m| m.inner.dim())
}

/// Switches the norm to lp; pass `INFINITY` for the max norm.
///
/// # Safety
/// `m` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rsc_mapping_set_norm(m: *mut RscMapping, p: f64) -> RscStatus {
    guard(|| {
        let handle = m.as_mut().ok_or_else(|| null("mapping"))?;
        let p = exponent(p)?;
        handle.inner = handle.inner.clone().with_norm(p);
        Ok(())
    })
}

/// Writes `Tx` to `out` (both of length `dim`).
///
/// # Safety
/// `x` and `out` must point to `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn rsc_mapping_evaluate(
    m: *const RscMapping,
    x: *const f64,
    dim: usize,
    out: *mut f64,
) -> RscStatus {
    guard(|| {
        let m = mapping_ref(m)?;
        let x = slice_arg(x, dim, "x")?;
        let y = m.evaluate(x)?;
        if out.is_null() {
            return Err(null("out"));
        }
        std::slice::from_raw_parts_mut(out, dim).copy_from_slice(&y);
        Ok(())
    })
}

/// Runs every classifier and returns the reports as a JSON array.
///
/// `pairs == 0` sweeps all ordered grid pairs; otherwise `pairs` random pairs
/// are drawn with `seed`.
///
/// # Safety
/// `m` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsc_classify_json(
    m: *const RscMapping,
    grid: usize,
    pairs: usize,
    seed: u64,
    rel_tol: f64,
    abs_tol: f64,
    out_json: *mut *mut c_char,
) -> RscStatus {
    guard(|| {
        let m = mapping_ref(m)?;
        let plan =
            if pairs == 0 { PairSamplePlan::exhaustive(grid) } else { PairSamplePlan::random(grid, pairs, seed) };
        let reports = classify(m, &plan, Tolerance::new(rel_tol, abs_tol), None, None)?;
        let text = serde_json::to_string(&reports).map_err(|e| Failure(RscStatus::Internal, e.to_string()))?;
        write_string(out_json, text)
    })
}

/// Runs the Krasnoselskii-Mann iteration from `x1` (length `dim`).
///
/// `alpha` must lie in `[1/2, 1)`.
///
/// # Safety
/// `m` must be a live handle, `x1` must point to `dim` doubles, and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsc_run_iteration(
    m: *const RscMapping,
    alpha: f64,
    x1: *const f64,
    dim: usize,
    max_iter: usize,
    residual_tol: f64,
    out: *mut *mut RscTrace,
) -> RscStatus {
    guard(|| {
        let m = mapping_ref(m)?;
        let x1 = slice_arg(x1, dim, "x1")?.to_vec();
        let config = IterationConfig::new(alpha, x1, max_iter).with_residual_tol(residual_tol);
        let trace = run_iteration(m, &config)?;
        write_out(out, Box::into_raw(Box::new(RscTrace { inner: trace })), "out")
    })
}

/// # Safety
/// `t` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn rsc_trace_free(t: *mut RscTrace) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of recorded rows, or 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rsc_trace_len(t: *const RscTrace) -> usize {
    t.as_ref().map_or(0, |t| t.inner.rows.len())
}

/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rsc_trace_dim(t: *const RscTrace) -> usize {
    t.as_ref().map_or(0, |t| t.inner.dim())
}

/// # Safety
/// `t` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rsc_trace_stop_reason(t: *const RscTrace, out: *mut RscStopReason) -> RscStatus {
    guard(|| {
        let reason = match trace_ref(t)?.stop_reason {
            StopReason::ResidualTol => RscStopReason::ResidualTol,
            StopReason::MaxIter => RscStopReason::MaxIter,
        };
        write_out(out, reason, "out")
    })
}

/// Row `row` of the trace: its iterate index `n`, `x_n` (written to `x`,
/// length `dim`) and the residual `‖T x_n - x_n‖`. Any output may be null.
///
/// # Safety
/// `t` must be a live handle; non-null outputs must be writable, `x` for
/// `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn rsc_trace_row(
    t: *const RscTrace,
    row: usize,
    n: *mut usize,
    x: *mut f64,
    dim: usize,
    residual: *mut f64,
) -> RscStatus {
    guard(|| {
        let t = trace_ref(t)?;
        let r = t
            .rows
            .get(row)
            .ok_or_else(|| Failure(RscStatus::Input, format!("row {row} out of range ({} rows)", t.rows.len())))?;
        if !x.is_null() {
            if dim != r.x.len() {
                return Err(Error::Dimension { expected: r.x.len(), got: dim }.into());
            }
            std::slice::from_raw_parts_mut(x, dim).copy_from_slice(&r.x);
        }
        if !n.is_null() {
            n.write(r.n);
        }
        if !residual.is_null() {
            residual.write(r.residual);
        }
        Ok(())
    })
}

/// Estimates the modulus of convexity of lp(R^dim) at `epsilon`.
///
/// # Safety
/// `delta_out` must be writable; `uniformly_convex_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn rsc_estimate_modulus(
    p: f64,
    dim: usize,
    epsilon: f64,
    samples: usize,
    seed: u64,
    delta_out: *mut f64,
    uniformly_convex_out: *mut bool,
) -> RscStatus {
    guard(|| {
        let space = NormSpec::new(exponent(p)?, dim)?;
        let est = estimate_modulus(&space, epsilon, samples, seed)?;
        write_out(delta_out, est.delta_hat, "delta_out")?;
        if !uniformly_convex_out.is_null() {
            uniformly_convex_out.write(est.uniformly_convex);
        }
        Ok(())
    })
}
