//! C ABI for `bellext`.
//!
//! Objects are opaque handles created by `*_new`/constructor functions and
//! released with the matching `*_free`. Every fallible function returns a
//! [`BellextStatus`]; on failure a message is available from
//! [`bellext_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bellext::analysis::chsh_critical_w;
use bellext::behavior::{enumerate_vertices, CorrelatorVector, VertexSet};
use bellext::polytope::{evaluate, local_bound, table_row, verify_facet, Inequality};
use bellext::quantum::{extract_behavior, StateFamily};
use bellext::scenario::Scenario;
use bellext::seesaw::{run_seesaw, SeesawConfig, SeesawResult};
use bellext::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellextStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Domain = 4,
    Table = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

pub struct BellextScenario(Scenario);
pub struct BellextVertexSet(VertexSet);
pub struct BellextInequality(Inequality);
pub struct BellextSeesawResult {
    result: SeesawResult,
    correlators: Vec<f64>,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BellextSeesawConfig {
    pub seeds: usize,
    pub max_sweeps: usize,
    pub convergence_tol: f64,
    pub master_seed: u64,
}

pub const BELLEXT_FAMILY_RHO: u32 = 0;
pub const BELLEXT_FAMILY_SIGMA: u32 = 1;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BellextStatus {
    match e {
        Error::DimensionMismatch { .. } => BellextStatus::DimensionMismatch,
        Error::Domain(_) | Error::Incompatible(..) | Error::NotDichotomic(_) | Error::Normalization { .. } => {
            BellextStatus::Domain
        }
        Error::Table(_) | Error::Csv(_) | Error::Json(_) => BellextStatus::Table,
        Error::Io(_) => BellextStatus::Io,
        _ => BellextStatus::InvalidArgument,
    }
}

fn fail(status: BellextStatus, msg: impl Into<String>) -> BellextStatus {
    set_error(msg.into());
    status
}

fn lib_err(e: Error) -> BellextStatus {
    fail(status_of(&e), e.to_string())
}

/// Runs `f`, turning panics into [`BellextStatus::Panic`].
fn guard(f: impl FnOnce() -> BellextStatus) -> BellextStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(BellextStatus::Panic, msg)
        }
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(BellextStatus::NullPointer, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> BellextStatus {
    *out = Box::into_raw(Box::new(value));
    BellextStatus::Ok
}

/// Length of the last error message on this thread, including the NUL
/// terminator; 0 if there is none.
#[no_mangle]
pub extern "C" fn bellext_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(0, |m| m.as_bytes_with_nul().len()))
}

/// Copies the last error message into `buf` (truncated to `len - 1` bytes
/// and NUL-terminated). Returns the full length including the terminator.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn bellext_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len) - 1;
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bellext_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Scenario whose Bob inputs form a cycle of length `n` (at least 3).
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bellext_scenario_cycle(n: usize, out: *mut *mut BellextScenario) -> BellextStatus {
    guard(|| {
        non_null!(out);
        match Scenario::cycle(n) {
            Ok(s) => emit(out, BellextScenario(s)),
            Err(e) => lib_err(e),
        }
    })
}

/// Number of correlators, `2 + 6n`.
///
/// # Safety
/// `s` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn bellext_scenario_dimension(s: *const BellextScenario) -> usize {
    s.as_ref().map_or(0, |s| s.0.dimension())
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bellext_scenario_free(s: *mut BellextScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Product vertices of the local polytope.
///
/// # Safety
/// `s` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bellext_vertices_enumerate(
    s: *const BellextScenario,
    out: *mut *mut BellextVertexSet,
) -> BellextStatus {
    guard(|| {
        non_null!(s, out);
        emit(out, BellextVertexSet(enumerate_vertices(&(*s).0)))
    })
}

/// # Safety
/// `vs` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn bellext_vertices_count(vs: *const BellextVertexSet) -> usize {
    vs.as_ref().map_or(0, |v| v.0.vertices().len())
}

/// Copies all vertices, row-major (`count * dimension` entries), into `buf`.
///
/// # Safety
/// `vs` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn bellext_vertices_copy(
    vs: *const BellextVertexSet,
    buf: *mut i64,
    len: usize,
) -> BellextStatus {
    guard(|| {
        non_null!(vs, buf);
        let coords = (*vs).0.coordinates();
        let need: usize = coords.iter().map(Vec::len).sum();
        if len < need {
            return fail(BellextStatus::BufferTooSmall, format!("need {need} entries, got {len}"));
        }
        for (k, v) in coords.iter().flatten().enumerate() {
            *buf.add(k) = *v;
        }
        BellextStatus::Ok
    })
}

/// # Safety
/// `vs` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bellext_vertices_free(vs: *mut BellextVertexSet) {
    if !vs.is_null() {
        drop(Box::from_raw(vs));
    }
}

/// Row `id` (1 to 26) of the bundled inequality table.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bellext_inequality_from_table(id: u32, out: *mut *mut BellextInequality) -> BellextStatus {
    guard(|| {
        non_null!(out);
        match table_row(id) {
            Some(i) => emit(out, BellextInequality(i)),
            None => fail(BellextStatus::InvalidArgument, format!("no table row {id}")),
        }
    })
}

/// Inequality `sum_i coeffs[i] c_i <= local_bound`.
///
/// # Safety
/// `coeffs` must be valid for `len` reads and `out` for a write.
#[no_mangle]
pub unsafe extern "C" fn bellext_inequality_new(
    coeffs: *const i64,
    len: usize,
    local_bound: i64,
    out: *mut *mut BellextInequality,
) -> BellextStatus {
    guard(|| {
        non_null!(coeffs, out);
        let c = std::slice::from_raw_parts(coeffs, len).to_vec();
        match Inequality::new(c, local_bound) {
            Ok(i) => emit(out, BellextInequality(i)),
            Err(e) => lib_err(e),
        }
    })
}

/// # Safety
/// `ineq` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn bellext_inequality_declared_bound(ineq: *const BellextInequality) -> i64 {
    ineq.as_ref().map_or(0, |i| i.0.local_bound())
}

/// Maximum of the inequality over the vertex set.
///
/// # Safety
/// Handles must be live and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bellext_inequality_local_bound(
    ineq: *const BellextInequality,
    vs: *const BellextVertexSet,
    out: *mut i64,
) -> BellextStatus {
    guard(|| {
        non_null!(ineq, vs, out);
        let (i, v) = (&(*ineq).0, &(*vs).0);
        if i.dimension() != v.scenario().dimension() {
            return lib_err(Error::DimensionMismatch { expected: v.scenario().dimension(), actual: i.dimension() });
        }
        *out = local_bound(i, v);
        BellextStatus::Ok
    })
}

/// Writes 1 to `out` if the inequality is a facet of the polytope spanned
/// by `vs`, else 0.
///
/// # Safety
/// Handles must be live and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bellext_inequality_is_facet(
    ineq: *const BellextInequality,
    vs: *const BellextVertexSet,
    out: *mut i32,
) -> BellextStatus {
    guard(|| {
        non_null!(ineq, vs, out);
        let (i, v) = (&(*ineq).0, &(*vs).0);
        if i.dimension() != v.scenario().dimension() {
            return lib_err(Error::DimensionMismatch { expected: v.scenario().dimension(), actual: i.dimension() });
        }
        *out = i32::from(verify_facet(i, v).is_facet);
        BellextStatus::Ok
    })
}

/// `sum_i coeffs[i] correlators[i]`.
///
/// # Safety
/// `correlators` must be valid for `len` reads and `out` for a write.
#[no_mangle]
pub unsafe extern "C" fn bellext_inequality_evaluate(
    ineq: *const BellextInequality,
    correlators: *const f64,
    len: usize,
    out: *mut f64,
) -> BellextStatus {
    guard(|| {
        non_null!(ineq, correlators, out);
        let c = CorrelatorVector::from_values(std::slice::from_raw_parts(correlators, len).to_vec());
        match evaluate(&(*ineq).0, &c) {
            Ok(v) => {
                *out = v;
                BellextStatus::Ok
            }
            Err(e) => lib_err(e),
        }
    })
}

/// # Safety
/// `ineq` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bellext_inequality_free(ineq: *mut BellextInequality) {
    if !ineq.is_null() {
        drop(Box::from_raw(ineq));
    }
}

#[no_mangle]
pub extern "C" fn bellext_seesaw_config_default() -> BellextSeesawConfig {
    let d = SeesawConfig::default();
    BellextSeesawConfig {
        seeds: d.seeds,
        max_sweeps: d.max_sweeps,
        convergence_tol: d.convergence_tol,
        master_seed: d.master_seed,
    }
}

/// Seesaw lower bound on the quantum maximum of a four-cycle inequality,
/// optimizing the state on `C^2 (x) C^4`.
///
/// # Safety
/// `ineq` must be a live handle, `cfg` valid for a read and `out` for a write.
#[no_mangle]
pub unsafe extern "C" fn bellext_seesaw_maximize(
    ineq: *const BellextInequality,
    cfg: *const BellextSeesawConfig,
    out: *mut *mut BellextSeesawResult,
) -> BellextStatus {
    guard(|| {
        non_null!(ineq, cfg, out);
        let c = &*cfg;
        let config = SeesawConfig {
            seeds: c.seeds,
            max_sweeps: c.max_sweeps,
            convergence_tol: c.convergence_tol,
            master_seed: c.master_seed,
            ..SeesawConfig::default()
        };
        let run = || -> bellext::Result<BellextSeesawResult> {
            let result = run_seesaw(&(*ineq).0, None, &config)?;
            let behavior = extract_behavior(&result.extended_model()?, &Scenario::square())?;
            Ok(BellextSeesawResult { result, correlators: behavior.values().to_vec() })
        };
        match run() {
            Ok(r) => emit(out, r),
            Err(e) => lib_err(e),
        }
    })
}

/// # Safety
/// `r` must be a live handle or null (returns NaN).
#[no_mangle]
pub unsafe extern "C" fn bellext_seesaw_result_value(r: *const BellextSeesawResult) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.result.best_value)
}

/// Copies the optimal model's correlators (26 entries) into `buf`.
///
/// # Safety
/// `r` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn bellext_seesaw_result_correlators(
    r: *const BellextSeesawResult,
    buf: *mut f64,
    len: usize,
) -> BellextStatus {
    guard(|| {
        non_null!(r, buf);
        let c = &(*r).correlators;
        if len < c.len() {
            return fail(BellextStatus::BufferTooSmall, format!("need {} entries, got {len}", c.len()));
        }
        ptr::copy_nonoverlapping(c.as_ptr(), buf, c.len());
        BellextStatus::Ok
    })
}

/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bellext_seesaw_result_free(r: *mut BellextSeesawResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Exact CHSH threshold in `w` for family `BELLEXT_FAMILY_RHO` or
/// `BELLEXT_FAMILY_SIGMA` at the given `alpha`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bellext_chsh_critical_w(family: u32, alpha: f64, out: *mut f64) -> BellextStatus {
    guard(|| {
        non_null!(out);
        let family = match family {
            BELLEXT_FAMILY_RHO => StateFamily::Rho,
            BELLEXT_FAMILY_SIGMA => StateFamily::Sigma,
            other => return fail(BellextStatus::InvalidArgument, format!("unknown family {other}")),
        };
        match chsh_critical_w(family, alpha) {
            Ok(w) => {
                *out = w;
                BellextStatus::Ok
            }
            Err(e) => lib_err(e),
        }
    })
}
