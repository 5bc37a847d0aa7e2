//! C ABI for `mirrorcode`.
//!
//! Objects cross the boundary as opaque handles created by `*_parse`,
//! `*_fixture` or `mirrorcode_solve` and released with the matching `*_free`.
//! Every fallible call returns a [`MirrorcodeStatus`]; on failure,
//! [`mirrorcode_last_error`] describes the error for the calling thread.
//! Strings returned to the caller must be released with [`mirrorcode_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mirrorcode::gap::{analyze_gap, GapMethod};
use mirrorcode::harness;
use mirrorcode::lp::LpStatus;
use mirrorcode::network::{parse_network, serialize_network, NetworkInstance};
use mirrorcode::problems::{self, ProblemKind, SolutionBundle};
use mirrorcode::{Error, Rational, Scalar};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MirrorcodeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Infeasible = 4,
    SolverFailure = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Which program to solve.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MirrorcodeProblem {
    AtomSubset = 0,
    Subset = 1,
    Coded = 2,
    AtomCoded = 3,
    Gap = 4,
}

impl From<MirrorcodeProblem> for ProblemKind {
    fn from(p: MirrorcodeProblem) -> Self {
        match p {
            MirrorcodeProblem::AtomSubset => ProblemKind::AtomSubset,
            MirrorcodeProblem::Subset => ProblemKind::Subset,
            MirrorcodeProblem::Coded => ProblemKind::Coded,
            MirrorcodeProblem::AtomCoded => ProblemKind::AtomCoded,
            MirrorcodeProblem::Gap => ProblemKind::Gap,
        }
    }
}

/// Opaque network instance.
pub struct MirrorcodeNetwork {
    inner: NetworkInstance,
}

/// Opaque solved program.
pub struct MirrorcodeSolution {
    objective: f64,
    atoms: Vec<f64>,
    storage: Vec<f64>,
    report: String,
}

impl MirrorcodeSolution {
    fn from_bundle<T: Scalar>(b: &SolutionBundle<T>) -> Self {
        MirrorcodeSolution {
            objective: b.objective.to_f64_lossy(),
            atoms: b
                .atoms
                .as_ref()
                .map(|a| a.values().iter().map(|v| v.to_f64_lossy()).collect())
                .unwrap_or_default(),
            storage: b.storage.iter().map(|v| v.to_f64_lossy()).collect(),
            report: b.report(),
        }
    }
}

/// Coded and uncoded optima with the gap bounds. `three_source_bound` is NaN
/// unless the instance has exactly three sources.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct MirrorcodeGap {
    pub coded: f64,
    pub subset: f64,
    pub gap_lp: f64,
    pub greedy: f64,
    pub three_source_bound: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn status_of(e: &Error) -> MirrorcodeStatus {
    match e {
        Error::Parse { .. } => MirrorcodeStatus::Parse,
        Error::InvalidArgument(_) => MirrorcodeStatus::InvalidArgument,
        Error::NotOptimal(LpStatus::Infeasible)
        | Error::InfeasibleInput(_)
        | Error::NotSubsetFeasible { .. } => MirrorcodeStatus::Infeasible,
        _ => MirrorcodeStatus::SolverFailure,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (MirrorcodeStatus, String)>) -> MirrorcodeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            MirrorcodeStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            MirrorcodeStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (MirrorcodeStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (MirrorcodeStatus, String) {
    (MirrorcodeStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(
    s: *const c_char,
    what: &str,
) -> Result<&'a str, (MirrorcodeStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        (
            MirrorcodeStatus::InvalidArgument,
            format!("{what} is not valid UTF-8"),
        )
    })
}

unsafe fn write_string(
    out: *mut *mut c_char,
    text: &str,
) -> Result<(), (MirrorcodeStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    let c = CString::new(text).map_err(|_| {
        (
            MirrorcodeStatus::InvalidArgument,
            "string contains NUL".to_string(),
        )
    })?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn copy_out(
    values: &[f64],
    buf: *mut f64,
    len: usize,
    needed: *mut usize,
) -> Result<(), (MirrorcodeStatus, String)> {
    if !needed.is_null() {
        *needed = values.len();
    }
    if len < values.len() {
        return Err((
            MirrorcodeStatus::BufferTooSmall,
            format!("buffer holds {len}, need {}", values.len()),
        ));
    }
    if !values.is_empty() {
        if buf.is_null() {
            return Err(null("buffer"));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    }
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn mirrorcode_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mirrorcode_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn mirrorcode_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance from its text form.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mirrorcode_network_parse(
    text: *const c_char,
    out: *mut *mut MirrorcodeNetwork,
) -> MirrorcodeStatus {
    guard(|| {
        let text = read_str(text, "text")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let inner = parse_network(text).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(MirrorcodeNetwork { inner }));
        Ok(())
    })
}

/// Loads a built-in instance: `"butterfly"` or `"fig5"`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mirrorcode_network_fixture(
    name: *const c_char,
    out: *mut *mut MirrorcodeNetwork,
) -> MirrorcodeStatus {
    guard(|| {
        let name = read_str(name, "name")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let inner = harness::fixture(name).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(MirrorcodeNetwork { inner }));
        Ok(())
    })
}

/// # Safety
/// `net` must come from this library and not have been freed already. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mirrorcode_network_free(net: *mut MirrorcodeNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mirrorcode_network_source_count(
    net: *const MirrorcodeNetwork,
    out: *mut usize,
) -> MirrorcodeStatus {
    guard(|| {
        let net = net.as_ref().ok_or_else(|| null("network"))?;
        *out.as_mut().ok_or_else(|| null("output pointer"))? = net.inner.source_count();
        Ok(())
    })
}

/// Canonical text form of the instance; release with [`mirrorcode_string_free`].
///
/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mirrorcode_network_serialize(
    net: *const MirrorcodeNetwork,
    out: *mut *mut c_char,
) -> MirrorcodeStatus {
    guard(|| {
        let net = net.as_ref().ok_or_else(|| null("network"))?;
        write_string(out, &serialize_network(&net.inner))
    })
}

/// Solves `problem` on `net`, in exact rational arithmetic when `exact` is set.
///
/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mirrorcode_solve(
    net: *const MirrorcodeNetwork,
    problem: MirrorcodeProblem,
    exact: bool,
    out: *mut *mut MirrorcodeSolution,
) -> MirrorcodeStatus {
    guard(|| {
        let net = net.as_ref().ok_or_else(|| null("network"))?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let kind = ProblemKind::from(problem);
        let sol = if exact {
            MirrorcodeSolution::from_bundle(
                &problems::solve::<Rational>(kind, &net.inner).map_err(lib_err)?,
            )
        } else {
            MirrorcodeSolution::from_bundle(
                &problems::solve::<f64>(kind, &net.inner).map_err(lib_err)?,
            )
        };
        *out = Box::into_raw(Box::new(sol));
        Ok(())
    })
}

/// # Safety
/// `sol` must come from this library and not have been freed already. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mirrorcode_solution_free(sol: *mut MirrorcodeSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// # Safety
/// `sol` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mirrorcode_solution_objective(
    sol: *const MirrorcodeSolution,
    out: *mut f64,
) -> MirrorcodeStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("solution"))?;
        *out.as_mut().ok_or_else(|| null("output pointer"))? = sol.objective;
        Ok(())
    })
}

/// Copies the atom measures (canonical order; none for the coded program)
/// into `buf`. `needed`, when non-null, receives the count even on failure.
///
/// # Safety
/// `sol` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mirrorcode_solution_atoms(
    sol: *const MirrorcodeSolution,
    buf: *mut f64,
    len: usize,
    needed: *mut usize,
) -> MirrorcodeStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("solution"))?;
        copy_out(&sol.atoms, buf, len, needed)
    })
}

/// Copies the per-source stored amounts into `buf`.
///
/// # Safety
/// `sol` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mirrorcode_solution_storage(
    sol: *const MirrorcodeSolution,
    buf: *mut f64,
    len: usize,
    needed: *mut usize,
) -> MirrorcodeStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("solution"))?;
        copy_out(&sol.storage, buf, len, needed)
    })
}

/// `key=value` report; release with [`mirrorcode_string_free`].
///
/// # Safety
/// `sol` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mirrorcode_solution_report(
    sol: *const MirrorcodeSolution,
    out: *mut *mut c_char,
) -> MirrorcodeStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("solution"))?;
        write_string(out, &sol.report)
    })
}

/// Solves the coded, uncoded and gap programs plus the greedy bound.
///
/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mirrorcode_gap(
    net: *const MirrorcodeNetwork,
    out: *mut MirrorcodeGap,
) -> MirrorcodeStatus {
    guard(|| {
        let net = net.as_ref().ok_or_else(|| null("network"))?;
        let out = out.as_mut().ok_or_else(|| null("output pointer"))?;
        let a = analyze_gap::<f64>(&net.inner, GapMethod::Both).map_err(lib_err)?;
        *out = MirrorcodeGap {
            coded: a.coded.objective,
            subset: a.subset.objective,
            gap_lp: a.gap_lp.as_ref().map_or(f64::NAN, |b| b.objective),
            greedy: a.greedy.as_ref().map_or(f64::NAN, |g| g.delta),
            three_source_bound: a.three_source_bound.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}
