//! C ABI over the crosswork library.
//!
//! Objects cross the boundary as opaque handles created by `*_from_json`
//! or by an operation, and released with the matching `*_free`. Every
//! fallible call returns a [`CwStatus`]; on failure the message is kept per
//! thread and read with [`cw_last_error`]. Strings returned through `char**`
//! are owned by the caller and released with [`cw_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use crosswork::approx::{diagonalize, recheck, ApproxTable};
use crosswork::ccsolve::{solve, Solution};
use crosswork::cli::{parse_rho, parse_sigma};
use crosswork::gammaspace::{self, GammaElem};
use crosswork::{json, CrossTree, Error};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    Utf8 = 2,
    /// A JSON document or stem string could not be decoded.
    Parse = 3,
    /// A precondition of the operation does not hold.
    Input = 4,
    /// An enumeration or fragment cap was reached.
    Cap = 5,
    /// An internal consistency check failed or the library panicked.
    Internal = 6,
}

/// A cross-tree.
pub struct CwTree(CrossTree);

/// A solution of the combinatorial-core construction.
pub struct CwSolution(Solution);

/// An element of a Gamma space.
pub struct CwGamma(GammaElem);

/// A Gamma-approximation table.
pub struct CwTable(ApproxTable);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CwStatus {
    match e {
        Error::Parse { .. } => CwStatus::Parse,
        Error::Input(_) | Error::TableExhausted { .. } | Error::BudgetExhausted { .. } => CwStatus::Input,
        Error::CapExceeded { .. } | Error::FragmentTooLarge { .. } => CwStatus::Cap,
        Error::Internal(_) => CwStatus::Internal,
    }
}

enum Fail {
    Null,
    Utf8,
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, turning errors and panics into a status plus message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CwStatus::Ok
        }
        Ok(Err(Fail::Null)) => {
            set_error("null argument");
            CwStatus::NullArgument
        }
        Ok(Err(Fail::Utf8)) => {
            set_error("string argument is not UTF-8");
            CwStatus::Utf8
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            set_error(&format!("panic: {}", msg.unwrap_or_default()));
            CwStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null);
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Utf8)
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null)
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    out.write(value);
    Ok(())
}

unsafe fn put_handle<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|e| Fail::Lib(Error::Internal(e.to_string())))?;
    put(out, c.into_raw())
}

unsafe fn free_handle<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string returned through a `char**` out-parameter.
#[no_mangle]
pub unsafe extern "C" fn cw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------- trees

/// Loads a tree from its JSON document. The tree is not validated.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_tree_from_json(json: *const c_char, out: *mut *mut CwTree) -> CwStatus {
    guard(|| {
        let t = json::tree_from_json(str_arg(json)?)?;
        put_handle(out, CwTree(t))
    })
}

/// # Safety
/// `tree` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cw_tree_free(tree: *mut CwTree) {
    free_handle(tree)
}

/// Canonical JSON document of the tree.
///
/// # Safety
/// `tree` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_tree_to_json(tree: *const CwTree, out: *mut *mut c_char) -> CwStatus {
    guard(|| put_string(out, json::tree_to_json(&ref_arg(tree)?.0)))
}

/// Writes whether the tree satisfies every shape invariant.
///
/// # Safety
/// `tree` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_tree_is_valid(tree: *const CwTree, out: *mut bool) -> CwStatus {
    guard(|| put(out, ref_arg(tree)?.0.is_valid()))
}

/// Number of nodes.
///
/// # Safety
/// `tree` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_tree_len(tree: *const CwTree, out: *mut usize) -> CwStatus {
    guard(|| put(out, ref_arg(tree)?.0.len()))
}

/// Left-fullness of the tree below the pair. `rho` is a word over 0..2,
/// `sigma` comma-separated binary words (empty for the empty tuple).
///
/// # Safety
/// Strings must be nul-terminated; `tree` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cw_tree_leftfull(tree: *const CwTree, rho: *const c_char, sigma: *const c_char, out: *mut bool) -> CwStatus {
    guard(|| {
        let t = &ref_arg(tree)?.0;
        let (rho, sigma) = (parse_rho(str_arg(rho)?)?, parse_sigma(str_arg(sigma)?, t.r())?);
        put(out, t.leftfull(&rho, &sigma)?)
    })
}

/// The right-pruned subtree, as a new handle.
///
/// # Safety
/// `tree` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_tree_right_prune(tree: *const CwTree, out: *mut *mut CwTree) -> CwStatus {
    guard(|| {
        let t = &ref_arg(tree)?.0;
        if !t.is_valid() {
            return Err(Error::Input("invalid tree".into()).into());
        }
        put_handle(out, CwTree(t.right_prune()))
    })
}

// ---------------------------------------------------------------- solver

/// Runs the construction on a tree that is left-full below its root.
///
/// # Safety
/// `tree` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_solve(tree: *const CwTree, out: *mut *mut CwSolution) -> CwStatus {
    guard(|| {
        let t = &ref_arg(tree)?.0;
        if !t.is_valid() {
            return Err(Error::Input("invalid tree".into()).into());
        }
        put_handle(out, CwSolution(solve(t)?))
    })
}

/// # Safety
/// `sol` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cw_solution_free(sol: *mut CwSolution) {
    free_handle(sol)
}

/// Number of excluded components.
///
/// # Safety
/// `sol` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_solution_excluded_count(sol: *const CwSolution, out: *mut usize) -> CwStatus {
    guard(|| put(out, ref_arg(sol)?.0.excluded.len()))
}

/// JSON document of the solution.
///
/// # Safety
/// `sol` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_solution_to_json(sol: *const CwSolution, out: *mut *mut c_char) -> CwStatus {
    guard(|| put_string(out, json::to_canonical(&json::solution_to_value(&ref_arg(sol)?.0))))
}

// ---------------------------------------------------------------- gamma spaces

/// Loads a Gamma-space element from its JSON document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_gamma_from_json(json: *const c_char, out: *mut *mut CwGamma) -> CwStatus {
    guard(|| put_handle(out, CwGamma(json::gamma_from_json(str_arg(json)?)?)))
}

/// # Safety
/// `g` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cw_gamma_free(g: *mut CwGamma) {
    free_handle(g)
}

/// Writes whether the element is a well-formed computation path.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_gamma_is_valid(g: *const CwGamma, out: *mut bool) -> CwStatus {
    guard(|| put(out, gammaspace::validate_path(&ref_arg(g)?.0).is_empty()))
}

/// Writes whether `a` lies below `b`; both must have the same level.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_gamma_leq(a: *const CwGamma, b: *const CwGamma, out: *mut bool) -> CwStatus {
    guard(|| put(out, gammaspace::leq(&ref_arg(a)?.0, &ref_arg(b)?.0)?))
}

/// The set of colorings the element denotes, as a JSON array.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_gamma_interpret(g: *const CwGamma, out: *mut *mut c_char) -> CwStatus {
    guard(|| {
        let g = &ref_arg(g)?.0;
        let problems = gammaspace::validate_path(g);
        if !problems.is_empty() {
            return Err(Error::Input(problems.join("; ")).into());
        }
        put_string(out, json::gamma0_set_to_value(&gammaspace::interpret(g)).to_string())
    })
}

/// Length of the longest chain in the level-`m` fragment with child
/// indices below `bound` and supports inside `0..=support`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_longest_chain(m: usize, bound: u32, support: u32, out: *mut usize) -> CwStatus {
    guard(|| put(out, gammaspace::longest_chain(m, bound, support)?.length))
}

// ---------------------------------------------------------------- tables

/// Loads an approximation table from its JSON document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_table_from_json(json: *const c_char, out: *mut *mut CwTable) -> CwStatus {
    guard(|| put_handle(out, CwTable(json::table_from_json(str_arg(json)?)?)))
}

/// # Safety
/// `t` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cw_table_free(t: *mut CwTable) {
    free_handle(t)
}

/// Diagonalizes against `count` tables and writes the coloring prefix as a
/// digit string. The certificate is re-verified before returning.
///
/// # Safety
/// `tables` must point to `count` live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cw_diagonalize(tables: *const *const CwTable, count: usize, out: *mut *mut c_char) -> CwStatus {
    guard(|| {
        if tables.is_null() && count > 0 {
            return Err(Fail::Null);
        }
        let handles = if count == 0 { &[][..] } else { std::slice::from_raw_parts(tables, count) };
        let ts = handles.iter().map(|&h| ref_arg(h).map(|t| t.0.clone())).collect::<Result<Vec<_>, _>>()?;
        let (prefix, cert) = diagonalize(&ts)?;
        recheck(&ts, &prefix, &cert)?;
        put_string(out, prefix.to_string())
    })
}
