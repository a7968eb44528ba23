//! C ABI over the dgcell command layer.
//!
//! Handles are opaque. Every call returns a [`DgcellStatus`]; reports come
//! back as NUL-terminated JSON strings owned by the caller and released
//! with [`dgcell_string_free`]. The message for the most recent failure on
//! the calling thread is available from [`dgcell_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dgcell::cells::{CellError, OrderKind, Side};
use dgcell::cli::{self, CliError, Command, Report};
use dgcell::input::{parse_str, AlgebraInput};

/// Result codes. `Contradiction` still delivers a report.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DgcellStatus {
    Ok = 0,
    Contradiction = 1,
    InputError = 2,
    NullPointer = 3,
    InvalidUtf8 = 4,
    UnknownCell = 5,
    UnknownGenerator = 6,
    Unsupported = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DgcellOrderKind {
    Weak = 0,
    Strong = 1,
    Tri = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DgcellSide {
    Left = 0,
    Right = 1,
    TwoSided = 2,
}

/// Parsed and validated algebra.
pub struct DgcellAlgebra {
    input: AlgebraInput,
    bytes: Vec<u8>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).expect("no interior NUL"));
}

fn fail(status: DgcellStatus, msg: impl Into<String>) -> DgcellStatus {
    set_error(msg);
    status
}

fn status_of(err: &CliError) -> DgcellStatus {
    match err {
        CliError::Cell(CellError::UnknownCell(_)) => DgcellStatus::UnknownCell,
        CliError::UnknownGenerator(_) => DgcellStatus::UnknownGenerator,
        CliError::Unsupported(_) | CliError::Commutative(_) => DgcellStatus::Unsupported,
        _ => DgcellStatus::InputError,
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, DgcellStatus> {
    if p.is_null() {
        return Err(fail(DgcellStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(DgcellStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

fn guarded(f: impl FnOnce() -> DgcellStatus) -> DgcellStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(DgcellStatus::Panic, "internal panic"),
    }
}

unsafe fn run_into(alg: *const DgcellAlgebra, cmd: Command, seed: u64, out: *mut *mut c_char) -> DgcellStatus {
    if alg.is_null() || out.is_null() {
        return fail(DgcellStatus::NullPointer, "null handle or output pointer");
    }
    *out = ptr::null_mut();
    let alg = &*alg;
    let report: Report = match cli::run(&alg.input, &alg.bytes, &cmd, seed) {
        Ok(r) => r,
        Err(e) => return fail(status_of(&e), e.to_string()),
    };
    let json = CString::new(report.to_json()).expect("JSON has no NUL");
    *out = json.into_raw();
    if report.exit_code() == cli::EXIT_OK {
        set_error("");
        DgcellStatus::Ok
    } else {
        fail(DgcellStatus::Contradiction, report.consistency_flags.join("; "))
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dgcell_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failure on this thread. Valid until the next call
/// on the same thread.
#[no_mangle]
pub extern "C" fn dgcell_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parse and validate a TOML algebra description.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dgcell_algebra_parse(text: *const c_char, out: *mut *mut DgcellAlgebra) -> DgcellStatus {
    guarded(|| {
        if out.is_null() {
            return fail(DgcellStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_str(text) {
            Ok(input) => {
                *out = Box::into_raw(Box::new(DgcellAlgebra { input, bytes: text.as_bytes().to_vec() }));
                DgcellStatus::Ok
            }
            Err(e) => fail(DgcellStatus::InputError, e.to_string()),
        }
    })
}

/// Release a handle from [`dgcell_algebra_parse`]. Null is ignored.
///
/// # Safety
/// `alg` must come from [`dgcell_algebra_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn dgcell_algebra_free(alg: *mut DgcellAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// Dimension of the algebra, 0 for a null handle.
///
/// # Safety
/// `alg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dgcell_algebra_dim(alg: *const DgcellAlgebra) -> usize {
    if alg.is_null() {
        0
    } else {
        (*alg).input.algebra.dim()
    }
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn dgcell_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Validation summary as JSON.
///
/// # Safety
/// `alg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dgcell_validate(alg: *const DgcellAlgebra, seed: u64, out: *mut *mut c_char) -> DgcellStatus {
    guarded(|| run_into(alg, Command::Validate, seed, out))
}

/// Cell structure as JSON. `weak_only` skips the bounded searches.
///
/// # Safety
/// `alg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dgcell_cells(
    alg: *const DgcellAlgebra,
    depth: u32,
    weak_only: bool,
    seed: u64,
    out: *mut *mut c_char,
) -> DgcellStatus {
    guarded(|| run_into(alg, Command::Cells { depth: depth as usize, weak_only }, seed, out))
}

/// Maximal dg ideals of a cell's 2-representation as JSON.
///
/// # Safety
/// `alg` must be a live handle, `cell` NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dgcell_maxspec(
    alg: *const DgcellAlgebra,
    cell: *const c_char,
    seed: u64,
    out: *mut *mut c_char,
) -> DgcellStatus {
    guarded(|| match read_str(cell) {
        Ok(c) => run_into(alg, Command::MaxSpec { cell: c.to_string() }, seed, out),
        Err(s) => s,
    })
}

/// Cell 2-representation descriptor for the `ideal`-th maximal ideal.
///
/// # Safety
/// `alg` must be a live handle, `cell` NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dgcell_cellrep(
    alg: *const DgcellAlgebra,
    cell: *const c_char,
    ideal: u32,
    seed: u64,
    out: *mut *mut c_char,
) -> DgcellStatus {
    guarded(|| match read_str(cell) {
        Ok(c) => run_into(alg, Command::CellRep { cell: c.to_string(), ideal: ideal as usize }, seed, out),
        Err(s) => s,
    })
}

/// Compare two generators, e.g. `"Id:1"` and `"P:e1,e2"`.
///
/// # Safety
/// `alg` must be a live handle, `lhs`/`rhs` NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dgcell_order(
    alg: *const DgcellAlgebra,
    kind: DgcellOrderKind,
    side: DgcellSide,
    lhs: *const c_char,
    rhs: *const c_char,
    depth: u32,
    seed: u64,
    out: *mut *mut c_char,
) -> DgcellStatus {
    guarded(|| {
        let (lhs, rhs) = match (read_str(lhs), read_str(rhs)) {
            (Ok(a), Ok(b)) => (a.to_string(), b.to_string()),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let kind = match kind {
            DgcellOrderKind::Weak => OrderKind::Weak,
            DgcellOrderKind::Strong => OrderKind::Strong,
            DgcellOrderKind::Tri => OrderKind::Tri,
        };
        let side = match side {
            DgcellSide::Left => Side::L,
            DgcellSide::Right => Side::R,
            DgcellSide::TwoSided => Side::J,
        };
        run_into(alg, Command::Order { kind, side, lhs, rhs, depth: depth as usize }, seed, out)
    })
}

/// Full classification with cross-checks as JSON.
///
/// # Safety
/// `alg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dgcell_verify(alg: *const DgcellAlgebra, depth: u32, seed: u64, out: *mut *mut c_char) -> DgcellStatus {
    guarded(|| run_into(alg, Command::Verify { depth: depth as usize }, seed, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DUAL: &str = "form = \"quiver\"\nvertices = [\"\"]\nrelations = [\"x*x\"]\n[[arrows]]\nname = \"x\"\nsource = \"\"\ntarget = \"\"\n";

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            let mut h = ptr::null_mut();
            assert_eq!(dgcell_algebra_parse(ptr::null(), &mut h), DgcellStatus::NullPointer);
            assert!(h.is_null());
            let mut s = ptr::null_mut();
            assert_eq!(dgcell_validate(ptr::null(), 0, &mut s), DgcellStatus::NullPointer);
            assert_eq!(dgcell_algebra_dim(ptr::null()), 0);
            dgcell_algebra_free(ptr::null_mut());
            dgcell_string_free(ptr::null_mut());
        }
    }

    #[test]
    fn parse_and_query() {
        let text = CString::new(DUAL).unwrap();
        unsafe {
            let mut h = ptr::null_mut();
            assert_eq!(dgcell_algebra_parse(text.as_ptr(), &mut h), DgcellStatus::Ok);
            assert_eq!(dgcell_algebra_dim(h), 2);
            let cell = CString::new("L0:e").unwrap();
            let mut s = ptr::null_mut();
            assert_eq!(dgcell_maxspec(h, cell.as_ptr(), 0, &mut s), DgcellStatus::Ok);
            let json = CStr::from_ptr(s).to_str().unwrap();
            assert!(json.contains("\"schema_version\": 1"));
            dgcell_string_free(s);
            let bad = CString::new("nope").unwrap();
            assert_eq!(dgcell_maxspec(h, bad.as_ptr(), 0, &mut s), DgcellStatus::UnknownCell);
            assert!(s.is_null());
            assert!(CStr::from_ptr(dgcell_last_error()).to_str().unwrap().contains("nope"));
            dgcell_algebra_free(h);
        }
    }
}
