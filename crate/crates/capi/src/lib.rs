//! C ABI of the library, for user sides written in other languages.
//!
//! Declarations are in `docs/oif.h`. Every function returning `int` returns
//! a status (0 on success); the message of the most recent failure on the
//! calling thread is available from [`oif_last_error`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::collections::HashMap;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Mutex, OnceLock};

use oif_core::marshal::{make_array_f64, ArrayF64Buf, OifArgs};
use oif_core::{ArrayF64, Dispatch, ImplHandle, OifError, Result, Status};

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn report(result: Result<c_int>) -> c_int {
    match result {
        Ok(v) => {
            set_last_error("");
            v
        }
        Err(e) => {
            set_last_error(e.message());
            e.code()
        }
    }
}

fn guarded(f: impl FnOnce() -> Result<c_int>) -> c_int {
    let result = catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|_| Err(OifError::plugin_failure("panic inside the library")));
    report(result)
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str> {
    if p.is_null() {
        return Err(OifError::invalid_argument(format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| OifError::invalid_argument(format!("{what} is not UTF-8")))
}

/// Loads an implementation and returns its handle (≥ 0), or a negative
/// status.
#[no_mangle]
pub unsafe extern "C" fn oif_init_impl(
    interface: *const c_char,
    impl_name: *const c_char,
    version_major: c_int,
    version_minor: c_int,
) -> c_int {
    guarded(|| {
        let interface = c_str(interface, "interface name")?;
        let impl_name = c_str(impl_name, "implementation name")?;
        let h = Dispatch::global().init_impl(interface, impl_name, version_major, version_minor)?;
        Ok(h.0)
    })
}

#[no_mangle]
pub extern "C" fn oif_unload_impl(handle: c_int) -> c_int {
    guarded(|| Dispatch::global().unload_impl(ImplHandle(handle)).map(|()| 0))
}

/// Calls `method` on a loaded implementation. Either argument list may be
/// null, meaning empty.
#[no_mangle]
pub unsafe extern "C" fn oif_call_impl(
    handle: c_int,
    method: *const c_char,
    in_args: *const OifArgs,
    out_args: *const OifArgs,
) -> c_int {
    guarded(|| {
        let method = c_str(method, "method name")?;
        let in_args = in_args.as_ref().unwrap_or(&OifArgs::EMPTY);
        let out_args = out_args.as_ref().unwrap_or(&OifArgs::EMPTY);
        Dispatch::global()
            .call_impl_raw(ImplHandle(handle), method, in_args, out_args)
            .map(|()| 0)
    })
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn oif_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Arrays handed out by [`oif_create_array_f64`], keyed by record address.
fn owned_arrays() -> &'static Mutex<HashMap<usize, ArrayF64Buf<'static>>> {
    static ARRAYS: OnceLock<Mutex<HashMap<usize, ArrayF64Buf<'static>>>> = OnceLock::new();
    ARRAYS.get_or_init(Default::default)
}

/// Allocates a zero-filled row-major array; null on failure (see
/// [`oif_last_error`]). Release it with [`oif_free_array_f64`].
#[no_mangle]
pub unsafe extern "C" fn oif_create_array_f64(nd: c_int, dims: *const isize) -> *mut ArrayF64 {
    let mut out = std::ptr::null_mut();
    guarded(|| {
        if nd < 1 {
            return Err(OifError::invalid_argument(format!(
                "array must have at least one dimension, got nd={nd}"
            )));
        }
        if dims.is_null() {
            return Err(OifError::invalid_argument("dims is null"));
        }
        let dims = std::slice::from_raw_parts(dims, nd as usize);
        let buf = make_array_f64(nd as isize, dims)?;
        out = buf.as_raw_ptr();
        owned_arrays()
            .lock()
            .map_err(|_| OifError::allocation_failure("array registry poisoned"))?
            .insert(out as usize, buf);
        Ok(0)
    });
    out
}

/// Releases an array from [`oif_create_array_f64`]. Null is ignored; any
/// other address not obtained from the library is an invalid argument.
#[no_mangle]
pub unsafe extern "C" fn oif_free_array_f64(array: *mut ArrayF64) -> c_int {
    guarded(|| {
        if array.is_null() {
            return Ok(0);
        }
        let removed = owned_arrays()
            .lock()
            .map_err(|_| OifError::allocation_failure("array registry poisoned"))?
            .remove(&(array as usize));
        match removed {
            Some(buf) => {
                drop(buf);
                Ok(0)
            }
            None => Err(OifError::invalid_argument("array was not created by oif_create_array_f64")),
        }
    })
}

/// Status name for a code, for diagnostics.
#[no_mangle]
pub extern "C" fn oif_status_name(code: c_int) -> *const c_char {
    let name: &'static CStr = match Status(code) {
        Status::SUCCESS => c"success",
        Status::INVALID_ARGUMENT => c"invalid argument",
        Status::ALLOCATION_FAILURE => c"allocation failure",
        Status::TYPE_MISMATCH => c"type mismatch",
        Status::NOT_FOUND => c"not found",
        Status::PLUGIN_FAILURE => c"plugin failure",
        Status::SOLVER_FAILURE => c"solver failure",
        _ => c"implementation-defined",
    };
    name.as_ptr()
}
