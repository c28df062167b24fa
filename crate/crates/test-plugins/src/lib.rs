//! Fixture plugins for exercising the plugin bridge.
//!
//! * `echo_*` implements the IVP interface without solving anything:
//!   `integrate` calls the right-hand side once with the stored `y0` record
//!   as `y` and the output record as `ydot`, so a callback can observe which
//!   addresses crossed the boundary.
//! * `baddestroy_*` creates sessions whose destroy reports failure.
//! * `nocreate_*` exports only a destroy function.

#![allow(clippy::missing_safety_doc)]

use std::ffi::{c_char, c_void, CStr, CString};

#[repr(C)]
pub struct ArrayF64 {
    pub nd: isize,
    pub dimensions: *mut isize,
    pub data: *mut f64,
}

pub type RhsFn = unsafe extern "C" fn(f64, *mut ArrayF64, *mut ArrayF64, *mut c_void) -> i32;

#[repr(C)]
#[derive(Clone, Copy)]
pub struct Callback {
    pub src: i32,
    pub fn_p_native: *mut c_void,
    pub fn_p_c: Option<RhsFn>,
}

#[repr(C)]
pub struct ConfigDict {
    pub size: usize,
    pub buffer: *const u8,
}

/// Status returned by `echo_set_tolerances` for a negative `reltol`; not one
/// of the library's own codes.
pub const ECHO_CUSTOM_STATUS: i32 = 42;

struct Echo {
    y0: *mut ArrayF64,
    t0: f64,
    rhs: Option<Callback>,
    user_data: *mut c_void,
    last_error: CString,
}

impl Echo {
    fn fail(&mut self, code: i32, msg: &str) -> i32 {
        self.last_error = CString::new(msg).unwrap_or_default();
        code
    }
}

unsafe fn echo<'a>(s: *mut c_void) -> &'a mut Echo {
    &mut *(s as *mut Echo)
}

#[no_mangle]
pub extern "C" fn echo_create() -> *mut c_void {
    Box::into_raw(Box::new(Echo {
        y0: std::ptr::null_mut(),
        t0: 0.0,
        rhs: None,
        user_data: std::ptr::null_mut(),
        last_error: CString::default(),
    })) as *mut c_void
}

#[no_mangle]
pub unsafe extern "C" fn echo_destroy(s: *mut c_void) -> i32 {
    if s.is_null() {
        return -1;
    }
    drop(Box::from_raw(s as *mut Echo));
    0
}

#[no_mangle]
pub unsafe extern "C" fn echo_set_initial_value(s: *mut c_void, y0: *mut ArrayF64, t0: f64) -> i32 {
    let e = echo(s);
    e.y0 = y0;
    e.t0 = t0;
    0
}

#[no_mangle]
pub unsafe extern "C" fn echo_set_rhs_fn(s: *mut c_void, cb: *mut Callback) -> i32 {
    let e = echo(s);
    match cb.as_ref() {
        Some(cb) if cb.fn_p_c.is_some() => {
            e.rhs = Some(*cb);
            0
        }
        _ => e.fail(-1, "echo: callback without C entry point"),
    }
}

#[no_mangle]
pub unsafe extern "C" fn echo_set_tolerances(s: *mut c_void, reltol: f64, _abstol: f64) -> i32 {
    if reltol < 0.0 {
        return echo(s).fail(ECHO_CUSTOM_STATUS, "echo: custom status");
    }
    0
}

#[no_mangle]
pub unsafe extern "C" fn echo_set_user_data(s: *mut c_void, user_data: *mut c_void) -> i32 {
    echo(s).user_data = user_data;
    0
}

#[no_mangle]
pub unsafe extern "C" fn echo_set_integrator(s: *mut c_void, name: *const c_char, params: *mut ConfigDict) -> i32 {
    let e = echo(s);
    if CStr::from_ptr(name).to_bytes() != b"echo" {
        return e.fail(-4, "echo: only the 'echo' integrator exists");
    }
    if params.is_null() {
        return e.fail(-1, "echo: params is null");
    }
    0
}

#[no_mangle]
pub unsafe extern "C" fn echo_integrate(s: *mut c_void, t: f64, y: *mut ArrayF64) -> i32 {
    let e = echo(s);
    let Some(f) = e.rhs.and_then(|cb| cb.fn_p_c) else {
        return e.fail(-1, "echo: no right-hand side");
    };
    f(t, e.y0, y, e.user_data)
}

#[no_mangle]
pub unsafe extern "C" fn echo_last_error(s: *mut c_void) -> *const c_char {
    echo(s).last_error.as_ptr()
}

#[no_mangle]
pub extern "C" fn baddestroy_create() -> *mut c_void {
    Box::into_raw(Box::new(0u64)) as *mut c_void
}

#[no_mangle]
pub unsafe extern "C" fn baddestroy_destroy(s: *mut c_void) -> i32 {
    if !s.is_null() {
        drop(Box::from_raw(s as *mut u64));
    }
    -1
}

#[no_mangle]
pub unsafe extern "C" fn nocreate_destroy(_s: *mut c_void) -> i32 {
    0
}
