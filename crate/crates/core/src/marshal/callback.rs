use std::ffi::c_void;

use super::ArrayF64;

/// Boundary signature of a right-hand-side function:
/// `status rhs(t, y, ydot, user_data)`, writing `f(t, y)` into `ydot`.
pub type RhsFn = unsafe extern "C" fn(
    t: f64,
    y: *mut ArrayF64,
    ydot: *mut ArrayF64,
    user_data: *mut c_void,
) -> i32;

/// Context the user function was written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(i32)]
pub enum CallbackSource {
    /// Compiled code following the platform C calling convention.
    Native = 1,
    /// A function living inside a scripting-language interpreter.
    Scripting = 2,
}

impl CallbackSource {
    pub fn from_code(code: i32) -> Option<Self> {
        match code {
            1 => Some(CallbackSource::Native),
            2 => Some(CallbackSource::Scripting),
            _ => None,
        }
    }
}

/// Boundary record for a callback.
///
/// `fn_p_c` is what an implementation calls; `fn_p_native` refers to the
/// original function in its source context and is opaque to the library.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct Callback {
    pub src: i32,
    pub fn_p_native: *mut c_void,
    pub fn_p_c: Option<RhsFn>,
}

// Plain addresses; the callback is only invoked under the session's
// single-thread discipline.
unsafe impl Send for Callback {}
unsafe impl Sync for Callback {}

impl Callback {
    /// A callback whose original function already has the boundary signature.
    pub fn native(f: RhsFn) -> Self {
        Callback {
            src: CallbackSource::Native as i32,
            fn_p_native: f as *mut c_void,
            fn_p_c: Some(f),
        }
    }

    pub fn with_trampoline(source: CallbackSource, original: *mut c_void, trampoline: RhsFn) -> Self {
        Callback {
            src: source as i32,
            fn_p_native: original,
            fn_p_c: Some(trampoline),
        }
    }

    pub fn source(&self) -> Option<CallbackSource> {
        CallbackSource::from_code(self.src)
    }
}

/// Opaque user-data address passed through to the right-hand side unchanged.
#[repr(transparent)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UserData(pub *mut c_void);

unsafe impl Send for UserData {}
unsafe impl Sync for UserData {}

impl UserData {
    pub const NULL: UserData = UserData(std::ptr::null_mut());

    pub fn from_ref<T>(value: &mut T) -> Self {
        UserData(value as *mut T as *mut c_void)
    }

    pub fn is_null(&self) -> bool {
        self.0.is_null()
    }

    pub fn as_ptr(&self) -> *mut c_void {
        self.0
    }
}

impl Default for UserData {
    fn default() -> Self {
        UserData::NULL
    }
}
