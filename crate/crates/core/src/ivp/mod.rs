//! Typed front end for implementations of the IVP interface.
//!
//! ```no_run
//! use oif_core::ivp::Ivp;
//!
//! let mut ivp = Ivp::new("dopri5c")?;
//! ivp.set_initial_value(&[1.0], 0.0)?;
//! ivp.set_rhs_fn(|_t, y, ydot, _ud| {
//!     ydot[0] = -y[0];
//!     0
//! })?;
//! let mut y = [0.0];
//! ivp.integrate(1.0, &mut y)?;
//! # Ok::<(), oif_core::OifError>(())
//! ```

pub mod adapter;

use std::ffi::c_void;
use std::panic::{catch_unwind, AssertUnwindSafe};

use crate::dispatch::{Dispatch, ImplHandle};
use crate::interface::IVP;
use crate::marshal::{view_array_f64_raw, Arg, ArrayF64, Callback, CallbackSource, ConfigDict, PackedArgs, RhsFn, UserData};
use crate::status::{OifError, Result, Status};

pub const IVP_VERSION: (i32, i32) = (1, 0);

/// Closure form of a right-hand side: `status f(t, y, ydot, user_data)`.
pub type RhsClosure = dyn FnMut(f64, &[f64], &mut [f64], UserData) -> i32 + Send;

enum UserRhs {
    Unset,
    Closure(Box<RhsClosure>),
    Native(RhsFn),
}

/// What the implementation sees as user data: the gateway forwards every
/// callback through [`trampoline`] with this record's address.
struct RhsBinding {
    rhs: UserRhs,
    user_data: UserData,
}

unsafe extern "C" fn trampoline(t: f64, y: *mut ArrayF64, ydot: *mut ArrayF64, ctx: *mut c_void) -> i32 {
    let Some(binding) = (ctx as *mut RhsBinding).as_mut() else {
        return Status::INVALID_ARGUMENT.code();
    };
    let user_data = binding.user_data;
    match &mut binding.rhs {
        UserRhs::Unset => Status::INVALID_ARGUMENT.code(),
        UserRhs::Native(f) => f(t, y, ydot, user_data.0),
        UserRhs::Closure(f) => {
            let (Some(y), Some(ydot)) = (y.as_ref(), ydot.as_ref()) else {
                return Status::INVALID_ARGUMENT.code();
            };
            if y.validate().is_err() || ydot.validate().is_err() {
                return Status::INVALID_ARGUMENT.code();
            }
            let (y, ydot) = (y.as_slice(), ydot.as_mut_slice());
            catch_unwind(AssertUnwindSafe(|| f(t, y, ydot, user_data))).unwrap_or(Status::PLUGIN_FAILURE.code())
        }
    }
}

/// A session with one IVP implementation.
///
/// Errors from the implementation are returned unchanged. The session is
/// unloaded when dropped.
pub struct Ivp<'d> {
    dispatch: &'d Dispatch,
    handle: Option<ImplHandle>,
    binding: Box<RhsBinding>,
    callback: Box<Callback>,
}

impl Ivp<'static> {
    /// Loads `impl_name` through the process-wide registry.
    pub fn new(impl_name: &str) -> Result<Self> {
        Ivp::with_dispatch(Dispatch::global(), impl_name)
    }
}

impl<'d> Ivp<'d> {
    pub fn with_dispatch(dispatch: &'d Dispatch, impl_name: &str) -> Result<Self> {
        let handle = dispatch.init_impl(IVP, impl_name, IVP_VERSION.0, IVP_VERSION.1)?;
        let mut binding = Box::new(RhsBinding {
            rhs: UserRhs::Unset,
            user_data: UserData::NULL,
        });
        let callback = Box::new(Callback::with_trampoline(
            CallbackSource::Native,
            &mut *binding as *mut RhsBinding as *mut c_void,
            trampoline,
        ));
        let mut ivp = Ivp {
            dispatch,
            handle: Some(handle),
            binding,
            callback,
        };
        let ctx = UserData(&mut *ivp.binding as *mut RhsBinding as *mut c_void);
        ivp.call("set_user_data", &[Arg::UserData(ctx)], &[])?;
        Ok(ivp)
    }

    pub fn handle(&self) -> Option<ImplHandle> {
        self.handle
    }

    fn call(&mut self, method: &str, in_args: &[Arg<'_>], out_args: &[Arg<'_>]) -> Result<()> {
        let handle = self
            .handle
            .ok_or_else(|| OifError::invalid_argument("session is closed"))?;
        let in_args = PackedArgs::pack(in_args)?;
        let out_args = PackedArgs::pack(out_args)?;
        self.dispatch.call_impl(handle, method, &in_args, &out_args)
    }

    pub fn set_initial_value(&mut self, y0: &[f64], t0: f64) -> Result<()> {
        // SAFETY: the implementation only reads y0 during the call.
        let view = unsafe { view_array_f64_raw(y0.as_ptr() as *mut f64, 1, &[y0.len() as isize])? };
        self.call("set_initial_value", &[Arg::ArrayF64(view.as_raw()), Arg::Float64(t0)], &[])
    }

    /// Passes an existing array record as is.
    pub fn set_initial_value_array(&mut self, y0: &ArrayF64, t0: f64) -> Result<()> {
        self.call("set_initial_value", &[Arg::ArrayF64(y0), Arg::Float64(t0)], &[])
    }

    pub fn set_rhs_fn<G>(&mut self, f: G) -> Result<()>
    where
        G: FnMut(f64, &[f64], &mut [f64], UserData) -> i32 + Send + 'static,
    {
        self.install(UserRhs::Closure(Box::new(f)))
    }

    /// Uses a function that already has the boundary signature; it receives
    /// the user data set with [`Ivp::set_user_data`].
    pub fn set_rhs_fn_c(&mut self, f: RhsFn) -> Result<()> {
        self.install(UserRhs::Native(f))
    }

    fn install(&mut self, rhs: UserRhs) -> Result<()> {
        self.binding.rhs = rhs;
        let cb: *const Callback = &*self.callback;
        // SAFETY: the callback record lives as long as the session.
        self.call("set_rhs_fn", &[Arg::Callback(unsafe { &*cb })], &[])
    }

    pub fn set_tolerances(&mut self, reltol: f64, abstol: f64) -> Result<()> {
        self.call("set_tolerances", &[Arg::Float64(reltol), Arg::Float64(abstol)], &[])
    }

    /// Value handed to the right-hand side as its last argument. The
    /// referenced data must stay valid while the session can integrate.
    pub fn set_user_data(&mut self, user_data: UserData) -> Result<()> {
        self.binding.user_data = user_data;
        let ctx = UserData(&mut *self.binding as *mut RhsBinding as *mut c_void);
        self.call("set_user_data", &[Arg::UserData(ctx)], &[])
    }

    pub fn set_integrator(&mut self, name: &str, params: &ConfigDict) -> Result<()> {
        self.call("set_integrator", &[Arg::Str(name), Arg::ConfigDict(params)], &[])
    }

    /// Advances to `t` and writes the solution into `y` in place.
    pub fn integrate(&mut self, t: f64, y: &mut [f64]) -> Result<()> {
        let view = unsafe { view_array_f64_raw(y.as_mut_ptr(), 1, &[y.len() as isize])? };
        self.call("integrate", &[Arg::Float64(t)], &[Arg::ArrayF64(view.as_raw())])
    }

    pub fn integrate_array(&mut self, t: f64, y: &ArrayF64) -> Result<()> {
        self.call("integrate", &[Arg::Float64(t)], &[Arg::ArrayF64(y)])
    }

    /// Unloads the implementation, reporting any failure.
    pub fn close(mut self) -> Result<()> {
        self.unload()
    }

    fn unload(&mut self) -> Result<()> {
        match self.handle.take() {
            Some(h) => self.dispatch.unload_impl(h),
            None => Ok(()),
        }
    }
}

impl Drop for Ivp<'_> {
    fn drop(&mut self) {
        let _ = self.unload();
    }
}
