//! Session logic shared by the bundled IVP plugins.
//!
//! [`SolverAdapter`] turns an [`OdeSolver`] into an implementation of the
//! IVP interface and [`export_ivp_adapter!`](crate::export_ivp_adapter)
//! emits the C symbols a plugin library must provide.

use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use crate::marshal::{ArrayF64, Callback, ConfigDict, ConfigValue, OifConfigDict, RhsFn};
use crate::ode::{Dopri5, Dopri5Config, OdeSolver, Rhs, Rk4, Rk4Config};
use crate::status::{OifError, Result, Status};

/// An integrator that can back an IVP session.
pub trait IvpMethod: OdeSolver<f64> + Default + Send {
    /// Names accepted by `set_integrator`.
    const INTEGRATORS: &'static [&'static str];

    /// Applies integrator parameters on top of the defaults. Tolerances set
    /// through the session are kept.
    fn configure(&mut self, name: &str, params: &ConfigDict) -> Result<()>;
}

fn float_param(key: &str, v: ConfigValue) -> Result<f64> {
    let x = v.as_f64();
    if x.is_nan() {
        return Err(OifError::invalid_argument(format!("parameter '{key}' is NaN")));
    }
    Ok(x)
}

fn int_param(key: &str, v: ConfigValue) -> Result<i32> {
    v.as_int()
        .ok_or_else(|| OifError::invalid_argument(format!("parameter '{key}' must be an integer")))
}

fn unknown_key(name: &str, key: &str) -> OifError {
    OifError::invalid_argument(format!("unknown parameter '{key}' for integrator '{name}'"))
}

impl IvpMethod for Dopri5<f64> {
    const INTEGRATORS: &'static [&'static str] = &["dopri5"];

    /// Keys: `max_steps`, `fixed_step` (integers), `h_init`, `h_max`,
    /// `safety`, `fac_min`, `fac_max` (floats).
    fn configure(&mut self, name: &str, params: &ConfigDict) -> Result<()> {
        let current = self.config();
        let mut cfg = Dopri5Config {
            reltol: current.reltol,
            abstol: current.abstol,
            ..Dopri5Config::default()
        };
        for (key, v) in params.iter() {
            match key {
                "max_steps" => {
                    let n = int_param(key, v)?;
                    cfg.max_steps = usize::try_from(n)
                        .map_err(|_| OifError::invalid_argument(format!("max_steps must be positive, got {n}")))?;
                }
                "fixed_step" => cfg.fixed_step = int_param(key, v)? != 0,
                "h_init" => cfg.h_init = Some(float_param(key, v)?),
                "h_max" => cfg.h_max = Some(float_param(key, v)?),
                "safety" => cfg.safety = float_param(key, v)?,
                "fac_min" => cfg.fac_min = float_param(key, v)?,
                "fac_max" => cfg.fac_max = float_param(key, v)?,
                _ => return Err(unknown_key(name, key)),
            }
        }
        cfg.validate().map_err(OifError::invalid_argument)?;
        self.set_config(cfg);
        Ok(())
    }
}

impl IvpMethod for Rk4<f64> {
    const INTEGRATORS: &'static [&'static str] = &["rk4"];

    /// Key: `h` (float), the nominal step.
    fn configure(&mut self, name: &str, params: &ConfigDict) -> Result<()> {
        let mut cfg = Rk4Config::default();
        for (key, v) in params.iter() {
            match key {
                "h" => cfg.h = float_param(key, v)?,
                _ => return Err(unknown_key(name, key)),
            }
        }
        if !(cfg.h > 0.0 && cfg.h.is_finite()) {
            return Err(OifError::invalid_argument(format!("h must be positive and finite, got {}", cfg.h)));
        }
        self.set_config(cfg);
        Ok(())
    }
}

/// One IVP session on top of an integrator.
pub struct SolverAdapter<M> {
    solver: M,
    n: Option<usize>,
    rhs: Option<RhsFn>,
    user_data: *mut c_void,
    tolerances: Option<(f64, f64)>,
    integrated: bool,
    last_error: CString,
}

// The session is driven from one thread at a time; user_data is opaque.
unsafe impl<M: Send> Send for SolverAdapter<M> {}

impl<M: IvpMethod> Default for SolverAdapter<M> {
    fn default() -> Self {
        SolverAdapter {
            solver: M::default(),
            n: None,
            rhs: None,
            user_data: std::ptr::null_mut(),
            tolerances: None,
            integrated: false,
            last_error: CString::default(),
        }
    }
}

/// Right-hand side calling a boundary function on views of the solver's
/// buffers.
struct ForeignRhs {
    f: RhsFn,
    user_data: *mut c_void,
}

impl Rhs<f64> for ForeignRhs {
    fn eval(&mut self, t: f64, y: &[f64], ydot: &mut [f64]) -> std::result::Result<(), i32> {
        let mut dims_y = [y.len() as isize];
        let mut dims_d = [ydot.len() as isize];
        let mut y_view = ArrayF64 {
            nd: 1,
            dimensions: dims_y.as_mut_ptr(),
            data: y.as_ptr() as *mut f64,
        };
        let mut d_view = ArrayF64 {
            nd: 1,
            dimensions: dims_d.as_mut_ptr(),
            data: ydot.as_mut_ptr(),
        };
        // SAFETY: both views describe live buffers for the duration of the call.
        match unsafe { (self.f)(t, &mut y_view, &mut d_view, self.user_data) } {
            0 => Ok(()),
            s => Err(s),
        }
    }
}

fn one_dimensional(a: &ArrayF64, what: &str) -> Result<usize> {
    // SAFETY: callers pass records received through the boundary.
    let n = unsafe { a.validate()? };
    if a.nd != 1 {
        return Err(OifError::invalid_argument(format!("{what} must be one-dimensional, got nd={}", a.nd)));
    }
    Ok(n)
}

impl<M: IvpMethod> SolverAdapter<M> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn solver(&self) -> &M {
        &self.solver
    }

    pub fn last_error(&self) -> &CStr {
        &self.last_error
    }

    pub fn set_initial_value(&mut self, y0: &[f64], t0: f64) -> Result<()> {
        if y0.is_empty() {
            return Err(OifError::invalid_argument("initial value must not be empty"));
        }
        if !t0.is_finite() {
            return Err(OifError::invalid_argument(format!("t0 must be finite, got {t0}")));
        }
        self.solver.reset(t0, y0);
        if let Some((r, a)) = self.tolerances {
            self.solver.set_tolerances(r, a);
        }
        self.n = Some(y0.len());
        self.integrated = false;
        Ok(())
    }

    pub fn set_rhs_fn(&mut self, f: Option<RhsFn>) -> Result<()> {
        let f = f.ok_or_else(|| OifError::invalid_argument("callback has no C entry point"))?;
        self.rhs = Some(f);
        self.solver.invalidate();
        Ok(())
    }

    pub fn set_tolerances(&mut self, reltol: f64, abstol: f64) -> Result<()> {
        if !(reltol > 0.0 && reltol.is_finite()) {
            return Err(OifError::invalid_argument(format!("reltol must be positive, got {reltol}")));
        }
        if !(abstol >= 0.0 && abstol.is_finite()) {
            return Err(OifError::invalid_argument(format!("abstol must be non-negative, got {abstol}")));
        }
        if self.integrated {
            return Err(OifError::invalid_argument(
                "tolerances cannot change after integration started; set the initial value again first",
            ));
        }
        self.tolerances = Some((reltol, abstol));
        self.solver.set_tolerances(reltol, abstol);
        Ok(())
    }

    pub fn set_user_data(&mut self, user_data: *mut c_void) -> Result<()> {
        self.user_data = user_data;
        self.solver.invalidate();
        Ok(())
    }

    pub fn set_integrator(&mut self, name: &str, params: &ConfigDict) -> Result<()> {
        if name.is_empty() {
            return Err(OifError::invalid_argument("integrator name is empty"));
        }
        if !M::INTEGRATORS.contains(&name) {
            return Err(OifError::not_found(format!(
                "unknown integrator '{name}'; available: {}",
                M::INTEGRATORS.join(", ")
            )));
        }
        self.solver.configure(name, params)
    }

    pub fn integrate(&mut self, t: f64, y: &mut [f64]) -> Result<()> {
        let n = self
            .n
            .ok_or_else(|| OifError::invalid_argument("initial value not set"))?;
        let f = self.rhs.ok_or_else(|| OifError::invalid_argument("right-hand side not set"))?;
        if y.len() != n {
            return Err(OifError::invalid_argument(format!(
                "output has {} elements, the system has {n}",
                y.len()
            )));
        }
        if t.is_nan() || t < self.solver.time() {
            return Err(OifError::invalid_argument(format!(
                "target time {t} is before the current time {}",
                self.solver.time()
            )));
        }
        self.integrated = true;
        let mut rhs = ForeignRhs {
            f,
            user_data: self.user_data,
        };
        self.solver
            .integrate_to(t, &mut rhs)
            .map_err(|e| OifError::solver_failure(e.to_string()))?;
        y.copy_from_slice(self.solver.state());
        Ok(())
    }

    fn record(&mut self, result: Result<()>) -> i32 {
        match result {
            Ok(()) => {
                self.last_error = CString::default();
                0
            }
            Err(e) => {
                self.last_error = CString::new(e.message().replace('\0', " ")).unwrap_or_default();
                e.code()
            }
        }
    }
}

/// Boundary entry points, instantiated per plugin by
/// [`export_ivp_adapter!`](crate::export_ivp_adapter).
pub mod ffi {
    use super::*;

    type Session<M> = SolverAdapter<M>;

    pub fn create<M: IvpMethod>() -> *mut c_void {
        match catch_unwind(Session::<M>::new) {
            Ok(s) => Box::into_raw(Box::new(s)) as *mut c_void,
            Err(_) => std::ptr::null_mut(),
        }
    }

    /// # Safety
    /// `session` must come from [`create`] with the same `M` and not be used afterwards.
    pub unsafe fn destroy<M: IvpMethod>(session: *mut c_void) -> i32 {
        if session.is_null() {
            return Status::INVALID_ARGUMENT.code();
        }
        drop(Box::from_raw(session as *mut Session<M>));
        0
    }

    unsafe fn with<M: IvpMethod>(session: *mut c_void, f: impl FnOnce(&mut Session<M>) -> Result<()>) -> i32 {
        let Some(s) = (session as *mut Session<M>).as_mut() else {
            return Status::INVALID_ARGUMENT.code();
        };
        let result = match catch_unwind(AssertUnwindSafe(|| f(&mut *s))) {
            Ok(r) => r,
            Err(_) => Err(OifError::plugin_failure("panic inside the implementation")),
        };
        s.record(result)
    }

    /// # Safety
    /// `session` from [`create`]; `y0` null or a valid array record.
    pub unsafe fn set_initial_value<M: IvpMethod>(session: *mut c_void, y0: *mut ArrayF64, t0: f64) -> i32 {
        with::<M>(session, |s| {
            let a = y0.as_ref().ok_or_else(|| OifError::invalid_argument("y0 is null"))?;
            one_dimensional(a, "y0")?;
            s.set_initial_value(a.as_slice(), t0)
        })
    }

    /// # Safety
    /// `session` from [`create`]; `cb` null or a valid callback record.
    pub unsafe fn set_rhs_fn<M: IvpMethod>(session: *mut c_void, cb: *mut Callback) -> i32 {
        with::<M>(session, |s| {
            let cb = cb.as_ref().ok_or_else(|| OifError::invalid_argument("callback is null"))?;
            s.set_rhs_fn(cb.fn_p_c)
        })
    }

    /// # Safety
    /// `session` from [`create`].
    pub unsafe fn set_tolerances<M: IvpMethod>(session: *mut c_void, reltol: f64, abstol: f64) -> i32 {
        with::<M>(session, |s| s.set_tolerances(reltol, abstol))
    }

    /// # Safety
    /// `session` from [`create`].
    pub unsafe fn set_user_data<M: IvpMethod>(session: *mut c_void, user_data: *mut c_void) -> i32 {
        with::<M>(session, |s| s.set_user_data(user_data))
    }

    /// # Safety
    /// `session` from [`create`]; `name` a NUL-terminated string; `params`
    /// null or a valid dictionary record.
    pub unsafe fn set_integrator<M: IvpMethod>(
        session: *mut c_void,
        name: *const c_char,
        params: *mut OifConfigDict,
    ) -> i32 {
        with::<M>(session, |s| {
            if name.is_null() {
                return Err(OifError::invalid_argument("integrator name is null"));
            }
            let name = CStr::from_ptr(name)
                .to_str()
                .map_err(|_| OifError::invalid_argument("integrator name is not UTF-8"))?;
            let params = match params.as_ref() {
                Some(d) => d.decode()?,
                None => ConfigDict::new(),
            };
            s.set_integrator(name, &params)
        })
    }

    /// # Safety
    /// `session` from [`create`]; `y` null or a valid array record.
    pub unsafe fn integrate<M: IvpMethod>(session: *mut c_void, t: f64, y: *mut ArrayF64) -> i32 {
        with::<M>(session, |s| {
            let a = y.as_ref().ok_or_else(|| OifError::invalid_argument("y is null"))?;
            one_dimensional(a, "y")?;
            s.integrate(t, a.as_mut_slice())
        })
    }

    /// # Safety
    /// `session` from [`create`]. The string is valid until the next call.
    pub unsafe fn last_error<M: IvpMethod>(session: *mut c_void) -> *const c_char {
        match (session as *const Session<M>).as_ref() {
            Some(s) => s.last_error.as_ptr(),
            None => std::ptr::null(),
        }
    }
}

/// Exports the IVP entry points `<prefix>_create`, `<prefix>_destroy`,
/// `<prefix>_set_initial_value`, ..., `<prefix>_last_error` for an
/// [`IvpMethod`].
///
/// ```ignore
/// oif_core::export_ivp_adapter!(oif_ivp, oif_core::ode::Dopri5<f64>);
/// ```
#[macro_export]
macro_rules! export_ivp_adapter {
    ($prefix:ident, $method:ty) => {
        $crate::ivp::adapter::paste::paste! {
            #[no_mangle]
            pub extern "C" fn [<$prefix _create>]() -> *mut ::std::ffi::c_void {
                $crate::ivp::adapter::ffi::create::<$method>()
            }

            #[no_mangle]
            pub unsafe extern "C" fn [<$prefix _destroy>](s: *mut ::std::ffi::c_void) -> i32 {
                $crate::ivp::adapter::ffi::destroy::<$method>(s)
            }

            #[no_mangle]
            pub unsafe extern "C" fn [<$prefix _set_initial_value>](
                s: *mut ::std::ffi::c_void,
                y0: *mut $crate::marshal::ArrayF64,
                t0: f64,
            ) -> i32 {
                $crate::ivp::adapter::ffi::set_initial_value::<$method>(s, y0, t0)
            }

            #[no_mangle]
            pub unsafe extern "C" fn [<$prefix _set_rhs_fn>](
                s: *mut ::std::ffi::c_void,
                cb: *mut $crate::marshal::Callback,
            ) -> i32 {
                $crate::ivp::adapter::ffi::set_rhs_fn::<$method>(s, cb)
            }

            #[no_mangle]
            pub unsafe extern "C" fn [<$prefix _set_tolerances>](
                s: *mut ::std::ffi::c_void,
                reltol: f64,
                abstol: f64,
            ) -> i32 {
                $crate::ivp::adapter::ffi::set_tolerances::<$method>(s, reltol, abstol)
            }

            #[no_mangle]
            pub unsafe extern "C" fn [<$prefix _set_user_data>](
                s: *mut ::std::ffi::c_void,
                user_data: *mut ::std::ffi::c_void,
            ) -> i32 {
                $crate::ivp::adapter::ffi::set_user_data::<$method>(s, user_data)
            }

            #[no_mangle]
            pub unsafe extern "C" fn [<$prefix _set_integrator>](
                s: *mut ::std::ffi::c_void,
                name: *const ::std::ffi::c_char,
                params: *mut $crate::marshal::OifConfigDict,
            ) -> i32 {
                $crate::ivp::adapter::ffi::set_integrator::<$method>(s, name, params)
            }

            #[no_mangle]
            pub unsafe extern "C" fn [<$prefix _integrate>](
                s: *mut ::std::ffi::c_void,
                t: f64,
                y: *mut $crate::marshal::ArrayF64,
            ) -> i32 {
                $crate::ivp::adapter::ffi::integrate::<$method>(s, t, y)
            }

            #[no_mangle]
            pub unsafe extern "C" fn [<$prefix _last_error>](
                s: *mut ::std::ffi::c_void,
            ) -> *const ::std::ffi::c_char {
                $crate::ivp::adapter::ffi::last_error::<$method>(s)
            }
        }
    };
}

#[doc(hidden)]
pub use paste;
