//! Language-agnostic calling of numerical solvers.
//!
//! A user program asks for an implementation of an interface by name; the
//! [`dispatch`] registry finds its manifest, hands it to a bridge (for
//! native shared libraries, [`bridge::PluginBridge`]) and routes calls as
//! type-tagged argument lists ([`marshal`]). Arrays are passed by reference
//! and never copied on the way.
//!
//! [`ivp::Ivp`] is the typed front end for initial-value problems.
//! [`ode`] holds the integrators behind the bundled implementations,
//! generic over the scalar type; the boundary itself is `f64`.

pub mod bridge;
pub mod dispatch;
pub mod interface;
pub mod ivp;
pub mod marshal;
pub mod ode;
pub mod scalar;
pub mod status;

pub use dispatch::{Dispatch, ImplHandle};
pub use ivp::Ivp;
pub use marshal::{Arg, ArrayF64, Callback, ConfigDict, ConfigValue, PackedArgs, TypeTag, UserData};
pub use scalar::Scalar;
pub use status::{OifError, Result, Status};

pub type Dopri5F64 = ode::Dopri5<f64>;
pub type Dopri5F32 = ode::Dopri5<f32>;
pub type Rk4F64 = ode::Rk4<f64>;
pub type Rk4F32 = ode::Rk4<f32>;
