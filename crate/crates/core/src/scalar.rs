//! Scalar abstraction for the numerical kernels.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating-point type the ODE kernels are generic over (`f32` or `f64`).
pub trait Scalar: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Converts a literal constant.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in the scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
