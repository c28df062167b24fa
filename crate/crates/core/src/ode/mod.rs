//! Time integrators backing the bundled IVP implementations.
//!
//! The kernels are generic over [`Scalar`]; the plugin boundary itself is
//! `f64`-only.

mod dopri5;
mod rk4;

pub use dopri5::{
    dopri5_step, initial_step_heuristic, Dopri5, Dopri5Config, Dopri5Stats, Tableau, DOPRI5_TABLEAU,
};
pub use rk4::{Rk4, Rk4Config};

use crate::scalar::Scalar;

/// Right-hand side `f(t, y)` of `y' = f(t, y)`, written into `ydot`.
///
/// Any `FnMut(t, &[F], &mut [F])` closure is an infallible right-hand side;
/// a nonzero `Err` status aborts the integration.
pub trait Rhs<F> {
    fn eval(&mut self, t: F, y: &[F], ydot: &mut [F]) -> Result<(), i32>;
}

impl<F, G> Rhs<F> for G
where
    G: FnMut(F, &[F], &mut [F]),
{
    fn eval(&mut self, t: F, y: &[F], ydot: &mut [F]) -> Result<(), i32> {
        self(t, y, ydot);
        Ok(())
    }
}

/// Adapts a closure returning an integer status.
pub struct FallibleRhs<G>(pub G);

impl<F, G> Rhs<F> for FallibleRhs<G>
where
    G: FnMut(F, &[F], &mut [F]) -> i32,
{
    fn eval(&mut self, t: F, y: &[F], ydot: &mut [F]) -> Result<(), i32> {
        match (self.0)(t, y, ydot) {
            0 => Ok(()),
            s => Err(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("{method}: step budget of {max_steps} steps exhausted at t={t}; problem is probably stiff")]
    MaxSteps {
        method: &'static str,
        max_steps: usize,
        t: f64,
    },
    #[error("{method}: problem is probably stiff ({reason}) at t={t}")]
    Stiff {
        method: &'static str,
        reason: String,
        t: f64,
    },
    #[error("{method}: right-hand side returned status {status} at t={t}")]
    Rhs {
        method: &'static str,
        status: i32,
        t: f64,
    },
    #[error("{method}: target time {target} is before the current time {t}")]
    Backwards {
        method: &'static str,
        target: f64,
        t: f64,
    },
}

/// A one-step integrator holding its own state `(t, y)`.
pub trait OdeSolver<F: Scalar> {
    /// Algorithm name as accepted by `set_integrator`.
    const NAME: &'static str;

    /// Starts over from `(t0, y0)`, discarding progress and cached stages.
    fn reset(&mut self, t0: F, y0: &[F]);

    fn set_tolerances(&mut self, reltol: F, abstol: F);

    /// Drops cached right-hand-side values (the function or its context changed).
    fn invalidate(&mut self);

    /// Advances the state to exactly `t_target`.
    fn integrate_to<R: Rhs<F> + ?Sized>(&mut self, t_target: F, rhs: &mut R) -> Result<(), SolverError>;

    fn time(&self) -> F;

    fn state(&self) -> &[F];
}

pub(crate) fn as_f64<F: Scalar>(x: F) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
