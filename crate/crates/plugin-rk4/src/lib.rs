//! IVP implementation "rk4": classic Runge–Kutta with a fixed step.
//!
//! Integrator name `rk4`; parameter `h`, the nominal step (default 1e-3).
//! Tolerances are accepted and ignored.

oif_core::export_ivp_adapter!(oif_ivp, oif_core::ode::Rk4<f64>);
