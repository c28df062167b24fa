//! IVP implementation "dopri5c": adaptive Dormand–Prince 5(4).
//!
//! Integrator name `dopri5`; parameters `max_steps`, `h_init`, `h_max`,
//! `safety`, `fac_min`, `fac_max`, `fixed_step`.

oif_core::export_ivp_adapter!(oif_ivp, oif_core::ode::Dopri5<f64>);
