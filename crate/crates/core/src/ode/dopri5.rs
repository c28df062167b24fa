use super::{as_f64, OdeSolver, Rhs, SolverError};
use crate::scalar::Scalar;

const NAME: &str = "dopri5";

/// Butcher tableau of an explicit embedded pair with seven stages.
#[derive(Clone, Debug)]
pub struct Tableau<F> {
    pub c: [F; 7],
    /// Strictly lower-triangular stage matrix; row `s` holds `a[s][0..s]`.
    pub a: [[F; 6]; 7],
    /// Fifth-order weights (identical to the last stage row).
    pub b5: [F; 7],
    /// Embedded fourth-order weights.
    pub b4: [F; 7],
    /// `b5 - b4`, used for the local error estimate.
    pub e: [F; 7],
}

/// Dormand–Prince 5(4) coefficients.
pub const DOPRI5_TABLEAU: Tableau<f64> = Tableau {
    c: [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0],
    a: [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ],
    b5: [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0],
    b4: [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ],
    e: [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ],
};

impl<F: Scalar> Tableau<F> {
    pub fn dopri5() -> Self {
        let t = &DOPRI5_TABLEAU;
        let conv7 = |v: &[f64; 7]| v.map(F::lit);
        Tableau {
            c: conv7(&t.c),
            a: t.a.map(|row| row.map(F::lit)),
            b5: conv7(&t.b5),
            b4: conv7(&t.b4),
            e: conv7(&t.e),
        }
    }
}

/// Step-control parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Dopri5Config<F> {
    pub reltol: F,
    pub abstol: F,
    /// First step size; chosen by [`initial_step_heuristic`] when `None`.
    pub h_init: Option<F>,
    pub h_max: Option<F>,
    /// Step attempts allowed per `integrate_to` call.
    pub max_steps: usize,
    pub safety: F,
    pub fac_min: F,
    pub fac_max: F,
    /// Take every step with `h_init` and accept it unconditionally.
    pub fixed_step: bool,
}

impl<F: Scalar> Default for Dopri5Config<F> {
    fn default() -> Self {
        Dopri5Config {
            reltol: F::lit(1e-6),
            abstol: F::lit(1e-12),
            h_init: None,
            h_max: None,
            max_steps: 100_000,
            safety: F::lit(0.9),
            fac_min: F::lit(0.2),
            fac_max: F::lit(10.0),
            fixed_step: false,
        }
    }
}

impl<F: Scalar> Dopri5Config<F> {
    pub fn validate(&self) -> Result<(), String> {
        let one = F::one();
        if !(F::zero() < self.safety && self.safety < one) {
            return Err(format!("safety must lie in (0, 1), got {}", self.safety));
        }
        if !(F::zero() < self.fac_min && self.fac_min < one) {
            return Err(format!("fac_min must lie in (0, 1), got {}", self.fac_min));
        }
        if !(self.fac_max > one && self.fac_max.is_finite()) {
            return Err(format!("fac_max must be finite and exceed 1, got {}", self.fac_max));
        }
        if self.max_steps == 0 {
            return Err("max_steps must be positive".into());
        }
        for (name, v) in [("h_init", self.h_init), ("h_max", self.h_max)] {
            if let Some(v) = v {
                if !(v > F::zero() && v.is_finite()) {
                    return Err(format!("{name} must be positive and finite, got {v}"));
                }
            }
        }
        if self.fixed_step && self.h_init.is_none() {
            return Err("fixed-step mode needs h_init".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Dopri5Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// Scaled RMS norm `sqrt(mean((v_i / sc_i)^2))` with `sc_i = atol + rtol * max(|a_i|, |b_i|)`.
fn scaled_rms<F: Scalar>(v: impl Iterator<Item = (F, F, F)>, n: usize, reltol: F, abstol: F) -> F {
    if n == 0 {
        return F::zero();
    }
    let sum = v.fold(F::zero(), |acc, (x, a, b)| {
        let sc = abstol + reltol * a.abs().max(b.abs());
        let r = x / sc;
        acc + r * r
    });
    (sum / F::from_usize(n).expect("dimension fits the scalar type")).sqrt()
}

/// Stage storage for one step of size `h` from `(t, y)`.
struct Workspace<F> {
    k: [Vec<F>; 7],
    ystage: Vec<F>,
    y5: Vec<F>,
}

impl<F: Scalar> Workspace<F> {
    fn new(n: usize) -> Self {
        Workspace {
            k: std::array::from_fn(|_| vec![F::zero(); n]),
            ystage: vec![F::zero(); n],
            y5: vec![F::zero(); n],
        }
    }

    /// Runs stages 2..=7 given `k[0] = f(t, y)`; leaves the fifth-order
    /// solution in `y5`, `f(t + h, y5)` in `k[6]`, and returns the error norm.
    #[allow(clippy::too_many_arguments)]
    fn step<R: Rhs<F> + ?Sized>(
        &mut self,
        tab: &Tableau<F>,
        t: F,
        y: &[F],
        h: F,
        reltol: F,
        abstol: F,
        rhs: &mut R,
    ) -> Result<F, SolverError> {
        let n = y.len();
        for s in 1..7 {
            let row = &tab.a[s];
            let (done, rest) = self.k.split_at_mut(s);
            for i in 0..n {
                // last stage first: in this order the fifth-order weights
                // sum to exactly one, so constant fields are integrated exactly
                let mut acc = F::zero();
                for (j, kj) in done.iter().enumerate().rev() {
                    acc = acc + row[j] * kj[i];
                }
                self.ystage[i] = y[i] + h * acc;
            }
            let ts = if s >= 5 { t + h } else { t + tab.c[s] * h };
            rhs.eval(ts, &self.ystage, &mut rest[0]).map_err(|status| SolverError::Rhs {
                method: NAME,
                status,
                t: as_f64(ts),
            })?;
            if s == 6 {
                // the last stage is evaluated at the fifth-order solution
                self.y5.copy_from_slice(&self.ystage);
            }
        }
        let k = &self.k;
        let err = (0..n).map(|i| {
            let mut acc = F::zero();
            for (j, kj) in k.iter().enumerate() {
                acc = acc + tab.e[j] * kj[i];
            }
            (h * acc, y[i], self.y5[i])
        });
        Ok(scaled_rms(err, n, reltol, abstol))
    }
}

/// One Dormand–Prince step from `(t, y)` with step `h`.
///
/// Returns the fifth-order candidate and the scaled error estimate. The
/// candidate is not accepted or rejected here.
pub fn dopri5_step<F: Scalar, R: Rhs<F> + ?Sized>(
    t: F,
    y: &[F],
    h: F,
    rhs: &mut R,
    config: &Dopri5Config<F>,
) -> Result<(Vec<F>, F), SolverError> {
    let tab = Tableau::dopri5();
    let mut ws = Workspace::new(y.len());
    rhs.eval(t, y, &mut ws.k[0]).map_err(|status| SolverError::Rhs {
        method: NAME,
        status,
        t: as_f64(t),
    })?;
    let err = ws.step(&tab, t, y, h, config.reltol, config.abstol, rhs)?;
    Ok((ws.y5, err))
}

/// Starting step size from the usual `‖y‖ / ‖f‖` scaling with one trial
/// Euler step. Returns `1e-6` when `f(t0, y0)` vanishes.
pub fn initial_step_heuristic<F: Scalar, R: Rhs<F> + ?Sized>(
    t0: F,
    y0: &[F],
    rhs: &mut R,
    reltol: F,
    abstol: F,
) -> Result<F, SolverError> {
    let mut f0 = vec![F::zero(); y0.len()];
    rhs.eval(t0, y0, &mut f0).map_err(|status| SolverError::Rhs {
        method: NAME,
        status,
        t: as_f64(t0),
    })?;
    initial_step_from(t0, y0, &f0, rhs, reltol, abstol)
}

fn initial_step_from<F: Scalar, R: Rhs<F> + ?Sized>(
    t0: F,
    y0: &[F],
    f0: &[F],
    rhs: &mut R,
    reltol: F,
    abstol: F,
) -> Result<F, SolverError> {
    let fallback = F::lit(1e-6);
    let n = y0.len();
    if f0.iter().all(|v| v.is_zero()) {
        return Ok(fallback);
    }
    let norm = |v: &[F]| scaled_rms(v.iter().zip(y0).map(|(&x, &y)| (x, y, y)), n, reltol, abstol);
    let d0 = norm(y0);
    let d1 = norm(f0);
    let small = F::lit(1e-5);
    let h0 = if d0 < small || d1 < small {
        fallback
    } else {
        F::lit(0.01) * d0 / d1
    };
    let y1: Vec<F> = y0.iter().zip(f0).map(|(&y, &f)| y + h0 * f).collect();
    let mut f1 = vec![F::zero(); n];
    rhs.eval(t0 + h0, &y1, &mut f1).map_err(|status| SolverError::Rhs {
        method: NAME,
        status,
        t: as_f64(t0 + h0),
    })?;
    let diff: Vec<F> = f1.iter().zip(f0).map(|(&a, &b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= F::lit(1e-15) {
        fallback.max(h0 * F::lit(1e-3))
    } else {
        (F::lit(0.01) / dmax).powf(F::lit(0.2))
    };
    let h = (F::lit(100.0) * h0).min(h1);
    Ok(if h.is_finite() && h > F::zero() { h } else { fallback })
}

/// Adaptive Dormand–Prince 5(4) integrator with first-same-as-last reuse.
pub struct Dopri5<F> {
    config: Dopri5Config<F>,
    tab: Tableau<F>,
    t: F,
    y: Vec<F>,
    /// Step size proposed for the next attempt.
    h: Option<F>,
    /// `k[0]` holds `f(t, y)` when set.
    fsal_valid: bool,
    ws: Workspace<F>,
    stats: Dopri5Stats,
}

impl<F: Scalar> Default for Dopri5<F> {
    fn default() -> Self {
        Self::new(Dopri5Config::default())
    }
}

impl<F: Scalar> Dopri5<F> {
    pub fn new(config: Dopri5Config<F>) -> Self {
        Dopri5 {
            config,
            tab: Tableau::dopri5(),
            t: F::zero(),
            y: Vec::new(),
            h: None,
            fsal_valid: false,
            ws: Workspace::new(0),
            stats: Dopri5Stats::default(),
        }
    }

    pub fn config(&self) -> &Dopri5Config<F> {
        &self.config
    }

    /// Replaces the controller settings; the next step re-derives its size.
    pub fn set_config(&mut self, config: Dopri5Config<F>) {
        self.config = config;
        self.h = None;
    }

    pub fn stats(&self) -> Dopri5Stats {
        self.stats
    }

    fn next_factor(&self, err: F) -> F {
        if err.is_zero() {
            return self.config.fac_max;
        }
        let f = self.config.safety * err.powf(F::lit(-0.2));
        f.max(self.config.fac_min).min(self.config.fac_max)
    }
}

impl<F: Scalar> OdeSolver<F> for Dopri5<F> {
    const NAME: &'static str = NAME;

    fn reset(&mut self, t0: F, y0: &[F]) {
        self.t = t0;
        self.y.clear();
        self.y.extend_from_slice(y0);
        self.h = None;
        self.fsal_valid = false;
        if self.ws.ystage.len() != y0.len() {
            self.ws = Workspace::new(y0.len());
        }
        self.stats = Dopri5Stats::default();
    }

    fn set_tolerances(&mut self, reltol: F, abstol: F) {
        self.config.reltol = reltol;
        self.config.abstol = abstol;
        self.h = None;
    }

    fn invalidate(&mut self) {
        self.fsal_valid = false;
    }

    fn integrate_to<R: Rhs<F> + ?Sized>(&mut self, t_target: F, rhs: &mut R) -> Result<(), SolverError> {
        if t_target < self.t {
            return Err(SolverError::Backwards {
                method: NAME,
                target: as_f64(t_target),
                t: as_f64(self.t),
            });
        }
        if t_target == self.t {
            return Ok(());
        }
        let cfg = self.config.clone();
        if !self.fsal_valid {
            rhs.eval(self.t, &self.y, &mut self.ws.k[0]).map_err(|status| SolverError::Rhs {
                method: NAME,
                status,
                t: as_f64(self.t),
            })?;
            self.stats.rhs_evals += 1;
            self.fsal_valid = true;
        }
        let mut h = match (self.h, cfg.h_init) {
            (Some(h), _) => h,
            (None, Some(h)) => h,
            (None, None) => {
                let f0 = self.ws.k[0].clone();
                self.stats.rhs_evals += 1;
                initial_step_from(self.t, &self.y, &f0, rhs, cfg.reltol, cfg.abstol)?
            }
        };
        let h_max = cfg.h_max.unwrap_or_else(F::infinity);
        let underflow = F::lit(16.0) * F::epsilon();
        let mut attempts = 0usize;
        let mut reject_streak = 0usize;
        loop {
            if attempts >= cfg.max_steps {
                return Err(SolverError::MaxSteps {
                    method: NAME,
                    max_steps: cfg.max_steps,
                    t: as_f64(self.t),
                });
            }
            if cfg.fixed_step {
                h = cfg.h_init.expect("validated fixed-step config");
            }
            h = h.min(h_max);
            let remaining = t_target - self.t;
            let last = self.t + F::lit(1.01) * h >= t_target;
            let h_step = if last { remaining } else { h };
            if !last && h_step <= underflow * self.t.abs() {
                return Err(SolverError::Stiff {
                    method: NAME,
                    reason: format!("step size {} underflowed", h_step),
                    t: as_f64(self.t),
                });
            }
            let err = self
                .ws
                .step(&self.tab, self.t, &self.y, h_step, cfg.reltol, cfg.abstol, rhs)?;
            self.stats.rhs_evals += 6;
            attempts += 1;
            if cfg.fixed_step || err <= F::one() {
                self.stats.accepted += 1;
                reject_streak = 0;
                self.t = if last { t_target } else { self.t + h_step };
                std::mem::swap(&mut self.y, &mut self.ws.y5);
                self.ws.k.swap(0, 6);
                h = if cfg.fixed_step { h } else { h_step * self.next_factor(err) };
                self.h = Some(h);
                if last {
                    return Ok(());
                }
            } else {
                self.stats.rejected += 1;
                reject_streak += 1;
                if reject_streak >= 50 {
                    return Err(SolverError::Stiff {
                        method: NAME,
                        reason: format!("{reject_streak} consecutive step rejections"),
                        t: as_f64(self.t),
                    });
                }
                let fac = if err.is_nan() {
                    cfg.fac_min
                } else {
                    self.next_factor(err).min(F::one())
                };
                h = h_step * fac;
                self.h = Some(h);
            }
        }
    }

    fn time(&self) -> F {
        self.t
    }

    fn state(&self) -> &[F] {
        &self.y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(_t: f64, y: &[f64], ydot: &mut [f64]) {
        for (d, v) in ydot.iter_mut().zip(y) {
            *d = -v;
        }
    }

    #[test]
    fn tableau_row_sums_match_nodes() {
        let t = &DOPRI5_TABLEAU;
        for s in 0..7 {
            let row: f64 = t.a[s].iter().sum();
            assert!((row - t.c[s]).abs() <= 1e-15, "row {s}: {row} vs {}", t.c[s]);
        }
        assert!((t.b5.iter().sum::<f64>() - 1.0).abs() <= 1e-15);
        assert!((t.b4.iter().sum::<f64>() - 1.0).abs() <= 1e-15);
        assert!(t.e.iter().sum::<f64>().abs() <= 1e-15);
        for i in 0..7 {
            assert!((t.b5[i] - t.b4[i] - t.e[i]).abs() <= 1e-15);
        }
        // FSAL: the last stage row equals the fifth-order weights
        for j in 0..6 {
            assert_eq!(t.a[6][j], t.b5[j]);
        }
    }

    #[test]
    fn tableau_order_conditions() {
        let t = &DOPRI5_TABLEAU;
        let a = |i: usize, j: usize| if j < 6 { t.a[i][j] } else { 0.0 };
        let c = &t.c;
        let dot = |w: &[f64; 7], f: &dyn Fn(usize) -> f64| (0..7).map(|i| w[i] * f(i)).sum::<f64>();
        let ac = |i: usize| (0..7).map(|j| a(i, j) * c[j]).sum::<f64>();
        let ac2 = |i: usize| (0..7).map(|j| a(i, j) * c[j] * c[j]).sum::<f64>();
        let aac = |i: usize| (0..7).map(|j| a(i, j) * ac(j)).sum::<f64>();
        let checks: Vec<(&str, f64, f64)> = vec![
            ("b c", dot(&t.b5, &|i| c[i]), 1.0 / 2.0),
            ("b c^2", dot(&t.b5, &|i| c[i].powi(2)), 1.0 / 3.0),
            ("b a c", dot(&t.b5, &ac), 1.0 / 6.0),
            ("b c^3", dot(&t.b5, &|i| c[i].powi(3)), 1.0 / 4.0),
            ("b c a c", dot(&t.b5, &|i| c[i] * ac(i)), 1.0 / 8.0),
            ("b a c^2", dot(&t.b5, &ac2), 1.0 / 12.0),
            ("b a a c", dot(&t.b5, &aac), 1.0 / 24.0),
            ("b c^4", dot(&t.b5, &|i| c[i].powi(4)), 1.0 / 5.0),
            ("b4 c", dot(&t.b4, &|i| c[i]), 1.0 / 2.0),
            ("b4 c^2", dot(&t.b4, &|i| c[i].powi(2)), 1.0 / 3.0),
            ("b4 a c", dot(&t.b4, &ac), 1.0 / 6.0),
            ("b4 c^3", dot(&t.b4, &|i| c[i].powi(3)), 1.0 / 4.0),
            ("b4 a a c", dot(&t.b4, &aac), 1.0 / 24.0),
        ];
        for (name, got, want) in checks {
            assert!((got - want).abs() <= 1e-15, "{name}: {got} vs {want}");
        }
    }

    #[test]
    fn step_zero_field() {
        let mut rhs = |_t: f64, _y: &[f64], d: &mut [f64]| d.fill(0.0);
        let (y5, err) = dopri5_step(0.0, &[1.0, -2.0], 0.1, &mut rhs, &Dopri5Config::default()).unwrap();
        assert_eq!(y5, vec![1.0, -2.0]);
        assert_eq!(err, 0.0);
    }

    #[test]
    fn step_constant_field_is_exact() {
        let mut rhs = |_t: f64, _y: &[f64], d: &mut [f64]| d.fill(1.0);
        let (y5, err) = dopri5_step(0.0, &[0.0, 3.0], 0.5, &mut rhs, &Dopri5Config::default()).unwrap();
        assert_eq!(y5, vec![0.5, 3.5]);
        assert_eq!(err, 0.0, "err_norm {err}");
    }

    #[test]
    fn step_decay_matches_closed_form() {
        let (y5, err) = dopri5_step(0.0, &[1.0], 0.1, &mut decay, &Dopri5Config::default()).unwrap();
        assert!((y5[0] - (-0.1f64).exp()).abs() <= 1e-9);
        assert!(err > 0.0);
    }

    #[test]
    fn step_in_single_precision() {
        let mut rhs = |_t: f32, y: &[f32], d: &mut [f32]| d[0] = -y[0];
        let cfg = Dopri5Config::<f32>::default();
        let (y5, _) = dopri5_step(0.0f32, &[1.0f32], 0.1, &mut rhs, &cfg).unwrap();
        assert!((y5[0] - (-0.1f32).exp()).abs() <= 1e-6);
    }

    #[test]
    fn heuristic_zero_derivative_falls_back() {
        let mut rhs = |_t: f64, _y: &[f64], d: &mut [f64]| d.fill(0.0);
        assert_eq!(initial_step_heuristic(0.0, &[1.0], &mut rhs, 1e-6, 1e-12).unwrap(), 1e-6);
    }

    #[test]
    fn heuristic_decay_value() {
        let h = initial_step_heuristic(0.0, &[1.0], &mut decay, 1e-6, 1e-12).unwrap();
        // hand evaluation: d0 = d1 = 1/(1e-12 + 1e-6), h0 = 0.01,
        // d2 = |(-0.99) - (-1)| / sc / h0 < d1, h1 = (0.01 / d1)^(1/5)
        let sc = 1e-12 + 1e-6;
        let d1: f64 = 1.0 / sc;
        let expected = (0.01 / d1).powf(0.2);
        assert!((h - expected).abs() <= 1e-15, "{h} vs {expected}");
        assert!(h > 1e-5 && h < 1e-1);
    }

    #[test]
    fn heuristic_scale_invariant_for_linear_problem() {
        let h1 = initial_step_heuristic(0.0, &[1.0], &mut decay, 1e-6, 1e-12).unwrap();
        let h10 = initial_step_heuristic(0.0, &[10.0], &mut decay, 1e-6, 1e-12).unwrap();
        assert!(h10 / h1 < 2.0 && h1 / h10 < 2.0);
    }

    #[test]
    fn integrate_decay() {
        let mut s = Dopri5::<f64>::default();
        s.reset(0.0, &[1.0]);
        s.integrate_to(1.0, &mut decay).unwrap();
        assert_eq!(s.time(), 1.0);
        assert!((s.state()[0] - (-1.0f64).exp()).abs() <= 1e-4);
        let stats = s.stats();
        assert!(stats.accepted >= 3 && stats.rejected <= stats.accepted, "{stats:?}");
    }

    #[test]
    fn final_time_is_exact() {
        let mut s = Dopri5::<f64>::default();
        s.reset(0.1, &[1.0]);
        for target in [0.3, 0.7, 1.0 / 3.0 + 1.0, 2.9] {
            s.integrate_to(target, &mut decay).unwrap();
            assert_eq!(s.time().to_bits(), f64::to_bits(target));
        }
    }

    #[test]
    fn fsal_counts_six_evaluations_per_step() {
        let mut s = Dopri5::<f64>::new(Dopri5Config {
            h_init: Some(0.1),
            fixed_step: true,
            ..Default::default()
        });
        s.reset(0.0, &[1.0]);
        s.integrate_to(1.0, &mut decay).unwrap();
        let st = s.stats();
        assert_eq!(st.accepted, 10);
        assert_eq!(st.rhs_evals, 1 + 6 * st.accepted);
    }

    #[test]
    fn backwards_target_rejected() {
        let mut s = Dopri5::<f64>::default();
        s.reset(1.0, &[1.0]);
        assert!(matches!(s.integrate_to(0.5, &mut decay), Err(SolverError::Backwards { .. })));
        assert!(s.integrate_to(1.0, &mut decay).is_ok());
    }

    #[test]
    fn rhs_failure_carries_status() {
        let mut bad = super::super::FallibleRhs(|_t: f64, _y: &[f64], _d: &mut [f64]| 17);
        let mut s = Dopri5::<f64>::default();
        s.reset(0.0, &[1.0]);
        match s.integrate_to(1.0, &mut bad) {
            Err(SolverError::Rhs { status, .. }) => assert_eq!(status, 17),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn budget_exhaustion_on_stiff_problem() {
        let mut vdp = |_t: f64, y: &[f64], d: &mut [f64]| {
            d[0] = y[1];
            d[1] = 1000.0 * (1.0 - y[0] * y[0]) * y[1] - y[0];
        };
        let mut s = Dopri5::<f64>::default();
        s.reset(0.0, &[2.0, 0.0]);
        let e = s.integrate_to(3000.0, &mut vdp).unwrap_err();
        assert!(matches!(e, SolverError::MaxSteps { .. } | SolverError::Stiff { .. }), "{e:?}");
        assert!(e.to_string().contains("stiff"));
    }

    #[test]
    fn config_validation() {
        let ok = Dopri5Config::<f64>::default();
        assert!(ok.validate().is_ok());
        assert!(Dopri5Config { safety: 1.0, ..ok.clone() }.validate().is_err());
        assert!(Dopri5Config { fac_min: 0.0, ..ok.clone() }.validate().is_err());
        assert!(Dopri5Config { fac_max: 1.0, ..ok.clone() }.validate().is_err());
        assert!(Dopri5Config { max_steps: 0, ..ok.clone() }.validate().is_err());
        assert!(Dopri5Config { fixed_step: true, ..ok.clone() }.validate().is_err());
        assert!(Dopri5Config { h_max: Some(-1.0), ..ok }.validate().is_err());
    }
}
