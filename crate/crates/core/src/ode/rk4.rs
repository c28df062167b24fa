use super::{as_f64, OdeSolver, Rhs, SolverError};
use crate::scalar::Scalar;

const NAME: &str = "rk4";

#[derive(Clone, Debug, PartialEq)]
pub struct Rk4Config<F> {
    /// Nominal step; each `integrate_to` call uses `Δt / ceil(Δt / h)`.
    pub h: F,
}

impl<F: Scalar> Default for Rk4Config<F> {
    fn default() -> Self {
        Rk4Config { h: F::lit(1e-3) }
    }
}

/// Classic fourth-order Runge–Kutta with a fixed step.
///
/// Every call to `integrate_to` splits the interval into equal steps, so two
/// calls whose targets are multiples of `h` give the same result as one call.
pub struct Rk4<F> {
    config: Rk4Config<F>,
    t: F,
    y: Vec<F>,
    k: [Vec<F>; 4],
    tmp: Vec<F>,
    steps: usize,
}

impl<F: Scalar> Default for Rk4<F> {
    fn default() -> Self {
        Self::new(Rk4Config::default())
    }
}

impl<F: Scalar> Rk4<F> {
    pub fn new(config: Rk4Config<F>) -> Self {
        Rk4 {
            config,
            t: F::zero(),
            y: Vec::new(),
            k: std::array::from_fn(|_| Vec::new()),
            tmp: Vec::new(),
            steps: 0,
        }
    }

    pub fn config(&self) -> &Rk4Config<F> {
        &self.config
    }

    pub fn set_config(&mut self, config: Rk4Config<F>) {
        self.config = config;
    }

    /// Steps taken since the last reset.
    pub fn steps(&self) -> usize {
        self.steps
    }

    fn eval<R: Rhs<F> + ?Sized>(rhs: &mut R, t: F, y: &[F], out: &mut [F]) -> Result<(), SolverError> {
        rhs.eval(t, y, out).map_err(|status| SolverError::Rhs {
            method: NAME,
            status,
            t: as_f64(t),
        })
    }

    fn step<R: Rhs<F> + ?Sized>(&mut self, t: F, h: F, rhs: &mut R) -> Result<(), SolverError> {
        let two = F::lit(2.0);
        let half = h / two;
        let [k1, k2, k3, k4] = &mut self.k;
        Self::eval(rhs, t, &self.y, k1)?;
        for ((o, &y), &k) in self.tmp.iter_mut().zip(&self.y).zip(k1.iter()) {
            *o = y + half * k;
        }
        Self::eval(rhs, t + half, &self.tmp, k2)?;
        for ((o, &y), &k) in self.tmp.iter_mut().zip(&self.y).zip(k2.iter()) {
            *o = y + half * k;
        }
        Self::eval(rhs, t + half, &self.tmp, k3)?;
        for ((o, &y), &k) in self.tmp.iter_mut().zip(&self.y).zip(k3.iter()) {
            *o = y + h * k;
        }
        Self::eval(rhs, t + h, &self.tmp, k4)?;
        let sixth = h / F::lit(6.0);
        for i in 0..self.y.len() {
            self.y[i] = self.y[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
        self.steps += 1;
        Ok(())
    }
}

impl<F: Scalar> OdeSolver<F> for Rk4<F> {
    const NAME: &'static str = NAME;

    fn reset(&mut self, t0: F, y0: &[F]) {
        let n = y0.len();
        self.t = t0;
        self.y = y0.to_vec();
        self.k = std::array::from_fn(|_| vec![F::zero(); n]);
        self.tmp = vec![F::zero(); n];
        self.steps = 0;
    }

    /// Fixed-step method: tolerances have no effect.
    fn set_tolerances(&mut self, _reltol: F, _abstol: F) {}

    fn invalidate(&mut self) {}

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
        let span = t_target - self.t;
        // shave a relative 1e-12 so spans that are multiples of h up to
        // rounding do not gain an extra sliver step
        let ratio = span / self.config.h * (F::one() - F::lit(1e-12));
        let n = ratio.ceil().max(F::one());
        let h = span / n;
        let n = n.to_usize().unwrap_or(usize::MAX);
        let t0 = self.t;
        for i in 0..n {
            let t = t0 + F::from_usize(i).expect("step index") * h;
            self.step(t, h, rhs)?;
        }
        self.t = t_target;
        Ok(())
    }

    fn time(&self) -> F {
        self.t
    }

    fn state(&self) -> &[F] {
        &self.y
    }
}
