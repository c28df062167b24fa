//! Benchmark problems: inviscid Burgers by finite volumes and Van der Pol.

use std::f64::consts::PI;

use oif_core::Scalar;

/// Global Lax–Friedrichs flux for `f(u) = u²/2`:
/// `((a²/2 + b²/2) - α (b - a)) / 2`.
#[inline]
pub fn lf_flux<F: Scalar>(a: F, b: F, alpha: F) -> F {
    let half = F::lit(0.5);
    (half * a * a + half * b * b - alpha * (b - a)) * half
}

/// `u_t + (u²/2)_x = 0` on `[0, 2]`, periodic, `N` cells of width `2/N`.
#[derive(Clone, Debug)]
pub struct Burgers<F> {
    n: usize,
    dx: F,
    flux: Vec<F>,
}

impl<F: Scalar> Burgers<F> {
    pub const X_LEFT: f64 = 0.0;
    pub const X_RIGHT: f64 = 2.0;

    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "at least one cell");
        let dx = F::lit((Self::X_RIGHT - Self::X_LEFT) / n as f64);
        Burgers {
            n,
            dx,
            flux: vec![F::zero(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dx(&self) -> F {
        self.dx
    }

    /// Cell centres `x_i = (i + 1/2) dx`.
    pub fn grid(&self) -> Vec<F> {
        let dx = self.dx.to_f64().unwrap();
        (0..self.n).map(|i| F::lit(Self::X_LEFT + (i as f64 + 0.5) * dx)).collect()
    }

    /// `u_i(0) = 0.5 - 0.25 sin(π x_i)`.
    pub fn initial_condition(&self) -> Vec<F> {
        self.grid()
            .into_iter()
            .map(|x| F::lit(0.5 - 0.25 * (PI * x.to_f64().unwrap()).sin()))
            .collect()
    }

    /// Semi-discrete right-hand side with `dx` given explicitly (it arrives
    /// as user data on the interface path).
    pub fn rhs_with(&mut self, dx: F, u: &[F], udot: &mut [F]) {
        let n = u.len();
        debug_assert_eq!(udot.len(), n);
        if self.flux.len() != n {
            self.flux.resize(n, F::zero());
        }
        let alpha = u.iter().fold(F::zero(), |m, v| m.max(v.abs()));
        // flux[i] sits at x_{i+1/2}; the last one wraps to cell 0
        for i in 0..n - 1 {
            self.flux[i] = lf_flux(u[i], u[i + 1], alpha);
        }
        self.flux[n - 1] = lf_flux(u[n - 1], u[0], alpha);
        let inv_dx = F::one() / dx;
        udot[0] = -(self.flux[0] - self.flux[n - 1]) * inv_dx;
        for (d, f) in udot[1..].iter_mut().zip(self.flux.windows(2)) {
            *d = -(f[1] - f[0]) * inv_dx;
        }
    }

    pub fn rhs(&mut self, _t: F, u: &[F], udot: &mut [F]) {
        let dx = self.dx;
        self.rhs_with(dx, u, udot)
    }

    /// `Σ u_i dx`.
    pub fn mass(&self, u: &[F]) -> F {
        u.iter().fold(F::zero(), |s, &v| s + v) * self.dx
    }
}

/// `x'' - μ (1 - x²) x' + x = 0` as a first-order system, `y = [x, x']`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VanDerPol<F> {
    pub mu: F,
}

impl<F: Scalar> VanDerPol<F> {
    pub fn new(mu: F) -> Self {
        VanDerPol { mu }
    }

    /// `x(0) = 2`, `x'(0) = 0`.
    pub fn initial_condition(&self) -> Vec<F> {
        vec![F::lit(2.0), F::zero()]
    }

    pub fn rhs(&self, _t: F, y: &[F], ydot: &mut [F]) {
        ydot[0] = y[1];
        ydot[1] = self.mu * (F::one() - y[0] * y[0]) * y[1] - y[0];
    }
}
