//! Cost of one Burgers right-hand side evaluation, called directly and
//! through the boundary callback signature with array records.

use std::ffi::c_void;
use std::time::Instant;

use oif_core::marshal::view_array_f64;
use oif_core::{ArrayF64, Callback, OifError};

use crate::problems::Burgers;
use crate::stats::{stats, RuntimeSample};

struct Context {
    burgers: Burgers<f64>,
    dx: f64,
}

unsafe extern "C" fn burgers_c(_t: f64, y: *mut ArrayF64, ydot: *mut ArrayF64, ud: *mut c_void) -> i32 {
    let ctx = &mut *(ud as *mut Context);
    ctx.burgers.rhs_with(ctx.dx, (*y).as_slice(), (*ydot).as_mut_slice());
    0
}

#[derive(Clone, Copy, Debug)]
pub struct MicroResult {
    /// Seconds per evaluation.
    pub direct: RuntimeSample<f64>,
    pub boundary: RuntimeSample<f64>,
}

pub fn rhs_micro(n: usize, evals: usize, repeats: usize) -> Result<MicroResult, OifError> {
    if n == 0 || evals == 0 {
        return Err(OifError::invalid_argument("n and evals must be positive"));
    }
    let mut burgers = Burgers::<f64>::new(n);
    let mut u = burgers.initial_condition();
    let mut udot = vec![0.0; n];
    let mut ctx = Context {
        burgers: Burgers::new(n),
        dx: burgers.dx(),
    };
    let cb = Callback::native(burgers_c);
    let f = cb.fn_p_c.expect("native callback");

    let mut direct = Vec::with_capacity(repeats);
    let mut boundary = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        for _ in 0..evals {
            burgers.rhs(0.0, &u, &mut udot);
            std::hint::black_box(&mut udot);
        }
        direct.push(start.elapsed().as_secs_f64() / evals as f64);

        let dims = [n as isize];
        let yv = view_array_f64(&mut u, &dims)?;
        let dv = view_array_f64(&mut udot, &dims)?;
        let ud = &mut ctx as *mut Context as *mut c_void;
        let start = Instant::now();
        for _ in 0..evals {
            let rc = unsafe { f(0.0, yv.as_raw_ptr(), dv.as_raw_ptr(), std::hint::black_box(ud)) };
            if rc != 0 {
                return Err(OifError::plugin_failure(format!("right-hand side returned {rc}")));
            }
        }
        boundary.push(start.elapsed().as_secs_f64() / evals as f64);
    }
    Ok(MicroResult {
        direct: stats(&direct)?,
        boundary: stats(&boundary)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_forms_compute_the_same_derivative() {
        let n = 50;
        let mut b = Burgers::<f64>::new(n);
        let mut u = b.initial_condition();
        let mut direct = vec![0.0; n];
        b.rhs(0.0, &u, &mut direct);

        let mut through = vec![0.0; n];
        let mut ctx = Context { burgers: Burgers::new(n), dx: b.dx() };
        let yv = view_array_f64(&mut u, &[n as isize]).unwrap();
        let dv = view_array_f64(&mut through, &[n as isize]).unwrap();
        let rc = unsafe { burgers_c(0.0, yv.as_raw_ptr(), dv.as_raw_ptr(), &mut ctx as *mut _ as *mut c_void) };
        drop((yv, dv));
        assert_eq!(rc, 0);
        assert_eq!(direct, through);
    }

    #[test]
    fn needs_work_to_time() {
        assert_eq!(rhs_micro(0, 1, 2).unwrap_err().code(), -1);
        let r = rhs_micro(16, 10, 2).unwrap();
        assert!(r.direct.mean > 0.0 && r.boundary.mean > 0.0);
    }
}
