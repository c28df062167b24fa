//! Timed runs of the benchmark problems through the interface (`oif`) or by
//! calling the integrator directly (`raw`).

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use oif_core::ivp::adapter::IvpMethod;
use oif_core::ode::{Dopri5, Rk4};
use oif_core::{ConfigDict, Ivp, OifError, Status, UserData};

use crate::problems::{Burgers, VanDerPol};
use crate::stats::{stats, RuntimeSample};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum UserPath {
    /// Through dispatch, the plugin bridge and the shared-library plugin.
    Oif,
    /// The same integrator code linked in and called directly.
    Raw,
}

impl UserPath {
    pub fn as_str(self) -> &'static str {
        match self {
            UserPath::Oif => "oif",
            UserPath::Raw => "raw",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Problem {
    Burgers { n: usize },
    Vdp { mu: f64 },
}

impl Problem {
    pub fn case_name(&self) -> &'static str {
        match self {
            Problem::Burgers { .. } => "burgers",
            Problem::Vdp { .. } => "vdp",
        }
    }

    pub fn param(&self) -> String {
        match self {
            Problem::Burgers { n } => n.to_string(),
            Problem::Vdp { mu } => mu.to_string(),
        }
    }

    pub fn initial_condition(&self) -> Vec<f64> {
        match *self {
            Problem::Burgers { n } => Burgers::<f64>::new(n).initial_condition(),
            Problem::Vdp { mu } => VanDerPol::new(mu).initial_condition(),
        }
    }

    /// The value passed to the right-hand side as user data: `dx` or `μ`.
    fn context(&self) -> f64 {
        match *self {
            Problem::Burgers { n } => Burgers::<f64>::new(n).dx(),
            Problem::Vdp { mu } => mu,
        }
    }

    /// Right-hand side reading its parameter from the context value.
    fn rhs(&self) -> impl FnMut(f64, &[f64], &mut [f64], f64) + Send + 'static {
        let mut burgers = match *self {
            Problem::Burgers { n } => Some(Burgers::<f64>::new(n)),
            Problem::Vdp { .. } => None,
        };
        move |t, y, ydot, ctx| match burgers.as_mut() {
            Some(b) => b.rhs_with(ctx, y, ydot),
            None => VanDerPol::new(ctx).rhs(t, y, ydot),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CaseSpec {
    pub problem: Problem,
    pub path: UserPath,
    pub impl_name: String,
    pub t0: f64,
    pub t_final: f64,
    /// Number of equally spaced output times; the solution is requested at
    /// each of them.
    pub output_steps: usize,
    pub reltol: f64,
    pub abstol: f64,
    pub integrator: Option<(String, ConfigDict)>,
}

impl CaseSpec {
    pub fn new(problem: Problem, path: UserPath, impl_name: &str, t_final: f64) -> Self {
        let output_steps = match problem {
            Problem::Burgers { .. } => 10,
            Problem::Vdp { .. } => 1,
        };
        CaseSpec {
            problem,
            path,
            impl_name: impl_name.to_string(),
            t0: 0.0,
            t_final,
            output_steps,
            reltol: 1e-6,
            abstol: 1e-12,
            integrator: None,
        }
    }

    pub fn output_times(&self) -> Vec<f64> {
        let k = self.output_steps.max(1);
        let dt = (self.t_final - self.t0) / k as f64;
        (0..k)
            .map(|i| if i + 1 == k { self.t_final } else { self.t0 + (i + 1) as f64 * dt })
            .collect()
    }
}

/// One prepared solver, either path.
trait Driver {
    fn start(&mut self, y0: &[f64], t0: f64) -> Result<(), OifError>;
    fn advance(&mut self, t: f64, y: &mut [f64]) -> Result<(), OifError>;
}

struct OifDriver {
    ivp: Ivp<'static>,
    spec: CaseSpec,
    // user data target; boxed so its address is stable
    _ctx: Box<f64>,
}

impl OifDriver {
    fn new(spec: &CaseSpec) -> Result<Self, OifError> {
        let mut ivp = Ivp::new(&spec.impl_name)?;
        let mut ctx = Box::new(spec.problem.context());
        let mut rhs = spec.problem.rhs();
        ivp.set_rhs_fn(move |t, y, ydot, ud| {
            // SAFETY: ud is the boxed context owned by this driver
            let c = unsafe { *(ud.as_ptr() as *const f64) };
            rhs(t, y, ydot, c);
            0
        })?;
        ivp.set_user_data(UserData::from_ref(&mut *ctx))?;
        if let Some((name, params)) = &spec.integrator {
            ivp.set_integrator(name, params)?;
        }
        Ok(OifDriver {
            ivp,
            spec: spec.clone(),
            _ctx: ctx,
        })
    }
}

impl Driver for OifDriver {
    fn start(&mut self, y0: &[f64], t0: f64) -> Result<(), OifError> {
        self.ivp.set_initial_value(y0, t0)?;
        self.ivp.set_tolerances(self.spec.reltol, self.spec.abstol)
    }

    fn advance(&mut self, t: f64, y: &mut [f64]) -> Result<(), OifError> {
        self.ivp.integrate(t, y)
    }
}

struct RawDriver<M, R> {
    solver: M,
    rhs: R,
    reltol: f64,
    abstol: f64,
}

impl<M: IvpMethod, R: FnMut(f64, &[f64], &mut [f64])> Driver for RawDriver<M, R> {
    fn start(&mut self, y0: &[f64], t0: f64) -> Result<(), OifError> {
        self.solver.reset(t0, y0);
        self.solver.set_tolerances(self.reltol, self.abstol);
        Ok(())
    }

    fn advance(&mut self, t: f64, y: &mut [f64]) -> Result<(), OifError> {
        self.solver
            .integrate_to(t, &mut self.rhs)
            .map_err(|e| OifError::solver_failure(e.to_string()))?;
        y.copy_from_slice(self.solver.state());
        Ok(())
    }
}

fn raw_driver<M: IvpMethod + 'static>(spec: &CaseSpec) -> Result<Box<dyn Driver>, OifError> {
    let mut solver = M::default();
    if let Some((name, params)) = &spec.integrator {
        if !M::INTEGRATORS.contains(&name.as_str()) {
            return Err(OifError::not_found(format!("unknown integrator '{name}'")));
        }
        solver.configure(name, params)?;
    }
    let ctx = spec.problem.context();
    let mut rhs = spec.problem.rhs();
    Ok(Box::new(RawDriver {
        solver,
        rhs: move |t: f64, y: &[f64], ydot: &mut [f64]| rhs(t, y, ydot, ctx),
        reltol: spec.reltol,
        abstol: spec.abstol,
    }))
}

fn driver(spec: &CaseSpec) -> Result<Box<dyn Driver>, OifError> {
    match spec.path {
        UserPath::Oif => Ok(Box::new(OifDriver::new(spec)?)),
        UserPath::Raw => match spec.impl_name.as_str() {
            "dopri5c" => raw_driver::<Dopri5<f64>>(spec),
            "rk4" => raw_driver::<Rk4<f64>>(spec),
            other => Err(OifError::not_found(format!(
                "no directly linked implementation '{other}' (available: dopri5c, rk4)"
            ))),
        },
    }
}

/// A loaded solver with its problem, ready for repeated runs.
pub struct Prepared {
    driver: Box<dyn Driver>,
    spec: CaseSpec,
    y0: Vec<f64>,
    times: Vec<f64>,
}

impl Prepared {
    pub fn new(spec: &CaseSpec) -> Result<Self, OifError> {
        Ok(Prepared {
            driver: driver(spec)?,
            spec: spec.clone(),
            y0: spec.problem.initial_condition(),
            times: spec.output_times(),
        })
    }

    /// Restarts from the initial condition and integrates through every
    /// output time. Returns the final state and the wall time of the
    /// integrate loop alone.
    pub fn run(&mut self) -> Result<(Vec<f64>, f64), OifError> {
        let mut y = vec![0.0; self.y0.len()];
        self.driver.start(&self.y0, self.spec.t0)?;
        let start = Instant::now();
        for &t in &self.times {
            self.driver.advance(t, &mut y)?;
        }
        Ok((y, start.elapsed().as_secs_f64()))
    }
}

/// Integrates once, untimed.
pub fn solve(spec: &CaseSpec) -> Result<Vec<f64>, OifError> {
    Prepared::new(spec)?.run().map(|(y, _)| y)
}

#[derive(Clone, Debug)]
pub struct CaseOutcome {
    pub spec: CaseSpec,
    pub runs: Vec<f64>,
    pub sample: Option<RuntimeSample<f64>>,
    pub status: Status,
    pub message: String,
    pub solution: Option<Vec<f64>>,
}

impl CaseOutcome {
    fn failed(spec: &CaseSpec, e: OifError) -> Self {
        CaseOutcome {
            spec: spec.clone(),
            runs: Vec::new(),
            sample: None,
            status: e.status(),
            message: e.message().to_string(),
            solution: None,
        }
    }

    pub fn mean(&self) -> Option<f64> {
        match (&self.sample, self.runs.as_slice()) {
            (Some(s), _) => Some(s.mean),
            (None, [r]) => Some(*r),
            _ => None,
        }
    }

    pub fn csv_row(&self) -> [String; 7] {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_default();
        [
            self.spec.problem.case_name().to_string(),
            self.spec.path.as_str().to_string(),
            self.spec.impl_name.clone(),
            self.spec.problem.param(),
            opt(self.mean()),
            opt(self.sample.map(|s| s.ci95)),
            self.status.code().to_string(),
        ]
    }
}

/// Loads the implementation once, does one untimed warm-up run, then
/// `repeats` timed runs. A failing run ends the case with its status.
pub fn run_case(spec: &CaseSpec, repeats: usize) -> CaseOutcome {
    let mut p = match Prepared::new(spec) {
        Ok(p) => p,
        Err(e) => return CaseOutcome::failed(spec, e),
    };
    let mut solution = match p.run() {
        Ok((y, _)) => y,
        Err(e) => return CaseOutcome::failed(spec, e),
    };
    let mut runs = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        match p.run() {
            Ok((y, secs)) => {
                runs.push(secs);
                solution = y;
            }
            Err(e) => return CaseOutcome::failed(spec, e),
        }
    }
    CaseOutcome {
        spec: spec.clone(),
        sample: stats(&runs).ok(),
        runs,
        status: Status::SUCCESS,
        message: String::new(),
        solution: Some(solution),
    }
}

pub const CSV_HEADER: [&str; 7] = ["case", "path", "impl", "param", "mean_s", "ci95_s", "status"];

/// Appends rows to `path`, writing the header first if the file is new or
/// empty; without a path, writes header and rows to stdout.
pub fn write_csv(path: Option<&Path>, rows: &[[String; 7]]) -> anyhow::Result<()> {
    let (sink, need_header): (Box<dyn Write>, bool) = match path {
        Some(p) => {
            let f = OpenOptions::new().create(true).append(true).open(p)?;
            let empty = f.metadata()?.len() == 0;
            (Box::new(f), empty)
        }
        None => (Box::new(std::io::stdout()), true),
    };
    let mut w = csv::Writer::from_writer(sink);
    if need_header {
        w.write_record(CSV_HEADER)?;
    }
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `index,value` lines with round-trip precision.
pub fn dump_solution(path: &Path, y: &[f64]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["index", "value"])?;
    for (i, v) in y.iter().enumerate() {
        w.write_record([i.to_string(), format!("{v:e}")])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_times_end_exactly() {
        let mut s = CaseSpec::new(Problem::Burgers { n: 4 }, UserPath::Raw, "dopri5c", 2.0);
        s.output_steps = 3;
        let t = s.output_times();
        assert_eq!(t.len(), 3);
        assert_eq!(*t.last().unwrap(), 2.0);
        assert!((t[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn raw_rejects_unknown_impl() {
        let s = CaseSpec::new(Problem::Vdp { mu: 1.0 }, UserPath::Raw, "lsoda", 1.0);
        let out = run_case(&s, 2);
        assert_eq!(out.status, Status::NOT_FOUND);
        assert_eq!(out.csv_row()[4], "");
    }

    #[test]
    fn raw_vdp_small_mu() {
        let s = CaseSpec::new(Problem::Vdp { mu: 1.0 }, UserPath::Raw, "dopri5c", 1.0);
        let out = run_case(&s, 3);
        assert_eq!(out.status, Status::SUCCESS, "{}", out.message);
        assert_eq!(out.runs.len(), 3);
        assert!(out.sample.is_some());
        assert_eq!(out.solution.unwrap().len(), 2);
    }
}
