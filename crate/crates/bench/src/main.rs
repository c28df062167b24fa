use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use oif_bench::micro::rhs_micro;
use oif_bench::runner::{dump_solution, run_case, write_csv, CaseSpec, Problem, UserPath};
use oif_core::{Arg, ConfigDict, Dispatch, Ivp, PackedArgs, Status};

#[derive(Parser)]
#[command(name = "oif-bench", version, about = "ODE benchmarks through the dispatch layer and directly")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Implementation name under the `ivp` interface.
    #[arg(long = "impl", default_value = "dopri5c")]
    impl_name: String,
    #[arg(long, value_enum, default_value_t = UserPath::Oif)]
    path: UserPath,
    #[arg(long, default_value_t = 30)]
    repeats: usize,
    /// Append result rows here instead of printing to stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the final state as `index,value`.
    #[arg(long)]
    dump_solution: Option<PathBuf>,
    #[arg(long)]
    output_steps: Option<usize>,
    #[arg(long, default_value_t = 1e-6)]
    reltol: f64,
    #[arg(long, default_value_t = 1e-12)]
    abstol: f64,
    /// Step budget per integrate call (dopri5 only).
    #[arg(long)]
    max_steps: Option<i32>,
}

#[derive(Subcommand)]
enum Command {
    /// Inviscid Burgers equation on N cells.
    Burgers {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        t_final: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Van der Pol oscillator.
    Vdp {
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 3000.0)]
        t_final: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Time single right-hand side evaluations, direct and through the
    /// callback boundary.
    RhsMicro {
        #[arg(long, default_value_t = 6400)]
        n: usize,
        #[arg(long, default_value_t = 10000)]
        evals: usize,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
    },
    /// Print oif/raw runtime ratios from a results file.
    Summary { csv: PathBuf },
    /// Load every bundled implementation, use it, unload it.
    Lifecycle,
}

fn run_problem(problem: Problem, t_final: f64, c: Common) -> anyhow::Result<ExitCode> {
    let mut spec = CaseSpec::new(problem, c.path, &c.impl_name, t_final);
    if let Some(k) = c.output_steps {
        spec.output_steps = k;
    }
    spec.reltol = c.reltol;
    spec.abstol = c.abstol;
    if let Some(m) = c.max_steps {
        let mut params = ConfigDict::new();
        params.insert("max_steps", m)?;
        spec.integrator = Some(("dopri5".to_string(), params));
    }
    let out = run_case(&spec, c.repeats);
    if !out.status.is_success() {
        eprintln!(
            "{} {} {}={}: {} ({})",
            problem.case_name(),
            c.impl_name,
            if matches!(problem, Problem::Burgers { .. }) { "N" } else { "mu" },
            problem.param(),
            out.message,
            out.status.name()
        );
    }
    write_csv(c.csv.as_deref(), &[out.csv_row()])?;
    if let (Some(path), Some(y)) = (&c.dump_solution, &out.solution) {
        dump_solution(path, y)?;
    }
    Ok(ExitCode::SUCCESS)
}

/// Mean runtimes of the oif and raw rows of one case.
type Means = (Option<f64>, Option<f64>);

fn summary(path: PathBuf) -> anyhow::Result<ExitCode> {
    let mut rdr = csv::Reader::from_path(&path).with_context(|| format!("reading {}", path.display()))?;
    // (case, impl, param) -> (oif mean, raw mean)
    let mut table: BTreeMap<(String, String, String), Means> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() < 7 {
            bail!("malformed row: {rec:?}");
        }
        let Ok(mean) = rec[4].parse::<f64>() else { continue };
        let entry = table.entry((rec[0].to_string(), rec[2].to_string(), rec[3].to_string())).or_default();
        match &rec[1] {
            "oif" => entry.0 = Some(mean),
            "raw" => entry.1 = Some(mean),
            _ => {}
        }
    }
    println!("case,impl,param,oif_mean_s,raw_mean_s,ratio");
    for ((case, imp, param), (oif, raw)) in table {
        let f = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_default();
        let ratio = match (oif, raw) {
            (Some(a), Some(b)) if b > 0.0 => format!("{:.4}", a / b),
            _ => String::new(),
        };
        println!("{case},{imp},{param},{},{},{ratio}", f(oif), f(raw));
    }
    Ok(ExitCode::SUCCESS)
}

fn lifecycle() -> anyhow::Result<ExitCode> {
    let dispatch = Dispatch::global();
    let names = ["dopri5c", "rk4"];
    let mut sessions = Vec::new();
    for name in names {
        let mut ivp = Ivp::new(name)?;
        ivp.set_initial_value(&[1.0, 0.0], 0.0)?;
        ivp.set_rhs_fn(|_, y, d, _| {
            d[0] = y[1];
            d[1] = -y[0];
            0
        })?;
        ivp.set_tolerances(1e-8, 1e-10)?;
        sessions.push((name, ivp));
    }
    let mut y = [0.0; 2];
    for (name, ivp) in &mut sessions {
        for k in 1..=3 {
            ivp.integrate(k as f64, &mut y)?;
        }
        if (y[0] - 3.0f64.cos()).abs() > 1e-4 {
            bail!("{name}: wrong solution {y:?}");
        }
    }
    for (name, ivp) in sessions {
        let h = ivp.handle().context("session already closed")?;
        ivp.close()?;
        let args = PackedArgs::pack(&[Arg::Float64(4.0)])?;
        match dispatch.call_impl(h, "integrate", &args, &PackedArgs::empty()) {
            Err(e) if e.status() == Status::NOT_FOUND => {}
            other => bail!("{name}: call after unload returned {other:?}"),
        }
    }
    println!("lifecycle ok: {}", names.join(", "));
    Ok(ExitCode::SUCCESS)
}

fn main() -> anyhow::Result<ExitCode> {
    match Cli::parse().command {
        Command::Burgers { n, t_final, common } => run_problem(Problem::Burgers { n }, t_final, common),
        Command::Vdp { mu, t_final, common } => run_problem(Problem::Vdp { mu }, t_final, common),
        Command::RhsMicro { n, evals, repeats } => {
            let r = rhs_micro(n, evals, repeats)?;
            println!("case,path,param,mean_s,ci95_s");
            println!("rhs,raw,{n},{:.6e},{:.6e}", r.direct.mean, r.direct.ci95);
            println!("rhs,oif,{n},{:.6e},{:.6e}", r.boundary.mean, r.boundary.ci95);
            Ok(ExitCode::SUCCESS)
        }
        Command::Summary { csv } => summary(csv),
        Command::Lifecycle => lifecycle(),
    }
}
