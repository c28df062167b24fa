// Interface path against the directly linked integrator, on the benchmark
// problems.

use oif_bench::problems::Burgers;
use oif_bench::runner::{run_case, solve, CaseSpec, Problem, UserPath};
use oif_core::Status;

fn burgers(n: usize, path: UserPath, imp: &str) -> CaseSpec {
    CaseSpec::new(Problem::Burgers { n }, path, imp, 2.0)
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

#[test]
fn oif_and_raw_agree_bitwise() {
    for imp in ["dopri5c", "rk4"] {
        let a = solve(&burgers(200, UserPath::Oif, imp)).unwrap();
        let b = solve(&burgers(200, UserPath::Raw, imp)).unwrap();
        assert_eq!(bits(&a), bits(&b), "{imp}");
    }
    let a = solve(&CaseSpec::new(Problem::Vdp { mu: 5.0 }, UserPath::Oif, "dopri5c", 30.0)).unwrap();
    let b = solve(&CaseSpec::new(Problem::Vdp { mu: 5.0 }, UserPath::Raw, "dopri5c", 30.0)).unwrap();
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn repeated_timed_runs_give_the_same_solution() {
    let spec = burgers(100, UserPath::Oif, "dopri5c");
    let once = solve(&spec).unwrap();
    let out = run_case(&spec, 3);
    assert_eq!(out.status, Status::SUCCESS);
    assert_eq!(bits(out.solution.as_ref().unwrap()), bits(&once));
    assert_eq!(out.runs.len(), 3);
    let s = out.sample.unwrap();
    assert!(s.mean > 0.0 && s.ci95 >= 0.0);
}

#[test]
fn burgers_mass_is_conserved() {
    let b = Burgers::<f64>::new(200);
    let m0 = b.mass(&b.initial_condition());
    let u = solve(&burgers(200, UserPath::Oif, "dopri5c")).unwrap();
    assert!((b.mass(&u) - m0).abs() <= 1e-8, "{} vs {m0}", b.mass(&u));
    // the shock has formed by t=2, so the profile has steepened but stays bounded
    assert!(u.iter().all(|&v| (0.25 - 1e-3..=0.75 + 1e-3).contains(&v)));
}

#[test]
fn stiff_case_is_recorded_not_timed() {
    let spec = CaseSpec::new(Problem::Vdp { mu: 1000.0 }, UserPath::Oif, "dopri5c", 3000.0);
    let out = run_case(&spec, 1);
    assert_eq!(out.status, Status::SOLVER_FAILURE);
    assert!(out.message.contains("probably stiff"), "{}", out.message);
    let row = out.csv_row();
    assert_eq!(&row[..4], ["vdp", "oif", "dopri5c", "1000"]);
    assert_eq!(row[4], "");
    assert_eq!(row[6], "-6");

    let raw = run_case(&CaseSpec { path: UserPath::Raw, ..spec }, 1);
    assert_eq!(raw.status, Status::SOLVER_FAILURE);
    assert_eq!(raw.message, out.message);
}

#[test]
fn unknown_implementation_is_recorded() {
    let out = run_case(&burgers(10, UserPath::Oif, "nonexistent"), 2);
    assert_eq!(out.status, Status::NOT_FOUND);
    assert!(out.solution.is_none());
}
