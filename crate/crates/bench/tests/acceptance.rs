// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// fails. Run with `cargo test -p oif-bench --test acceptance`.

use std::ffi::c_void;
use std::process::{Command, ExitCode};
use std::time::Instant;

use oif_bench::problems::Burgers;
use oif_bench::runner::{solve, CaseSpec, Prepared, Problem, UserPath};
use oif_bench::stats::stats;
use oif_core::marshal::{make_array_f64, unpack_raw, ArgRef, ArrayF64Buf, ConfigValue};
use oif_core::{Arg, ArrayF64, Callback, ConfigDict, Ivp, PackedArgs, Status, TypeTag, UserData};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn overhead_ratio() -> Outcome {
    const N: usize = 6400;
    const REPEATS: usize = 30;
    let spec = |path| CaseSpec::new(Problem::Burgers { n: N }, path, "dopri5c", 2.0);
    let mut oif = Prepared::new(&spec(UserPath::Oif)).map_err(|e| e.to_string())?;
    let mut raw = Prepared::new(&spec(UserPath::Raw)).map_err(|e| e.to_string())?;
    // warm-up, then alternate so drift in machine load hits both paths alike
    oif.run().map_err(|e| e.to_string())?;
    raw.run().map_err(|e| e.to_string())?;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for i in 0..REPEATS {
        let (first, second) = if i % 2 == 0 { (&mut oif, &mut raw) } else { (&mut raw, &mut oif) };
        let t1 = first.run().map_err(|e| e.to_string())?.1;
        let t2 = second.run().map_err(|e| e.to_string())?.1;
        if i % 2 == 0 {
            a.push(t1);
            b.push(t2);
        } else {
            b.push(t1);
            a.push(t2);
        }
    }
    let (so, sr) = (stats(&a).unwrap(), stats(&b).unwrap());
    let ratio = so.mean / sr.mean;
    check(
        ratio <= 1.10,
        format!(
            "N={N}, {REPEATS} repeats: oif {:.4}±{:.4} s, raw {:.4}±{:.4} s, ratio {ratio:.4} (limit 1.10)",
            so.mean, so.ci95, sr.mean, sr.ci95
        ),
    )
}

fn path_equivalence() -> Outcome {
    let mut detail = Vec::new();
    for n in [200, 1600] {
        let spec = |path| CaseSpec::new(Problem::Burgers { n }, path, "dopri5c", 2.0);
        let a = solve(&spec(UserPath::Oif)).map_err(|e| e.to_string())?;
        let b = solve(&spec(UserPath::Raw)).map_err(|e| e.to_string())?;
        let differing = a.iter().zip(&b).filter(|(x, y)| x.to_bits() != y.to_bits()).count();
        if a.len() != n || b.len() != n || differing != 0 {
            return Err(format!("N={n}: {differing} of {n} entries differ"));
        }
        detail.push(format!("N={n}"));
    }
    Ok(format!("{} bit-identical", detail.join(", ")))
}

fn decay_session(ivp: &mut Ivp<'_>) -> oif_core::Result<()> {
    ivp.set_initial_value(&[1.0], 0.0)?;
    ivp.set_rhs_fn(|_, y, d, _| {
        d[0] = -y[0];
        0
    })
}

fn accuracy() -> Outcome {
    let start = Instant::now();
    let run = || -> oif_core::Result<f64> {
        let mut y = [0.0];
        let mut ivp = Ivp::new("dopri5c")?;
        decay_session(&mut ivp)?;
        ivp.set_tolerances(1e-6, 1e-12)?;
        ivp.integrate(1.0, &mut y)?;
        Ok(y[0])
    };
    let y = run().map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let err = (y - (-1.0f64).exp()).abs();
    check(err <= 1e-4 && secs < 1.0, format!("|y(1) - e^-1| = {err:.3e} (limit 1e-4), {secs:.4} s (limit 1 s)"))
}

fn order() -> Outcome {
    let mut errs = Vec::new();
    for h in [0.1, 0.05, 0.025] {
        let run = || -> oif_core::Result<f64> {
            let mut params = ConfigDict::new();
            params.insert("fixed_step", 1)?;
            params.insert("h_init", h)?;
            params.insert("h_max", h)?;
            let mut ivp = Ivp::new("dopri5c")?;
            ivp.set_integrator("dopri5", &params)?;
            decay_session(&mut ivp)?;
            let mut y = [0.0];
            ivp.integrate(1.0, &mut y)?;
            Ok(y[0])
        };
        errs.push((run().map_err(|e| e.to_string())? - (-1.0f64).exp()).abs());
    }
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let ok = orders.iter().all(|p| (4.7..=5.3).contains(p));
    check(
        ok,
        format!(
            "errors {}, observed orders {orders:.3?} (range [4.7, 5.3])",
            errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn conservation() -> Outcome {
    let b = Burgers::<f64>::new(200);
    let m0 = b.mass(&b.initial_condition());
    let spec = CaseSpec::new(Problem::Burgers { n: 200 }, UserPath::Oif, "dopri5c", 2.0);
    let u = solve(&spec).map_err(|e| e.to_string())?;
    let drift = (b.mass(&u) - m0).abs();
    check(drift <= 1e-8, format!("N=200, t=2: |mass(t) - mass(0)| = {drift:.3e} (limit 1e-8)"))
}

fn stiffness() -> Outcome {
    let vdp = |mu| CaseSpec::new(Problem::Vdp { mu }, UserPath::Oif, "dopri5c", 3000.0);
    let stiff = match solve(&vdp(1000.0)) {
        Ok(_) => return Err("mu=1000 unexpectedly succeeded".into()),
        Err(e) => e,
    };
    let reason_ok = stiff.status() == Status::SOLVER_FAILURE
        && (stiff.message().contains("stiff") || stiff.message().contains("step budget"));
    let mild = solve(&vdp(5.0));
    check(
        reason_ok && mild.is_ok(),
        format!(
            "mu=1000: status {} \"{}\"; mu=5: {}",
            stiff.code(),
            stiff.message(),
            match &mild {
                Ok(_) => "ok".to_string(),
                Err(e) => e.to_string(),
            }
        ),
    )
}

fn lifecycle() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_oif-bench");
    let plain = Command::new(exe).arg("lifecycle").output().map_err(|e| e.to_string())?;
    if !plain.status.success() {
        return Err(format!("lifecycle failed: {}", String::from_utf8_lossy(&plain.stderr).trim()));
    }
    let runs: [&[&str]; 2] = [&["lifecycle"], &["burgers", "--n", "64", "--repeats", "2"]];
    for args in runs {
        let out = Command::new("valgrind")
            .args([
                "--leak-check=full",
                "--errors-for-leak-kinds=definite,indirect",
                "--error-exitcode=99",
                "--quiet",
                exe,
            ])
            .args(args)
            .output()
            .map_err(|e| format!("valgrind not runnable: {e}"))?;
        if out.status.code() != Some(0) {
            return Err(format!(
                "valgrind on `{}` exited with {:?}: {}",
                args.join(" "),
                out.status.code(),
                String::from_utf8_lossy(&out.stderr).lines().take(20).collect::<Vec<_>>().join(" | ")
            ));
        }
    }
    Ok("dopri5c and rk4 loaded together, used, unloaded; post-unload calls not found; no definite or indirect leaks under valgrind".into())
}

unsafe extern "C" fn noop(_t: f64, _y: *mut ArrayF64, _d: *mut ArrayF64, _ud: *mut c_void) -> i32 {
    0
}

fn marshalling() -> Outcome {
    const CASES: usize = 1000;
    let mut rng = StdRng::seed_from_u64(20_261_016);
    let cb = Callback::native(noop);
    for case in 0..CASES {
        // every tag at least once, in random order, plus a few extra
        let mut tags: Vec<TypeTag> = TypeTag::ALL.to_vec();
        for _ in 0..rng.gen_range(0..4) {
            tags.push(*TypeTag::ALL.choose(&mut rng).unwrap());
        }
        tags.shuffle(&mut rng);

        let mut arrays: Vec<ArrayF64Buf<'static>> = Vec::new();
        let mut dicts: Vec<ConfigDict> = Vec::new();
        let mut strings: Vec<String> = Vec::new();
        for t in &tags {
            match t {
                TypeTag::ArrayF64 => {
                    let nd = rng.gen_range(1..4);
                    let dims: Vec<isize> = (0..nd).map(|_| rng.gen_range(0..5)).collect();
                    let mut a = make_array_f64(nd as isize, &dims).map_err(|e| e.to_string())?;
                    for v in a.as_mut_slice() {
                        *v = rng.gen::<f64>() * 1e6 - 5e5;
                    }
                    arrays.push(a);
                }
                TypeTag::ConfigDict => {
                    let mut d = ConfigDict::new();
                    for k in 0..rng.gen_range(0..5) {
                        let key = format!("k{k}_{}", rng.gen::<u16>());
                        let v = if rng.gen() {
                            ConfigValue::Int(rng.gen())
                        } else {
                            ConfigValue::Float64(f64::from_bits(rng.gen()))
                        };
                        d.insert(key, v).map_err(|e| e.to_string())?;
                    }
                    dicts.push(d);
                }
                TypeTag::Str => {
                    let len = rng.gen_range(0..16);
                    strings.push((0..len).map(|_| rng.gen_range('!'..='~')).collect());
                }
                _ => {}
            }
        }
        let ints: Vec<i32> = tags.iter().map(|_| rng.gen()).collect();
        let floats: Vec<f64> = tags.iter().map(|_| f64::from_bits(rng.gen())).collect();
        let uds: Vec<usize> = tags.iter().map(|_| rng.gen()).collect();

        let (mut ia, mut id, mut is) = (0, 0, 0);
        let args: Vec<Arg<'_>> = tags
            .iter()
            .enumerate()
            .map(|(i, t)| match t {
                TypeTag::Int => Arg::Int(ints[i]),
                TypeTag::Float64 => Arg::Float64(floats[i]),
                TypeTag::ArrayF64 => {
                    ia += 1;
                    Arg::ArrayF64(arrays[ia - 1].as_raw())
                }
                TypeTag::Str => {
                    is += 1;
                    Arg::Str(&strings[is - 1])
                }
                TypeTag::Callback => Arg::Callback(&cb),
                TypeTag::UserData => Arg::UserData(UserData(uds[i] as *mut c_void)),
                TypeTag::ConfigDict => {
                    id += 1;
                    Arg::ConfigDict(&dicts[id - 1])
                }
            })
            .collect();

        let packed = PackedArgs::pack(&args).map_err(|e| format!("case {case}: {e}"))?;
        let back = unsafe { unpack_raw(&packed.as_raw(), &tags) }.map_err(|e| format!("case {case}: {e}"))?;
        let (mut ia, mut id, mut is) = (0, 0, 0);
        for (i, (t, r)) in tags.iter().zip(&back).enumerate() {
            let ok = match (t, r) {
                (TypeTag::Int, ArgRef::Int(v)) => *v == ints[i],
                (TypeTag::Float64, ArgRef::Float64(v)) => v.to_bits() == floats[i].to_bits(),
                (TypeTag::ArrayF64, ArgRef::ArrayF64(a)) => {
                    ia += 1;
                    let orig = &arrays[ia - 1];
                    // the record and its storage must be the caller's own
                    std::ptr::eq(*a, orig.as_raw()) && a.data == orig.data_ptr()
                }
                (TypeTag::Str, ArgRef::Str(s)) => {
                    is += 1;
                    s.to_str().ok() == Some(strings[is - 1].as_str())
                }
                (TypeTag::Callback, ArgRef::Callback(c)) => std::ptr::eq(*c, &cb),
                (TypeTag::UserData, ArgRef::UserData(u)) => u.0 as usize == uds[i],
                (TypeTag::ConfigDict, ArgRef::ConfigDict(d)) => {
                    id += 1;
                    unsafe { d.decode() }.map(|x| x.bits_eq(&dicts[id - 1])).unwrap_or(false)
                }
                _ => false,
            };
            if !ok {
                return Err(format!("case {case}: position {i} ({}) did not round-trip", t.name()));
            }
        }
    }
    Ok(format!("{CASES} randomized cases over all 7 tags; array records and data never copied"))
}

fn stats_hand_values() -> Outcome {
    let s = stats(&[1.0f64, 2.0, 3.0]).map_err(|e| e.to_string())?;
    let ok = s.mean == 2.0 && (s.se - 0.57735).abs() <= 1e-6 && (s.ci95 - 1.13161).abs() <= 1e-5;
    check(ok, format!("mean {}, se {:.7}, ci95 {:.7}", s.mean, s.se, s.ci95))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("overhead-ratio", overhead_ratio),
        ("path-equivalence", path_equivalence),
        ("accuracy", accuracy),
        ("order", order),
        ("conservation", conservation),
        ("stiffness", stiffness),
        ("lifecycle", lifecycle),
        ("marshalling", marshalling),
        ("stats", stats_hand_values),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(d) => println!("PASS {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL {name}: {d}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
