//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::panic;
use std::process::{Command, ExitCode, Output};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use qlorentz::algebras::relativistic_algebra;
use qlorentz::exprlang::{parse, render};
use qlorentz::identities::{builtin_expressions, Registry, Status};
use qlorentz::kinematics::{
    boost_classical, boost_energy_form, shell_relations, spacelike_window, tunnel_probability,
    Constants, Event, ShellInput,
};
use qlorentz::opalg::{
    adjoint, equals, normalize, reduce, GaussianRational, GenId, GeneratorSet, OpExpr, OpWord,
    Scalar, Strategy, UnitMonomial,
};
use qlorentz::packet_oracle::{
    convergence_sweep, gaussian_packet, Derivative, MomentumGrid, Oracle,
};
use qlorentz::waveguide::{effective_quantities, guided_tunnel_probability, WaveguideParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_1e55;

const IDENTITY_BUDGET: Duration = Duration::from_secs(1);
const CONFLUENCE_CASES: usize = 1000;
const CONFLUENCE_MAX_DEGREE: usize = 6;
const BOOST_CASES: usize = 1000;
const BOOST_RTOL: f64 = 1e-12;
const WINDOW_TOL: f64 = 1e-12;
const EQ9_TOL: f64 = 1e-6;
const EQ9_T_SPREAD: f64 = 1e-9;
const EHRENFEST_TOL: f64 = 1e-8;
const HERMITICITY_TOL: f64 = 1e-8;
const PACKET_BUDGET: Duration = Duration::from_secs(10);
const SWEEP_SIZES: [usize; 4] = [512, 1024, 2048, 4096];

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

/// `value < tol`, false for NaN.
fn below(value: f64, tol: f64) -> bool {
    value.partial_cmp(&tol) == Some(std::cmp::Ordering::Less)
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn identity_suite() -> Verdict {
    let start = Instant::now();
    let reg = Registry::new();
    let reports = reg.verify_all(None).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(
        reports.len() == 14,
        format!("{} identities registered", reports.len()),
    )?;
    for r in &reports {
        check(
            r.status == Status::Pass && r.residual == "0",
            format!("{} residual {}", r.name, r.residual),
        )?;
    }
    check(
        elapsed < IDENTITY_BUDGET,
        format!("verification took {elapsed:?}"),
    )?;

    let eq9 = reg.get("eq9").ok_or("eq9 missing")?;
    let spec = reg.spec(eq9.algebra);
    let extra = parse("hbar^2*c^2*H^-2/4", spec).map_err(|e| e.to_string())?;
    let mutated = &eq9.rhs + &extra;
    let residual = normalize(&(&eq9.lhs - &mutated), spec).map_err(|e| e.to_string())?;
    let want = parse("-(1/4)*hbar^2*c^2*H^-2", spec).map_err(|e| e.to_string())?;
    check(
        residual == want,
        format!("mutated eq9 residual {}", render(&residual)),
    )?;
    Ok(format!(
        "14/14 exact in {:.1} ms; mutated eq9 leaves {}",
        elapsed.as_secs_f64() * 1e3,
        render(&residual)
    ))
}

fn transformation_forms_agree() -> Verdict {
    let b = builtin_expressions();
    let spec = relativistic_algebra();
    let x = equals(&b.xprime3, &b.xprime5, &spec).map_err(|e| e.to_string())?;
    let t = equals(&b.tprime3, &b.tprime5, &spec).map_err(|e| e.to_string())?;
    check(x, "symmetrized and reduced x' differ")?;
    check(t, "symmetrized and reduced t' differ")?;
    Ok("x' and t' forms equal exactly".into())
}

fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    let re = BigRational::new(
        rng.gen_range(-4i64..=4).into(),
        rng.gen_range(1i64..=3).into(),
    );
    let im = BigRational::from_integer(rng.gen_range(-3i64..=3).into());
    let mono = UnitMonomial::new(
        rng.gen_range(-1..=1),
        rng.gen_range(-1..=1),
        rng.gen_range(-1..=1),
    );
    Scalar::term(mono, GaussianRational::new(re, im))
}

fn random_expr(rng: &mut ChaCha8Rng, gens: &Arc<GeneratorSet>) -> OpExpr {
    const LETTERS: [(u8, i32); 5] = [(0, 1), (1, 1), (2, 1), (3, 1), (3, -1)];
    let terms: Vec<(OpWord, Scalar)> = (0..rng.gen_range(1..=3))
        .map(|_| {
            let len = rng.gen_range(0..=CONFLUENCE_MAX_DEGREE);
            let word = OpWord::from_factors((0..len).map(|_| {
                let (g, p) = LETTERS[rng.gen_range(0..LETTERS.len())];
                (GenId(g), p)
            }));
            (word, random_scalar(rng))
        })
        .collect();
    OpExpr::from_terms(gens, terms)
}

fn confluence() -> Verdict {
    let spec = relativistic_algebra();
    let gens = spec.generators().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut max_degree = 0;
    for case in 0..CONFLUENCE_CASES {
        let e = random_expr(&mut rng, &gens);
        max_degree = max_degree.max(e.terms().map(|(w, _)| w.degree()).max().unwrap_or(0));
        let left = reduce(&e, &spec, Strategy::Leftmost).map_err(|e| e.to_string())?;
        let right = reduce(&e, &spec, Strategy::Rightmost).map_err(|e| e.to_string())?;
        check(
            left.expr == right.expr,
            format!("case {case}: strategies disagree on {}", render(&e)),
        )?;
        let again = normalize(&left.expr, &spec).map_err(|e| e.to_string())?;
        check(again == left.expr, format!("case {case}: not idempotent"))?;
    }
    Ok(format!(
        "{CONFLUENCE_CASES} expressions up to degree {max_degree}: strategies agree, idempotent"
    ))
}

fn classical_limit() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let mut worst_boost = 0.0f64;
    let mut worst_interval = 0.0f64;
    for i in 0..BOOST_CASES {
        // alternate natural-unit states with SI ones at particle masses
        let (k, m, t_scale, x_scale) = if i % 2 == 0 {
            (Constants::NATURAL, rng.gen_range(0.1..10.0), 10.0, 10.0)
        } else {
            (Constants::SI, rng.gen_range(1e-31..1e-26), 1e-8, 1.0)
        };
        let v = rng.gen_range(-0.999..0.999) * k.c();
        let s = shell_relations(ShellInput::Velocity(v), m, &k).map_err(|e| e.to_string())?;
        let e = Event::new(
            rng.gen_range(-1.0..1.0) * t_scale,
            rng.gen_range(-1.0..1.0) * x_scale,
        );
        let a = boost_energy_form(e, &s, &k).map_err(|e| e.to_string())?;
        let b = boost_classical(e, s.velocity(), &k).map_err(|e| e.to_string())?;
        let mc2 = m * k.c() * k.c();
        let c2 = k.c() * k.c();
        let scale_t = (s.energy() * e.t.abs() + s.momentum().abs() * e.x.abs()) / mc2;
        let scale_x = (s.energy() * e.x.abs() + c2 * s.momentum().abs() * e.t.abs()) / mc2;
        worst_boost = worst_boost
            .max((a.t - b.t).abs() / scale_t)
            .max((a.x - b.x).abs() / scale_x);
        let ct = k.c();
        let scale_i = (ct * b.t).powi(2) + b.x.powi(2) + (ct * e.t).powi(2) + e.x.powi(2);
        worst_interval = worst_interval.max((b.interval(&k) - e.interval(&k)).abs() / scale_i);
    }
    check(
        worst_boost < BOOST_RTOL,
        format!("energy form deviates by {worst_boost:e}"),
    )?;
    check(
        worst_interval < BOOST_RTOL,
        format!("interval drifts by {worst_interval:e}"),
    )?;
    Ok(format!(
        "{BOOST_CASES} on-shell states: boost deviation {worst_boost:.2e}, interval drift {worst_interval:.2e}"
    ))
}

fn window_numerics() -> Verdict {
    let e1 = (-1f64).exp();
    let mut worst = 0.0f64;
    for (m, k) in [
        (1.0, Constants::NATURAL),
        (9.109_383_701_5e-31, Constants::SI),
        (1.672_621_923_69e-27, Constants::SI),
    ] {
        let half = spacelike_window(m, &k).map_err(|e| e.to_string())?;
        let p = tunnel_probability(Event::new(0.0, half), m, &k)
            .map_err(|e| e.to_string())?
            .probability
            .ok_or("no probability at the window edge")?;
        worst = worst.max((p - e1).abs());
    }
    for (w, k) in [
        (WaveguideParams::from_cutoff(1.0), Constants::NATURAL),
        (
            WaveguideParams::from_width(22.86e-3, &Constants::SI),
            Constants::SI,
        ),
    ] {
        let w = w.map_err(|e| e.to_string())?;
        let half = effective_quantities(&w, &k).lambda_c / 2.0;
        let p = guided_tunnel_probability(Event::new(0.0, half), &w, &k)
            .map_err(|e| e.to_string())?
            .probability
            .ok_or("no guided probability at the window edge")?;
        worst = worst.max((p - e1).abs());
    }
    check(
        worst < WINDOW_TOL,
        format!("edge probability off by {worst:e}"),
    )?;

    let k = Constants::SI;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    for _ in 0..1000 {
        let w =
            WaveguideParams::from_cutoff(rng.gen_range(1e9..1e12)).map_err(|e| e.to_string())?;
        let m = k.hbar() * w.omega_c() / (k.c() * k.c());
        let e = Event::new(rng.gen_range(-1e-10..1e-10), rng.gen_range(-0.05..0.05));
        let a = guided_tunnel_probability(e, &w, &k).map_err(|e| e.to_string())?;
        let b = tunnel_probability(e, m, &k).map_err(|e| e.to_string())?;
        check(
            a.probability.map(f64::to_bits) == b.probability.map(f64::to_bits)
                && a.classification == b.classification,
            format!("guided and particle paths differ at {e:?}"),
        )?;
    }
    Ok(format!(
        "edge probability within {worst:.1e} of 1/e; guided == particle on 1000 events"
    ))
}

fn oracle(p0: f64, sigma: f64, m: f64, n: usize, scheme: Derivative) -> Result<Oracle, String> {
    let grid = MomentumGrid::new(20.0, n).map_err(|e| e.to_string())?;
    let pk = gaussian_packet(p0, sigma, m, grid).map_err(|e| e.to_string())?;
    Ok(Oracle::new(pk, scheme))
}

fn packet_oracle() -> Verdict {
    let start = Instant::now();
    let o = oracle(1.0, 0.5, 1.0, 4096, Derivative::Spectral)?;
    let main = o.check_interval_identity(0.3).map_err(|e| e.to_string())?;
    let at_t: Vec<f64> = [0.0, 0.5, 1.0]
        .iter()
        .map(|&t| o.check_interval_identity(t).map(|r| r.residual))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let spread = at_t.iter().cloned().fold(f64::MIN, f64::max)
        - at_t.iter().cloned().fold(f64::MAX, f64::min);
    let sweep = convergence_sweep(1.0, 0.5, 1.0, 20.0, 0.3, &SWEEP_SIZES, Derivative::Spectral)
        .map_err(|e| e.to_string())?;
    let ehr = o.ehrenfest_check().map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let fd_sweep = convergence_sweep(
        1.0,
        0.5,
        1.0,
        20.0,
        0.3,
        &SWEEP_SIZES,
        Derivative::FiniteDifference4,
    )
    .map_err(|e| e.to_string())?;
    let show = |s: &[(usize, f64)]| {
        s.iter()
            .map(|(n, r)| format!("{n}:{r:.2e}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!("    spectral sweep {}", show(&sweep));
    println!("    fd4 sweep      {}", show(&fd_sweep));

    let mut failures = Vec::new();
    if !(below(main.residual, EQ9_TOL) && main.contained) {
        failures.push(format!("residual {:e}", main.residual));
    }
    if spread.is_nan() || spread > EQ9_T_SPREAD {
        failures.push(format!("t-spread {spread:e}"));
    }
    if !sweep.windows(2).all(|w| w[1].1 < w[0].1) {
        failures.push(format!(
            "spectral residual not monotone over 512..4096 ({})",
            show(&sweep)
        ));
    }
    let slope_err = (ehr.slope_measured - ehr.slope_predicted).abs();
    if !below(slope_err, EHRENFEST_TOL) {
        failures.push(format!("slope error {slope_err:e}"));
    }
    let vel_err = (ehr.velocity_commutator - ehr.velocity_direct).norm();
    if !below(vel_err, EHRENFEST_TOL) {
        failures.push(format!("velocity error {vel_err:e}"));
    }
    if elapsed >= PACKET_BUDGET {
        failures.push(format!("took {elapsed:?}"));
    }
    let summary = format!(
        "residual {:.2e}, t-spread {spread:.2e}, slope error {slope_err:.2e}, velocity error {vel_err:.2e}, {:.0} ms",
        main.residual,
        elapsed.as_secs_f64() * 1e3
    );
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {summary}", failures.join("; ")))
    }
}

fn hermiticity() -> Verdict {
    let b = builtin_expressions();
    let rel = relativistic_algebra();
    let mut worst = 0.0f64;
    for (p0, sigma, m) in [
        (0.0, 0.5, 1.0),
        (1.0, 0.5, 1.0),
        (-2.0, 0.3, 0.5),
        (3.0, 1.0, 2.0),
    ] {
        let o = oracle(p0, sigma, m, 2048, Derivative::Spectral)?;
        for t in [0.0, 0.3, 1.0] {
            for e in [&b.xprime5, &b.tprime5, &b.xprime3, &b.tprime3] {
                let v = o.expectation(e, t).map_err(|e| e.to_string())?;
                worst = worst.max(v.value.im.abs());
            }
        }
    }
    check(worst < HERMITICITY_TOL, format!("imaginary part {worst:e}"))?;
    let nonrel = qlorentz::algebras::nonrelativistic_algebra();
    for (name, e, spec) in [
        ("x'", &b.xprime5, &rel),
        ("t'", &b.tprime5, &rel),
        ("T_non", &b.tnon, &nonrel),
    ] {
        let adj = adjoint(e, spec).map_err(|e| e.to_string())?;
        let n = normalize(e, spec).map_err(|e| e.to_string())?;
        check(adj == n, format!("{name} is not self-adjoint"))?;
    }
    Ok(format!(
        "max |Im<.>| {worst:.2e} over 4 packets; x', t', T_non self-adjoint"
    ))
}

fn run_cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlorentz"))
        .args(args)
        .output()
        .expect("spawn qlorentz")
}

fn cli_determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let csv = |i: usize| dir.path().join(format!("scan{i}.csv"));
    let scan = |i: usize| {
        let path = csv(i);
        let out = run_cli(&[
            "waveguide",
            "--width-mm",
            "22.86",
            "--t",
            "0",
            "--scan",
            "0:0.00728:0.000728",
            "--csv",
            path.to_str().unwrap(),
        ]);
        (out, std::fs::read(&path).unwrap_or_default())
    };
    let (v1, v2) = (run_cli(&["verify", "--all"]), run_cli(&["verify", "--all"]));
    check(v1.status.code() == Some(0), "verify --all did not exit 0")?;
    check(v1.stdout == v2.stdout, "verify --all output differs")?;
    let (s1, c1) = scan(1);
    let (s2, c2) = scan(2);
    check(s1.status.code() == Some(0), "waveguide scan did not exit 0")?;
    check(c1 == c2 && !c1.is_empty(), "scan CSV differs between runs")?;
    check(
        String::from_utf8_lossy(&c1).lines().count() == 12,
        "scan CSV does not have 11 rows",
    )?;
    let strip = |o: &Output| {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .filter(|l| !l.starts_with("csv="))
            .collect::<Vec<_>>()
            .join("\n")
    };
    check(strip(&s1) == strip(&s2), "scan stdout differs")?;

    let codes = [
        (
            run_cli(&["verify-expr", "--algebra", "rel", "x*p", "p*x"]),
            1,
        ),
        (run_cli(&["normalize", "--algebra", "rel", "x*("]), 2),
        (run_cli(&["verify", "--no-such-flag"]), 2),
        (run_cli(&["particle", "--mass", "0", "window"]), 3),
        (run_cli(&["packet", "--n", "100", "check-eq9"]), 3),
    ];
    for (out, want) in &codes {
        check(
            out.status.code() == Some(*want),
            format!("exit {:?}, expected {want}", out.status.code()),
        )?;
    }
    Ok("verify --all and waveguide scan byte-identical; exit codes 0/1/2/3 as documented".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("identity suite", identity_suite),
        ("transformation forms agree", transformation_forms_agree),
        ("confluence", confluence),
        ("classical limit", classical_limit),
        ("window numerics", window_numerics),
        ("packet oracle", packet_oracle),
        ("hermiticity", hermiticity),
        ("cli determinism", cli_determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let verdict = panic::catch_unwind(f).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        match verdict {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
