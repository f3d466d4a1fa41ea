//! Acceptance suite. Runs without the libtest harness so one pass/fail line per
//! criterion is always printed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rsc_fixpoint::conditions::{
    check_condition_c, check_nonexpansive, check_quasi_nonexpansive, check_rsc, classify, verify_proposition_k,
    ConditionIFunction, PairSamplePlan,
};
use rsc_fixpoint::iterate::{
    check_auxiliary_limit, check_demiclosed, check_fejer, check_strong_convergence, check_xst1, run_iteration,
    AuxiliaryLimitProbe, IterationConfig, Xst1Sweep,
};
use rsc_fixpoint::mapping::{gallery, parse_piecewise, FixedSet, MappingDef};
use rsc_fixpoint::space::{estimate_modulus, Exponent, NormSpec};
use rsc_fixpoint::{Tolerance, Verdict};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

const TAU: Tolerance = Tolerance { rel: 1e-9, abs: 1e-12 };
const ALPHAS: [f64; 3] = [0.5, 0.75, 0.9];

fn build(id: &str) -> MappingDef {
    gallery::build(id, &[]).unwrap()
}

fn entries() -> Vec<gallery::GalleryEntry> {
    gallery::gallery_list()
}

/// Starting points on the domain grid with `per_axis` points per axis.
fn starts(m: &MappingDef, per_axis: usize) -> Vec<Vec<f64>> {
    m.domain.grid(per_axis)
}

fn closed_form_trajectory() -> Outcome {
    let start = Instant::now();
    let trace = run_iteration(&build("halving"), &IterationConfig::new(0.5, vec![1.0], 50)).unwrap();
    let elapsed = start.elapsed();
    ensure!(trace.rows.len() == 50, "{} rows", trace.rows.len());
    let mut worst = 0.0f64;
    for row in &trace.rows {
        let want = 0.75f64.powi(row.n as i32 - 1);
        worst = worst.max((row.x[0] - want).abs());
    }
    ensure!(worst <= 1e-12, "max error {worst:e}");
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("max error {worst:e} in {elapsed:?}"))
}

fn fejer_suite() -> Outcome {
    let start = Instant::now();
    let (mut checks, mut constant_orbits) = (0, 0);
    let mut maps = Vec::new();
    for e in entries().into_iter().filter(|e| !e.test_only && e.fixed_points.is_known()) {
        let m = build(e.id);
        let qs = m.declared_fixed_points.representatives(&m.domain, 11);
        let per_axis = if m.dim() == 1 { 9 } else { 3 };
        for &alpha in &ALPHAS {
            for x1 in starts(&m, per_axis) {
                let trace = run_iteration(&m, &IterationConfig::new(alpha, x1.clone(), 1000)).unwrap();
                // An exact fixed point ends the trace after one row; its orbit is
                // constant, so every distance to q is trivially nonincreasing.
                let constant = trace.rows.len() == 1 && trace.last().residual == 0.0;
                if constant {
                    constant_orbits += 1;
                }
                for q in &qs {
                    let r = check_fejer(&m, &trace, q, TAU).unwrap();
                    let ok = r.verdict == Verdict::Pass || (constant && r.verdict == Verdict::Vacuous);
                    ensure!(ok, "{} alpha {alpha} x1 {x1:?} q {q:?}: {} {}", e.id, r.verdict, r.message);
                    checks += 1;
                }
            }
        }
        maps.push(e.id);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!(
        "{checks} (trace, q) checks, {constant_orbits} constant orbits, over {} in {elapsed:?}",
        maps.join(", ")
    ))
}

fn rsc_definition_fidelity() -> Outcome {
    let plan = PairSamplePlan::exhaustive(201);
    let id = build("identity");
    let c = check_condition_c(&id, &plan, TAU).unwrap();
    ensure!(c.verdict == Verdict::Pass, "identity condition-c {}", c.verdict);
    let rsc = check_rsc(&id, &plan, TAU).unwrap();
    ensure!(rsc.verdict == Verdict::Fail, "identity rsc {}", rsc.verdict);
    let w = rsc
        .witnesses
        .iter()
        .chain(check_rsc(&id, &PairSamplePlan::exhaustive(2), TAU).unwrap().witnesses.iter())
        .find(|w| w.x == [0.0] && w.y == [1.0])
        .cloned();
    let w = w.ok_or("no witness (0, 1)")?;
    ensure!(w.lhs == 1.0 && (w.rhs - 1.0 / 3.0).abs() <= 1e-15, "lhs {} rhs {}", w.lhs, w.rhs);
    let k = check_rsc(&build("constant"), &plan, TAU).unwrap();
    ensure!(k.verdict == Verdict::Pass, "constant rsc {}", k.verdict);
    Ok(format!("identity witness (0, 1) lhs {} rhs {:.6}; constant rsc pass", w.lhs, w.rhs))
}

fn suzuki_step() -> Outcome {
    let m = build("suzuki-step");
    let plan = PairSamplePlan::exhaustive(301);
    let ne = check_nonexpansive(&m, &plan, TAU).unwrap();
    ensure!(ne.verdict == Verdict::Fail, "nonexpansive {}", ne.verdict);
    let w = ne.witnesses.iter().find(|w| w.y[0] >= 2.9).ok_or("no witness with y >= 2.9")?;
    let c = check_condition_c(&m, &plan, TAU).unwrap();
    ensure!(c.verdict == Verdict::Pass, "condition-c {}", c.verdict);
    let q = check_quasi_nonexpansive(&m, &FixedSet::Points(vec![vec![0.0]]), &plan, TAU).unwrap();
    ensure!(q.verdict == Verdict::Pass, "quasi-nonexpansive {}", q.verdict);
    Ok(format!(
        "nonexpansive fail ({} violations, witness ({}, {})); condition-c and quasi-nonexpansive pass",
        ne.failures, w.x[0], w.y[0]
    ))
}

fn linear_bounds_suite() -> Outcome {
    let mut covered = Vec::new();
    for e in entries() {
        let m = build(e.id);
        let plan = PairSamplePlan::exhaustive(if m.dim() == 1 { 201 } else { 31 });
        if check_rsc(&m, &plan, TAU).unwrap().verdict != Verdict::Pass {
            continue;
        }
        let k = verify_proposition_k(&m, &plan, TAU).unwrap();
        ensure!(
            k.verdict == Verdict::Pass && k.witnesses.is_empty(),
            "{}: {} with {} witnesses",
            e.id,
            k.verdict,
            k.failures
        );
        covered.push(e.id);
    }
    ensure!(!covered.is_empty(), "no RSC map found");
    Ok(format!("zero witnesses on {}", covered.join(", ")))
}

/// `delta(eps)` in the Euclidean plane from the angle between unit vectors:
/// `‖x - y‖ = 2 sin(θ/2)` and `‖x + y‖/2 = cos(θ/2)`, so the infimum sits at
/// the smallest admissible angle, found by bisection.
fn euclidean_modulus_oracle(eps: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, std::f64::consts::PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 2.0 * (mid / 2.0).sin() >= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    1.0 - (hi / 2.0).cos()
}

fn modulus_of_convexity() -> Outcome {
    let oracle = euclidean_modulus_oracle(1.0);
    ensure!((oracle - (1.0 - 3f64.sqrt() / 2.0)).abs() <= 1e-12, "oracle {oracle}");
    let l2 = estimate_modulus(&NormSpec::euclidean(2), 1.0, 100_000, 0).unwrap();
    ensure!((l2.delta_hat - oracle).abs() <= 1e-3, "p = 2: {} vs {oracle}", l2.delta_hat);
    let l1 = estimate_modulus(&NormSpec::new(Exponent::Finite(1.0), 2).unwrap(), 1.0, 100_000, 0).unwrap();
    ensure!(l1.delta_hat.abs() <= 1e-9, "p = 1: {}", l1.delta_hat);
    ensure!(!l1.uniformly_convex && !l1.warnings.is_empty(), "p = 1 is not flagged");
    Ok(format!("p = 2: {:.7} (oracle {oracle:.7}); p = 1: {:e}, flagged", l2.delta_hat, l1.delta_hat))
}

fn strong_convergence() -> Outcome {
    let mut summary = Vec::new();
    let cases: [(&str, f64, &[f64], usize); 2] =
        [("halving", 0.5, &ALPHAS, 200), ("affine-contraction", 0.1, &[0.5], 400)];
    for (id, k, alphas, budget) in cases {
        let m = build(id);
        let f = ConditionIFunction::linear(k).unwrap();
        let (_, hi) = m.domain.bounds();
        for &alpha in alphas {
            let trace = run_iteration(&m, &IterationConfig::new(alpha, hi.clone(), budget)).unwrap();
            let r = check_strong_convergence(&m, &trace, &m.declared_fixed_points, &f, 1e-8, TAU).unwrap();
            ensure!(r.verdict == Verdict::Pass, "{id} alpha {alpha}: {} {}", r.verdict, r.message);
            let n = r.reached_at.ok_or_else(|| format!("{id} alpha {alpha}: target not reached"))?;
            ensure!(n <= budget, "{id} alpha {alpha}: reached at {n}");
            summary.push(format!("{id}@{alpha}: n={n}"));
        }
    }
    Ok(summary.join(", "))
}

fn auxiliary_limits() -> Outcome {
    let m = build("halving");
    let trace = run_iteration(&m, &IterationConfig::new(0.5, vec![1.0], 1000)).unwrap();
    let mut worst = 0.0f64;
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let probe = AuxiliaryLimitProbe { t, p: vec![0.0], q: vec![0.0] };
        let r = check_auxiliary_limit(&m, &trace, &probe, 100, 1e-8, TAU).unwrap();
        ensure!(r.verdict == Verdict::Pass, "t = {t}: {} {}", r.verdict, r.message);
        worst = worst.max(r.observed.unwrap());
    }
    Ok(format!("max tail oscillation {worst:e}"))
}

fn xst1() -> Outcome {
    let mut summary = Vec::new();
    for id in ["halving", "constant"] {
        let m = build(id);
        let p = match &m.declared_fixed_points {
            FixedSet::Points(ps) => ps[0].clone(),
            other => return Err(format!("{id}: fixed set {other:?}")),
        };
        let (_, hi) = m.domain.bounds();
        for &alpha in &ALPHAS {
            let trace = run_iteration(&m, &IterationConfig::new(alpha, hi.clone(), 200)).unwrap();
            let r = check_xst1(&m, &trace, 0.5, &p, 10, Xst1Sweep::Diagonal, TAU).unwrap();
            ensure!(r.violations == 0 && r.verdict == Verdict::Pass, "{id} alpha {alpha}: {} violations", r.violations);
            summary.push(format!("{id}@{alpha}: {} checked", r.checked));
        }
    }
    Ok(summary.join(", "))
}

fn demiclosedness() -> Outcome {
    let (mut applicable, mut worst) = (0, 0.0f64);
    for e in entries() {
        let m = build(e.id);
        let per_axis = if m.dim() == 1 { 9 } else { 3 };
        for &alpha in &ALPHAS {
            for x1 in starts(&m, per_axis) {
                let trace =
                    run_iteration(&m, &IterationConfig::new(alpha, x1.clone(), 1000).with_residual_tol(1e-10)).unwrap();
                if !trace.rows.iter().any(|r| r.residual < 1e-10) {
                    continue;
                }
                let last = &trace.last().x;
                let residual = m.norm.dist(&m.evaluate(last).unwrap(), last);
                ensure!(residual <= 1e-9, "{} alpha {alpha} x1 {x1:?}: residual {residual:e}", e.id);
                let r = check_demiclosed(&m, &trace, 1e-10).unwrap();
                ensure!(r.verdict != Verdict::Fail, "{} alpha {alpha} x1 {x1:?}: {}", e.id, r.message);
                applicable += 1;
                worst = worst.max(residual);
            }
        }
    }
    ensure!(applicable > 0, "no trace reached residual 1e-10");
    Ok(format!("{applicable} converged traces, worst final residual {worst:e}"))
}

fn oracle_equivalence() -> Outcome {
    let grid = 201;
    let pairs = 10 * grid * grid;
    let mut maps = Vec::new();
    for e in entries().into_iter().filter(|e| e.dim == 1) {
        let m = build(e.id);
        let exhaustive = classify(&m, &PairSamplePlan::exhaustive(grid), TAU, None, None).unwrap();
        let random = classify(&m, &PairSamplePlan::random(grid, pairs, 2024), TAU, None, None).unwrap();
        ensure!(exhaustive.len() == random.len(), "{}: report count differs", e.id);
        for (a, b) in exhaustive.iter().zip(&random) {
            ensure!(
                a.verdict == b.verdict,
                "{} {}: exhaustive {} vs random {}",
                e.id,
                a.condition,
                a.verdict,
                b.verdict
            );
        }
        maps.push(e.id);
    }
    Ok(format!("{pairs} random pairs agree on {}", maps.join(", ")))
}

fn parser() -> Outcome {
    let mut maps = Vec::new();
    for e in entries().into_iter().filter(|e| e.dim == 1) {
        let m = build(e.id);
        let Some(src) = m.to_dsl() else { continue };
        let ast = parse_piecewise(&src).map_err(|err| format!("{}: {err}", e.id))?;
        let (lo, hi) = m.domain.bounds();
        for i in 0..1001 {
            let x = if i == 1000 { hi[0] } else { lo[0] + (hi[0] - lo[0]) * i as f64 / 1000.0 };
            let hand = m.evaluate(&[x]).unwrap()[0];
            let parsed = ast.eval(x).ok_or_else(|| format!("{}: no piece at {x}", e.id))?;
            ensure!((hand - parsed).abs() <= 1e-15, "{} at {x}: {hand} vs {parsed}", e.id);
        }
        maps.push(e.id);
    }
    ensure!(maps.len() >= 5, "only {} maps have DSL form", maps.len());

    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    for (name, loc) in [("gap", "4:7"), ("overlap", "4:7"), ("image_escape", "3:15")] {
        let path = format!("{fixtures}/{name}.map");
        let out =
            Command::new(env!("CARGO_BIN_EXE_rsc-fixpoint")).args(["classify", "--mapping", &path]).output().unwrap();
        let stderr = String::from_utf8_lossy(&out.stderr);
        ensure!(out.status.code() == Some(2), "{name}: exit {:?}", out.status.code());
        ensure!(stderr.contains(&format!("{name}.map:{loc}:")), "{name}: diagnostic not located: {stderr}");
    }
    Ok(format!("round trip exact on {}; 3 fixtures exit 2 with location", maps.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("closed-form trajectory", closed_form_trajectory),
        ("fejer suite", fejer_suite),
        ("rsc definition fidelity", rsc_definition_fidelity),
        ("suzuki-step classification", suzuki_step),
        ("linear bounds for rsc maps", linear_bounds_suite),
        ("modulus of convexity", modulus_of_convexity),
        ("strong convergence under condition (I)", strong_convergence),
        ("auxiliary limits", auxiliary_limits),
        ("shifted-orbit inequality (xst1)", xst1),
        ("demiclosedness", demiclosedness),
        ("oracle equivalence", oracle_equivalence),
        ("parser", parser),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
