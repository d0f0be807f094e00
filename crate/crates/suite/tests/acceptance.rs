//! Acceptance criteria, one line each. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use perc_lab::dims::{check_report, full_report, Windows};
use perc_lab::engine::{generate_replicate, level_counts, PercolationParams};
use perc_lab::estimators::{estimate_boxdim, estimate_measure, estimate_survival};
use perc_lab::sequence::{Method, ProbSequence};
use perc_lab::witness::{build, estimate_witness_measure, WitnessSpec};
use proptest::test_runner::{Config, TestCaseError, TestRunner};

#[path = "../../core/tests/common/mod.rs"]
mod common;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn dim(n: u32, m: u32, p: f64) -> f64 {
    n as f64 + p.ln() / (m as f64).ln()
}

fn four_dims_err(r: &perc_lab::DimensionReport, target: f64) -> f64 {
    [r.hausdorff, r.packing, r.assouad, r.box_lower, r.box_upper].iter().map(|d| (d - target).abs()).fold(0.0, f64::max)
}

fn grid() -> Vec<(u32, u32, f64)> {
    let mut out = Vec::new();
    for n in 1..=3u32 {
        for m in [2u32, 3] {
            for p in [0.55, 0.7, 0.9] {
                if p > (m as f64).powi(-(n as i32)) {
                    out.push((n, m, p));
                }
            }
        }
    }
    out
}

fn mfp_identities() -> Outcome {
    let mut worst = 0.0f64;
    let mut measure_ok = true;
    for (n, m, p) in grid() {
        let r = full_report(&ProbSequence::mfp(p).unwrap(), n, m, Windows::default()).unwrap();
        worst = worst.max(four_dims_err(&r, dim(n, m, p)));
        measure_ok &= r.expected_measure == 0.0 && r.method == Method::Analytic;
    }
    outcome(
        worst < 1e-9 && measure_ok,
        format!("{} grid points, max |dim − (n + log_m p)| = {worst:.3e}, E = 0: {measure_ok}", grid().len()),
    )
}

/// The same sequence as an explicit prefix, forcing the windowed route.
fn as_explicit(seq: &ProbSequence, len: u64, tail: f64) -> ProbSequence {
    let prefix = (1..=len).map(|k| seq.eval_pk(k).unwrap()).collect();
    ProbSequence::explicit(prefix, Some(tail)).unwrap()
}

fn table1() -> Outcome {
    let windows = Windows::default();
    let len = windows.k_cap + windows.t.hi + 2;
    let (mut analytic, mut windowed) = (0.0f64, 0.0f64);
    for (n, m, p) in grid() {
        let f1 = ProbSequence::table1_family1(p, 1.0).unwrap();
        let f2 = ProbSequence::table1_family2(p, 0.5).unwrap();
        for (seq, tail, e, h) in [(&f1, p, 0.0, dim(n, m, p)), (&f2, 1.0, p, n as f64)] {
            let a = full_report(seq, n, m, windows).unwrap();
            analytic = analytic.max((a.expected_measure - e).abs()).max((a.hausdorff - h).abs());
            let w = full_report(&as_explicit(seq, len, tail), n, m, windows).unwrap();
            assert_eq!(w.method, Method::Windowed);
            windowed = windowed.max((w.expected_measure - e).abs()).max((w.hausdorff - h).abs());
            if seq == &f1 {
                windowed = windowed.max(four_dims_err(&w, h));
            }
        }
    }
    outcome(
        analytic < 1e-9 && windowed < 5e-3,
        format!("max err analytic {analytic:.3e} (tol 1e-9), windowed [64, 512] {windowed:.3e} (tol 5e-3)"),
    )
}

fn binomial_moments() -> Outcome {
    let params = PercolationParams::new(2, 2, 2, ProbSequence::mfp(0.9).unwrap(), 2024);
    let xs: Vec<f64> = (0..10_000).map(|i| level_counts(&params, i).unwrap()[2] as f64).collect();
    let r = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / r;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1.0);
    let se = (var / r).sqrt();
    let target = 16.0 * 0.81;
    outcome(
        (mean - target).abs() < 4.0 * se,
        format!("mean X_2 = {mean:.5} ± {se:.5}, target {target}, |z| = {:.3}", (mean - target).abs() / se),
    )
}

fn expected_measure() -> Outcome {
    let seq = ProbSequence::table1_family2(0.5, 0.5).unwrap();
    let r = estimate_measure(&PercolationParams::new(1, 2, 12, seq, 2024), 2000).unwrap();
    let theory = 0.5f64.powf(1.0 - 2f64.powi(-12));
    let z = (r.estimate - theory) / r.std_error;
    outcome(
        z.abs() < 4.0 && (r.theory.unwrap() - theory).abs() < 1e-12,
        format!("estimate {:.6} ± {:.6}, theory {theory:.6}, z = {z:.3}", r.estimate, r.std_error),
    )
}

fn survival_threshold() -> Outcome {
    let run = |p| {
        let params = PercolationParams::new(1, 2, 14, ProbSequence::mfp(p).unwrap(), 2024);
        estimate_survival(&params, 10_000).unwrap()
    };
    let low = run(0.45);
    let high = run(0.8);
    // q = (1 − p + p q)^2 has smallest root ((1 − p) / p)^2 for p > 1/2.
    let q = (0.2f64 / 0.8).powi(2);
    let low_ok = low.estimate < 0.01;
    let high_ok = (high.estimate - (1.0 - q)).abs() < 0.02;
    outcome(
        low_ok && high_ok,
        format!(
            "p=0.45: {:.4} (need < 0.01, exact at K=14 is {:.4}) {}; p=0.8: {:.4} vs {:.4} ± 0.02 {}",
            low.estimate,
            low.theory_finite_depth.unwrap(),
            if low_ok { "ok" } else { "MISS" },
            high.estimate,
            1.0 - q,
            if high_ok { "ok" } else { "MISS" }
        ),
    )
}

fn box_dimension() -> Outcome {
    let params = PercolationParams::new(2, 2, 10, ProbSequence::mfp(0.9).unwrap(), 2024);
    let r = estimate_boxdim(&params, 20, (4, 10)).unwrap();
    let target = dim(2, 2, 0.9);
    outcome(
        (r.slope - target).abs() < 0.15 && r.replicates == 20,
        format!("mean slope {:.4} over {} survivors, target {target:.4} ± 0.15", r.slope, r.replicates),
    )
}

fn witness_ledger() -> Outcome {
    let cases = [(0.5, 0.0, 1, 8), (1.0, 0.0, 1, 8), (1.0, 1.5, 1, 8), (2.0, 2.5, 2, 8)];
    let mut ok = true;
    let mut notes = Vec::new();
    for (r, l, n, j) in cases {
        let mut spec = WitnessSpec::sghdt(r, l, n, 2);
        spec.terms = j;
        let w = build(&spec).unwrap();
        let target = if l > 0.0 {
            n as f64
        } else if r.fract() == 0.0 {
            r - 2f64.powi(-(j as i32))
        } else {
            r
        };
        let hit = w.combined_dim == target && w.combined_measure == l;
        ok &= hit;
        notes.push(format!("({r}, {l}) dim {} measure {}", w.combined_dim, w.combined_measure));
    }
    let w = build(&WitnessSpec::sghdt(1.0, 1.5, 1, 2)).unwrap();
    let depth: u32 = 12;
    let est = estimate_witness_measure(&w, depth, 2000, 2024).unwrap();
    // G2: volume 2, p_k = 0.75^{2^{-k}}; G1: volume 2, p_k = 2^{-1/2}.
    let g2 = 2.0 * 0.75f64.powf(1.0 - 2f64.powi(-(depth as i32)));
    let g1 = 2.0 * 2f64.powf(-0.5 * depth as f64);
    let theory = g2 + g1;
    let mc_ok = (est.estimate - theory).abs() < 4.0 * est.std_error && (est.theory.unwrap() - theory).abs() < 1e-12;
    ok &= mc_ok;
    outcome(
        ok,
        format!(
            "{}; MC (1, 1.5) at K={depth}: {:.5} ± {:.5} vs 1.5·{:.6} = {theory:.5}",
            notes.join(", "),
            est.estimate,
            est.std_error,
            theory / 1.5
        ),
    )
}

fn property_suites() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 200, failure_persistence: None, ..Config::default() });
    let structural = runner.run(&common::small_params(), |params| {
        let a = generate_replicate(&params, 3).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let b = generate_replicate(&params, 3).unwrap();
        if !a.is_nested() || a != b || level_counts(&params, 3).unwrap() != a.counts() {
            return Err(TestCaseError::fail("nesting or determinism"));
        }
        Ok(())
    });
    let formula = runner.run(&(common::catalog_seq(), 1u32..=3, 2u32..=4), |(seq, n, m)| {
        let r = full_report(&seq, n, m, Windows::default()).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let tol = 1e-9;
        let ordered = r.hausdorff <= r.packing + tol && r.packing <= r.assouad + tol && r.assouad <= n as f64 + tol;
        let positive_iff_full = (r.expected_measure > 0.0) == ((r.hausdorff - n as f64).abs() < tol);
        if !ordered || !positive_iff_full || check_report(&r).is_err() {
            return Err(TestCaseError::fail(format!("{r:?}")));
        }
        Ok(())
    });
    let detail = format!(
        "nesting + determinism: {}, ordering + measure/dimension equivalence: {} (200 cases each)",
        if structural.is_ok() { "ok" } else { "FAIL" },
        if formula.is_ok() { "ok" } else { "FAIL" }
    );
    if let Err(e) = &structural {
        eprintln!("  {e}");
    }
    if let Err(e) = &formula {
        eprintln!("  {e}");
    }
    outcome(structural.is_ok() && formula.is_ok(), detail)
}

type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("analytic dimension identities", 1, mfp_identities),
        ("measure/dimension table", 1, table1),
        ("level-2 count moments", 10, binomial_moments),
        ("expected measure", 30, expected_measure),
        ("survival threshold", 60, survival_threshold),
        ("box dimension", 120, box_dimension),
        ("witness ledger", 60, witness_ledger),
        ("property suites", 60, property_suites),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(*budget);
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {} {:<32} {}  {} [{:.2}s / {}s]",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            budget
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
