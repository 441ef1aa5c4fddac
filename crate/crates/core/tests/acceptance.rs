//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! lines always show; exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use homdist::distance::{color_distance, SolverOptions};
use homdist::generate::figure1_graph;
use homdist::graph::{rational, to_f64};
use homdist::inversion::invert;
use homdist::refine::quotient;
use homdist::suite::{evaluate_suite, instance_rng, random_weighted, SuiteOutcome};
use homdist::{Graph, Rational, Result};
use rand::Rng;

const SEED: u64 = 0;

struct Verdict {
    pass: bool,
    detail: String,
}

fn from_suite(out: SuiteOutcome) -> Verdict {
    let detail = match out.failures.first() {
        None => format!("{} rows, all hold", out.rows.len()),
        Some(f) => format!("{} of {} rows fail, first: {f}", out.failures.len(), out.rows.len()),
    };
    Verdict {
        pass: out.passed(),
        detail,
    }
}

fn suite(name: &str) -> Result<Verdict> {
    evaluate_suite(name, SEED).map(from_suite)
}

/// Cut norm of the kernel difference between a weighted graph and a one-vertex
/// graph with loop weight `b`, over every pair of atom sets. Exact.
fn singleton_cut_distance(q: &homdist::WeightedGraph, b: &Rational) -> Rational {
    let q = q.normalized();
    let k = q.vertex_count();
    let mut best = Rational::from_integer(0.into());
    for s in 0u32..1 << k {
        for t in 0u32..1 << k {
            let mut sum = Rational::from_integer(0.into());
            for i in (0..k).filter(|i| s >> i & 1 == 1) {
                for j in (0..k).filter(|j| t >> j & 1 == 1) {
                    sum += q.alpha_at(i) * q.alpha_at(j) * (q.beta(i, j) - b);
                }
            }
            let abs = if sum < Rational::from_integer(0.into()) { -sum } else { sum };
            if abs > best {
                best = abs;
            }
        }
    }
    best
}

fn figure_one() -> Result<Verdict> {
    let mut out = suite("fig1-separation")?;
    let oracle = singleton_cut_distance(&quotient(&figure1_graph(10)?)?, &rational(2, 3));
    let rep = color_distance(&figure1_graph(10)?, &Graph::complete(3), &SolverOptions::for_cut_distance())?;
    let ok = oracle == rational(16, 135) && (rep.value - to_f64(&oracle)).abs() <= 1e-12;
    out.pass &= ok;
    out.detail = format!("{}; rectangle oracle {oracle}, solver {}", out.detail, rep.value);
    Ok(out)
}

fn inversion() -> Result<Verdict> {
    let mut out = suite("inversion")?;
    let mut plans = 0;
    for inst in 0..20u64 {
        let mut rng = instance_rng(SEED, inst);
        let v = rng.gen_range(1..=4);
        let h = random_weighted(&mut rng, v)?;
        for n in [2 * v, 4 * v, 8 * v] {
            let inv = invert(&h, n)?;
            if inv.plan.check().is_err() || inv.graph.vertex_count() != n * n {
                out.pass = false;
            }
            plans += 1;
        }
    }
    out.detail = format!("{}; {plans} plans satisfy the integer conditions", out.detail);
    Ok(out)
}

fn declared() -> Result<Verdict> {
    // no explicit constants exist for these statements; the zero-distance
    // direction is what criterion 4 checks
    let covered = evaluate_suite("blowup-zero", SEED)?.passed();
    Ok(Verdict {
        pass: covered,
        detail: "inverse counting statements carry no constants; only their zero-distance case is tested (criterion 4)"
            .into(),
    })
}

type Check = fn() -> Result<Verdict>;

fn main() -> ExitCode {
    let criteria: [(u32, &str, u64, Check); 10] = [
        (1, "oracle equivalence", 10, || suite("oracle-hom")),
        (2, "quotient preservation", 10, || suite("quotient-hom")),
        (3, "three-part example pipeline", 60, figure_one),
        (4, "zero-distance witnesses", 60, || suite("blowup-zero")),
        (5, "path counting bound", 120, || suite("path-counting")),
        (6, "norm sandwich", 30, || suite("norm-sandwich")),
        (7, "hierarchy consistency", 60, || suite("hierarchy")),
        (8, "inversion bound", 120, inversion),
        (9, "composition subadditivity", 60, || suite("composition")),
        (10, "non-quantitative statements declared", 60, declared),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let verdict = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let (pass, detail) = match verdict {
            Ok(v) => (v.pass && in_time, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {}: {name}: {detail} ({:.2} s, limit {limit} s{})",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", exceeded" }
        );
    }
    println!("acceptance: {} of 10 criteria pass", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
