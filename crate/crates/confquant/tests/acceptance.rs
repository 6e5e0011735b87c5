//! Acceptance suite: nine criteria, one pass/fail line each.
//!
//! Every comparison in rational mode is literal equality of jet coefficients;
//! the only numeric budgets are pinned below.

use std::time::{Duration, Instant};

use confquant::commands::expand;
use confquant::verify::{self, default_cells, Status, Suite, VerifyOptions, VerifyReport};
use confquant_core::coefficients::{
    c_coeff, critical_deltas, is_critical, Coefficients, Mutation, QuantParams,
};
use confquant_core::quantize::{plans, principal_symbol_ok};
use confquant_core::{rational, Error, Rational};

/// Wall-clock budget for the full conformal-invariance matrix.
const MATRIX_TIME_BUDGET: Duration = Duration::from_secs(60);
/// Seeded cases per (m, k, λ, μ) cell.
const CASES_PER_CELL: usize = 20;
/// Seeded cases per structural identity.
const STRUCTURAL_CASES: usize = 50;
/// Cases per cell when probing a mutated coefficient set.
const MUTATION_CASES: usize = 5;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn options(cases: usize) -> VerifyOptions {
    VerifyOptions {
        cases,
        ..VerifyOptions::default()
    }
}

fn summarize(report: &VerifyReport) -> String {
    format!(
        "{} pass, {} fail, {} error, {} skipped",
        report.count(Status::Pass),
        report.count(Status::Fail),
        report.count(Status::Error),
        report.count(Status::Skipped)
    )
}

fn all_pass(suite: Suite, opts: &VerifyOptions) -> Outcome {
    let report = verify::run(suite, opts).map_err(|e| e.to_string())?;
    if report.passed() && report.count(Status::Pass) > 0 {
        Ok(summarize(&report))
    } else {
        Err(format!("{}\n{}", summarize(&report), report.render()))
    }
}

fn q(p: i64, d: i64) -> Rational {
    rational(p, d)
}

fn conformal_matrix() -> Outcome {
    let start = Instant::now();
    let summary = all_pass(Suite::Conformal, &options(CASES_PER_CELL))?;
    let elapsed = start.elapsed();
    if elapsed > MATRIX_TIME_BUDGET {
        return Err(format!(
            "{summary}; took {elapsed:.1?}, budget {MATRIX_TIME_BUDGET:?}"
        ));
    }
    Ok(format!("{summary} in {elapsed:.1?}"))
}

fn oracle_equivalence() -> Outcome {
    let opts = options(CASES_PER_CELL);
    let two = all_pass(Suite::Oracle2, &opts)?;
    let three = all_pass(Suite::Oracle3, &opts)?;
    Ok(format!("order 2: {two}; order 3: {three}"))
}

fn naturality() -> Outcome {
    all_pass(Suite::Naturality, &options(CASES_PER_CELL))
}

fn principal_symbol() -> Outcome {
    let mut cells = default_cells();
    for k in 4..=5 {
        cells.push(QuantParams::new(4, q(1, 3), q(2, 3), k).unwrap());
    }
    for p in &cells {
        let coeffs = Coefficients::new(p).map_err(|e| e.to_string())?;
        let plans = plans(&coeffs).map_err(|e| e.to_string())?;
        if !principal_symbol_ok(&plans) {
            return Err(format!("principal pair wrong for {p:?}"));
        }
        let (_, _, lead) = plans[0]
            .principal_pair()
            .ok_or("no principal pair at l = 0")?;
        if lead != Rational::from_integer(1.into()) {
            return Err(format!("leading coefficient {lead} for {p:?}"));
        }
    }
    Ok(format!("{} parameter cells, k up to 5", cells.len()))
}

fn flat_reduction() -> Outcome {
    let summary = all_pass(Suite::Flat, &options(CASES_PER_CELL))?;
    for m in [3, 4] {
        for (lambda, mu) in [(q(1, 2), q(1, 2)), (q(1, 3), q(2, 3)), (q(0, 1), q(1, 4))] {
            let delta = &mu - &lambda;
            let c = c_coeff(1, 1, m, &lambda, &delta).map_err(|e| e.to_string())?;
            let expected = &lambda / (Rational::from_integer(1.into()) - &delta);
            if c != expected {
                return Err(format!("C(1,1) = {c}, expected {expected} (m={m})"));
            }
        }
    }
    Ok(format!("{summary}; C(1,1) = λ/(1−δ) on all weights"))
}

fn criticality() -> Outcome {
    // γ_n = (m + n − mδ)/m vanishes at δ = (m + n)/m; degree k has
    // denominators γ_n for n in [k−1, 2k−2].
    let by_degree =
        |m: i64, k: i64| -> Vec<Rational> { (k - 1..=2 * k - 2).map(|n| q(m + n, m)).collect() };
    let expected_sets = [
        (3, 2, vec![q(1, 1), q(4, 3), q(5, 3)]),
        (3, 3, vec![q(1, 1), q(4, 3), q(5, 3), q(2, 1), q(7, 3)]),
        (4, 2, vec![q(1, 1), q(5, 4), q(3, 2)]),
        (4, 3, vec![q(1, 1), q(5, 4), q(3, 2), q(7, 4), q(2, 1)]),
    ];
    for (m, k_max, want) in &expected_sets {
        let got = critical_deltas(*m, *k_max);
        if &got != want {
            return Err(format!("m={m} k_max={k_max}: got {got:?}, want {want:?}"));
        }
    }
    let hits = is_critical(4, &q(3, 2), 2);
    if !hits.iter().any(|h| h.n == 2 && h.k == 2) {
        return Err(format!("m=4 δ=3/2: expected a γ₂ hit, got {hits:?}"));
    }
    let mut checked = 0;
    for m in [3usize, 4] {
        for num in -2 * m as i64..=6 * m as i64 {
            let delta = q(num, 2 * m as i64);
            for k in 1..=3usize {
                for l in 0..=k {
                    let zero_at: Vec<Rational> = (2 * k as i64 - l as i64 - 1..=2 * k as i64 - 2)
                        .map(|n| q(m as i64 + n, m as i64))
                        .collect();
                    let should_fail = zero_at.contains(&delta);
                    let failed =
                        matches!(c_coeff(k, l, m, &q(1, 3), &delta), Err(Error::Critical(_)));
                    if failed != should_fail {
                        return Err(format!("C({k},{l}) at m={m} δ={delta}: failed={failed}"));
                    }
                    checked += 1;
                }
                let degree_set = by_degree(m as i64, k as i64);
                let any = (0..=k).any(|l| c_coeff(k, l, m, &q(1, 3), &delta).is_err());
                if any != degree_set.contains(&delta) {
                    return Err(format!("degree {k} at m={m} δ={delta}"));
                }
            }
        }
    }
    Ok(format!(
        "m=3,4 k_max=2,3 sets match; m=4 k_max=2 gives {{1, 5/4, 3/2}} (includes the k=1 hit γ₀ at δ=1); {checked} C(k,l) evaluations"
    ))
}

fn structural() -> Outcome {
    let cells = [3, 4]
        .into_iter()
        .map(|m| QuantParams::new(m, q(1, 3), q(2, 3), 3).unwrap())
        .collect();
    let opts = VerifyOptions {
        cells,
        ..options(STRUCTURAL_CASES)
    };
    all_pass(Suite::Structural, &opts)
}

fn mutation_sensitivity() -> Outcome {
    let mut lines = Vec::new();
    for id in ["C22", "C31", "T1J0", "T2JK", "GSHIFT"] {
        let opts = VerifyOptions {
            mutate: Mutation::parse(id),
            ..options(MUTATION_CASES)
        };
        let report = verify::run(Suite::Conformal, &opts).map_err(|e| e.to_string())?;
        let caught = report.count(Status::Fail);
        if report.count(Status::Error) > 0 {
            return Err(format!("{id}: {}", summarize(&report)));
        }
        if caught == 0 {
            return Err(format!("{id} escaped every case"));
        }
        lines.push(format!("{id} caught {caught}"));
    }
    Ok(lines.join(", "))
}

/// The displayed formulas, with products written `λm` and `mγ_n`, products
/// marked by `·` and the `∂T` term written out as `(∇_s r)` / `i(∇_s r)`.
const DISPLAY_K2: [&str; 3] = [
    "⟨S, (∇_s² − λm·r)f⟩",
    "C_{2,1}·⟨Div S, ∇_s f⟩",
    "C_{2,2}·⟨(Div² + mγ₂·i(r))S, f⟩",
];
const DISPLAY_K3: [&str; 4] = [
    "⟨S, (∇_s³ − (3λm+2)·r∨∇_s − λm·(∇_s r))f⟩",
    "C_{3,1}·⟨Div S, (∇_s² − λm·r)f⟩",
    "C_{3,2}·⟨(Div² + mγ₄·i(r))S, ∇_s f⟩",
    "C_{3,3}·⟨(Div³ + (3mγ₄−2)·i(r)Div + mγ₄·i(∇_s r))S, f⟩",
];

fn golden_files() -> Outcome {
    let golden = [
        (
            2,
            include_str!("golden/expand_k2.txt"),
            &DISPLAY_K2[..],
            "D² + (−λm)·T",
        ),
        (
            3,
            include_str!("golden/expand_k3.txt"),
            &DISPLAY_K3[..],
            "D³ + mγ₄·DT + (2mγ₄−2)·TD",
        ),
    ];
    for (k, file, display, raw_top) in golden {
        let params = QuantParams::new(4, q(1, 2), q(1, 2), k).unwrap();
        let out = expand(&params).map_err(|e| e.to_string())?;
        let text = out.render();
        if text != file {
            return Err(format!(
                "k={k}: expand output differs from golden file:\n{text}"
            ));
        }
        if out.formula != display {
            return Err(format!(
                "k={k}: normalized formula {:?} differs from display",
                out.formula
            ));
        }
        if !file.contains(raw_top) {
            return Err(format!("k={k}: raw word expansion {raw_top:?} missing"));
        }
    }
    Ok("k=2 and k=3 match symbol for symbol".into())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("conformal invariance (exact)", conformal_matrix),
        ("oracle equivalence", oracle_equivalence),
        ("naturality (exact)", naturality),
        ("principal symbol", principal_symbol),
        ("flat-case reduction", flat_reduction),
        ("criticality", criticality),
        ("structural invariants", structural),
        ("mutation sensitivity", mutation_sensitivity),
        ("expansion golden files", golden_files),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(detail) => println!("[{}] PASS {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                println!("[{}] FAIL {name}: {detail} ({secs:.1}s)", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
