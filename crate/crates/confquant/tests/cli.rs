use std::path::{Path, PathBuf};
use std::process::Command;

use confquant::commands::{coeffs, quantize_config, QuantizeOptions};
use confquant::config::{ChartConfig, Component, Mode, Number, Term};
use confquant::CliError;
use confquant_core::coefficients::QuantParams;
use confquant_core::{rational, Error, Rational};

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_confquant"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn term(exponents: [u8; 3], c: Number) -> Term {
    Term {
        exponents: exponents.to_vec(),
        coefficient: c,
    }
}

fn int(n: i64) -> Number {
    Number::Int(n)
}

/// Flat metric in dimension 3 with the given symbol, density and weights.
fn flat_config(
    k: usize,
    symbol: Vec<Component>,
    density: Vec<Term>,
    lambda: &str,
    mu: &str,
) -> ChartConfig {
    let metric = (0..3)
        .map(|a| Component {
            indices: vec![a, a],
            terms: vec![term([0, 0, 0], int(1))],
        })
        .collect();
    ChartConfig {
        dimension: 3,
        signature: Default::default(),
        mode: Mode::Rational,
        order: k + 1,
        base_point: vec![int(0), int(0), int(0)],
        lambda: Number::Text(lambda.into()),
        mu: Number::Text(mu.into()),
        k,
        metric,
        symbol,
        density,
        phi: None,
        psi: None,
    }
}

#[test]
fn config_round_trip_gives_identical_jets() {
    let cfg = ChartConfig::load(&configs_dir().join("curved_k2.toml")).unwrap();
    let again = ChartConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
    assert_eq!(cfg, again);
    let a = cfg.build::<Rational>(None, true).unwrap();
    let b = again.build::<Rational>(None, true).unwrap();
    assert_eq!(a.g, b.g);
    assert_eq!(a.s, b.s);
    assert_eq!(a.f, b.f);
    let a = cfg.build::<f64>(None, true).unwrap();
    let b = again.build::<f64>(None, true).unwrap();
    let bits =
        |j: &confquant_core::Jet<f64>| j.coeffs().iter().map(|c| c.to_bits()).collect::<Vec<_>>();
    for (x, y) in a.s.comps().iter().zip(b.s.comps()) {
        assert_eq!(bits(x), bits(y));
    }
}

#[test]
fn decimals_are_rejected_in_rational_mode_only() {
    let mut cfg = flat_config(
        0,
        vec![],
        vec![term([0, 0, 0], Number::Float(0.5))],
        "1/2",
        "1/2",
    );
    cfg.symbol = vec![Component {
        indices: vec![],
        terms: vec![term([0, 0, 0], int(1))],
    }];
    let err = quantize_config(&cfg, &QuantizeOptions::default()).unwrap_err();
    assert!(matches!(err, CliError::Config(_)), "{err}");
    assert_eq!(err.status(), 2);
    let opts = QuantizeOptions {
        mode: Some(Mode::Float),
        ..Default::default()
    };
    assert_eq!(quantize_config(&cfg, &opts).unwrap().value, "0.5");
    let text = cfg.to_toml().unwrap();
    assert!(ChartConfig::from_toml(&text.replace("\"1/2\"", "0.5"))
        .unwrap()
        .params()
        .is_err());
}

#[test]
fn zeroth_order_on_flat_metric_is_the_product() {
    let symbol = vec![Component {
        indices: vec![],
        terms: vec![term([0, 0, 0], int(1))],
    }];
    let cfg = flat_config(0, symbol, vec![term([0, 0, 0], int(1))], "1/2", "1/2");
    assert_eq!(
        quantize_config(&cfg, &QuantizeOptions::default())
            .unwrap()
            .value,
        "1"
    );
}

#[test]
fn first_order_on_flat_metric_is_a_directional_derivative() {
    let cfg = ChartConfig::load(&configs_dir().join("flat_k1.toml")).unwrap();
    let out = quantize_config(&cfg, &QuantizeOptions::default()).unwrap();
    // S = (0, 3/2, 0) constant, f = x¹: S^a ∂_a f = 3/2 and Div S = 0.
    assert_eq!(out.value, "3/2");
}

#[test]
fn critical_shift_in_config_is_reported() {
    let symbol = vec![Component {
        indices: vec![0],
        terms: vec![term([0, 0, 0], int(1))],
    }];
    let cfg = flat_config(1, symbol, vec![term([1, 0, 0], int(1))], "0", "1");
    let err = quantize_config(&cfg, &QuantizeOptions::default()).unwrap_err();
    assert!(
        matches!(err, CliError::Compute(Error::Critical(h)) if h.n == 0),
        "{err}"
    );
    assert_eq!(err.status(), 3);
}

#[test]
fn symbol_index_count_must_match_degree() {
    let symbol = vec![Component {
        indices: vec![0, 1],
        terms: vec![term([0, 0, 0], int(1))],
    }];
    let cfg = flat_config(1, symbol, vec![term([0, 0, 0], int(1))], "1/2", "1/2");
    assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
}

#[test]
fn coefficient_table_examples() {
    let out = coeffs(&QuantParams::new(4, rational(1, 3), rational(1, 3), 1).unwrap());
    assert_eq!(out.c, vec![Some("1".to_string()), Some("1/3".to_string())]);
    let out = coeffs(&QuantParams::new(4, rational(0, 1), rational(3, 2), 2).unwrap());
    assert_eq!(out.c[0].as_deref(), Some("1"));
    assert!(out.critical.iter().any(|h| h.n == 2));
    assert!(out.render().contains("critical: γ₂ = 0"));
}

#[test]
fn binary_exit_codes() {
    let (code, out, _) = run(&[
        "coeffs", "-m", "4", "--lambda", "1/2", "--mu", "1/2", "-k", "1",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("C_{1,1} = 1/2"), "{out}");

    let (code, _, err) = run(&[
        "expand", "-m", "4", "--lambda", "0", "--mu", "3/2", "-k", "2",
    ]);
    assert_eq!(code, 3, "{err}");

    let (code, _, _) = run(&[
        "coeffs", "-m", "4", "--lambda", "0.5", "--mu", "1", "-k", "1",
    ]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["coeffs", "-m", "2", "--lambda", "0", "--mu", "1", "-k", "1"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);

    let (code, out, _) = run(&["verify", "oracle3", "--cases", "2"]);
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = run(&["verify", "conformal", "--mutate", "C22", "--cases", "2"]);
    assert_eq!(code, 1, "{out}");
    let (code, _, _) = run(&["verify", "flat", "--mutate", "C22"]);
    assert_eq!(code, 2);
    let (code, out, _) = run(&[
        "verify",
        "naturality",
        "--cases",
        "1",
        "--mode",
        "float",
        "--signature",
        "lorentzian",
    ]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn quantize_command_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("q.json");
    let curved = configs_dir().join("curved_k2.toml");
    let curved = curved.to_str().unwrap();

    let (code, _, err) = run(&["quantize", curved]);
    assert_eq!(
        code, 2,
        "a symbol with trace is rejected without projection: {err}"
    );

    let (code, out, err) = run(&[
        "quantize",
        curved,
        "--project-tracefree",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{out}{err}");
    assert!(
        out.contains("check conformal: pass") && out.contains("check naturality: pass"),
        "{out}"
    );
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["weight"], "2/3");
    assert_eq!(json["checks"].as_array().unwrap().len(), 2);

    let flat = configs_dir().join("flat_k1.toml");
    let (code, out, _) = run(&["quantize", flat.to_str().unwrap(), "--point", "1,-2,1/3"]);
    assert_eq!(code, 0);
    assert!(out.contains("value: 3/2"), "{out}");
}

#[test]
fn verify_report_is_structured() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("v.json");
    let (code, _, _) = run(&[
        "verify",
        "oracle2",
        "--cases",
        "1",
        "--seed",
        "9",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let records = json["records"].as_array().unwrap();
    assert_eq!(records.len(), 6);
    for r in records {
        assert_eq!(r["status"], "pass");
        assert_eq!(r["seed"], 9);
        assert_eq!(r["k"], 2);
    }
}

#[test]
fn expand_output_matches_golden_files() {
    for (k, golden) in [
        ("2", include_str!("golden/expand_k2.txt")),
        ("3", include_str!("golden/expand_k3.txt")),
    ] {
        let (code, out, _) = run(&[
            "expand", "-m", "4", "--lambda", "1/2", "--mu", "1/2", "-k", k,
        ]);
        assert_eq!(code, 0);
        assert_eq!(out, golden);
    }
    let (_, out, _) = run(&[
        "expand", "-m", "3", "--lambda", "1/3", "--mu", "2/3", "-k", "0",
    ]);
    assert!(out.ends_with("normalized:\n  ⟨S, f⟩\n"), "{out}");
}
