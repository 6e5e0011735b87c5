//! Verification suites over seeded random cases.

use std::fmt::Write as _;

use clap::ValueEnum;
use confquant_core::coefficients::{critical_for_degree, Coefficients, Mutation, QuantParams};
use confquant_core::harness::{
    cell_label, generate_case, structural_checks, Case, CaseSpec, CheckReport,
};
use confquant_core::quantize::{plans, principal_symbol_ok};
use confquant_core::{rational, Error, Rational, Scalar};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Mode, SignatureProfile};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// `Q(g) = Q(e^{2φ}g)` exactly
    Conformal,
    /// `Q(ψ*g, ψ*S)(ψ*f) = ψ*Q(g, S)(f)`, for `k ≤ 2`
    Naturality,
    /// agreement with the closed order-2 formula
    Oracle2,
    /// agreement with the closed order-3 formula
    Oracle3,
    /// flat metric against raw partial derivatives
    Flat,
    /// trace-free preservation, `∇g = 0`, Ricci symmetry, Leibniz identities (`k = 3`)
    Structural,
    /// `T`-free word pair of every plan row is `(Div^l, ∇_s^{k−l})` with weight `C_{k,l}`
    Principal,
    /// every suite above
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Conformal,
        Suite::Naturality,
        Suite::Oracle2,
        Suite::Oracle3,
        Suite::Flat,
        Suite::Structural,
        Suite::Principal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Conformal => "conformal",
            Suite::Naturality => "naturality",
            Suite::Oracle2 => "oracle2",
            Suite::Oracle3 => "oracle3",
            Suite::Flat => "flat",
            Suite::Structural => "structural",
            Suite::Principal => "principal",
            Suite::All => "all",
        }
    }

    fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Self::EACH.to_vec(),
            s => vec![s],
        }
    }

    /// Whether the suite says anything about degree `k`.
    fn applies(self, k: usize) -> bool {
        match self {
            Suite::Naturality => k <= 2,
            Suite::Oracle2 => k == 2,
            Suite::Oracle3 => k == 3,
            Suite::Structural => k == 3,
            _ => true,
        }
    }
}

/// `m ∈ {3, 4}`, `k ∈ {0, …, 3}`, `(λ, μ) ∈ {(1/2, 1/2), (1/3, 2/3), (0, 1/4)}`.
pub fn default_cells() -> Vec<QuantParams> {
    let weights = [
        (rational(1, 2), rational(1, 2)),
        (rational(1, 3), rational(2, 3)),
        (rational(0, 1), rational(1, 4)),
    ];
    let mut out = Vec::new();
    for m in [3, 4] {
        for k in 0..=3 {
            for (lambda, mu) in &weights {
                out.push(QuantParams::new(m, lambda.clone(), mu.clone(), k).expect("m ≥ 3"));
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub mode: Mode,
    /// Case jet order; defaults to `k + 1`.
    pub order: Option<usize>,
    /// Seed of the first case; case `i` uses `seed + i`.
    pub seed: u64,
    pub cases: usize,
    pub signature: SignatureProfile,
    /// Perturbs one coefficient (conformal suite only).
    pub mutate: Option<Mutation>,
    pub cells: Vec<QuantParams>,
    /// Critical cells are skipped when true and are an error otherwise.
    pub skip_critical: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            mode: Mode::Rational,
            order: None,
            seed: 0,
            cases: 20,
            signature: SignatureProfile::Euclidean,
            mutate: None,
            cells: default_cells(),
            skip_critical: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
    Skipped,
}

/// One case (or one cell, for case-independent suites).
#[derive(Debug, Clone, Serialize)]
pub struct CaseRecord {
    pub suite: &'static str,
    pub seed: Option<u64>,
    pub m: usize,
    pub k: usize,
    pub lambda: String,
    pub mu: String,
    pub mode: Mode,
    pub signature: SignatureProfile,
    pub status: Status,
    pub max_deviation: Option<f64>,
    pub relative_deviation: Option<f64>,
    pub order: Option<usize>,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub mutation: Option<String>,
    pub records: Vec<CaseRecord>,
}

impl VerifyReport {
    pub fn count(&self, status: Status) -> usize {
        self.records.iter().filter(|r| r.status == status).count()
    }

    /// True when no case failed or errored.
    pub fn passed(&self) -> bool {
        self.count(Status::Fail) == 0 && self.count(Status::Error) == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Per-cell summary lines followed by every failing case.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(m) = &self.mutation {
            let _ = writeln!(out, "mutation: {m}");
        }
        let mut cells: Vec<(&str, usize, usize, &str, &str)> = Vec::new();
        for r in &self.records {
            let key = (r.suite, r.m, r.k, r.lambda.as_str(), r.mu.as_str());
            if !cells.contains(&key) {
                cells.push(key);
            }
        }
        for key in &cells {
            let rows: Vec<&CaseRecord> = self
                .records
                .iter()
                .filter(|r| (r.suite, r.m, r.k, r.lambda.as_str(), r.mu.as_str()) == *key)
                .collect();
            let pass = rows.iter().filter(|r| r.status == Status::Pass).count();
            let label = format!("{} m={} k={} λ={} μ={}", key.0, key.1, key.2, key.3, key.4);
            if rows.iter().all(|r| r.status == Status::Skipped) {
                let why = rows[0].detail.as_deref().unwrap_or("");
                let _ = writeln!(out, "{label}: skipped ({why})");
                continue;
            }
            let worst = rows
                .iter()
                .filter_map(|r| r.relative_deviation)
                .fold(0.0, f64::max);
            let _ = write!(out, "{label}: {pass}/{} pass", rows.len());
            if self.records.iter().any(|r| r.mode == Mode::Float) {
                let _ = write!(out, " (max relative deviation {worst:e})");
            }
            out.push('\n');
        }
        for r in self
            .records
            .iter()
            .filter(|r| matches!(r.status, Status::Fail | Status::Error))
        {
            let _ = writeln!(
                out,
                "{:?}: {} m={} k={} λ={} μ={} seed={} {}",
                r.status,
                r.suite,
                r.m,
                r.k,
                r.lambda,
                r.mu,
                r.seed.map_or("-".into(), |s| s.to_string()),
                r.detail.as_deref().unwrap_or("")
            );
        }
        let _ = writeln!(
            out,
            "total: {} pass, {} fail, {} error, {} skipped",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Error),
            self.count(Status::Skipped)
        );
        out
    }
}

struct Cell<'a> {
    suite: Suite,
    params: &'a QuantParams,
    opts: &'a VerifyOptions,
}

impl Cell<'_> {
    fn record(&self, seed: Option<u64>, status: Status) -> CaseRecord {
        CaseRecord {
            suite: self.suite.name(),
            seed,
            m: self.params.m,
            k: self.params.k,
            lambda: self.params.lambda.to_string(),
            mu: self.params.mu.to_string(),
            mode: self.opts.mode,
            signature: self.opts.signature,
            status,
            max_deviation: None,
            relative_deviation: None,
            order: None,
            detail: None,
        }
    }

    fn spec(&self, seed: u64) -> CaseSpec {
        let p = self.params;
        let spec =
            CaseSpec::new(seed, p.clone()).with_signature(self.opts.signature.signature(p.m));
        match self.opts.order {
            Some(o) => spec.with_order(o),
            None => spec,
        }
    }

    fn run_case<S: Scalar>(&self, seed: u64) -> CaseRecord {
        let outcome = generate_case::<S>(&self.spec(seed)).and_then(|case| self.check(&case));
        let mut rec = self.record(Some(seed), Status::Pass);
        match outcome {
            Ok(Outcome::Compared(r)) => {
                rec.status = if r.equal { Status::Pass } else { Status::Fail };
                rec.max_deviation = Some(r.max_deviation);
                rec.relative_deviation = Some(r.relative_deviation);
                rec.order = Some(r.order);
            }
            Ok(Outcome::Named(failed)) => {
                if !failed.is_empty() {
                    rec.status = Status::Fail;
                    rec.detail = Some(failed.join(", "));
                }
            }
            Err(e) => {
                rec.status = Status::Error;
                rec.detail = Some(e.to_string());
            }
        }
        rec
    }

    fn check<S: Scalar>(&self, case: &Case<S>) -> confquant_core::Result<Outcome> {
        Ok(match self.suite {
            Suite::Conformal => Outcome::Compared(match self.opts.mutate {
                Some(m) => case.conformal_mutated(m)?,
                None => case.conformal()?,
            }),
            Suite::Naturality => Outcome::Compared(case.naturality()?),
            Suite::Oracle2 | Suite::Oracle3 => Outcome::Compared(case.oracle()?),
            Suite::Flat => Outcome::Compared(case.flat()?),
            Suite::Structural => Outcome::Named(
                structural_checks(case)?
                    .into_iter()
                    .filter(|(_, ok)| !ok)
                    .map(|(name, _)| name)
                    .collect(),
            ),
            Suite::Principal | Suite::All => unreachable!("not a per-case suite"),
        })
    }

    fn run(&self) -> Vec<CaseRecord> {
        if self.suite == Suite::Principal {
            let mut rec = self.record(None, Status::Pass);
            match Coefficients::new(self.params).and_then(|c| plans(&c)) {
                Ok(p) if principal_symbol_ok(&p) => {}
                Ok(_) => rec.status = Status::Fail,
                Err(e) => {
                    rec.status = Status::Error;
                    rec.detail = Some(e.to_string());
                }
            }
            return vec![rec];
        }
        let seeds: Vec<u64> = (0..self.opts.cases as u64)
            .map(|i| self.opts.seed + i)
            .collect();
        seeds
            .into_par_iter()
            .map(|seed| match self.opts.mode {
                Mode::Rational => self.run_case::<Rational>(seed),
                Mode::Float => self.run_case::<f64>(seed),
            })
            .collect()
    }
}

enum Outcome {
    Compared(CheckReport),
    /// Names of failed identities.
    Named(Vec<&'static str>),
}

/// Runs `suite` over every applicable cell.
pub fn run(suite: Suite, opts: &VerifyOptions) -> CliResult<VerifyReport> {
    if opts.mutate.is_some() && suite != Suite::Conformal {
        return Err(CliError::Usage(
            "--mutate only applies to the conformal suite".into(),
        ));
    }
    if opts.cases == 0 {
        return Err(CliError::Usage("--cases must be positive".into()));
    }
    let mut records = Vec::new();
    for s in suite.expand() {
        for params in &opts.cells {
            if !s.applies(params.k) {
                continue;
            }
            let cell = Cell {
                suite: s,
                params,
                opts,
            };
            if let Some(h) = critical_for_degree(params.m, &params.delta(), params.k).first() {
                if !opts.skip_critical {
                    return Err(Error::Critical(*h).into());
                }
                let mut rec = cell.record(None, Status::Skipped);
                rec.detail = Some(format!(
                    "critical: γ_{} = 0 for {}",
                    h.n,
                    cell_label(params)
                ));
                records.push(rec);
                continue;
            }
            records.extend(cell.run());
        }
    }
    if records.iter().all(|r| r.status == Status::Skipped) && !records.is_empty() {
        return Err(CliError::Usage(format!(
            "no cell of suite {} is non-critical",
            suite.name()
        )));
    }
    if records.is_empty() {
        return Err(CliError::Usage(format!(
            "suite {} does not apply to the selected degrees",
            suite.name()
        )));
    }
    Ok(VerifyReport {
        mutation: opts.mutate.map(|m| format!("{m:?}")),
        records,
    })
}
