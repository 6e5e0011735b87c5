//! The `coeffs`, `expand` and `quantize` commands. Each returns a value that
//! renders to text and serializes to a JSON record.

use std::fmt::Write as _;

use confquant_core::coefficients::{critical_for_degree, CoefficientTable, QuantParams};
use confquant_core::harness::{check_conformal_invariance, check_naturality, CheckReport};
use confquant_core::quantize::quantize;
use confquant_core::symbolic::{normal_formula_lines, raw_expansion, subscript, Notation};
use confquant_core::{Error, Rational};
use serde::Serialize;

use crate::config::{ChartConfig, ConfigScalar, Mode, Number};
use crate::error::{CliError, CliResult};

fn q(r: &Rational) -> String {
    r.to_string()
}

fn header(p: &QuantParams) -> String {
    format!(
        "m = {}, λ = {}, μ = {}, δ = {}, k = {}",
        p.m,
        p.lambda,
        p.mu,
        p.delta(),
        p.k
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalRecord {
    pub k: usize,
    pub l: usize,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoeffsOutput {
    pub m: usize,
    pub lambda: String,
    pub mu: String,
    pub delta: String,
    pub k: usize,
    /// `C_{k,l}` for `l = 0..=k`; `None` where a denominator vanishes.
    pub c: Vec<Option<String>>,
    /// `γ_n` for `n = 0..2k`.
    pub gamma: Vec<String>,
    pub alpha: String,
    pub critical: Vec<CriticalRecord>,
}

/// Coefficient table. Criticality is reported, never fatal.
pub fn coeffs(params: &QuantParams) -> CoeffsOutput {
    let t = CoefficientTable::new(params);
    CoeffsOutput {
        m: params.m,
        lambda: q(&params.lambda),
        mu: q(&params.mu),
        delta: q(&params.delta()),
        k: params.k,
        c: t.c.iter().map(|c| c.as_ref().map(q)).collect(),
        gamma: t.gammas.iter().map(q).collect(),
        alpha: q(&t.alpha),
        critical: t
            .critical
            .iter()
            .map(|h| CriticalRecord {
                k: h.k,
                l: h.l,
                n: h.n,
            })
            .collect(),
    }
}

impl CoeffsOutput {
    pub fn render(&self) -> String {
        let k = self.k;
        let mut out = format!(
            "coefficients: m = {}, λ = {}, μ = {}, δ = {}, k = {k}\n",
            self.m, self.lambda, self.mu, self.delta
        );
        for (l, c) in self.c.iter().enumerate() {
            let v = c.as_deref().unwrap_or("undefined (critical)");
            let _ = writeln!(out, "  C_{{{k},{l}}} = {v}");
        }
        for (n, g) in self.gamma.iter().enumerate() {
            let _ = writeln!(out, "  γ{} = {g}", subscript(n));
        }
        let _ = writeln!(out, "  α_{{{k},0}} = {}", self.alpha);
        if self.critical.is_empty() {
            out.push_str("  critical: none\n");
        } else {
            for h in &self.critical {
                let _ = writeln!(
                    out,
                    "  critical: γ{} = 0 (k = {}, l = {})",
                    subscript(h.n),
                    h.k,
                    h.l
                );
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpandRow {
    pub l: usize,
    pub c: String,
    pub symbol: String,
    pub density: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpandOutput {
    pub m: usize,
    pub lambda: String,
    pub mu: String,
    pub k: usize,
    pub rows: Vec<ExpandRow>,
    pub formula: Vec<String>,
    #[serde(skip)]
    header: String,
}

/// Word expansion of every pairing plus the Leibniz-normalized formula.
pub fn expand(params: &QuantParams) -> CliResult<ExpandOutput> {
    let k = params.k;
    let delta = params.delta();
    if let Some(h) = critical_for_degree(params.m, &delta, k).first() {
        return Err(Error::Critical(*h).into());
    }
    let table = CoefficientTable::new(params);
    let dens = Notation::density();
    let sym = Notation::symbol(k);
    let rows = (0..=k)
        .map(|l| ExpandRow {
            l,
            c: q(table.c[l].as_ref().expect("non-critical")),
            symbol: sym.render_raw(&raw_expansion(l)),
            density: dens.render_raw(&raw_expansion(k - l)),
        })
        .collect();
    Ok(ExpandOutput {
        m: params.m,
        lambda: q(&params.lambda),
        mu: q(&params.mu),
        k,
        rows,
        formula: normal_formula_lines(k),
        header: header(params),
    })
}

impl ExpandOutput {
    pub fn render(&self) -> String {
        let k = self.k;
        let sym_var = Notation::symbol(k).var;
        let mut out = format!("expansion: {}\n", self.header);
        let _ = writeln!(out, "density side: D = ∇_s, T = r∨, β = −λm");
        let _ = writeln!(out, "symbol side: D = Div, T = i(r), β = {sym_var}");
        for row in &self.rows {
            let l = row.l;
            let _ = writeln!(out, "\nl = {l}: C_{{{k},{l}}} = {}", row.c);
            let _ = writeln!(out, "  symbol  π{}: {}", subscript(l), row.symbol);
            let _ = writeln!(out, "  density π{}: {}", subscript(k - l), row.density);
        }
        out.push_str("\nnormalized:\n");
        for (i, line) in self.formula.iter().enumerate() {
            let lead = if i == 0 { "  " } else { "  + " };
            let _ = writeln!(out, "{lead}{line}");
        }
        out
    }
}

/// Scalars that can be printed in reports.
pub trait Render: ConfigScalar {
    fn render(&self) -> String;
}

impl Render for Rational {
    fn render(&self) -> String {
        self.to_string()
    }
}

impl Render for f64 {
    fn render(&self) -> String {
        self.to_string()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientRecord {
    pub exponents: Vec<u8>,
    pub value: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub check: &'static str,
    pub passed: bool,
    pub max_deviation: f64,
    pub relative_deviation: f64,
    pub order: usize,
}

impl CheckRecord {
    fn new(check: &'static str, r: &CheckReport) -> Self {
        CheckRecord {
            check,
            passed: r.equal,
            max_deviation: r.max_deviation,
            relative_deviation: r.relative_deviation,
            order: r.order,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantizeOutput {
    pub mode: Mode,
    pub point: Vec<String>,
    pub weight: String,
    pub order: usize,
    /// Value of the density at the point.
    pub value: String,
    /// Taylor coefficients in the offsets `u = x − x₀`, nonzero ones only.
    pub coefficients: Vec<CoefficientRecord>,
    pub checks: Vec<CheckRecord>,
}

fn monomial(exps: &[u8]) -> String {
    let mut out = String::new();
    for (v, &e) in exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        out.push('u');
        out.push_str(&subscript(v));
        if e > 1 {
            out.push_str(&confquant_core::symbolic::superscript(e as usize));
        }
    }
    if out.is_empty() {
        "1".into()
    } else {
        out
    }
}

impl QuantizeOutput {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "Q(g,S)(f) at x₀ = ({}): density of weight {}, jet order {} ({} mode)\n",
            self.point.join(", "),
            self.weight,
            self.order,
            match self.mode {
                Mode::Rational => "rational",
                Mode::Float => "float",
            }
        );
        let _ = writeln!(out, "  value: {}", self.value);
        for c in &self.coefficients {
            let _ = writeln!(out, "  {}: {}", monomial(&c.exponents), c.value);
        }
        if self.coefficients.is_empty() {
            out.push_str("  (all coefficients vanish)\n");
        }
        for c in &self.checks {
            let _ = writeln!(
                out,
                "  check {}: {} (max deviation {:e}, order {})",
                c.check,
                if c.passed { "pass" } else { "FAIL" },
                c.max_deviation,
                c.order
            );
        }
        out
    }
}

/// Options of the `quantize` command.
#[derive(Debug, Clone, Default)]
pub struct QuantizeOptions {
    pub mode: Option<Mode>,
    pub order: Option<usize>,
    pub point: Option<Vec<Number>>,
    pub project_tracefree: bool,
}

/// Evaluates the quantization on a chart config, and runs the conformal and
/// naturality checks for any `phi` / `psi` it carries.
pub fn quantize_config(config: &ChartConfig, opts: &QuantizeOptions) -> CliResult<QuantizeOutput> {
    let mut config = config.clone();
    if let Some(order) = opts.order {
        config.order = order;
    }
    let mode = opts.mode.unwrap_or(config.mode);
    match mode {
        Mode::Rational => run_quantize::<Rational>(&config, opts, mode),
        Mode::Float => run_quantize::<f64>(&config, opts, mode),
    }
}

fn run_quantize<S: Render>(
    config: &ChartConfig,
    opts: &QuantizeOptions,
    mode: Mode,
) -> CliResult<QuantizeOutput> {
    let chart = config.build::<S>(opts.point.as_deref(), opts.project_tracefree)?;
    let p = &chart.params;
    if let Some(h) = critical_for_degree(p.m, &p.delta(), p.k).first() {
        return Err(Error::Critical(*h).into());
    }
    let out = quantize(&chart.g, &chart.s, &chart.f, p)?;
    let jet = out.value();
    let coefficients = jet
        .terms()
        .filter(|(_, c)| !c.is_negligible())
        .map(|(e, c)| CoefficientRecord {
            exponents: e.to_vec(),
            value: c.render(),
        })
        .collect();
    let mut checks = Vec::new();
    if let Some(phi) = &chart.phi {
        let r = check_conformal_invariance(&chart.g, phi, &chart.s, &chart.f, p)?;
        checks.push(CheckRecord::new("conformal", &r));
    }
    if let Some(psi) = &chart.psi {
        let r = check_naturality(&chart.g, psi, &chart.s, &chart.f, p)?;
        checks.push(CheckRecord::new("naturality", &r));
    }
    Ok(QuantizeOutput {
        mode,
        point: chart.base_point.iter().map(Render::render).collect(),
        weight: q(out.weight()),
        order: jet.order(),
        value: jet.constant_term().render(),
        coefficients,
        checks,
    })
}

/// Fails with exit status 1 when any point-wise check failed.
pub fn require_checks(out: &QuantizeOutput) -> CliResult<()> {
    if out.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = out
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.check)
            .collect();
        Err(CliError::Verification(failed.join(", ")))
    }
}
