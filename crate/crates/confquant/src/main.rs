use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use confquant::commands::{self, QuantizeOptions};
use confquant::config::{parse_rational, ChartConfig, Mode, Number, SignatureProfile};
use confquant::verify::{self, default_cells, Suite, VerifyOptions};
use confquant::{CliError, CliResult};
use confquant_core::coefficients::{Mutation, QuantParams};
use confquant_core::Rational;
use serde::Serialize;

/// Exact conformally invariant quantization of trace-free symbols.
///
/// Exit status: 0 success, 1 verification failure, 2 usage or config error,
/// 3 critical shift value.
#[derive(Debug, Parser)]
#[command(name = "confquant", version)]
struct Cli {
    /// Also write the result as JSON to this path.
    #[arg(long, global = true, value_name = "PATH")]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Weights {
    /// Dimension of the chart (at least 3).
    #[arg(short = 'm', long = "dim")]
    m: usize,
    /// Density weight λ, as "p/q".
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    lambda: Rational,
    /// Output weight μ, as "p/q".
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    mu: Rational,
    /// Symbol degree.
    #[arg(short, long)]
    k: usize,
}

impl Weights {
    fn params(&self) -> CliResult<QuantParams> {
        Ok(QuantParams::new(
            self.m,
            self.lambda.clone(),
            self.mu.clone(),
            self.k,
        )?)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print γ_n, C_{k,l}, α_{k,0} and the criticality report.
    Coeffs(Weights),
    /// Print the operator-word expansion and the normalized formula.
    Expand(Weights),
    /// Evaluate the quantization for a chart config.
    Quantize {
        /// Chart config (TOML).
        config: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Override the truncation order of the input jets.
        #[arg(long)]
        order: Option<usize>,
        /// Base point, comma separated (e.g. "1/2,0,0"); defaults to the config.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Replace the symbol by its trace-free part instead of rejecting it.
        #[arg(long)]
        project_tracefree: bool,
    },
    /// Run verification suites over seeded random cases.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, value_enum, default_value = "rational")]
        mode: Mode,
        /// Jet order of generated cases (default k + 1).
        #[arg(long)]
        order: Option<usize>,
        /// Seed of the first case.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cases per (m, k, λ, μ) cell.
        #[arg(long, default_value_t = 20)]
        cases: usize,
        #[arg(long, value_enum, default_value = "euclidean")]
        signature: SignatureProfile,
        /// Perturb one coefficient: C<k><l>, T1J<j>, T2JK or GSHIFT.
        #[arg(long, value_parser = parse_mutation)]
        mutate: Option<Mutation>,
        /// Take (m, λ, μ, k) and the signature from a chart config instead
        /// of the default matrix.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn parse_mutation(s: &str) -> Result<Mutation, String> {
    Mutation::parse(s)
        .ok_or_else(|| format!("unknown coefficient id {s:?} (try C22, C31, T1J0, T2JK, GSHIFT)"))
}

fn parse_point(s: &str) -> CliResult<Vec<Number>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            if t.is_empty() {
                Err(CliError::Usage(format!("empty coordinate in point {s:?}")))
            } else {
                Ok(Number::Text(t.to_string()))
            }
        })
        .collect()
}

fn write_report<T: Serialize>(path: Option<&Path>, value: &T) -> CliResult<()> {
    if let Some(path) = path {
        let json = serde_json::to_string_pretty(value).expect("plain data serializes");
        std::fs::write(path, json + "\n")?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    let report = cli.report.as_deref();
    match cli.command {
        Command::Coeffs(w) => {
            let out = commands::coeffs(&w.params()?);
            print!("{}", out.render());
            write_report(report, &out)
        }
        Command::Expand(w) => {
            let out = commands::expand(&w.params()?)?;
            print!("{}", out.render());
            write_report(report, &out)
        }
        Command::Quantize {
            config,
            mode,
            order,
            point,
            project_tracefree,
        } => {
            let cfg = ChartConfig::load(&config)?;
            let opts = QuantizeOptions {
                mode,
                order,
                point: point.as_deref().map(parse_point).transpose()?,
                project_tracefree,
            };
            let out = commands::quantize_config(&cfg, &opts)?;
            print!("{}", out.render());
            write_report(report, &out)?;
            commands::require_checks(&out)
        }
        Command::Verify {
            suite,
            mode,
            order,
            seed,
            cases,
            signature,
            mutate,
            config,
        } => {
            let mut opts = VerifyOptions {
                mode,
                order,
                seed,
                cases,
                signature,
                mutate,
                cells: default_cells(),
                skip_critical: true,
            };
            if let Some(path) = config {
                let cfg = ChartConfig::load(&path)?;
                opts.cells = vec![cfg.params()?];
                opts.signature = cfg.signature;
                opts.skip_critical = false;
            }
            let out = verify::run(suite, &opts)?;
            print!("{}", out.render());
            write_report(report, &out)?;
            if out.passed() {
                Ok(())
            } else {
                Err(CliError::Verification(format!(
                    "{} failing case(s)",
                    out.count(verify::Status::Fail) + out.count(verify::Status::Error)
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
