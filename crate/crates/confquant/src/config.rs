//! Chart configuration files.
//!
//! A chart is described in TOML. Numbers are written as integers or as
//! `"p/q"` strings so that exactness survives serialization; decimal numbers
//! are accepted only for jet coefficients in float mode. Polynomials are
//! explicit term lists in the absolute chart coordinates and are expanded
//! about the base point.
//!
//! ```toml
//! dimension = 3
//! mode = "rational"
//! order = 2
//! base_point = [0, 0, 0]
//! lambda = "1/2"
//! mu = "1/2"
//! k = 1
//!
//! [[metric]]
//! indices = [0, 0]
//! terms = [{ exponents = [0, 0, 0], coefficient = 1 }]
//! # ... one entry per a <= b; missing entries are zero
//!
//! [[symbol]]
//! indices = [1]
//! terms = [{ exponents = [0, 0, 0], coefficient = "3/2" }]
//!
//! [[density]]
//! exponents = [0, 1, 0]
//! coefficient = 1
//! ```
//!
//! Optional `phi` (term list) and `psi` (one term list per coordinate) give a
//! conformal factor and a chart map for point-wise invariance checks.

use std::collections::BTreeSet;
use std::path::Path;

use clap::ValueEnum;
use confquant_core::coefficients::QuantParams;
use confquant_core::harness::{ChartDiffeo, ConformalFactor};
use confquant_core::tensor::{sorted, sym_indices, sym_len};
use confquant_core::{
    Jet, Layout, MetricJet, Rational, Scalar, Signature, Valence, WeightedTensorJet,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Rational,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SignatureProfile {
    #[default]
    Euclidean,
    Lorentzian,
}

impl SignatureProfile {
    pub fn signature(self, m: usize) -> Signature {
        match self {
            SignatureProfile::Euclidean => Signature::euclidean(m),
            SignatureProfile::Lorentzian => Signature::lorentzian(m),
        }
    }
}

/// A number as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    pub fn rational(q: &Rational) -> Self {
        if q.is_integer() {
            if let Ok(n) = q.numer().to_string().parse::<i64>() {
                return Number::Int(n);
            }
        }
        Number::Text(q.to_string())
    }

    /// Exact value; decimals are rejected.
    pub fn to_rational(&self) -> CliResult<Rational> {
        match self {
            Number::Int(n) => Ok(Rational::from_integer((*n).into())),
            Number::Float(x) => Err(CliError::Config(format!(
                "decimal number {x} is not allowed in rational mode; write it as \"p/q\""
            ))),
            Number::Text(s) => parse_rational(s).map_err(CliError::Config),
        }
    }

    pub fn to_f64(&self) -> CliResult<f64> {
        match self {
            Number::Int(n) => Ok(*n as f64),
            Number::Float(x) => Ok(*x),
            Number::Text(s) => match parse_rational(s) {
                Ok(q) => Ok(q.to_f64()),
                Err(_) => s
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Config(format!("cannot parse number {s:?}"))),
            },
        }
    }
}

/// Parses `"p"` or `"p/q"` (no decimals, nonzero denominator).
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let t = s.trim();
    if t.contains(['.', 'e', 'E']) {
        return Err(format!(
            "{s:?} is not an exact rational; write it as \"p/q\""
        ));
    }
    if let Some((_, q)) = t.split_once('/') {
        if q.trim()
            .trim_start_matches(['+', '-'])
            .chars()
            .all(|c| c == '0')
        {
            return Err(format!("{s:?} has a zero denominator"));
        }
    }
    t.parse::<Rational>()
        .map_err(|_| format!("cannot parse {s:?} as a rational"))
}

/// Scalars that config numbers can be read into.
pub trait ConfigScalar: Scalar {
    fn parse_number(n: &Number) -> CliResult<Self>;
}

impl ConfigScalar for Rational {
    fn parse_number(n: &Number) -> CliResult<Self> {
        n.to_rational()
    }
}

impl ConfigScalar for f64 {
    fn parse_number(n: &Number) -> CliResult<Self> {
        n.to_f64()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub exponents: Vec<u8>,
    pub coefficient: Number,
}

/// One tensor component: a (symmetric) multi-index and its polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub indices: Vec<u8>,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartConfig {
    pub dimension: usize,
    #[serde(default)]
    pub signature: SignatureProfile,
    #[serde(default)]
    pub mode: Mode,
    /// Truncation order of every input jet.
    pub order: usize,
    pub base_point: Vec<Number>,
    pub lambda: Number,
    pub mu: Number,
    /// Degree of the symbol.
    pub k: usize,
    pub metric: Vec<Component>,
    pub symbol: Vec<Component>,
    pub density: Vec<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<Term>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<Vec<Term>>>,
}

/// Jets built from a config, in one scalar mode.
#[derive(Debug, Clone)]
pub struct Chart<S: Scalar> {
    pub params: QuantParams,
    pub base_point: Vec<S>,
    pub g: MetricJet<S>,
    pub s: WeightedTensorJet<S>,
    pub f: WeightedTensorJet<S>,
    pub phi: Option<ConformalFactor<S>>,
    pub psi: Option<ChartDiffeo<S>>,
}

impl ChartConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> CliResult<String> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn params(&self) -> CliResult<QuantParams> {
        let lambda = self.lambda.to_rational()?;
        let mu = self.mu.to_rational()?;
        Ok(QuantParams::new(self.dimension, lambda, mu, self.k)?)
    }

    /// Structural checks that do not depend on the scalar mode.
    pub fn validate(&self) -> CliResult<()> {
        let m = self.dimension;
        let err = |msg: String| Err(CliError::Config(msg));
        if self.base_point.len() != m {
            return err(format!(
                "base_point has {} entries, dimension is {m}",
                self.base_point.len()
            ));
        }
        let check_terms = |what: &str, terms: &[Term]| -> CliResult<()> {
            for t in terms {
                if t.exponents.len() != m {
                    return err(format!(
                        "{what}: exponent list {:?} does not have {m} entries",
                        t.exponents
                    ));
                }
            }
            Ok(())
        };
        let check_components = |what: &str, comps: &[Component], rank: usize| -> CliResult<()> {
            let mut seen = BTreeSet::new();
            for c in comps {
                if c.indices.len() != rank {
                    return err(format!(
                        "{what}: index list {:?} has {} entries, expected {rank}",
                        c.indices,
                        c.indices.len()
                    ));
                }
                if let Some(i) = c.indices.iter().find(|&&i| i as usize >= m) {
                    return err(format!("{what}: index {i} out of range for dimension {m}"));
                }
                if !seen.insert(sorted(&c.indices)) {
                    return err(format!("{what}: component {:?} given twice", c.indices));
                }
                check_terms(what, &c.terms)?;
            }
            Ok(())
        };
        check_components("metric", &self.metric, 2)?;
        check_components("symbol", &self.symbol, self.k)?;
        check_terms("density", &self.density)?;
        if let Some(phi) = &self.phi {
            check_terms("phi", phi)?;
        }
        if let Some(psi) = &self.psi {
            if psi.len() != m {
                return err(format!(
                    "psi has {} components, dimension is {m}",
                    psi.len()
                ));
            }
            for p in psi {
                check_terms("psi", p)?;
            }
        }
        if self.order < self.k {
            return err(format!(
                "order {} is below the symbol degree {}",
                self.order, self.k
            ));
        }
        Ok(())
    }

    /// Expands every polynomial about the base point (or `point`, if given).
    /// With `project`, the symbol is replaced by its trace-free part.
    pub fn build<S: ConfigScalar>(
        &self,
        point: Option<&[Number]>,
        project: bool,
    ) -> CliResult<Chart<S>> {
        self.validate()?;
        let params = self.params()?;
        let m = self.dimension;
        let order = self.order;
        let point = point.unwrap_or(&self.base_point);
        if point.len() != m {
            return Err(CliError::Usage(format!(
                "point has {} coordinates, dimension is {m}",
                point.len()
            )));
        }
        let base: Vec<S> = point
            .iter()
            .map(S::parse_number)
            .collect::<CliResult<_>>()?;
        let layout = Layout::new(m, order);
        let poly = |terms: &[Term]| -> CliResult<Jet<S>> {
            let parsed: Vec<(Vec<u8>, S)> = terms
                .iter()
                .map(|t| Ok((t.exponents.clone(), S::parse_number(&t.coefficient)?)))
                .collect::<CliResult<_>>()?;
            Ok(Jet::expand_polynomial(
                &layout,
                order,
                &base,
                parsed.iter().map(|(e, c)| (e.as_slice(), c.clone())),
            )?)
        };
        let components = |comps: &[Component], rank: usize| -> CliResult<Vec<Jet<S>>> {
            let mut out = vec![Jet::zero(&layout, order); sym_len(m, rank)];
            for c in comps {
                let pos = sym_indices(m, rank)
                    .iter()
                    .position(|i| *i == sorted(&c.indices))
                    .expect("indices validated");
                out[pos] = poly(&c.terms)?;
            }
            Ok(out)
        };
        let g = MetricJet::new(components(&self.metric, 2)?, self.signature.signature(m))?;
        let raw_s = WeightedTensorJet::new(
            m,
            Valence::contravariant(self.k),
            params.delta(),
            components(&self.symbol, self.k)?,
        )?;
        let s = if project {
            confquant_core::calculus::tracefree_project(&raw_s, &g)?
        } else {
            raw_s
        };
        let f = WeightedTensorJet::scalar(poly(&self.density)?, params.lambda.clone());
        let phi = self
            .phi
            .as_ref()
            .map(|p| poly(p).and_then(|j| Ok(ConformalFactor::new(j)?)))
            .transpose()?;
        let psi = match &self.psi {
            None => None,
            Some(comps) => {
                let jets: Vec<Jet<S>> = comps.iter().map(|p| poly(p)).collect::<CliResult<_>>()?;
                for (v, j) in jets.iter().enumerate() {
                    if !(j.constant_term().clone() - base[v].clone()).is_negligible() {
                        return Err(CliError::Config(format!(
                            "psi must fix the base point (coordinate {v} moves)"
                        )));
                    }
                }
                Some(ChartDiffeo::new(jets)?)
            }
        };
        Ok(Chart {
            params,
            base_point: base,
            g,
            s,
            f,
            phi,
            psi,
        })
    }
}
