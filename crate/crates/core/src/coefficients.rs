//! Scalar combinatorics of the quantization formula.
//!
//! With `δ = μ − λ`:
//!
//! ```text
//! γ_n     = (m + n − mδ)/m
//! C_{k,0} = 1
//! C_{k,l} = binom(k,l) · Π_{i=1..l} (λ + (k−i)/m) / Π_{n=k−l−1+k..2k−2} γ_n      (l ≥ 1)
//! α_{k,0} = 2k(1 − k + m(δ − 1)) − m²δ(δ − 1)
//! T₁ at covariant valence j:   (−λm − j)(j + 1)
//! T₂ at symbol degree j:       (mγ_{2k−2} − k + j)(k − j + 1)
//! ```
//!
//! The denominator of `C_{k,l}` is `γ_{2k−2} ⋯ γ_{2k−l−1}`. A shift value is
//! critical for degree `k` when one of `γ_{k−1}, …, γ_{2k−2}` vanishes.
//! All values here are exact rationals.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::scalar::{rational, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantParams {
    pub m: usize,
    pub lambda: Rational,
    pub mu: Rational,
    pub k: usize,
}

impl QuantParams {
    pub fn new(m: usize, lambda: Rational, mu: Rational, k: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::DimensionTooSmall(m));
        }
        Ok(QuantParams { m, lambda, mu, k })
    }

    /// `δ = μ − λ`
    pub fn delta(&self) -> Rational {
        &self.mu - &self.lambda
    }

    pub fn with_degree(&self, k: usize) -> Self {
        QuantParams { k, ..self.clone() }
    }
}

/// `(k, l)` with `2 ≤ l ≤ k + 1` and `γ_n = 0`, `n = 2k − l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CriticalHit {
    pub k: usize,
    pub l: usize,
    pub n: usize,
}

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `γ_n = (m + n − mδ)/m`
pub fn gamma(n: i64, m: usize, delta: &Rational) -> Rational {
    let m_r = int(m as i64);
    (&m_r + int(n) - &m_r * delta) / m_r
}

/// Every `(k, l)` with `k ≤ k_max`, `2 ≤ l ≤ k+1` and `γ_{2k−l} = 0`.
pub fn is_critical(m: usize, delta: &Rational, k_max: usize) -> Vec<CriticalHit> {
    let mut hits = Vec::new();
    for k in 0..=k_max {
        for l in 2..=k + 1 {
            let n = 2 * k - l;
            if gamma(n as i64, m, delta).is_zero() {
                hits.push(CriticalHit { k, l, n });
            }
        }
    }
    hits
}

/// Hits for degree `k` alone: exactly the zero denominators of `C_{k,·}`.
pub fn critical_for_degree(m: usize, delta: &Rational, k: usize) -> Vec<CriticalHit> {
    is_critical(m, delta, k)
        .into_iter()
        .filter(|h| h.k == k)
        .collect()
}

/// All critical shift values for degrees `k ≤ k_max`, sorted.
pub fn critical_deltas(m: usize, k_max: usize) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::new();
    for k in 1..=k_max {
        for l in 2..=k + 1 {
            // γ_n = 0  ⇔  δ = (m + n)/m
            let d = rational((m + 2 * k - l) as i64, m as i64);
            if !out.contains(&d) {
                out.push(d);
            }
        }
    }
    out.sort();
    out
}

/// `C_{k,l}` computed from an arbitrary `γ` (used for mutation experiments).
pub fn c_coeff_with(
    k: usize,
    l: usize,
    m: usize,
    lambda: &Rational,
    gamma_fn: impl Fn(i64) -> Rational,
) -> Result<Rational> {
    if l > k {
        return Err(Error::Invalid(alloc::format!("C_{{{k},{l}}} needs l ≤ k")));
    }
    if l == 0 {
        return Ok(Rational::one());
    }
    let mut num = int(binomial(k, l) as i64);
    for i in 1..=l {
        num *= lambda + rational((k - i) as i64, m as i64);
    }
    let mut den = Rational::one();
    for n in (2 * k - l - 1)..=(2 * k - 2) {
        let g = gamma_fn(n as i64);
        if g.is_zero() {
            return Err(Error::Critical(CriticalHit { k, l: 2 * k - n, n }));
        }
        den *= g;
    }
    Ok(num / den)
}

/// `C_{k,l}`; fails with the vanishing `γ` index on critical shift values.
pub fn c_coeff(
    k: usize,
    l: usize,
    m: usize,
    lambda: &Rational,
    delta: &Rational,
) -> Result<Rational> {
    c_coeff_with(k, l, m, lambda, |n| gamma(n, m, delta))
}

/// `α_{k,0} = 2k(1 − k + m(δ−1)) − m²δ(δ−1)`
pub fn alpha(k: usize, m: usize, delta: &Rational) -> Rational {
    let k = int(k as i64);
    let m = int(m as i64);
    let one = Rational::one();
    int(2) * &k * (&one - &k + &m * (delta - &one)) - &m * &m * delta * (delta - &one)
}

/// Factor of `T₁` on a covariant tensor of valence `j`: `(−λm − j)(j + 1)`.
pub fn t1_coeff(j: usize, m: usize, lambda: &Rational) -> Rational {
    (-(lambda * int(m as i64)) - int(j as i64)) * int(j as i64 + 1)
}

/// Factor of `T₂` on a symbol of degree `j ≤ k`: `(mγ_{2k−2} − k + j)(k − j + 1)`.
pub fn t2_coeff(j: usize, k: usize, m: usize, delta: &Rational) -> Rational {
    t2_coeff_with(j, k, m, &gamma(2 * k as i64 - 2, m, delta))
}

fn t2_coeff_with(j: usize, k: usize, m: usize, gamma_top: &Rational) -> Rational {
    (int(m as i64) * gamma_top - int(k as i64) + int(j as i64)) * int(k as i64 - j as i64 + 1)
}

/// Scalar `−k(λm + k − 1)` by which the bundle map `γ(h)` acts on a trace-free
/// symbol of degree `k` (relative to `i(h)`). Informational only.
pub fn trace_free_gamma_scalar(k: usize, m: usize, lambda: &Rational) -> Rational {
    let k_r = int(k as i64);
    -(&k_r) * (lambda * int(m as i64) + &k_r - Rational::one())
}

pub fn binomial(n: usize, k: usize) -> u64 {
    crate::tensor::binomial(n, k) as u64
}

/// Full coefficient report for one `(m, λ, μ, k)`; critical entries are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub params: QuantParams,
    /// `γ_n` for `0 ≤ n ≤ 2k − 1`
    pub gammas: Vec<Rational>,
    /// `C_{k,l}` for `0 ≤ l ≤ k`
    pub c: Vec<Option<Rational>>,
    pub alpha: Rational,
    pub critical: Vec<CriticalHit>,
}

impl CoefficientTable {
    pub fn new(params: &QuantParams) -> Self {
        let (m, k) = (params.m, params.k);
        let delta = params.delta();
        let gammas = (0..2 * k).map(|n| gamma(n as i64, m, &delta)).collect();
        let c = (0..=k)
            .map(|l| c_coeff(k, l, m, &params.lambda, &delta).ok())
            .collect();
        CoefficientTable {
            params: params.clone(),
            gammas,
            c,
            alpha: alpha(k, m, &delta),
            critical: is_critical(m, &delta, k),
        }
    }
}

/// Resolved numeric coefficients driving one quantization of degree `k`.
///
/// The fields are public so that single values can be perturbed when testing
/// the sensitivity of the invariance checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub params: QuantParams,
    /// `C_{k,l}`, `0 ≤ l ≤ k`
    pub c: Vec<Rational>,
    /// `T₁` factor at covariant valence `j`, `0 ≤ j ≤ k`
    pub t1: Vec<Rational>,
    /// `T₂` factor at symbol degree `j`, `0 ≤ j ≤ k`
    pub t2: Vec<Rational>,
}

impl Coefficients {
    pub fn new(params: &QuantParams) -> Result<Self> {
        let delta = params.delta();
        Self::with_gamma(params, |n| gamma(n, params.m, &delta))
    }

    /// Builds every coefficient from the supplied `γ_n`.
    pub fn with_gamma(params: &QuantParams, gamma_fn: impl Fn(i64) -> Rational) -> Result<Self> {
        let (m, k) = (params.m, params.k);
        let c = (0..=k)
            .map(|l| c_coeff_with(k, l, m, &params.lambda, &gamma_fn))
            .collect::<Result<Vec<_>>>()?;
        let t1 = (0..=k).map(|j| t1_coeff(j, m, &params.lambda)).collect();
        let top = gamma_fn(2 * k as i64 - 2);
        let t2 = (0..=k).map(|j| t2_coeff_with(j, k, m, &top)).collect();
        Ok(Coefficients {
            params: params.clone(),
            c,
            t1,
            t2,
        })
    }

    pub fn mutated(&self, mutation: Mutation) -> Result<Self> {
        let k = self.params.k;
        let one = Rational::one();
        let mut out = self.clone();
        match mutation {
            Mutation::C { k: mk, l } => {
                if mk == k && l <= k {
                    out.c[l] += one;
                }
            }
            Mutation::T1 { j } => {
                if j <= k {
                    out.t1[j] += one;
                }
            }
            Mutation::T2Top => out.t2[k] += one,
            Mutation::GammaShift => {
                let delta = self.params.delta();
                let m = self.params.m;
                out = Self::with_gamma(&self.params, |n| gamma(n + 1, m, &delta))?;
            }
        }
        Ok(out)
    }
}

/// Single-coefficient perturbations used to show the invariance checks are
/// not vacuous.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// `C_{k,l} += 1` (only affects degree-`k` quantizations)
    C { k: usize, l: usize },
    /// `T₁` factor at valence `j` `+= 1`
    T1 { j: usize },
    /// `T₂` factor at degree `j = k` `+= 1`
    T2Top,
    /// every `γ_n` replaced by `γ_{n+1}`
    GammaShift,
}

impl Mutation {
    /// Parses identifiers such as `C22`, `C31`, `T1J0`, `T2JK`, `GSHIFT`.
    pub fn parse(id: &str) -> Option<Self> {
        let id = id.trim().to_ascii_uppercase();
        match id.as_str() {
            "T2JK" | "T2K" => return Some(Mutation::T2Top),
            "GSHIFT" | "GAMMA" | "GAMMASHIFT" => return Some(Mutation::GammaShift),
            _ => {}
        }
        if let Some(rest) = id.strip_prefix("T1J") {
            return rest.parse().ok().map(|j| Mutation::T1 { j });
        }
        if let Some(rest) = id.strip_prefix('C') {
            let digits: Vec<u32> = rest
                .chars()
                .map(|c| c.to_digit(10))
                .collect::<Option<_>>()?;
            if let [k, l] = digits[..] {
                return Some(Mutation::C {
                    k: k as usize,
                    l: l as usize,
                });
            }
        }
        None
    }
}
