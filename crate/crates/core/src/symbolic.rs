//! Symbolic word coefficients, Leibniz normal forms and text rendering.
//!
//! On both sides the `T` factor at offset `i` from the starting valence is
//! `(β − i)(i + 1)`, with `β = −λm` on the density side and `β = mγ_{2k−2}` on
//! the symbol side, so every word coefficient is an integer polynomial in `β`.
//!
//! The normal form pushes every `D` to the right with
//! `D(R·X) = (∇_s R)·X + R·DX`, where `R·X` is `R ∨ X` (density side) or
//! `i(R)X` (symbol side). A term is then a product of curvature factors
//! `∇_s^q r` followed by `D^p`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::quantize::{compositions, Letter, Side};
use crate::scalar::Rational;

/// Integer polynomial in `β`, `coeffs[n]` multiplying `β^n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BetaPoly {
    coeffs: Vec<BigInt>,
}

impl BetaPoly {
    pub fn constant(c: i64) -> Self {
        BetaPoly {
            coeffs: vec![BigInt::from(c)],
        }
        .trimmed()
    }

    /// `β − a`
    pub fn beta_minus(a: i64) -> Self {
        BetaPoly {
            coeffs: vec![BigInt::from(-a), BigInt::one()],
        }
    }

    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        BetaPoly {
            coeffs: coeffs.into_iter().map(BigInt::from).collect(),
        }
        .trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).cloned().unwrap_or_default();
                let b = other.coeffs.get(i).cloned().unwrap_or_default();
                a + b
            })
            .collect();
        BetaPoly { coeffs }.trimmed()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return BetaPoly::default();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        BetaPoly { coeffs }.trimmed()
    }

    pub fn scale(&self, c: i64) -> Self {
        BetaPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
        .trimmed()
    }

    /// `p(−β)`
    pub fn reflect(&self) -> Self {
        BetaPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, a)| if n % 2 == 1 { -a } else { a.clone() })
                .collect(),
        }
    }

    pub fn eval(&self, beta: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| {
            acc * beta + Rational::from_integer(c.clone())
        })
    }

    /// Number of nonzero monomials.
    fn terms(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    fn all_nonpositive(&self) -> bool {
        !self.is_zero() && self.coeffs.iter().all(|c| !c.is_positive())
    }

    fn negate(&self) -> Self {
        self.scale(-1)
    }

    /// `2x²−3x+1` style, highest power first, `var` as the variable.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (n, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('−');
                }
            } else {
                out.push(if neg { '−' } else { '+' });
            }
            let mag_s = if n > 0 && mag.is_one() {
                String::new()
            } else {
                mag.to_string()
            };
            out.push_str(&mag_s);
            if n > 0 {
                out.push_str(var);
                if n > 1 {
                    out.push_str(&superscript(n));
                }
            }
        }
        out
    }
}

pub fn superscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .bytes()
        .map(|b| DIGITS[(b - b'0') as usize])
        .collect()
}

pub fn subscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    n.to_string()
        .bytes()
        .map(|b| DIGITS[(b - b'0') as usize])
        .collect()
}

/// `D^n` rendered as `D`, `D²`, … (empty for `n = 0`).
fn power(base: &str, n: usize) -> String {
    match n {
        0 => String::new(),
        1 => base.into(),
        _ => format!("{base}{}", superscript(n)),
    }
}

/// Word coefficient as a polynomial in `β` (valence-offset rule).
pub fn word_poly(letters: &[Letter]) -> BetaPoly {
    let mut offset = 0i64;
    let mut coeff = BetaPoly::constant(1);
    for &letter in letters.iter().rev() {
        if letter == Letter::T {
            coeff = coeff.mul(&BetaPoly::beta_minus(offset).scale(offset + 1));
        }
        offset += letter.weight() as i64;
    }
    coeff
}

/// `(∇_s^{q₁} r)·(∇_s^{q₂} r)⋯ D^p`, factors sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalTerm {
    pub factors: Vec<usize>,
    pub power: usize,
}

impl NormalTerm {
    /// Total degree: `2` per factor, `1` per derivative.
    pub fn degree(&self) -> usize {
        self.factors.iter().map(|q| q + 2).sum::<usize>() + self.power
    }
}

/// Leibniz expansion of a word into normal terms with multiplicities.
pub fn normalize(letters: &[Letter]) -> BTreeMap<NormalTerm, u64> {
    let mut state: BTreeMap<NormalTerm, u64> = BTreeMap::new();
    state.insert(
        NormalTerm {
            factors: Vec::new(),
            power: 0,
        },
        1,
    );
    for &letter in letters.iter().rev() {
        let mut next: BTreeMap<NormalTerm, u64> = BTreeMap::new();
        for (term, n) in state {
            match letter {
                Letter::T => {
                    let mut factors = term.factors.clone();
                    factors.push(0);
                    factors.sort_unstable();
                    *next
                        .entry(NormalTerm {
                            factors,
                            power: term.power,
                        })
                        .or_default() += n;
                }
                Letter::D => {
                    *next
                        .entry(NormalTerm {
                            factors: term.factors.clone(),
                            power: term.power + 1,
                        })
                        .or_default() += n;
                    for i in 0..term.factors.len() {
                        let mut factors = term.factors.clone();
                        factors[i] += 1;
                        factors.sort_unstable();
                        *next
                            .entry(NormalTerm {
                                factors,
                                power: term.power,
                            })
                            .or_default() += n;
                    }
                }
            }
        }
        state = next;
    }
    state
}

/// `π_target(Σ(D + T)^j)` with coefficients in `β`, as raw words.
pub fn raw_expansion(target: usize) -> Vec<(Vec<Letter>, BetaPoly)> {
    compositions(target)
        .into_iter()
        .map(|w| {
            let p = word_poly(&w);
            (w, p)
        })
        .collect()
}

/// The same expansion after Leibniz normalization, in display order
/// (highest `D` power first).
pub fn normal_expansion(target: usize) -> Vec<(NormalTerm, BetaPoly)> {
    let mut acc: BTreeMap<NormalTerm, BetaPoly> = BTreeMap::new();
    for (w, p) in raw_expansion(target) {
        for (term, n) in normalize(&w) {
            let e = acc.entry(term).or_default();
            *e = e.add(&p.scale(n as i64));
        }
    }
    let mut out: Vec<(NormalTerm, BetaPoly)> =
        acc.into_iter().filter(|(_, p)| !p.is_zero()).collect();
    out.sort_by(|(a, _), (b, _)| {
        b.power
            .cmp(&a.power)
            .then_with(|| a.factors.cmp(&b.factors))
    });
    out
}

/// Display conventions for one side.
#[derive(Debug, Clone)]
pub struct Notation {
    pub side: Side,
    /// Rendering of the variable the coefficients are polynomials in.
    pub var: String,
    /// Whether that variable is `−β` (density side: `β = −λm`).
    pub reflected: bool,
}

impl Notation {
    pub fn density() -> Self {
        Notation {
            side: Side::Density,
            var: "λm".into(),
            reflected: true,
        }
    }

    /// `β = mγ_{2k−2}`
    pub fn symbol(k: usize) -> Self {
        let n = (2 * k).saturating_sub(2);
        Notation {
            side: Side::Symbol,
            var: format!("mγ{}", subscript(n)),
            reflected: false,
        }
    }

    pub fn for_side(side: Side, k: usize) -> Self {
        match side {
            Side::Density => Self::density(),
            Side::Symbol => Self::symbol(k),
        }
    }

    fn poly(&self, p: &BetaPoly) -> BetaPoly {
        if self.reflected {
            p.reflect()
        } else {
            p.clone()
        }
    }

    fn derivative(&self) -> &'static str {
        match self.side {
            Side::Density => "∇_s",
            Side::Symbol => "Div",
        }
    }

    fn curvature(&self, factors: &[usize]) -> String {
        let rendered: Vec<String> = factors
            .iter()
            .rev()
            .map(|&q| match q {
                0 => "r".into(),
                1 => "∇_s r".into(),
                _ => format!("∇_s{} r", superscript(q)),
            })
            .collect();
        match self.side {
            Side::Density => {
                let wrapped: Vec<String> = rendered
                    .into_iter()
                    .map(|f| if f == "r" { f } else { format!("({f})") })
                    .collect();
                wrapped.join("∨")
            }
            Side::Symbol => format!("i({})", rendered.join("∨")),
        }
    }

    /// Operator of a normal term, e.g. `r∨∇_s`, `i(r)Div`, `Div³`.
    pub fn term(&self, t: &NormalTerm) -> String {
        let d = power(self.derivative(), t.power);
        if t.factors.is_empty() {
            return if d.is_empty() { "1".into() } else { d };
        }
        let c = self.curvature(&t.factors);
        match (self.side, d.is_empty()) {
            (_, true) => c,
            (Side::Density, false) => format!("{c}∨{d}"),
            (Side::Symbol, false) => format!("{c}{d}"),
        }
    }

    /// Raw word, e.g. `DT`, `D²`.
    pub fn word(&self, letters: &[Letter]) -> String {
        if letters.is_empty() {
            return "1".into();
        }
        let mut out = String::new();
        let mut i = 0;
        while i < letters.len() {
            let l = letters[i];
            let mut n = 1;
            while i + n < letters.len() && letters[i + n] == l {
                n += 1;
            }
            out.push_str(&power(if l == Letter::D { "D" } else { "T" }, n));
            i += n;
        }
        out
    }

    /// `a + c·b − (d)·e` style sum. `raw` keeps every non-unit coefficient in
    /// parentheses after a `+`; otherwise signs are pulled out.
    fn sum<'a>(&self, items: impl Iterator<Item = (String, &'a BetaPoly)>, raw: bool) -> String {
        let mut out = String::new();
        for (op, p) in items {
            let p = self.poly(p);
            if p.is_zero() {
                continue;
            }
            let (neg, mag) = if !raw && p.all_nonpositive() {
                (true, p.negate())
            } else {
                (false, p)
            };
            let unit = mag == BetaPoly::constant(1);
            let coeff = if unit {
                String::new()
            } else if raw {
                let s = mag.render(&self.var);
                if mag.terms() == 1
                    && !s.starts_with('−')
                    && !s.chars().next().is_some_and(|c| c.is_ascii_digit())
                {
                    format!("{s}·")
                } else {
                    format!("({s})·")
                }
            } else if mag.terms() > 1 {
                format!("({})·", mag.render(&self.var))
            } else {
                format!("{}·", mag.render(&self.var))
            };
            let body = if op == "1" && !unit {
                coeff.trim_end_matches('·').to_string()
            } else {
                format!("{coeff}{op}")
            };
            if out.is_empty() {
                if neg {
                    out.push('−');
                }
            } else {
                out.push_str(if neg { " − " } else { " + " });
            }
            out.push_str(&body);
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }

    pub fn render_raw(&self, words: &[(Vec<Letter>, BetaPoly)]) -> String {
        self.sum(words.iter().map(|(w, p)| (self.word(w), p)), true)
    }

    pub fn render_normal(&self, terms: &[(NormalTerm, BetaPoly)]) -> String {
        self.sum(terms.iter().map(|(t, p)| (self.term(t), p)), false)
    }
}

/// `(op)X`, `op X` or `X` depending on the shape of the rendered operator.
fn applied(op: &str, operand: &str) -> String {
    if op == "1" {
        operand.into()
    } else if op.contains(' ') {
        format!("({op}){operand}")
    } else {
        format!("{op} {operand}")
    }
}

/// Pairings `C_{k,l}⟨…S, …f⟩` of the normalized formula, one per `l`.
pub fn normal_formula_lines(k: usize) -> Vec<String> {
    let dens = Notation::density();
    let sym = Notation::symbol(k);
    (0..=k)
        .map(|l| {
            let s_op = sym.render_normal(&normal_expansion(l));
            let f_op = dens.render_normal(&normal_expansion(k - l));
            let left = applied(&s_op, "S");
            let right = applied(&f_op, "f");
            let pairing = format!("⟨{left}, {right}⟩");
            if l == 0 {
                pairing
            } else {
                format!("C_{{{k},{l}}}·{pairing}")
            }
        })
        .collect()
}

/// Normalized formula on one line, joined with ` + `.
pub fn normal_formula(k: usize) -> String {
    normal_formula_lines(k).join(" + ")
}
