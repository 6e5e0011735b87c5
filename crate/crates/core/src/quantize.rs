//! Operator-word expansion and assembly of `Q(g, S)(f)`.
//!
//! ```text
//! Q(g,S)(f) = Σ_{l=0..k} C_{k,l} ⟨π_l(Σ_j (Div + T₂)^j) S,  π_{k−l}(Σ_j (∇_s + T₁)^j) f⟩
//! ```
//!
//! `π_n` keeps the words whose letter degrees add up to `n`. Words are applied
//! right to left. `T₁` inserts `r ∨ ·` and `T₂` inserts `i(r)·`, each scaled by
//! the factor for the valence it meets.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::calculus::{
    divergence, insert, pair, sym_derivative, sym_product, trace, Connection, Curvature,
};
use crate::coefficients::{critical_for_degree, Coefficients, QuantParams};
use crate::scalar::{Rational, Scalar};
use crate::tensor::{MetricJet, Valence, WeightedTensorJet};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    /// `D = ∇_s` (degree 1), `T = T₁` (degree 2), acting on the density.
    Density,
    /// `D = Div` (degree −1), `T = T₂` (degree −2), acting on the symbol.
    Symbol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    D,
    T,
}

impl Letter {
    /// Absolute degree: 1 for `D`, 2 for `T`.
    pub fn weight(self) -> usize {
        match self {
            Letter::D => 1,
            Letter::T => 2,
        }
    }
}

impl Side {
    pub fn letter_degree(self, letter: Letter) -> i64 {
        let w = letter.weight() as i64;
        match self {
            Side::Density => w,
            Side::Symbol => -w,
        }
    }
}

/// A composition of `D`/`T` letters with the scalar accumulated while it is
/// applied. `letters[0]` is the leftmost letter and acts last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorWord {
    pub side: Side,
    pub letters: Vec<Letter>,
    pub coefficient: Rational,
}

impl OperatorWord {
    pub fn degree(&self) -> i64 {
        self.letters
            .iter()
            .map(|&l| self.side.letter_degree(l))
            .sum()
    }

    pub fn is_pure_derivative(&self) -> bool {
        self.letters.iter().all(|&l| l == Letter::D)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// Every sequence over `{D, T}` of total absolute degree `n`, in lexicographic
/// order with `D < T`.
pub fn compositions(n: usize) -> Vec<Vec<Letter>> {
    fn go(rest: usize, cur: &mut Vec<Letter>, out: &mut Vec<Vec<Letter>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for letter in [Letter::D, Letter::T] {
            if letter.weight() <= rest {
                cur.push(letter);
                go(rest - letter.weight(), cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::new(), &mut out);
    out
}

/// Coefficient of a word under the valence-tracking rule, given the per-valence
/// `T` factors (`t1` for the density side, `t2` for the symbol side).
pub fn word_coefficient(
    side: Side,
    letters: &[Letter],
    k: usize,
    t: &[Rational],
) -> Result<Rational> {
    let mut valence = match side {
        Side::Density => 0i64,
        Side::Symbol => k as i64,
    };
    let mut coeff = Rational::one();
    for &letter in letters.iter().rev() {
        if letter == Letter::T {
            let factor = usize::try_from(valence)
                .ok()
                .and_then(|j| t.get(j))
                .ok_or_else(|| {
                    Error::Invalid(alloc::format!("no T factor at valence {valence}"))
                })?;
            coeff *= factor;
        }
        valence += side.letter_degree(letter);
        if valence < 0 {
            return Err(Error::Valence("word drops below degree 0".into()));
        }
    }
    Ok(coeff)
}

/// All words of absolute degree `target` on `side`, with coefficients.
pub fn expand_words(side: Side, target: usize, coeffs: &Coefficients) -> Result<Vec<OperatorWord>> {
    let k = coeffs.params.k;
    if side == Side::Symbol && target > k {
        return Err(Error::Valence(alloc::format!(
            "a degree-{k} symbol cannot lose {target} degrees"
        )));
    }
    let t = match side {
        Side::Density => &coeffs.t1,
        Side::Symbol => &coeffs.t2,
    };
    compositions(target)
        .into_iter()
        .map(|letters| {
            let coefficient = word_coefficient(side, &letters, k, t)?;
            Ok(OperatorWord {
                side,
                letters,
                coefficient,
            })
        })
        .collect()
}

/// The two word lists paired with weight `C_{k,l}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionPlan {
    pub k: usize,
    pub l: usize,
    pub c: Rational,
    /// Words of total degree drop `l`.
    pub symbol_words: Vec<OperatorWord>,
    /// Words of total degree `k − l`.
    pub density_words: Vec<OperatorWord>,
}

impl ExpansionPlan {
    /// The unique `T`-free pair `(D^l, D^{k−l})` and its combined coefficient.
    pub fn principal_pair(&self) -> Option<(&OperatorWord, &OperatorWord, Rational)> {
        let mut s = self.symbol_words.iter().filter(|w| w.is_pure_derivative());
        let mut d = self.density_words.iter().filter(|w| w.is_pure_derivative());
        let (ws, wd) = (s.next()?, d.next()?);
        if s.next().is_some() || d.next().is_some() {
            return None;
        }
        let c = &self.c * &ws.coefficient * &wd.coefficient;
        Some((ws, wd, c))
    }
}

pub fn plans(coeffs: &Coefficients) -> Result<Vec<ExpansionPlan>> {
    let k = coeffs.params.k;
    (0..=k)
        .map(|l| {
            Ok(ExpansionPlan {
                k,
                l,
                c: coeffs.c[l].clone(),
                symbol_words: expand_words(Side::Symbol, l, coeffs)?,
                density_words: expand_words(Side::Density, k - l, coeffs)?,
            })
        })
        .collect()
}

/// Connection plus (when needed) curvature of the working metric.
#[derive(Debug, Clone)]
pub struct Geometry<S: Scalar> {
    pub connection: Connection<S>,
    pub curvature: Option<Curvature<S>>,
}

impl<S: Scalar> Geometry<S> {
    pub fn new(g: &MetricJet<S>, with_curvature: bool) -> Result<Self> {
        let connection = Connection::new(g)?;
        let curvature = if with_curvature {
            Some(Curvature::new(&connection)?)
        } else {
            None
        };
        Ok(Geometry {
            connection,
            curvature,
        })
    }

    fn r(&self) -> Result<&WeightedTensorJet<S>> {
        self.curvature
            .as_ref()
            .map(|c| c.r())
            .ok_or(Error::InsufficientOrder {
                what: "curvature insertion",
                needed: 2,
                have: self.connection.metric().order(),
            })
    }
}

/// Evaluates words on a fixed input, sharing common suffixes.
struct WordCache<'a, S: Scalar> {
    side: Side,
    geom: &'a Geometry<S>,
    memo: BTreeMap<Vec<Letter>, WeightedTensorJet<S>>,
}

impl<'a, S: Scalar> WordCache<'a, S> {
    fn new(side: Side, geom: &'a Geometry<S>, input: WeightedTensorJet<S>) -> Self {
        let mut memo = BTreeMap::new();
        memo.insert(Vec::new(), input);
        WordCache { side, geom, memo }
    }

    fn letter(&self, letter: Letter, t: &WeightedTensorJet<S>) -> Result<WeightedTensorJet<S>> {
        let conn = &self.geom.connection;
        match (self.side, letter) {
            (Side::Density, Letter::D) => sym_derivative(t, conn),
            (Side::Density, Letter::T) => sym_product(self.geom.r()?, t),
            (Side::Symbol, Letter::D) => divergence(t, conn),
            (Side::Symbol, Letter::T) => insert(self.geom.r()?, t),
        }
    }

    /// Uncoefficiented image of the word.
    fn eval(&mut self, letters: &[Letter]) -> Result<WeightedTensorJet<S>> {
        if let Some(t) = self.memo.get(letters) {
            return Ok(t.clone());
        }
        let inner = self.eval(&letters[1..])?;
        let out = self.letter(letters[0], &inner)?;
        self.memo.insert(letters.to_vec(), out.clone());
        Ok(out)
    }

    fn apply(&mut self, words: &[OperatorWord]) -> Result<WeightedTensorJet<S>> {
        let mut acc: Option<WeightedTensorJet<S>> = None;
        for w in words {
            if w.coefficient.is_zero() {
                continue;
            }
            let term = self.eval(&w.letters)?.scale_rational(&w.coefficient);
            acc = Some(match acc {
                None => term,
                Some(a) => {
                    let order = a.order().min(term.order());
                    a.truncate(order).try_add(&term.truncate(order))?
                }
            });
        }
        match acc {
            Some(a) => Ok(a),
            // every coefficient vanished: the shape is that of the pure word
            None => {
                let pure = words
                    .iter()
                    .find(|w| w.is_pure_derivative())
                    .ok_or_else(|| Error::Invalid("empty word list".into()))?;
                Ok(self.eval(&pure.letters)?.scale_rational(&Rational::zero()))
            }
        }
    }
}

/// `π_{k−l}(Σ(∇_s + T₁)^j) f` for one plan row.
pub fn apply_plan_density<S: Scalar>(
    words: &[OperatorWord],
    f: &WeightedTensorJet<S>,
    geom: &Geometry<S>,
) -> Result<WeightedTensorJet<S>> {
    WordCache::new(Side::Density, geom, f.clone()).apply(words)
}

/// `π_l(Σ(Div + T₂)^j) S` for one plan row; `S` must be trace-free.
pub fn apply_plan_symbol<S: Scalar>(
    words: &[OperatorWord],
    s: &WeightedTensorJet<S>,
    geom: &Geometry<S>,
) -> Result<WeightedTensorJet<S>> {
    check_trace_free(s, geom.connection.metric())?;
    WordCache::new(Side::Symbol, geom, s.clone()).apply(words)
}

pub fn check_trace_free<S: Scalar>(s: &WeightedTensorJet<S>, g: &MetricJet<S>) -> Result<()> {
    if s.rank() >= 2 && !trace(s, g)?.is_zero() {
        return Err(Error::NotTraceFree);
    }
    Ok(())
}

/// Shape, weight and order checks shared by `quantize` and the oracles.
pub(crate) fn check_inputs<S: Scalar>(
    g: &MetricJet<S>,
    s: &WeightedTensorJet<S>,
    f: &WeightedTensorJet<S>,
    params: &QuantParams,
) -> Result<()> {
    let (m, k) = (params.m, params.k);
    for dim in [g.dim(), s.dim(), f.dim()] {
        if dim != m {
            return Err(Error::DimensionMismatch(m, dim));
        }
    }
    let expected = if k == 0 {
        Valence::Scalar
    } else {
        Valence::Contravariant(k)
    };
    if s.valence() != expected {
        return Err(Error::Valence(alloc::format!(
            "expected a degree-{k} symbol, found {:?}",
            s.valence()
        )));
    }
    if f.valence() != Valence::Scalar {
        return Err(Error::Valence("the operand must be a density".into()));
    }
    if s.weight() != &params.delta() {
        return Err(Error::Invalid(alloc::format!(
            "symbol weight {} differs from μ − λ = {}",
            s.weight(),
            params.delta()
        )));
    }
    if f.weight() != &params.lambda {
        return Err(Error::Invalid(alloc::format!(
            "density weight {} differs from λ = {}",
            f.weight(),
            params.lambda
        )));
    }
    for (what, have) in [
        ("metric", g.order()),
        ("symbol", s.order()),
        ("density", f.order()),
    ] {
        if have < k {
            return Err(Error::InsufficientOrder {
                what,
                needed: k,
                have,
            });
        }
    }
    if let Some(hit) = critical_for_degree(m, &params.delta(), k)
        .into_iter()
        .next()
    {
        return Err(Error::Critical(hit));
    }
    check_trace_free(s, g)
}

/// `Q(g, S)(f)` as a weight-`μ` density jet of order `min(orders) − k`.
pub fn quantize<S: Scalar>(
    g: &MetricJet<S>,
    s: &WeightedTensorJet<S>,
    f: &WeightedTensorJet<S>,
    params: &QuantParams,
) -> Result<WeightedTensorJet<S>> {
    check_inputs(g, s, f, params)?;
    quantize_with(g, s, f, &Coefficients::new(params)?)
}

/// `quantize` driven by an explicit (possibly perturbed) coefficient set.
pub fn quantize_with<S: Scalar>(
    g: &MetricJet<S>,
    s: &WeightedTensorJet<S>,
    f: &WeightedTensorJet<S>,
    coeffs: &Coefficients,
) -> Result<WeightedTensorJet<S>> {
    let params = &coeffs.params;
    let k = params.k;
    if k == 0 {
        let out = pair(s, f)?;
        return Ok(out.with_weight(params.mu.clone()));
    }
    let geom = Geometry::new(g, k >= 2)?;
    let mut symbol_side = WordCache::new(Side::Symbol, &geom, s.clone());
    let mut density_side = WordCache::new(Side::Density, &geom, f.clone());
    let mut total: Option<WeightedTensorJet<S>> = None;
    for plan in plans(coeffs)? {
        if plan.c.is_zero() {
            continue;
        }
        let a = symbol_side.apply(&plan.symbol_words)?;
        let b = density_side.apply(&plan.density_words)?;
        let term = pair(&a, &b)?.scale_rational(&plan.c);
        total = Some(match total {
            None => term,
            Some(t) => {
                let order = t.order().min(term.order());
                t.truncate(order).try_add(&term.truncate(order))?
            }
        });
    }
    let out = match total {
        Some(t) => t,
        None => {
            let order = g.order().min(s.order()).min(f.order()) - k;
            WeightedTensorJet::zeros(f.layout(), order, Valence::Scalar, Rational::zero())
        }
    };
    Ok(out.with_weight(params.mu.clone()))
}

/// Order-`k` principal part check: in each row exactly one `T`-free pair,
/// `(D^l, D^{k−l})`, with combined coefficient `C_{k,l}`.
pub fn principal_symbol_ok(plans: &[ExpansionPlan]) -> bool {
    plans.iter().all(|p| match p.principal_pair() {
        Some((ws, wd, c)) => {
            ws.letters == vec![Letter::D; p.l]
                && wd.letters == vec![Letter::D; p.k - p.l]
                && c == p.c
                && (p.l != 0 || c.is_one())
        }
        None => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn coeffs(m: usize, lambda: Rational, mu: Rational, k: usize) -> Coefficients {
        Coefficients::new(&QuantParams::new(m, lambda, mu, k).unwrap()).unwrap()
    }

    fn find<'a>(words: &'a [OperatorWord], s: &[Letter]) -> &'a Rational {
        &words.iter().find(|w| w.letters == s).unwrap().coefficient
    }

    use Letter::{D, T};

    #[test]
    fn density_words_match_the_closed_forms() {
        let c = coeffs(3, rational(1, 3), rational(2, 3), 3);
        let beta = rational(-1, 1); // −λm
        let two = expand_words(Side::Density, 2, &c).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(find(&two, &[D, D]), &rational(1, 1));
        assert_eq!(find(&two, &[T]), &beta);
        let three = expand_words(Side::Density, 3, &c).unwrap();
        assert_eq!(three.len(), 3);
        assert_eq!(find(&three, &[D, T]), &beta);
        assert_eq!(
            find(&three, &[T, D]),
            &((&beta - rational(1, 1)) * rational(2, 1))
        );
    }

    #[test]
    fn symbol_words_match_the_closed_forms() {
        let (m, lambda, mu) = (4, rational(0, 1), rational(1, 4));
        let c = coeffs(m, lambda, mu.clone(), 3);
        let mg4 = rational(4, 1) * crate::coefficients::gamma(4, m, &mu);
        let w = expand_words(Side::Symbol, 3, &c).unwrap();
        assert_eq!(find(&w, &[D, D, D]), &rational(1, 1));
        assert_eq!(find(&w, &[D, T]), &mg4);
        assert_eq!(
            find(&w, &[T, D]),
            &((&mg4 - rational(1, 1)) * rational(2, 1))
        );
        assert!(expand_words(Side::Symbol, 4, &c).is_err());
    }

    #[test]
    fn every_plan_has_the_right_principal_part() {
        for k in 0..6 {
            let c = coeffs(4, rational(1, 3), rational(2, 3), k);
            let p = plans(&c).unwrap();
            assert_eq!(p.len(), k + 1);
            assert!(principal_symbol_ok(&p));
            for plan in &p {
                for w in &plan.symbol_words {
                    assert_eq!(w.degree(), -(plan.l as i64));
                }
                for w in &plan.density_words {
                    assert_eq!(w.degree(), (k - plan.l) as i64);
                }
            }
        }
    }

    #[test]
    fn composition_counts_are_fibonacci() {
        let counts: Vec<usize> = (0..8).map(|n| compositions(n).len()).collect();
        assert_eq!(counts, [1, 1, 2, 3, 5, 8, 13, 21]);
    }
}
