//! Closed-form reference evaluations, written without the word machinery.
//!
//! ```text
//! k = 2:  ⟨S, (∇_s² − mλ r) f⟩ + C_{2,1}⟨Div S, ∇_s f⟩ + C_{2,2}⟨(Div² + mγ₂ i(r)) S, f⟩
//! k = 3:  ⟨S, (∇_s³ − (3mλ+2) r∨∇_s − λm (∇_s r)) f⟩ + C_{3,1}⟨Div S, (∇_s² − mλ r) f⟩
//!       + C_{3,2}⟨(Div² + mγ₄ i(r)) S, ∇_s f⟩
//!       + C_{3,3}⟨(Div³ + (3γ₄m − 2) i(r)Div + mγ₄ i(∇_s r)) S, f⟩
//! ```
//!
//! [`flat_reference`] evaluates `Σ_l C_{k,l}⟨∂-Div^l S, ∂_s^{k−l} f⟩` from raw
//! partial derivatives, for use with a flat metric.

use alloc::vec::Vec;

use crate::calculus::{
    divergence, divergence_power, insert, pair, sym_derivative, sym_derivative_power, sym_product,
    Connection, Curvature,
};
use crate::coefficients::{c_coeff, gamma, QuantParams};
use crate::jet::Jet;
use crate::quantize::check_inputs;
use crate::scalar::{rational, Rational, Scalar};
use crate::tensor::{multiplicity, sorted, sym_indices, MetricJet, Valence, WeightedTensorJet};
use crate::{Error, Result};

type Tensor<S> = WeightedTensorJet<S>;

fn add<S: Scalar>(a: &Tensor<S>, b: &Tensor<S>) -> Result<Tensor<S>> {
    let order = a.order().min(b.order());
    a.truncate(order).try_add(&b.truncate(order))
}

fn lin<S: Scalar>(terms: &[(Rational, &Tensor<S>)]) -> Result<Tensor<S>> {
    let mut it = terms.iter();
    let (c, t) = it
        .next()
        .ok_or_else(|| Error::Invalid("empty combination".into()))?;
    let mut acc = t.scale_rational(c);
    for (c, t) in it {
        acc = add(&acc, &t.scale_rational(c))?;
    }
    Ok(acc)
}

fn int(n: i64) -> Rational {
    rational(n, 1)
}

fn finish<S: Scalar>(q: Tensor<S>, params: &QuantParams) -> Tensor<S> {
    q.with_weight(params.mu.clone())
}

pub fn quantize_order2_oracle<S: Scalar>(
    g: &MetricJet<S>,
    s: &Tensor<S>,
    f: &Tensor<S>,
    params: &QuantParams,
) -> Result<Tensor<S>> {
    if params.k != 2 {
        return Err(Error::Invalid("the order-2 formula needs k = 2".into()));
    }
    check_inputs(g, s, f, params)?;
    let (m, lambda, delta) = (params.m as i64, &params.lambda, params.delta());
    let conn = Connection::new(g)?;
    let curv = Curvature::new(&conn)?;
    let r = curv.r();
    let mlam = int(m) * lambda;

    let d2f = sym_derivative_power(f, 2, &conn)?;
    let rf = sym_product(r, f)?;
    let first = pair(s, &lin(&[(int(1), &d2f), (-mlam, &rf)])?)?;

    let div_s = divergence(s, &conn)?;
    let second = pair(&div_s, &sym_derivative(f, &conn)?)?;

    let div2_s = divergence(&div_s, &conn)?;
    let irs = insert(r, s)?;
    let mg2 = int(m) * gamma(2, params.m, &delta);
    let third = pair(&lin(&[(int(1), &div2_s), (mg2, &irs)])?, f)?;

    let c21 = c_coeff(2, 1, params.m, lambda, &delta)?;
    let c22 = c_coeff(2, 2, params.m, lambda, &delta)?;
    let q = lin(&[(int(1), &first), (c21, &second), (c22, &third)])?;
    Ok(finish(q, params))
}

pub fn quantize_order3_oracle<S: Scalar>(
    g: &MetricJet<S>,
    s: &Tensor<S>,
    f: &Tensor<S>,
    params: &QuantParams,
) -> Result<Tensor<S>> {
    if params.k != 3 {
        return Err(Error::Invalid("the order-3 formula needs k = 3".into()));
    }
    check_inputs(g, s, f, params)?;
    let (m, lambda, delta) = (params.m as i64, &params.lambda, params.delta());
    let conn = Connection::new(g)?;
    let curv = Curvature::new(&conn)?;
    let r = curv.r();
    let mlam = int(m) * lambda;
    let mg4 = int(m) * gamma(4, params.m, &delta);

    let df = sym_derivative(f, &conn)?;
    let d2f = sym_derivative(&df, &conn)?;
    let d3f = sym_derivative(&d2f, &conn)?;
    let dr = sym_derivative(r, &conn)?;
    let r_df = sym_product(r, &df)?;
    let dr_f = sym_product(&dr, f)?;
    let rf = sym_product(r, f)?;
    let first = pair(
        s,
        &lin(&[
            (int(1), &d3f),
            (-(int(3) * &mlam + int(2)), &r_df),
            (-mlam.clone(), &dr_f),
        ])?,
    )?;

    let div_s = divergence(s, &conn)?;
    let second = pair(&div_s, &lin(&[(int(1), &d2f), (-mlam, &rf)])?)?;

    let div2_s = divergence(&div_s, &conn)?;
    let irs = insert(r, s)?;
    let third = pair(&lin(&[(int(1), &div2_s), (mg4.clone(), &irs)])?, &df)?;

    let div3_s = divergence(&div2_s, &conn)?;
    let ir_div_s = insert(r, &div_s)?;
    let idr_s = insert(&dr, s)?;
    let fourth = pair(
        &lin(&[
            (int(1), &div3_s),
            (int(3) * &mg4 - int(2), &ir_div_s),
            (mg4, &idr_s),
        ])?,
        f,
    )?;

    let c = |l| c_coeff(3, l, params.m, lambda, &delta);
    let q = lin(&[
        (int(1), &first),
        (c(1)?, &second),
        (c(2)?, &third),
        (c(3)?, &fourth),
    ])?;
    Ok(finish(q, params))
}

/// Repeated plain partial-divergence `∂_b S^{b…}`.
fn flat_divergence<S: Scalar>(s: &Tensor<S>) -> Result<Tensor<S>> {
    let m = s.dim();
    let k = s.rank();
    Tensor::try_from_fn(m, Valence::contravariant(k - 1), s.weight().clone(), |a| {
        let mut acc = Jet::zero(s.layout(), s.order() - 1);
        for b in 0..m {
            let mut idx = a.to_vec();
            idx.push(b as u8);
            acc = &acc + &s.get_sorted(&sorted(&idx)).partial(b)?;
        }
        Ok(acc)
    })
}

/// `∂_{a₁}⋯∂_{a_q} f` (already symmetric).
fn flat_partials<S: Scalar>(f: &Jet<S>, q: usize, weight: Rational) -> Result<Tensor<S>> {
    let m = f.dim();
    Tensor::try_from_fn(m, Valence::covariant(q), weight, |a| {
        a.iter()
            .try_fold(f.clone(), |acc, &i| acc.partial(i as usize))
    })
}

/// `Σ_l C_{k,l}⟨∂-Div^l S, ∂^{k−l} f⟩` with full contractions.
pub fn flat_reference<S: Scalar>(
    s: &Tensor<S>,
    f: &Tensor<S>,
    params: &QuantParams,
) -> Result<Tensor<S>> {
    let k = params.k;
    let delta = params.delta();
    let mut acc: Option<Jet<S>> = None;
    let mut div = s.clone();
    for l in 0..=k {
        if l > 0 {
            div = flat_divergence(&div)?;
        }
        let c = c_coeff(k, l, params.m, &params.lambda, &delta)?;
        let d = flat_partials(f.value(), k - l, f.weight().clone())?;
        let mut term = Jet::zero(f.layout(), div.order().min(d.order()));
        for idx in sym_indices(s.dim(), k - l) {
            let t = div.get_sorted(&idx) * d.get_sorted(&idx);
            term = &term + &t.scale(&S::from_int(multiplicity(&idx) as i64));
        }
        let term = term.scale_rational(&c);
        acc = Some(match acc {
            None => term,
            Some(a) => {
                let order = a.order().min(term.order());
                &a.truncate(order) + &term.truncate(order)
            }
        });
    }
    let value = acc.ok_or_else(|| Error::Invalid("empty sum".into()))?;
    Ok(Tensor::scalar(value, params.mu.clone()))
}

/// `Σ_l C_{k,l}⟨Div^l S, ∇_s^{k−l} f⟩` with the covariant operators but no
/// curvature corrections (used as a cross-check on flat metrics).
pub fn covariant_leading<S: Scalar>(
    g: &MetricJet<S>,
    s: &Tensor<S>,
    f: &Tensor<S>,
    params: &QuantParams,
) -> Result<Tensor<S>> {
    let conn = Connection::new(g)?;
    let delta = params.delta();
    let terms: Vec<(Rational, Tensor<S>)> = (0..=params.k)
        .map(|l| {
            let c = c_coeff(params.k, l, params.m, &params.lambda, &delta)?;
            let a = divergence_power(s, l, &conn)?;
            let b = sym_derivative_power(f, params.k - l, &conn)?;
            Ok((c, pair(&a, &b)?))
        })
        .collect::<Result<_>>()?;
    let refs: Vec<(Rational, &Tensor<S>)> = terms.iter().map(|(c, t)| (c.clone(), t)).collect();
    Ok(finish(lin(&refs)?, params))
}
