//! Truncated multivariate Taylor series ("jets") at a chart point.
//!
//! A jet of order `N` in `m` variables stores the coefficients of every
//! monomial `u^α` with `|α| ≤ N`, where `u = x − x₀` is the offset from the
//! base point. Coefficients follow the monomial convention
//! `coeff[α] = ∂^α F(x₀) / α!`, so multiplication is a plain truncated
//! polynomial product.
//!
//! Monomials are laid out by total degree, then lexicographically descending
//! inside each degree. The layout of order `n` is therefore a prefix of the
//! layout of any larger order, which is what lets jets of different orders
//! share one [`Layout`] and makes truncation a slice operation.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::One;

use crate::scalar::{Rational, Scalar};
use crate::{Error, Result};

const NONE: u32 = u32::MAX;

/// Monomial bookkeeping shared by all jets of a given dimension.
pub struct Layout {
    dim: usize,
    max_order: usize,
    exps: Vec<u8>,
    degree: Vec<u8>,
    upto: Vec<usize>,
    lookup: BTreeMap<Vec<u8>, usize>,
    /// `product[i * len + j]`: index of `u^{α_i + α_j}` or NONE past `max_order`.
    product: Vec<u32>,
    /// For each non-constant monomial: (index of α − e_v, v) with v the first nonzero slot.
    pred: Vec<(u32, u8)>,
}

impl Layout {
    pub fn new(dim: usize, max_order: usize) -> Arc<Layout> {
        assert!(dim > 0, "a jet needs at least one variable");
        let mut exps = Vec::new();
        let mut degree = Vec::new();
        let mut upto = Vec::with_capacity(max_order + 1);
        let mut current = vec![0u8; dim];
        for d in 0..=max_order {
            push_degree(&mut exps, &mut degree, &mut current, 0, d, d as u8);
            upto.push(degree.len());
        }
        let len = degree.len();
        let mut lookup = BTreeMap::new();
        for i in 0..len {
            lookup.insert(exps[i * dim..(i + 1) * dim].to_vec(), i);
        }
        let mut product = vec![NONE; len * len];
        let mut sum = vec![0u8; dim];
        for i in 0..len {
            let di = degree[i] as usize;
            for j in 0..upto[max_order - di] {
                for v in 0..dim {
                    sum[v] = exps[i * dim + v] + exps[j * dim + v];
                }
                product[i * len + j] = lookup[&sum] as u32;
            }
        }
        let mut pred = vec![(NONE, 0u8); len];
        for (i, p) in pred.iter_mut().enumerate().skip(1) {
            let a = &exps[i * dim..(i + 1) * dim];
            let v = a.iter().position(|&e| e > 0).unwrap();
            let mut b = a.to_vec();
            b[v] -= 1;
            *p = (lookup[&b] as u32, v as u8);
        }
        Arc::new(Layout {
            dim,
            max_order,
            exps,
            degree,
            upto,
            lookup,
            product,
            pred,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Number of monomials of total degree ≤ `order`.
    pub fn len(&self, order: usize) -> usize {
        self.upto[order]
    }

    pub fn exponents(&self, index: usize) -> &[u8] {
        &self.exps[index * self.dim..(index + 1) * self.dim]
    }

    pub fn degree(&self, index: usize) -> usize {
        self.degree[index] as usize
    }

    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.lookup.get(exps).copied()
    }

    /// Index of the monomial `u_v`.
    pub fn unit(&self, v: usize) -> usize {
        1 + v
    }

    #[inline]
    fn product(&self, i: usize, j: usize) -> usize {
        self.product[i * self.degree.len() + j] as usize
    }
}

fn push_degree(
    exps: &mut Vec<u8>,
    degree: &mut Vec<u8>,
    current: &mut [u8],
    slot: usize,
    left: usize,
    total: u8,
) {
    if slot + 1 == current.len() {
        current[slot] = left as u8;
        exps.extend_from_slice(current);
        degree.push(total);
        current[slot] = 0;
        return;
    }
    for e in (0..=left).rev() {
        current[slot] = e as u8;
        push_degree(exps, degree, current, slot + 1, left - e, total);
    }
    current[slot] = 0;
}

impl fmt::Debug for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Layout(dim={}, max_order={})", self.dim, self.max_order)
    }
}

/// Truncated Taylor expansion of a scalar quantity at a chart point.
#[derive(Clone)]
pub struct Jet<S> {
    layout: Arc<Layout>,
    order: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    pub fn zero(layout: &Arc<Layout>, order: usize) -> Self {
        assert!(
            order <= layout.max_order,
            "jet order {order} exceeds layout capacity {}",
            layout.max_order
        );
        Jet {
            layout: layout.clone(),
            order,
            coeffs: vec![S::zero(); layout.len(order)],
        }
    }

    pub fn constant(layout: &Arc<Layout>, order: usize, value: S) -> Self {
        let mut j = Self::zero(layout, order);
        j.coeffs[0] = value;
        j
    }

    pub fn one(layout: &Arc<Layout>, order: usize) -> Self {
        Self::constant(layout, order, S::one())
    }

    /// The offset coordinate `u_v = x_v − x₀_v`.
    pub fn variable(layout: &Arc<Layout>, order: usize, v: usize) -> Self {
        let mut j = Self::zero(layout, order);
        if order > 0 {
            j.coeffs[layout.unit(v)] = S::one();
        }
        j
    }

    /// Builds a jet from monomial terms in the offset variables; terms above
    /// `order` are dropped, repeated exponents accumulate.
    pub fn from_terms<'a, I>(layout: &Arc<Layout>, order: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [u8], S)>,
    {
        if order > layout.max_order {
            return Err(Error::LayoutTooSmall {
                order,
                capacity: layout.max_order,
            });
        }
        let mut j = Self::zero(layout, order);
        for (exps, c) in terms {
            if exps.len() != layout.dim {
                return Err(Error::DimensionMismatch(exps.len(), layout.dim));
            }
            let deg: usize = exps.iter().map(|&e| e as usize).sum();
            if deg > order {
                continue;
            }
            let i = layout.index_of(exps).expect("degree checked");
            j.coeffs[i].add_assign_ref(&c);
        }
        Ok(j)
    }

    /// Taylor expansion at `base` of the polynomial `Σ c·x^e` written in the
    /// absolute chart coordinates `x`.
    pub fn expand_polynomial<'a, I>(
        layout: &Arc<Layout>,
        order: usize,
        base: &[S],
        terms: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [u8], S)>,
    {
        if base.len() != layout.dim {
            return Err(Error::DimensionMismatch(base.len(), layout.dim));
        }
        if order > layout.max_order {
            return Err(Error::LayoutTooSmall {
                order,
                capacity: layout.max_order,
            });
        }
        let coords: Vec<Jet<S>> = (0..layout.dim)
            .map(|v| {
                &Self::variable(layout, order, v) + &Self::constant(layout, order, base[v].clone())
            })
            .collect();
        let mut powers: Vec<Vec<Jet<S>>> = coords
            .iter()
            .map(|c| vec![Self::one(layout, order), c.clone()])
            .collect();
        let mut out = Self::zero(layout, order);
        for (exps, c) in terms {
            if exps.len() != layout.dim {
                return Err(Error::DimensionMismatch(exps.len(), layout.dim));
            }
            let mut term = Self::constant(layout, order, c);
            for (v, &e) in exps.iter().enumerate() {
                while powers[v].len() <= e as usize {
                    let next = powers[v].last().unwrap() * &coords[v];
                    powers[v].push(next);
                }
                if e > 0 {
                    term = &term * &powers[v][e as usize];
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.layout.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> &S {
        &self.coeffs[0]
    }

    /// Coefficient of `u^α`; zero beyond the order.
    pub fn coeff(&self, exps: &[u8]) -> S {
        match self.layout.index_of(exps) {
            Some(i) if i < self.coeffs.len() => self.coeffs[i].clone(),
            _ => S::zero(),
        }
    }

    /// Nonzero terms as (exponents, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &S)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.layout.exponents(i), c))
    }

    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.order {
            return self.clone();
        }
        Jet {
            layout: self.layout.clone(),
            order,
            coeffs: self.coeffs[..self.layout.len(order)].to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_negligible())
    }

    /// Largest coefficient difference over the common order.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().min(other.coeffs.len());
        (0..n)
            .map(|i| (self.coeffs[i].clone() - other.coeffs[i].clone()).magnitude())
            .fold(0.0, f64::max)
    }

    /// Coefficientwise equality after truncating both sides to the common order.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let n = self.coeffs.len().min(other.coeffs.len());
        (0..n).all(|i| {
            if S::EXACT {
                self.coeffs[i] == other.coeffs[i]
            } else {
                (self.coeffs[i].clone() - other.coeffs[i].clone()).is_negligible()
            }
        })
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Jet<T> {
        Jet {
            layout: self.layout.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        Jet {
            layout: self.layout.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(|x| x.mul_ref(c)).collect(),
        }
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        self.scale(&S::from_rational(c))
    }

    pub fn add_constant(&self, c: &S) -> Self {
        let mut out = self.clone();
        out.coeffs[0].add_assign_ref(c);
        out
    }

    fn binary_layout(&self, other: &Self) -> Result<(Arc<Layout>, usize)> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        let layout = if self.layout.max_order >= other.layout.max_order {
            self.layout.clone()
        } else {
            other.layout.clone()
        };
        Ok((layout, self.order.min(other.order)))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let (layout, order) = self.binary_layout(other)?;
        let n = layout.len(order);
        let coeffs = (0..n)
            .map(|i| {
                let mut c = self.coeffs[i].clone();
                c.add_assign_ref(&other.coeffs[i]);
                c
            })
            .collect();
        Ok(Jet {
            layout,
            order,
            coeffs,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        let (layout, order) = self.binary_layout(other)?;
        let n = layout.len(order);
        let coeffs = (0..n)
            .map(|i| {
                let mut c = self.coeffs[i].clone();
                c.sub_assign_ref(&other.coeffs[i]);
                c
            })
            .collect();
        Ok(Jet {
            layout,
            order,
            coeffs,
        })
    }

    /// Truncated Cauchy product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let (layout, order) = self.binary_layout(other)?;
        let n = layout.len(order);
        let coeffs = S::convolve(
            &self.coeffs[..n],
            &other.coeffs[..n],
            n,
            |i| layout.len(order - layout.degree(i)),
            |i, j| layout.product(i, j),
        );
        Ok(Jet {
            layout,
            order,
            coeffs,
        })
    }

    /// Splits `self = c + u` with `u` free of constant term.
    fn split_constant(&self) -> (S, Self) {
        let mut u = self.clone();
        let c = core::mem::replace(&mut u.coeffs[0], S::zero());
        (c, u)
    }

    pub fn inverse(&self) -> Result<Self> {
        let (c, u) = self.split_constant();
        if c.is_negligible() {
            return Err(Error::ZeroConstantTerm);
        }
        let inv_c = S::one() / c;
        let v = u.scale(&inv_c);
        // 1/(1+v) = 1 − v(1 − v(1 − …))
        let one = Self::one(&self.layout, self.order);
        let mut s = one.clone();
        for _ in 0..self.order {
            s = &one - &(&v * &s);
        }
        Ok(s.scale(&inv_c))
    }

    pub fn exp(&self) -> Result<Self> {
        let (c, u) = self.split_constant();
        let ec = c.exp_value()?;
        let one = Self::one(&self.layout, self.order);
        let mut s = one.clone();
        for n in (1..=self.order).rev() {
            let t = (&u * &s).scale(&(S::one() / S::from_int(n as i64)));
            s = &one + &t;
        }
        Ok(s.scale(&ec))
    }

    /// Real power `self^e`; needs a positive constant term.
    pub fn pow(&self, e: &Rational) -> Result<Self> {
        let (c, u) = self.split_constant();
        if !c.is_positive() {
            return Err(Error::NonPositiveConstant);
        }
        let ce = c.pow_value(e)?;
        let v = u.scale(&(S::one() / c));
        let one = Self::one(&self.layout, self.order);
        let mut s = one.clone();
        for n in (1..=self.order).rev() {
            let n_r = Rational::from_integer((n as i64).into());
            let ratio = (e - &n_r + Rational::one()) / n_r;
            let t = (&v * &s).scale_rational(&ratio);
            s = &one + &t;
        }
        Ok(s.scale(&ce))
    }

    /// Formal partial derivative `∂_v`; the result has order one less.
    pub fn partial(&self, v: usize) -> Result<Self> {
        if v >= self.dim() {
            return Err(Error::DimensionMismatch(v, self.dim()));
        }
        if self.order == 0 {
            return Err(Error::OrderExhausted);
        }
        let order = self.order - 1;
        let layout = &self.layout;
        let unit = layout.unit(v);
        let coeffs = (0..layout.len(order))
            .map(|b| {
                let raised = layout.product(b, unit);
                let k = layout.exponents(b)[v] as i64 + 1;
                self.coeffs[raised].mul_ref(&S::from_int(k))
            })
            .collect();
        Ok(Jet {
            layout: layout.clone(),
            order,
            coeffs,
        })
    }

    /// Substitutes `x = inner(y)` into `self`, which is expanded about `at`.
    /// `inner[v]` must have constant term `at[v]`.
    pub fn compose(&self, inner: &[Jet<S>], at: &[S]) -> Result<Self> {
        if inner.len() != self.dim() {
            return Err(Error::DimensionMismatch(inner.len(), self.dim()));
        }
        if at.len() != self.dim() {
            return Err(Error::DimensionMismatch(at.len(), self.dim()));
        }
        let first = inner.first().expect("dim > 0");
        for (v, w) in inner.iter().enumerate() {
            if w.dim() != first.dim() {
                return Err(Error::DimensionMismatch(w.dim(), first.dim()));
            }
            if !(w.coeffs[0].clone() - at[v].clone()).is_negligible() {
                return Err(Error::BasePointMismatch(v));
            }
        }
        let order = inner.iter().map(|w| w.order).min().unwrap().min(self.order);
        let out_layout = inner
            .iter()
            .map(|w| &w.layout)
            .max_by_key(|l| l.max_order)
            .unwrap()
            .clone();
        let shifts: Vec<Jet<S>> = inner
            .iter()
            .map(|w| {
                let mut w = w.truncate(order);
                w.coeffs[0] = S::zero();
                w
            })
            .collect();
        let n = self.layout.len(order);
        let mut monomials: Vec<Jet<S>> = Vec::with_capacity(n);
        monomials.push(Self::one(&out_layout, order));
        for t in 1..n {
            let (p, v) = self.layout.pred[t];
            let next = &monomials[p as usize] * &shifts[v as usize];
            monomials.push(next);
        }
        let mut out = Self::zero(&out_layout, order);
        for (t, m) in monomials.iter().enumerate() {
            if !self.coeffs[t].is_zero() {
                out = &out + &m.scale(&self.coeffs[t]);
            }
        }
        Ok(out)
    }
}

impl<S: Scalar> PartialEq for Jet<S> {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.order == other.order && self.coeffs == other.coeffs
    }
}

impl<S: Scalar> fmt::Debug for Jet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet[m={}, N={}](", self.dim(), self.order)?;
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c:?}·u{e:?}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl<S: Scalar> $tr<&Jet<S>> for &Jet<S> {
            type Output = Jet<S>;
            fn $method(self, rhs: &Jet<S>) -> Jet<S> {
                self.$imp(rhs).expect("jet dimension mismatch")
            }
        }
        impl<S: Scalar> $tr<Jet<S>> for Jet<S> {
            type Output = Jet<S>;
            fn $method(self, rhs: Jet<S>) -> Jet<S> {
                self.$imp(&rhs).expect("jet dimension mismatch")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl<S: Scalar> Neg for &Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        Jet {
            layout: self.layout.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl<S: Scalar> Neg for Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    type Q = Rational;

    fn q(p: i64, d: i64) -> Q {
        rational(p, d)
    }

    fn jet(layout: &Arc<Layout>, order: usize, terms: &[(&[u8], Q)]) -> Jet<Q> {
        Jet::from_terms(layout, order, terms.iter().map(|(e, c)| (*e, c.clone()))).unwrap()
    }

    #[test]
    fn layout_is_graded_prefix() {
        let l = Layout::new(3, 3);
        assert_eq!(l.len(0), 1);
        assert_eq!(l.len(1), 4);
        assert_eq!(l.len(2), 10);
        assert_eq!(l.len(3), 20);
        assert_eq!(l.exponents(1), &[1, 0, 0]);
        assert_eq!(l.exponents(3), &[0, 0, 1]);
        assert_eq!(l.exponents(4), &[2, 0, 0]);
        let small = Layout::new(3, 2);
        for i in 0..small.len(2) {
            assert_eq!(small.exponents(i), l.exponents(i));
        }
    }

    #[test]
    fn difference_of_squares() {
        let l = Layout::new(1, 2);
        let a = jet(&l, 2, &[(&[0], q(1, 1)), (&[1], q(1, 1))]);
        let b = jet(&l, 2, &[(&[0], q(1, 1)), (&[1], q(-1, 1))]);
        assert_eq!(&a * &b, jet(&l, 2, &[(&[0], q(1, 1)), (&[2], q(-1, 1))]));
        assert_eq!(&a * &Jet::one(&l, 2), a);
    }

    #[test]
    fn square_of_trinomial() {
        let l = Layout::new(2, 2);
        let a = jet(
            &l,
            2,
            &[(&[0, 0], q(1, 1)), (&[1, 0], q(1, 1)), (&[0, 1], q(1, 1))],
        );
        let expected = jet(
            &l,
            2,
            &[
                (&[0, 0], q(1, 1)),
                (&[1, 0], q(2, 1)),
                (&[0, 1], q(2, 1)),
                (&[2, 0], q(1, 1)),
                (&[1, 1], q(2, 1)),
                (&[0, 2], q(1, 1)),
            ],
        );
        assert_eq!(&a * &a, expected);
    }

    #[test]
    fn inverses() {
        let l = Layout::new(1, 3);
        assert_eq!(Jet::<Q>::one(&l, 3).inverse().unwrap(), Jet::one(&l, 3));
        let a = jet(&l, 3, &[(&[0], q(1, 1)), (&[1], q(1, 1))]);
        let geo = jet(
            &l,
            3,
            &[
                (&[0], q(1, 1)),
                (&[1], q(-1, 1)),
                (&[2], q(1, 1)),
                (&[3], q(-1, 1)),
            ],
        );
        assert_eq!(a.inverse().unwrap(), geo);
        let b = jet(&l, 1, &[(&[0], q(2, 1)), (&[1], q(1, 1))]);
        let inv = b.inverse().unwrap();
        assert_eq!(inv, jet(&l, 1, &[(&[0], q(1, 2)), (&[1], q(-1, 4))]));
        assert_eq!(&b * &inv, Jet::one(&l, 1));
        assert_eq!(
            Jet::<Q>::variable(&l, 3, 0).inverse(),
            Err(Error::ZeroConstantTerm)
        );
    }

    #[test]
    fn exp_and_pow() {
        let l = Layout::new(1, 3);
        assert_eq!(Jet::<Q>::zero(&l, 3).exp().unwrap(), Jet::one(&l, 3));
        let x = Jet::<Q>::variable(&l, 3, 0);
        assert_eq!(
            x.exp().unwrap(),
            jet(
                &l,
                3,
                &[
                    (&[0], q(1, 1)),
                    (&[1], q(1, 1)),
                    (&[2], q(1, 2)),
                    (&[3], q(1, 6))
                ]
            )
        );
        let a = jet(&l, 3, &[(&[0], q(4, 1)), (&[1], q(3, 1)), (&[2], q(-1, 2))]);
        assert_eq!(a.pow(&q(0, 1)).unwrap(), Jet::one(&l, 3));
        assert_eq!(a.pow(&q(1, 1)).unwrap(), a);
        let half = a.pow(&q(1, 2)).unwrap();
        assert_eq!(&half * &half, a);
        assert_eq!(
            &a.pow(&q(1, 2)).unwrap() * &a.pow(&q(-3, 2)).unwrap(),
            a.pow(&q(-1, 1)).unwrap()
        );
        assert_eq!((-&a).pow(&q(1, 2)), Err(Error::NonPositiveConstant));
    }

    #[test]
    fn partials() {
        let l = Layout::new(2, 2);
        let x2 = jet(&l, 2, &[(&[2, 0], q(1, 1))]);
        assert_eq!(x2.partial(0).unwrap(), jet(&l, 1, &[(&[1, 0], q(2, 1))]));
        let c = Jet::constant(&l, 2, q(5, 1));
        assert!(c.partial(0).unwrap().is_zero());
        let xy = jet(&l, 2, &[(&[1, 1], q(1, 1))]);
        assert_eq!(xy.partial(0).unwrap().partial(1).unwrap(), Jet::one(&l, 0));
        assert_eq!(Jet::<Q>::one(&l, 0).partial(0), Err(Error::OrderExhausted));
    }

    #[test]
    fn compositions() {
        let l = Layout::new(2, 2);
        let x2 = jet(&l, 2, &[(&[2, 0], q(1, 1))]);
        let zero = [q(0, 1), q(0, 1)];
        let ident = [Jet::variable(&l, 2, 0), Jet::variable(&l, 2, 1)];
        assert_eq!(x2.compose(&ident, &zero).unwrap(), x2);
        let sum = [
            &Jet::variable(&l, 2, 0) + &Jet::variable(&l, 2, 1),
            Jet::variable(&l, 2, 1),
        ];
        assert_eq!(
            x2.compose(&sum, &zero).unwrap(),
            jet(
                &l,
                2,
                &[(&[2, 0], q(1, 1)), (&[1, 1], q(2, 1)), (&[0, 2], q(1, 1))]
            )
        );
        let c = Jet::constant(&l, 2, q(7, 3));
        assert_eq!(c.compose(&sum, &zero).unwrap(), c);
        let shifted = [sum[0].add_constant(&q(1, 1)), sum[1].clone()];
        assert_eq!(
            x2.compose(&shifted, &zero),
            Err(Error::BasePointMismatch(0))
        );
    }

    #[test]
    fn polynomial_expansion_at_point() {
        let l = Layout::new(2, 2);
        // x² y at (1, 2): 2 + 4u + v + 2u² + 2uv + …
        let e: &[u8] = &[2, 1];
        let j = Jet::expand_polynomial(&l, 2, &[q(1, 1), q(2, 1)], [(e, q(1, 1))]).unwrap();
        assert_eq!(
            j,
            jet(
                &l,
                2,
                &[
                    (&[0, 0], q(2, 1)),
                    (&[1, 0], q(4, 1)),
                    (&[0, 1], q(1, 1)),
                    (&[2, 0], q(2, 1)),
                    (&[1, 1], q(2, 1)),
                ]
            )
        );
    }

    #[test]
    fn mixed_orders_truncate_to_minimum() {
        let l = Layout::new(2, 3);
        let a = Jet::<Q>::variable(&l, 3, 0);
        let b = Jet::<Q>::one(&l, 1);
        assert_eq!((&a * &b).order(), 1);
        assert_eq!((&a + &b).order(), 1);
        let other = Layout::new(3, 1);
        assert_eq!(
            a.try_mul(&Jet::one(&other, 1)),
            Err(Error::DimensionMismatch(2, 3))
        );
    }
}
