//! Scalar field used inside jets.
//!
//! Two modes exist: exact [`Rational`] (the default for verification) and
//! `f64`. A computation uses one mode throughout; weights and combinatorial
//! coefficients are always rational and converted at the boundary with
//! [`Scalar::from_rational`].

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rational = BigRational;

/// Shorthand for `p/q` as a [`Rational`].
pub fn rational(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Absolute tolerance used by float mode when deciding "is zero".
pub const FLOAT_ZERO_TOLERANCE: f64 = 1e-9;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True when arithmetic is exact and equality is decidable.
    const EXACT: bool;

    fn from_rational(q: &Rational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    fn add_assign_ref(&mut self, other: &Self);
    fn sub_assign_ref(&mut self, other: &Self);
    fn mul_ref(&self, other: &Self) -> Self;

    /// `self += a * b`
    fn mul_acc(&mut self, a: &Self, b: &Self) {
        let p = a.mul_ref(b);
        self.add_assign_ref(&p);
    }

    /// Truncated convolution: `out[target(i, j)] += a[i]·b[j]` for every
    /// `i < a.len()` and `j < span(i)`, with `out` of length `n`.
    fn convolve(
        a: &[Self],
        b: &[Self],
        n: usize,
        span: impl Fn(usize) -> usize,
        target: impl Fn(usize, usize) -> usize,
    ) -> Vec<Self> {
        let mut out = vec![Self::zero(); n];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b[..span(i)].iter().enumerate() {
                if !y.is_zero() {
                    out[target(i, j)].mul_acc(x, y);
                }
            }
        }
        out
    }

    /// Zero test: exact in rational mode, within [`FLOAT_ZERO_TOLERANCE`] in float mode.
    fn is_negligible(&self) -> bool;

    fn is_positive(&self) -> bool;

    fn magnitude(&self) -> f64;

    fn to_f64(&self) -> f64;

    /// `e^self`, if representable.
    fn exp_value(&self) -> Result<Self>;

    /// `self^e` for `self > 0`, if representable.
    fn pow_value(&self, e: &Rational) -> Result<Self>;
}

/// Numerators over a common denominator, when all fit in `i64`.
fn to_fixed(xs: &[Rational]) -> Option<(Vec<i64>, i64)> {
    let mut den: i64 = 1;
    for x in xs {
        let d = x.denom().to_i64()?;
        if d != 1 {
            den = i64::try_from(i128::from(den).lcm(&i128::from(d))).ok()?;
        }
    }
    let nums = xs
        .iter()
        .map(|x| {
            let num = x.numer().to_i64()?;
            let d = x.denom().to_i64()?;
            num.checked_mul(den / d)
        })
        .collect::<Option<Vec<_>>>()?;
    Some((nums, den))
}

fn convolve_fixed(
    a: &[Rational],
    b: &[Rational],
    n: usize,
    span: &impl Fn(usize) -> usize,
    target: &impl Fn(usize, usize) -> usize,
) -> Option<Vec<Rational>> {
    let (an, ad) = to_fixed(a)?;
    let (bn, bd) = to_fixed(&b[..span(0).min(b.len())])?;
    let mut acc = vec![0i128; n];
    for (i, &x) in an.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in bn[..span(i)].iter().enumerate() {
            if y != 0 {
                let t = &mut acc[target(i, j)];
                *t = t.checked_add(i128::from(x) * i128::from(y))?;
            }
        }
    }
    let den = i128::from(ad) * i128::from(bd);
    Some(
        acc.into_iter()
            .map(|num| {
                if num == 0 {
                    return Rational::zero();
                }
                let g = num.gcd(&den);
                Rational::new_raw(BigInt::from(num / g), BigInt::from(den / g))
            })
            .collect(),
    )
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }

    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn mul_acc(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self += a * b;
    }

    /// Fraction-free fast path: both operands are brought to a common
    /// denominator with machine-word numerators and convolved in checked
    /// `i128`, so each output needs a single reduction. Falls back to
    /// big-rational arithmetic when anything overflows.
    fn convolve(
        a: &[Self],
        b: &[Self],
        n: usize,
        span: impl Fn(usize) -> usize,
        target: impl Fn(usize, usize) -> usize,
    ) -> Vec<Self> {
        if let Some(out) = convolve_fixed(a, b, n, &span, &target) {
            return out;
        }
        let mut out = vec![Self::zero(); n];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b[..span(i)].iter().enumerate() {
                out[target(i, j)].mul_acc(x, y);
            }
        }
        out
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }

    fn magnitude(&self) -> f64 {
        ToPrimitive::to_f64(&self.abs()).unwrap_or(f64::INFINITY)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn exp_value(&self) -> Result<Self> {
        if self.is_zero() {
            Ok(Rational::one())
        } else {
            Err(Error::NotRepresentable(format!(
                "exp({self}) is irrational"
            )))
        }
    }

    fn pow_value(&self, e: &Rational) -> Result<Self> {
        if !Signed::is_positive(self) {
            return Err(Error::NonPositiveConstant);
        }
        let root = e
            .denom()
            .to_u32()
            .ok_or_else(|| Error::NotRepresentable(format!("root index {}", e.denom())))?;
        let num = exact_root(self.numer(), root);
        let den = exact_root(self.denom(), root);
        let (Some(num), Some(den)) = (num, den) else {
            return Err(Error::NotRepresentable(format!(
                "({self})^({e}) is irrational"
            )));
        };
        let base = Rational::new(num, den);
        let p = e
            .numer()
            .to_i32()
            .ok_or_else(|| Error::NotRepresentable(format!("exponent {e}")))?;
        Ok(num_traits::Pow::pow(base, p))
    }
}

fn exact_root(n: &BigInt, root: u32) -> Option<BigInt> {
    let r = n.nth_root(root);
    (num_traits::Pow::pow(&r, root) == *n).then_some(r)
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self += *other;
    }

    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= *other;
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn is_negligible(&self) -> bool {
        libm::fabs(*self) <= FLOAT_ZERO_TOLERANCE
    }

    fn is_positive(&self) -> bool {
        *self > 0.0
    }

    fn magnitude(&self) -> f64 {
        libm::fabs(*self)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn exp_value(&self) -> Result<Self> {
        Ok(libm::exp(*self))
    }

    fn pow_value(&self, e: &Rational) -> Result<Self> {
        if *self <= 0.0 {
            return Err(Error::NonPositiveConstant);
        }
        Ok(libm::pow(*self, <f64 as Scalar>::from_rational(e)))
    }
}
