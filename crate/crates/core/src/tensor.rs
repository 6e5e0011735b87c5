//! Symmetric weighted tensor fields over jets, and the metric.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::jet::{Jet, Layout};
use crate::linalg;
use crate::scalar::{Rational, Scalar};
use crate::{Error, Result};
use alloc::sync::Arc;

/// Number of sorted multi-indices of length `rank` over `dim` values.
pub fn sym_len(dim: usize, rank: usize) -> usize {
    binomial(dim + rank - 1, rank)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Sorted multi-indices of length `rank`, in lexicographic order.
pub fn sym_indices(dim: usize, rank: usize) -> Vec<Vec<u8>> {
    fn rec(dim: usize, left: usize, start: u8, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..dim as u8 {
            cur.push(v);
            rec(dim, left - 1, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::with_capacity(sym_len(dim, rank));
    rec(dim, rank, 0, &mut Vec::with_capacity(rank), &mut out);
    out
}

/// Position of a sorted multi-index in [`sym_indices`] order.
pub fn sym_position(dim: usize, sorted: &[u8]) -> usize {
    let rank = sorted.len();
    let mut pos = 0;
    let mut lo = 0usize;
    for (i, &a) in sorted.iter().enumerate() {
        let left = rank - i - 1;
        for v in lo..a as usize {
            pos += sym_len(dim - v, left);
        }
        lo = a as usize;
    }
    pos
}

/// Number of distinct orderings of a multi-index.
pub fn multiplicity(sorted: &[u8]) -> usize {
    let mut total = factorial(sorted.len());
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        total /= factorial(j - i);
        i = j;
    }
    total
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

pub fn sorted(idx: &[u8]) -> Vec<u8> {
    let mut v = idx.to_vec();
    v.sort_unstable();
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valence {
    Scalar,
    Covariant(usize),
    Contravariant(usize),
}

impl Valence {
    pub fn covariant(rank: usize) -> Self {
        if rank == 0 {
            Valence::Scalar
        } else {
            Valence::Covariant(rank)
        }
    }

    pub fn contravariant(rank: usize) -> Self {
        if rank == 0 {
            Valence::Scalar
        } else {
            Valence::Contravariant(rank)
        }
    }

    pub fn rank(self) -> usize {
        match self {
            Valence::Scalar => 0,
            Valence::Covariant(r) | Valence::Contravariant(r) => r,
        }
    }

    pub fn is_contravariant(self) -> bool {
        matches!(self, Valence::Contravariant(_))
    }

    pub fn is_covariant(self) -> bool {
        matches!(self, Valence::Covariant(_))
    }

    /// Same variance with a different rank.
    pub fn with_rank(self, rank: usize) -> Self {
        match self {
            Valence::Contravariant(_) => Valence::contravariant(rank),
            _ => Valence::covariant(rank),
        }
    }
}

/// Fully symmetric tensor field of pure valence with a density weight.
/// Components are stored once per sorted multi-index.
#[derive(Clone, PartialEq)]
pub struct WeightedTensorJet<S: Scalar> {
    dim: usize,
    valence: Valence,
    weight: Rational,
    comps: Vec<Jet<S>>,
}

impl<S: Scalar> core::fmt::Debug for WeightedTensorJet<S> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("WeightedTensorJet")
            .field("dim", &self.dim)
            .field("valence", &self.valence)
            .field("weight", &format!("{}", self.weight))
            .field("comps", &self.comps)
            .finish()
    }
}

impl<S: Scalar> WeightedTensorJet<S> {
    pub fn new(dim: usize, valence: Valence, weight: Rational, comps: Vec<Jet<S>>) -> Result<Self> {
        let n = sym_len(dim, valence.rank());
        if comps.len() != n {
            return Err(Error::Valence(format!(
                "{:?} in dimension {dim} needs {n} components, got {}",
                valence,
                comps.len()
            )));
        }
        if let Some(c) = comps.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch(c.dim(), dim));
        }
        Ok(WeightedTensorJet {
            dim,
            valence,
            weight,
            comps,
        })
    }

    /// Builds components from a function of the sorted multi-index.
    pub fn from_fn(
        dim: usize,
        valence: Valence,
        weight: Rational,
        mut f: impl FnMut(&[u8]) -> Jet<S>,
    ) -> Self {
        let comps = sym_indices(dim, valence.rank())
            .iter()
            .map(|i| f(i))
            .collect();
        WeightedTensorJet {
            dim,
            valence,
            weight,
            comps,
        }
    }

    pub fn try_from_fn(
        dim: usize,
        valence: Valence,
        weight: Rational,
        mut f: impl FnMut(&[u8]) -> Result<Jet<S>>,
    ) -> Result<Self> {
        let comps = sym_indices(dim, valence.rank())
            .iter()
            .map(|i| f(i))
            .collect::<Result<Vec<_>>>()?;
        Ok(WeightedTensorJet {
            dim,
            valence,
            weight,
            comps,
        })
    }

    pub fn scalar(value: Jet<S>, weight: Rational) -> Self {
        WeightedTensorJet {
            dim: value.dim(),
            valence: Valence::Scalar,
            weight,
            comps: vec![value],
        }
    }

    pub fn zeros(layout: &Arc<Layout>, order: usize, valence: Valence, weight: Rational) -> Self {
        Self::from_fn(layout.dim(), valence, weight, |_| Jet::zero(layout, order))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn valence(&self) -> Valence {
        self.valence
    }

    pub fn rank(&self) -> usize {
        self.valence.rank()
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn with_weight(mut self, weight: Rational) -> Self {
        self.weight = weight;
        self
    }

    pub fn comps(&self) -> &[Jet<S>] {
        &self.comps
    }

    pub fn into_comps(self) -> Vec<Jet<S>> {
        self.comps
    }

    /// Component at any (not necessarily sorted) multi-index.
    pub fn get(&self, idx: &[u8]) -> &Jet<S> {
        debug_assert_eq!(idx.len(), self.rank());
        &self.comps[sym_position(self.dim, &sorted(idx))]
    }

    /// Component at a sorted multi-index.
    pub fn get_sorted(&self, idx: &[u8]) -> &Jet<S> {
        &self.comps[sym_position(self.dim, idx)]
    }

    /// The single component of a rank-0 tensor.
    pub fn value(&self) -> &Jet<S> {
        &self.comps[0]
    }

    pub fn order(&self) -> usize {
        self.comps.iter().map(|c| c.order()).min().unwrap_or(0)
    }

    pub fn layout(&self) -> &Arc<Layout> {
        self.comps[0].layout()
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map_jets(|j| j.truncate(order))
    }

    pub fn map_jets(&self, f: impl Fn(&Jet<S>) -> Jet<S>) -> Self {
        WeightedTensorJet {
            dim: self.dim,
            valence: self.valence,
            weight: self.weight.clone(),
            comps: self.comps.iter().map(f).collect(),
        }
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T) -> WeightedTensorJet<T> {
        WeightedTensorJet {
            dim: self.dim,
            valence: self.valence,
            weight: self.weight.clone(),
            comps: self.comps.iter().map(|c| c.map(&f)).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map_jets(|j| j.scale(c))
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        self.scale(&S::from_rational(c))
    }

    fn check_same_type(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        if self.valence != other.valence || self.weight != other.weight {
            return Err(Error::Valence(format!(
                "cannot add {:?} (weight {}) and {:?} (weight {})",
                self.valence, self.weight, other.valence, other.weight
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_type(other)?;
        Ok(WeightedTensorJet {
            dim: self.dim,
            valence: self.valence,
            weight: self.weight.clone(),
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_type(other)?;
        Ok(WeightedTensorJet {
            dim: self.dim,
            valence: self.valence,
            weight: self.weight.clone(),
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    /// Componentwise agreement to the common order (exact in rational mode).
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.valence == other.valence
            && self.weight == other.weight
            && self
                .comps
                .iter()
                .zip(&other.comps)
                .all(|(a, b)| a.agrees_with(b))
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.max_deviation(b))
            .fold(0.0, f64::max)
    }
}

/// Signature `(p, q)`: `p` positive and `q` negative directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub fn euclidean(m: usize) -> Self {
        Signature { p: m, q: 0 }
    }

    pub fn lorentzian(m: usize) -> Self {
        Signature { p: m - 1, q: 1 }
    }

    pub fn dim(self) -> usize {
        self.p + self.q
    }

    /// The diagonal model form: `p` entries `+1` then `q` entries `−1`.
    pub fn diagonal(self) -> Vec<i64> {
        let mut d = vec![1; self.p];
        d.extend(core::iter::repeat_n(-1, self.q));
        d
    }
}

/// Pseudo-Riemannian metric as a jet at the chart point, with its inverse.
#[derive(Clone, PartialEq)]
pub struct MetricJet<S: Scalar> {
    dim: usize,
    comps: Vec<Jet<S>>,
    inverse: Vec<Jet<S>>,
    signature: Signature,
}

impl<S: Scalar> core::fmt::Debug for MetricJet<S> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("MetricJet")
            .field("signature", &self.signature)
            .field("comps", &self.comps)
            .finish()
    }
}

impl<S: Scalar> MetricJet<S> {
    /// Components given per sorted index pair `(a ≤ b)` in [`sym_indices`] order.
    pub fn new(comps: Vec<Jet<S>>, signature: Signature) -> Result<Self> {
        let dim = signature.dim();
        let metric = Self::build(dim, comps)?;
        let found = metric.signature;
        if found != signature {
            return Err(Error::SignatureMismatch {
                declared: (signature.p, signature.q),
                found: (found.p, found.q),
            });
        }
        Ok(metric)
    }

    /// Like [`MetricJet::new`] but reads the signature off the base-point value.
    pub fn with_detected_signature(dim: usize, comps: Vec<Jet<S>>) -> Result<Self> {
        Self::build(dim, comps)
    }

    /// From a full `m × m` matrix of jets, which must be symmetric.
    pub fn from_matrix(matrix: &[Vec<Jet<S>>], signature: Signature) -> Result<Self> {
        let dim = matrix.len();
        for a in 0..dim {
            if matrix[a].len() != dim {
                return Err(Error::DimensionMismatch(matrix[a].len(), dim));
            }
            for b in 0..a {
                if !matrix[a][b].agrees_with(&matrix[b][a])
                    || matrix[a][b].order() != matrix[b][a].order()
                {
                    return Err(Error::AsymmetricMetric);
                }
            }
        }
        let comps = sym_indices(dim, 2)
            .iter()
            .map(|i| matrix[i[0] as usize][i[1] as usize].clone())
            .collect();
        Self::new(comps, signature)
    }

    fn build(dim: usize, comps: Vec<Jet<S>>) -> Result<Self> {
        if dim < 3 {
            return Err(Error::DimensionTooSmall(dim));
        }
        if comps.len() != sym_len(dim, 2) {
            return Err(Error::Valence(format!(
                "metric in dimension {dim} needs {} components",
                sym_len(dim, 2)
            )));
        }
        if let Some(c) = comps.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch(c.dim(), dim));
        }
        let matrix = full_matrix(dim, &comps);
        let values: Vec<Vec<S>> = matrix
            .iter()
            .map(|r| r.iter().map(|j| j.constant_term().clone()).collect())
            .collect();
        let (p, q, zero) = linalg::inertia(&values);
        if zero > 0 {
            return Err(Error::DegenerateMetric);
        }
        let inv = linalg::invert(&matrix).map_err(|_| Error::DegenerateMetric)?;
        let inverse = sym_indices(dim, 2)
            .iter()
            .map(|i| inv[i[0] as usize][i[1] as usize].clone())
            .collect();
        Ok(MetricJet {
            dim,
            comps,
            inverse,
            signature: Signature { p, q },
        })
    }

    /// Flat model metric `diag(+1…, −1…)` to the given order.
    pub fn flat(layout: &Arc<Layout>, order: usize, signature: Signature) -> Result<Self> {
        let d = signature.diagonal();
        let comps = sym_indices(signature.dim(), 2)
            .iter()
            .map(|i| {
                if i[0] == i[1] {
                    Jet::constant(layout, order, S::from_int(d[i[0] as usize]))
                } else {
                    Jet::zero(layout, order)
                }
            })
            .collect();
        Self::new(comps, signature)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn order(&self) -> usize {
        self.comps.iter().map(|c| c.order()).min().unwrap_or(0)
    }

    pub fn layout(&self) -> &Arc<Layout> {
        self.comps[0].layout()
    }

    pub fn comps(&self) -> &[Jet<S>] {
        &self.comps
    }

    /// `g_{ab}`
    pub fn g(&self, a: usize, b: usize) -> &Jet<S> {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        &self.comps[sym_position(self.dim, &[a as u8, b as u8])]
    }

    /// `g^{ab}`
    pub fn g_inv(&self, a: usize, b: usize) -> &Jet<S> {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        &self.inverse[sym_position(self.dim, &[a as u8, b as u8])]
    }

    /// The metric as a covariant weight-0 tensor.
    pub fn as_tensor(&self) -> WeightedTensorJet<S> {
        WeightedTensorJet {
            dim: self.dim,
            valence: Valence::Covariant(2),
            weight: Rational::zero(),
            comps: self.comps.clone(),
        }
    }

    /// `g^♯`, the inverse metric as a contravariant weight-0 tensor.
    pub fn inverse_tensor(&self) -> WeightedTensorJet<S> {
        WeightedTensorJet {
            dim: self.dim,
            valence: Valence::Contravariant(2),
            weight: Rational::zero(),
            comps: self.inverse.clone(),
        }
    }

    pub fn matrix(&self) -> Vec<Vec<Jet<S>>> {
        full_matrix(self.dim, &self.comps)
    }

    /// Same signature, new components (for maps that preserve it, such as
    /// conformal rescaling by a positive factor).
    pub fn map_components(&self, f: impl Fn(&Jet<S>) -> Jet<S>) -> Result<Self> {
        Self::new(self.comps.iter().map(f).collect(), self.signature)
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Result<MetricJet<T>> {
        MetricJet::new(
            self.comps.iter().map(|c| c.map(&f)).collect(),
            self.signature,
        )
    }
}

fn full_matrix<S: Scalar>(dim: usize, comps: &[Jet<S>]) -> Vec<Vec<Jet<S>>> {
    (0..dim)
        .map(|a| {
            (0..dim)
                .map(|b| {
                    let (x, y) = if a <= b { (a, b) } else { (b, a) };
                    comps[sym_position(dim, &[x as u8, y as u8])].clone()
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    #[test]
    fn sym_index_roundtrip() {
        for dim in 1..5 {
            for rank in 0..5 {
                let all = sym_indices(dim, rank);
                assert_eq!(all.len(), sym_len(dim, rank));
                for (i, idx) in all.iter().enumerate() {
                    assert_eq!(sym_position(dim, idx), i);
                }
            }
        }
        assert_eq!(multiplicity(&[0, 0, 1]), 3);
        assert_eq!(multiplicity(&[0, 1, 2]), 6);
        assert_eq!(multiplicity(&[]), 1);
    }

    #[test]
    fn metric_validation() {
        let l = Layout::new(3, 1);
        let flat = MetricJet::<Rational>::flat(&l, 1, Signature::euclidean(3)).unwrap();
        assert_eq!(flat.g_inv(1, 1), &Jet::one(&l, 1));
        let lor = MetricJet::<Rational>::flat(&l, 1, Signature::lorentzian(3)).unwrap();
        assert_eq!(lor.signature(), Signature { p: 2, q: 1 });
        let mut comps = flat.comps().to_vec();
        comps[0] = Jet::zero(&l, 1);
        assert_eq!(
            MetricJet::new(comps.clone(), Signature::euclidean(3)),
            Err(Error::DegenerateMetric)
        );
        comps[0] = Jet::constant(&l, 1, rational(-1, 1));
        assert!(matches!(
            MetricJet::new(comps, Signature::euclidean(3)),
            Err(Error::SignatureMismatch { .. })
        ));
        let l2 = Layout::new(2, 1);
        assert_eq!(
            MetricJet::<Rational>::flat(&l2, 1, Signature::euclidean(2)),
            Err(Error::DimensionTooSmall(2))
        );
    }
}
