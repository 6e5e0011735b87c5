//! Chart-level tensor calculus over jets.
//!
//! Conventions:
//! - `∇_s` and `∨` use average symmetrization, so both are idempotent
//!   projectors composed with the tensor product and `∇_s` is a derivation
//!   of `∨`.
//! - `i(h)S` contracts every slot of the covariant `h` into `S`, `Div`
//!   contracts the derivative slot into one slot of `S`, and the pairing is a
//!   full contraction. None of them carries a combinatorial factor.
//! - A weight-`w` density component transforms with `|det J|^w` under chart
//!   changes. Its covariant derivative carries the correction `−w·Γ^e_{ei}`,
//!   which makes the Riemannian volume density (weight 1) parallel.
//! - `Ric_{bd} = R^a_{bda}` with `R^a_{bcd} = ∂_c Γ^a_{db} − ∂_d Γ^a_{cb} + …`,
//!   i.e. the sign for which round spheres have negative Ricci curvature.
//!   With this sign `r = Ric/(2−m)` and the deformation tensor
//!   `−(Ric − g·R/(2(m−1)))/(m−2)` are the curvature terms that make the
//!   quantization conformally invariant.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::One;

use crate::jet::Jet;
use crate::linalg;
use crate::scalar::{Rational, Scalar};
use crate::tensor::{
    binomial, multiplicity, sorted, sym_indices, sym_len, sym_position, MetricJet, Valence,
    WeightedTensorJet,
};
use crate::{Error, Result};

/// Levi-Civita connection of a metric jet.
#[derive(Clone, Debug)]
pub struct Connection<S: Scalar> {
    metric: MetricJet<S>,
    /// `Γ^a_{bc}` at `a * sym_len(m, 2) + pos(b ≤ c)`.
    gamma: Vec<Jet<S>>,
    /// `Γ^e_{ei}`
    trace: Vec<Jet<S>>,
}

/// Christoffel symbols `Γ^a_{bc} = ½ g^{ad}(∂_b g_{dc} + ∂_c g_{db} − ∂_d g_{bc})`.
pub fn christoffels<S: Scalar>(g: &MetricJet<S>) -> Result<Connection<S>> {
    Connection::new(g)
}

impl<S: Scalar> Connection<S> {
    pub fn new(g: &MetricJet<S>) -> Result<Self> {
        let m = g.dim();
        if g.order() < 1 {
            return Err(Error::InsufficientOrder {
                what: "Christoffel symbols",
                needed: 1,
                have: g.order(),
            });
        }
        let pairs = sym_len(m, 2);
        // dg[e * pairs + pos(a,b)] = ∂_e g_ab
        let mut dg = Vec::with_capacity(m * pairs);
        for e in 0..m {
            for c in g.comps() {
                dg.push(c.partial(e)?);
            }
        }
        let d = |e: usize, a: usize, b: usize| -> &Jet<S> {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            &dg[e * pairs + sym_position(m, &[a as u8, b as u8])]
        };
        let half = S::from_rational(&crate::scalar::rational(1, 2));
        let idx = sym_indices(m, 2);
        // first kind: Γ_{d,bc}
        let mut first = Vec::with_capacity(m * pairs);
        for dd in 0..m {
            for bc in &idx {
                let (b, c) = (bc[0] as usize, bc[1] as usize);
                let v = &(d(b, dd, c) + d(c, dd, b)) - d(dd, b, c);
                first.push(v.scale(&half));
            }
        }
        let mut gamma = Vec::with_capacity(m * pairs);
        for a in 0..m {
            for p in 0..pairs {
                let mut acc = Jet::zero(g.layout(), g.order() - 1);
                for dd in 0..m {
                    acc = &acc + &(g.g_inv(a, dd) * &first[dd * pairs + p]);
                }
                gamma.push(acc);
            }
        }
        let mut conn = Connection {
            metric: g.clone(),
            gamma,
            trace: Vec::new(),
        };
        conn.trace = (0..m)
            .map(|i| {
                (0..m).fold(Jet::zero(g.layout(), g.order() - 1), |acc, e| {
                    &acc + conn.christoffel(e, e, i)
                })
            })
            .collect();
        Ok(conn)
    }

    pub fn metric(&self) -> &MetricJet<S> {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// `Γ^a_{bc}`
    pub fn christoffel(&self, a: usize, b: usize, c: usize) -> &Jet<S> {
        let m = self.dim();
        let (b, c) = if b <= c { (b, c) } else { (c, b) };
        &self.gamma[a * sym_len(m, 2) + sym_position(m, &[b as u8, c as u8])]
    }

    /// `Γ^e_{ei}`
    pub fn trace(&self, i: usize) -> &Jet<S> {
        &self.trace[i]
    }

    pub fn order(&self) -> usize {
        self.gamma.iter().map(|j| j.order()).min().unwrap_or(0)
    }
}

/// Ricci, scalar curvature, `r` and the deformation tensor of a metric jet.
#[derive(Clone, Debug)]
pub struct Curvature<S: Scalar> {
    ricci_matrix: Vec<Vec<Jet<S>>>,
    ricci: WeightedTensorJet<S>,
    scalar: Jet<S>,
    r: WeightedTensorJet<S>,
    deformation: WeightedTensorJet<S>,
}

pub fn curvature<S: Scalar>(conn: &Connection<S>) -> Result<Curvature<S>> {
    Curvature::new(conn)
}

impl<S: Scalar> Curvature<S> {
    pub fn new(conn: &Connection<S>) -> Result<Self> {
        let g = conn.metric();
        let m = g.dim();
        if g.order() < 2 {
            return Err(Error::InsufficientOrder {
                what: "curvature",
                needed: 2,
                have: g.order(),
            });
        }
        let order = g.order() - 2;
        let layout = g.layout();
        let dtrace: Vec<Vec<Jet<S>>> = (0..m)
            .map(|d| {
                (0..m)
                    .map(|b| conn.trace(b).partial(d))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        // Ric_bd = −(∂_a Γ^a_{db} − ∂_d Γ^e_{eb} + Γ^a_{ae} Γ^e_{db} − Γ^a_{de} Γ^e_{ab})
        let mut ricci_matrix = vec![vec![Jet::zero(layout, order); m]; m];
        for b in 0..m {
            for d in 0..m {
                let mut v = Jet::zero(layout, order);
                for a in 0..m {
                    v = &v + &conn.christoffel(a, d, b).partial(a)?;
                    for e in 0..m {
                        v = &v + &(conn.christoffel(a, a, e) * conn.christoffel(e, d, b));
                        v = &v - &(conn.christoffel(a, d, e) * conn.christoffel(e, a, b));
                    }
                }
                v = &v - &dtrace[d][b];
                ricci_matrix[b][d] = -v;
            }
        }
        let zero_w = Rational::from_integer(0.into());
        let ricci = WeightedTensorJet::from_fn(m, Valence::Covariant(2), zero_w.clone(), |i| {
            ricci_matrix[i[0] as usize][i[1] as usize].clone()
        });
        let mut scalar = Jet::zero(layout, order);
        for a in 0..m {
            for b in 0..m {
                scalar = &scalar + &(g.g_inv(a, b) * &ricci_matrix[a][b]);
            }
        }
        let mm = m as i64;
        let r = ricci.scale_rational(&crate::scalar::rational(1, 2 - mm));
        let s_term = scalar.scale_rational(&crate::scalar::rational(1, 2 * (mm - 1)));
        let deformation = WeightedTensorJet::from_fn(m, Valence::Covariant(2), zero_w, |i| {
            let (a, b) = (i[0] as usize, i[1] as usize);
            let v = &ricci_matrix[a][b] - &(g.g(a, b) * &s_term);
            v.scale_rational(&crate::scalar::rational(-1, mm - 2))
        });
        Ok(Curvature {
            ricci_matrix,
            ricci,
            scalar,
            r,
            deformation,
        })
    }

    /// Full `m × m` Ricci matrix as computed, before any symmetric storage.
    pub fn ricci_matrix(&self) -> &[Vec<Jet<S>>] {
        &self.ricci_matrix
    }

    pub fn ricci(&self) -> &WeightedTensorJet<S> {
        &self.ricci
    }

    pub fn scalar(&self) -> &Jet<S> {
        &self.scalar
    }

    /// `r = Ric/(2−m)`
    pub fn r(&self) -> &WeightedTensorJet<S> {
        &self.r
    }

    /// `Γ = −(Ric − g·R/(2(m−1)))/(m−2)`
    pub fn deformation(&self) -> &WeightedTensorJet<S> {
        &self.deformation
    }
}

fn replace_slot(idx: &[u8], slot: usize, v: u8) -> Vec<u8> {
    let mut out = idx.to_vec();
    out[slot] = v;
    out.sort_unstable();
    out
}

/// `∇_i T` for every direction `i`; each entry has the valence and weight of `T`.
pub fn covariant_derivative<S: Scalar>(
    t: &WeightedTensorJet<S>,
    conn: &Connection<S>,
) -> Result<Vec<WeightedTensorJet<S>>> {
    let m = t.dim();
    if conn.dim() != m {
        return Err(Error::DimensionMismatch(conn.dim(), m));
    }
    if t.order() < 1 {
        return Err(Error::InsufficientOrder {
            what: "covariant derivative",
            needed: 1,
            have: t.order(),
        });
    }
    let w = S::from_rational(t.weight());
    let contra = t.valence().is_contravariant();
    (0..m)
        .map(|i| {
            WeightedTensorJet::try_from_fn(m, t.valence(), t.weight().clone(), |a| {
                let mut v = t.get_sorted(a).partial(i)?;
                v = &v - &(conn.trace(i) * t.get_sorted(a)).scale(&w);
                for s in 0..a.len() {
                    let slot = a[s] as usize;
                    for e in 0..m {
                        let other = t.get_sorted(&replace_slot(a, s, e as u8));
                        if contra {
                            v = &v + &(conn.christoffel(slot, i, e) * other);
                        } else {
                            v = &v - &(conn.christoffel(e, i, slot) * other);
                        }
                    }
                }
                Ok(v)
            })
        })
        .collect()
}

/// `∇_s T`: the covariant derivative averaged over all covariant slots.
pub fn sym_derivative<S: Scalar>(
    t: &WeightedTensorJet<S>,
    conn: &Connection<S>,
) -> Result<WeightedTensorJet<S>> {
    if t.valence().is_contravariant() {
        return Err(Error::Valence(
            "∇_s needs a covariant tensor or a density".into(),
        ));
    }
    let grad = covariant_derivative(t, conn)?;
    let rank = t.rank() + 1;
    let norm = S::from_rational(&crate::scalar::rational(1, rank as i64));
    Ok(WeightedTensorJet::from_fn(
        t.dim(),
        Valence::Covariant(rank),
        t.weight().clone(),
        |idx| {
            let mut acc = Jet::zero(t.layout(), t.order() - 1);
            for s in 0..rank {
                let mut rest = idx.to_vec();
                let i = rest.remove(s) as usize;
                acc = &acc + grad[i].get_sorted(&rest);
            }
            acc.scale(&norm)
        },
    ))
}

/// `∇_s^q T`
pub fn sym_derivative_power<S: Scalar>(
    t: &WeightedTensorJet<S>,
    q: usize,
    conn: &Connection<S>,
) -> Result<WeightedTensorJet<S>> {
    (0..q).try_fold(t.clone(), |acc, _| sym_derivative(&acc, conn))
}

/// `(Div S)^{a₂…a_k} = ∇_b S^{b a₂…a_k}`
pub fn divergence<S: Scalar>(
    s: &WeightedTensorJet<S>,
    conn: &Connection<S>,
) -> Result<WeightedTensorJet<S>> {
    let m = s.dim();
    let Valence::Contravariant(k) = s.valence() else {
        return Err(Error::Valence(
            "divergence needs a contravariant tensor of rank ≥ 1".into(),
        ));
    };
    if s.order() < 1 {
        return Err(Error::InsufficientOrder {
            what: "divergence",
            needed: 1,
            have: s.order(),
        });
    }
    let one_minus_w = S::from_rational(&(Rational::one() - s.weight()));
    WeightedTensorJet::try_from_fn(m, Valence::contravariant(k - 1), s.weight().clone(), |a| {
        let with = |b: usize| {
            let mut full = a.to_vec();
            full.push(b as u8);
            sorted(&full)
        };
        let mut v = Jet::zero(s.layout(), s.order() - 1);
        for b in 0..m {
            let full = with(b);
            v = &v + &s.get_sorted(&full).partial(b)?;
            // Γ^b_{be} from the contracted slot and −w Γ^e_{eb} combine into (1 − w)·trace
            v = &v + &(conn.trace(b) * s.get_sorted(&full)).scale(&one_minus_w);
            for slot in 0..a.len() {
                let target = a[slot] as usize;
                for e in 0..m {
                    let mut idx = a.to_vec();
                    idx[slot] = e as u8;
                    idx.push(b as u8);
                    let comp = s.get(&idx);
                    v = &v + &(conn.christoffel(target, b, e) * comp);
                }
            }
        }
        Ok(v)
    })
}

/// `Div^q S`
pub fn divergence_power<S: Scalar>(
    s: &WeightedTensorJet<S>,
    q: usize,
    conn: &Connection<S>,
) -> Result<WeightedTensorJet<S>> {
    (0..q).try_fold(s.clone(), |acc, _| divergence(&acc, conn))
}

/// `i(h)S`: contracts every slot of the covariant `h` into the contravariant `S`.
pub fn insert<S: Scalar>(
    h: &WeightedTensorJet<S>,
    s: &WeightedTensorJet<S>,
) -> Result<WeightedTensorJet<S>> {
    let p = h.rank();
    let k = s.rank();
    if !h.valence().is_covariant() || !(s.valence().is_contravariant() || k == 0) {
        return Err(Error::Valence(
            "i(h)S needs covariant h and contravariant S".into(),
        ));
    }
    if k < p {
        return Err(Error::Valence(format!(
            "cannot insert a rank-{p} tensor into a degree-{k} symbol"
        )));
    }
    if h.dim() != s.dim() {
        return Err(Error::DimensionMismatch(h.dim(), s.dim()));
    }
    let m = s.dim();
    let contractions: Vec<(Vec<u8>, S)> = sym_indices(m, p)
        .into_iter()
        .map(|c| {
            let mult = S::from_int(multiplicity(&c) as i64);
            (c, mult)
        })
        .collect();
    let order = h.order().min(s.order());
    Ok(WeightedTensorJet::from_fn(
        m,
        Valence::contravariant(k - p),
        h.weight() + s.weight(),
        |a| {
            let mut acc = Jet::zero(s.layout(), order);
            for (c, mult) in &contractions {
                let mut full = c.clone();
                full.extend_from_slice(a);
                let t = h.get_sorted(c) * s.get(&full);
                acc = &acc + &t.scale(mult);
            }
            acc
        },
    ))
}

/// `A ∨ B`: average symmetrization of `A ⊗ B`; weights add.
pub fn sym_product<S: Scalar>(
    a: &WeightedTensorJet<S>,
    b: &WeightedTensorJet<S>,
) -> Result<WeightedTensorJet<S>> {
    let valence = match (a.valence(), b.valence()) {
        (Valence::Scalar, v) | (v, Valence::Scalar) => v,
        (Valence::Covariant(_), Valence::Covariant(_))
        | (Valence::Contravariant(_), Valence::Contravariant(_)) => a.valence(),
        _ => {
            return Err(Error::Valence(
                "∨ of mixed covariant/contravariant tensors".into(),
            ))
        }
    };
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let (p, q) = (a.rank(), b.rank());
    let n = p + q;
    let valence = valence.with_rank(n);
    let masks: Vec<u32> = (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == p)
        .collect();
    let norm = S::from_rational(&crate::scalar::rational(1, binomial(n, p) as i64));
    let order = a.order().min(b.order());
    Ok(WeightedTensorJet::from_fn(
        a.dim(),
        valence,
        a.weight() + b.weight(),
        |idx| {
            let mut acc = Jet::zero(a.layout(), order);
            for &mask in &masks {
                let (mut ia, mut ib) = (Vec::with_capacity(p), Vec::with_capacity(q));
                for (pos, &v) in idx.iter().enumerate() {
                    if mask & (1 << pos) != 0 {
                        ia.push(v);
                    } else {
                        ib.push(v);
                    }
                }
                acc = &acc + &(a.get_sorted(&ia) * b.get_sorted(&ib));
            }
            acc.scale(&norm)
        },
    ))
}

/// `⟨A, B⟩`: full contraction of a contravariant and a covariant tensor of
/// equal rank (or two densities).
pub fn pair<S: Scalar>(
    a: &WeightedTensorJet<S>,
    b: &WeightedTensorJet<S>,
) -> Result<WeightedTensorJet<S>> {
    let ok = match (a.valence(), b.valence()) {
        (Valence::Scalar, Valence::Scalar) => true,
        (Valence::Contravariant(x), Valence::Covariant(y))
        | (Valence::Covariant(x), Valence::Contravariant(y)) => x == y,
        _ => false,
    };
    if !ok {
        return Err(Error::Valence(format!(
            "cannot pair {:?} with {:?}",
            a.valence(),
            b.valence()
        )));
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let order = a.order().min(b.order());
    let mut acc = Jet::zero(a.layout(), order);
    for c in sym_indices(a.dim(), a.rank()) {
        let t = a.get_sorted(&c) * b.get_sorted(&c);
        acc = &acc + &t.scale(&S::from_int(multiplicity(&c) as i64));
    }
    Ok(WeightedTensorJet::scalar(acc, a.weight() + b.weight()))
}

/// `i(g)S`
pub fn trace<S: Scalar>(
    s: &WeightedTensorJet<S>,
    g: &MetricJet<S>,
) -> Result<WeightedTensorJet<S>> {
    insert(&g.as_tensor(), s)
}

/// Trace-free part of a contravariant symmetric tensor: `S − g^♯ ∨ X` with
/// `X` solving `i(g)(g^♯ ∨ X) = i(g)S` as a linear system over jets.
pub fn tracefree_project<S: Scalar>(
    s: &WeightedTensorJet<S>,
    g: &MetricJet<S>,
) -> Result<WeightedTensorJet<S>> {
    let k = s.rank();
    if k < 2 {
        return Ok(s.clone());
    }
    if !s.valence().is_contravariant() {
        return Err(Error::Valence(
            "trace-free projection needs a contravariant tensor".into(),
        ));
    }
    let m = s.dim();
    let order = s.order().min(g.order());
    let s = s.truncate(order);
    let layout = s.layout().clone();
    let ginv = g.inverse_tensor().truncate(order);
    let basis = sym_indices(m, k - 2);
    let n = basis.len();
    let mut matrix = vec![vec![Jet::zero(&layout, order); n]; n];
    for (col, j) in basis.iter().enumerate() {
        let e =
            WeightedTensorJet::from_fn(m, Valence::contravariant(k - 2), s.weight().clone(), |i| {
                if i == j.as_slice() {
                    Jet::one(&layout, order)
                } else {
                    Jet::zero(&layout, order)
                }
            });
        let image = trace(&sym_product(&ginv, &e)?, g)?;
        for (row, c) in image.comps().iter().enumerate() {
            matrix[row][col] = c.truncate(order);
        }
    }
    let rhs: Vec<Vec<Jet<S>>> = trace(&s, g)?
        .comps()
        .iter()
        .map(|c| vec![c.truncate(order)])
        .collect();
    let x = linalg::solve(&matrix, &rhs)?;
    let x = WeightedTensorJet::new(
        m,
        Valence::contravariant(k - 2),
        s.weight().clone(),
        x.into_iter().map(|mut r| r.remove(0)).collect(),
    )?;
    s.try_sub(&sym_product(&ginv, &x)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Layout;
    use crate::scalar::rational;
    use crate::tensor::Signature;
    use alloc::sync::Arc;
    use num_traits::Zero;

    type Q = Rational;

    fn flat(m: usize, order: usize) -> (Arc<Layout>, MetricJet<Q>) {
        let l = Layout::new(m, order);
        let g = MetricJet::flat(&l, order, Signature::euclidean(m)).unwrap();
        (l, g)
    }

    #[test]
    fn flat_metric_has_no_christoffels_or_curvature() {
        let (_, g) = flat(3, 3);
        let conn = christoffels(&g).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    assert!(conn.christoffel(a, b, c).is_zero());
                }
            }
        }
        let curv = curvature(&conn).unwrap();
        assert!(curv.ricci().is_zero());
        assert!(curv.scalar().is_zero());
        assert!(curv.r().is_zero());
        assert!(curv.deformation().is_zero());
    }

    #[test]
    fn conformal_christoffel_at_origin() {
        // g = e^{2x⁰} δ: Γ^0_{00} = ∂_0 φ = 1
        let l = Layout::new(3, 2);
        let phi = Jet::<Q>::variable(&l, 2, 0);
        let factor = phi.scale(&rational(2, 1)).exp().unwrap();
        let g = MetricJet::flat(&l, 2, Signature::euclidean(3))
            .unwrap()
            .map_components(|c| c * &factor)
            .unwrap();
        let conn = christoffels(&g).unwrap();
        assert_eq!(conn.christoffel(0, 0, 0).constant_term(), &rational(1, 1));
        assert_eq!(conn.christoffel(1, 1, 0).constant_term(), &rational(1, 1));
        assert_eq!(conn.christoffel(0, 1, 1).constant_term(), &rational(-1, 1));
        assert!(conn.christoffel(2, 1, 0).constant_term().is_zero());
    }

    #[test]
    fn order_requirements() {
        let (_, g) = flat(3, 1);
        let conn = christoffels(&g).unwrap();
        assert!(matches!(
            curvature(&conn),
            Err(Error::InsufficientOrder { needed: 2, .. })
        ));
        let (_, g0) = flat(3, 0);
        assert!(matches!(
            christoffels(&g0),
            Err(Error::InsufficientOrder { needed: 1, .. })
        ));
    }

    #[test]
    fn flat_derivatives_are_partials() {
        let (l, g) = flat(3, 3);
        let conn = christoffels(&g).unwrap();
        let e: &[u8] = &[1, 2, 0];
        let f = Jet::from_terms(&l, 3, [(e, rational(3, 1))]).unwrap();
        let fd = WeightedTensorJet::scalar(f.clone(), rational(1, 2));
        let grad = sym_derivative(&fd, &conn).unwrap();
        for i in 0..3 {
            assert_eq!(grad.get(&[i as u8]), &f.partial(i).unwrap());
        }
        let hess = sym_derivative_power(&fd, 2, &conn).unwrap();
        assert_eq!(
            hess.get(&[0, 1]),
            &f.partial(0).unwrap().partial(1).unwrap()
        );
        assert_eq!(sym_derivative_power(&fd, 0, &conn).unwrap(), fd);
        // constant vector field is parallel, and divergence-free
        let x = WeightedTensorJet::from_fn(3, Valence::Contravariant(1), rational(0, 1), |i| {
            Jet::constant(&l, 3, rational(i[0] as i64 + 1, 1))
        });
        assert!(covariant_derivative(&x, &conn)
            .unwrap()
            .iter()
            .all(|d| d.is_zero()));
        assert!(divergence(&x, &conn).unwrap().is_zero());
        assert!(matches!(divergence(&fd, &conn), Err(Error::Valence(_))));
    }

    #[test]
    fn one_form_product_symmetrization() {
        let (l, _) = flat(3, 0);
        let dx = WeightedTensorJet::from_fn(3, Valence::Covariant(1), rational(0, 1), |i| {
            if i[0] == 0 {
                Jet::one(&l, 0)
            } else {
                Jet::zero(&l, 0)
            }
        });
        let dy = WeightedTensorJet::from_fn(3, Valence::Covariant(1), rational(0, 1), |i| {
            if i[0] == 1 {
                Jet::one(&l, 0)
            } else {
                Jet::zero(&l, 0)
            }
        });
        let p = sym_product(&dx, &dy).unwrap();
        assert_eq!(p.get(&[0, 1]).constant_term(), &rational(1, 2));
        assert_eq!(p.get(&[1, 0]).constant_term(), &rational(1, 2));
        assert!(p.get(&[0, 0]).is_zero());
        assert_eq!(p, sym_product(&dy, &dx).unwrap());
        let c = WeightedTensorJet::scalar(Jet::constant(&l, 0, rational(3, 1)), rational(1, 3));
        let scaled = sym_product(&c, &dx).unwrap();
        assert_eq!(scaled.get(&[0]).constant_term(), &rational(3, 1));
        assert_eq!(scaled.weight(), &rational(1, 3));
    }

    #[test]
    fn trace_of_identity_and_projection() {
        let (l, g) = flat(4, 1);
        let s = g.inverse_tensor();
        assert_eq!(
            trace(&s, &g).unwrap().value().constant_term(),
            &rational(4, 1)
        );
        assert!(tracefree_project(&s, &g).unwrap().is_zero());

        let (l3, g3) = flat(3, 1);
        let s = WeightedTensorJet::from_fn(3, Valence::Contravariant(2), rational(0, 1), |i| {
            if i == [0, 0] {
                Jet::one(&l3, 1)
            } else {
                Jet::zero(&l3, 1)
            }
        });
        let p = tracefree_project(&s, &g3).unwrap();
        assert_eq!(p.get(&[0, 0]).constant_term(), &rational(2, 3));
        assert_eq!(p.get(&[1, 1]).constant_term(), &rational(-1, 3));
        assert!(p.get(&[0, 1]).is_zero());
        assert!(trace(&p, &g3).unwrap().is_zero());
        assert_eq!(tracefree_project(&p, &g3).unwrap(), p);
        let _ = l;
    }

    #[test]
    fn pairing_conventions() {
        let (l, g) = flat(3, 2);
        let conn = christoffels(&g).unwrap();
        let e: &[u8] = &[1, 1, 0];
        let f = WeightedTensorJet::scalar(
            Jet::from_terms(&l, 2, [(e, rational(1, 1))]).unwrap(),
            rational(0, 1),
        );
        let x = WeightedTensorJet::from_fn(3, Valence::Contravariant(1), rational(0, 1), |i| {
            Jet::constant(&l, 2, rational(i[0] as i64 + 2, 1))
        });
        let df = sym_derivative(&f, &conn).unwrap();
        let lhs = pair(&x, &df).unwrap();
        let mut rhs = Jet::zero(&l, 1);
        for a in 0..3 {
            rhs = &rhs + &(x.get(&[a as u8]) * &f.value().partial(a).unwrap());
        }
        assert_eq!(lhs.value(), &rhs);
        assert!(matches!(pair(&x, &x), Err(Error::Valence(_))));
        let two = WeightedTensorJet::scalar(Jet::constant(&l, 2, rational(2, 1)), rational(1, 2));
        let three = WeightedTensorJet::scalar(Jet::constant(&l, 2, rational(3, 1)), rational(1, 4));
        let p = pair(&two, &three).unwrap();
        assert_eq!(p.value().constant_term(), &rational(6, 1));
        assert_eq!(p.weight(), &rational(3, 4));
    }

    #[test]
    fn insert_rejects_low_degree() {
        let (l, g) = flat(3, 1);
        let x = WeightedTensorJet::from_fn(3, Valence::Contravariant(1), rational(0, 1), |_| {
            Jet::one(&l, 1)
        });
        assert!(matches!(insert(&g.as_tensor(), &x), Err(Error::Valence(_))));
    }
}
