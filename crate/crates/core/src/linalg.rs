//! Small dense linear algebra over jets and scalars.
//!
//! Pivots are chosen on the constant term: a jet is a unit of the truncated
//! algebra exactly when its value at the base point is nonzero.

use alloc::vec::Vec;

use crate::jet::Jet;
use crate::scalar::Scalar;
use crate::{Error, Result};

fn pivot_row<S: Scalar>(a: &[Vec<Jet<S>>], col: usize) -> Option<usize> {
    (col..a.len())
        .filter(|&r| !a[r][col].constant_term().is_negligible())
        .max_by(|&x, &y| {
            let mx = a[x][col].constant_term().magnitude();
            let my = a[y][col].constant_term().magnitude();
            mx.partial_cmp(&my).unwrap_or(core::cmp::Ordering::Equal)
        })
}

/// Solves `a · x = b` for a square jet matrix `a` and `r` right-hand sides.
pub fn solve<S: Scalar>(a: &[Vec<Jet<S>>], b: &[Vec<Jet<S>>]) -> Result<Vec<Vec<Jet<S>>>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::Invalid("solve: shape mismatch".into()));
    }
    let mut a: Vec<Vec<Jet<S>>> = a.to_vec();
    let mut b: Vec<Vec<Jet<S>>> = b.to_vec();
    for col in 0..n {
        let p = pivot_row(&a, col).ok_or(Error::Singular)?;
        a.swap(col, p);
        b.swap(col, p);
        let inv = a[col][col].inverse()?;
        for c in col..n {
            a[col][c] = &a[col][c] * &inv;
        }
        for c in 0..b[col].len() {
            b[col][c] = &b[col][c] * &inv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in col..n {
                let t = &factor * &a[col][c];
                a[r][c] = &a[r][c] - &t;
            }
            for c in 0..b[r].len() {
                let t = &factor * &b[col][c];
                b[r][c] = &b[r][c] - &t;
            }
        }
    }
    Ok(b)
}

pub fn invert<S: Scalar>(a: &[Vec<Jet<S>>]) -> Result<Vec<Vec<Jet<S>>>> {
    let n = a.len();
    let first = a.first().and_then(|r| r.first()).ok_or(Error::Singular)?;
    let (layout, order) = (first.layout().clone(), first.order());
    let ident: Vec<Vec<Jet<S>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Jet::one(&layout, order)
                    } else {
                        Jet::zero(&layout, order)
                    }
                })
                .collect()
        })
        .collect();
    solve(a, &ident)
}

pub fn determinant<S: Scalar>(a: &[Vec<Jet<S>>]) -> Result<Jet<S>> {
    let n = a.len();
    let mut a: Vec<Vec<Jet<S>>> = a.to_vec();
    let first = a.first().and_then(|r| r.first()).ok_or(Error::Singular)?;
    let mut det = Jet::one(first.layout(), first.order());
    for col in 0..n {
        let p = pivot_row(&a, col).ok_or(Error::Singular)?;
        if p != col {
            a.swap(col, p);
            det = -det;
        }
        det = &det * &a[col][col];
        let inv = a[col][col].inverse()?;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &inv;
            for c in col..n {
                let t = &factor * &a[col][c];
                a[r][c] = &a[r][c] - &t;
            }
        }
    }
    Ok(det)
}

/// Inertia `(positive, negative, zero)` of a symmetric scalar matrix, by
/// symmetric elimination (Sylvester's law).
pub fn inertia<S: Scalar>(values: &[Vec<S>]) -> (usize, usize, usize) {
    let mut a: Vec<Vec<S>> = values.to_vec();
    let mut active: Vec<usize> = (0..a.len()).collect();
    let (mut pos, mut neg) = (0, 0);
    while !active.is_empty() {
        if let Some(k) = active.iter().position(|&i| !a[i][i].is_negligible()) {
            let i = active.remove(k);
            let d = a[i][i].clone();
            if d.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            for &r in &active {
                let f = a[r][i].clone() / d.clone();
                for &c in &active {
                    let t = f.mul_ref(&a[i][c]);
                    a[r][c].sub_assign_ref(&t);
                }
            }
            continue;
        }
        let pair = active.iter().enumerate().find_map(|(x, &i)| {
            active[x + 1..]
                .iter()
                .find(|&&j| !a[i][j].is_negligible())
                .map(|&j| (i, j))
        });
        let Some((i, j)) = pair else {
            break;
        };
        // congruence: row_i += row_j, col_i += col_j
        for c in 0..a.len() {
            let t = a[j][c].clone();
            a[i][c].add_assign_ref(&t);
        }
        for r in 0..a.len() {
            let t = a[r][j].clone();
            a[r][i].add_assign_ref(&t);
        }
    }
    (pos, neg, active.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Layout;
    use crate::scalar::{rational, Rational};
    use alloc::vec;

    #[test]
    fn inertia_of_indefinite_forms() {
        let q = |p| rational(p, 1);
        assert_eq!(inertia(&[vec![q(0), q(1)], vec![q(1), q(0)]]), (1, 1, 0));
        assert_eq!(
            inertia(&[
                vec![q(1), q(0), q(0)],
                vec![q(0), q(0), q(0)],
                vec![q(0), q(0), q(-3)]
            ]),
            (1, 1, 1)
        );
        assert_eq!(inertia(&[vec![q(2), q(1)], vec![q(1), q(2)]]), (2, 0, 0));
    }

    #[test]
    fn invert_and_determinant_of_jet_matrix() {
        let l = Layout::new(2, 2);
        let x = Jet::<Rational>::variable(&l, 2, 0);
        let y = Jet::<Rational>::variable(&l, 2, 1);
        let one = Jet::one(&l, 2);
        // pivoting is needed: the (0,0) entry vanishes at the base point
        let a = vec![vec![x.clone(), one.clone()], vec![one.clone(), y.clone()]];
        let inv = invert(&a).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut s = Jet::zero(&l, 2);
                for k in 0..2 {
                    s = &s + &(&a[i][k] * &inv[k][j]);
                }
                let expect = if i == j {
                    one.clone()
                } else {
                    Jet::zero(&l, 2)
                };
                assert_eq!(s, expect);
            }
        }
        let det = determinant(&a).unwrap();
        assert_eq!(det, &(&x * &y) - &one);
    }
}
