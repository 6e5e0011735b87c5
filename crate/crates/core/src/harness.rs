//! Conformal rescaling, chart pullbacks, seeded random cases and the checks
//! built on them.
//!
//! Every case lives at the origin of both charts: the original objects are
//! jets in `x`, the diffeomorphism `ψ` sends `y = 0` to `x = 0`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::{
    covariant_derivative, divergence, insert, sym_derivative, sym_derivative_power, sym_product,
    trace, tracefree_project, Connection, Curvature,
};
use crate::coefficients::{critical_for_degree, Coefficients, Mutation, QuantParams};
use crate::jet::{Jet, Layout};
use crate::linalg;
use crate::oracle::{flat_reference, quantize_order2_oracle, quantize_order3_oracle};
use crate::quantize::{
    apply_plan_symbol, compositions, plans, quantize, quantize_with, Geometry, Letter, Side,
};
use crate::scalar::{rational, Rational, Scalar};
use crate::symbolic::normalize;
use crate::tensor::{sym_indices, MetricJet, Signature, Valence, WeightedTensorJet};
use crate::{Error, Result};

/// Relative threshold for float-mode comparisons.
pub const FLOAT_RELATIVE_TOLERANCE: f64 = 1e-8;

type Tensor<S> = WeightedTensorJet<S>;

/// `φ` together with the factor `e^{2φ}`.
#[derive(Debug, Clone)]
pub struct ConformalFactor<S: Scalar> {
    phi: Jet<S>,
    factor: Jet<S>,
}

impl<S: Scalar> ConformalFactor<S> {
    /// Rational mode needs `φ(0) = 0` so that `e^{2φ}` stays rational.
    pub fn new(phi: Jet<S>) -> Result<Self> {
        let factor = (&phi + &phi).exp()?;
        if !factor.constant_term().is_positive() {
            return Err(Error::NonPositiveConstant);
        }
        Ok(ConformalFactor { phi, factor })
    }

    pub fn phi(&self) -> &Jet<S> {
        &self.phi
    }

    /// `e^{2φ}`
    pub fn factor(&self) -> &Jet<S> {
        &self.factor
    }
}

/// `e^{2φ} g`
pub fn rescale_metric<S: Scalar>(
    g: &MetricJet<S>,
    cf: &ConformalFactor<S>,
) -> Result<MetricJet<S>> {
    g.map_components(|c| &cf.factor * c)
}

/// A chart map `x = ψ(y)` as jets at `y = 0`.
#[derive(Debug, Clone)]
pub struct ChartDiffeo<S: Scalar> {
    comps: Vec<Jet<S>>,
    target: Vec<S>,
    /// `J[a][b] = ∂ψ^a/∂y^b`
    jacobian: Vec<Vec<Jet<S>>>,
    inverse_jacobian: Vec<Vec<Jet<S>>>,
    abs_det: Jet<S>,
}

impl<S: Scalar> ChartDiffeo<S> {
    pub fn new(comps: Vec<Jet<S>>) -> Result<Self> {
        let m = comps.len();
        if let Some(c) = comps.iter().find(|c| c.dim() != m) {
            return Err(Error::DimensionMismatch(c.dim(), m));
        }
        let jacobian: Vec<Vec<Jet<S>>> = comps
            .iter()
            .map(|c| (0..m).map(|b| c.partial(b)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        let inverse_jacobian = linalg::invert(&jacobian)?;
        let det = linalg::determinant(&jacobian)?;
        let abs_det = if det.constant_term().is_positive() {
            det
        } else {
            -det
        };
        let target = comps.iter().map(|c| c.constant_term().clone()).collect();
        Ok(ChartDiffeo {
            comps,
            target,
            jacobian,
            inverse_jacobian,
            abs_det,
        })
    }

    pub fn identity(layout: &alloc::sync::Arc<Layout>, order: usize) -> Result<Self> {
        Self::new(
            (0..layout.dim())
                .map(|v| Jet::variable(layout, order, v))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn order(&self) -> usize {
        self.comps.iter().map(|c| c.order()).min().unwrap_or(0)
    }

    pub fn components(&self) -> &[Jet<S>] {
        &self.comps
    }

    pub fn jacobian(&self) -> &[Vec<Jet<S>>] {
        &self.jacobian
    }

    pub fn inverse_jacobian(&self) -> &[Vec<Jet<S>>] {
        &self.inverse_jacobian
    }

    /// `|det Dψ|`
    pub fn abs_det(&self) -> &Jet<S> {
        &self.abs_det
    }

    /// `T ∘ ψ`
    pub fn compose(&self, t: &Jet<S>) -> Result<Jet<S>> {
        t.compose(&self.comps, &self.target)
    }

    /// Formal inverse `y = ψ⁻¹(x)` as jets in `x − ψ(0)`, by fixed-point
    /// iteration on `y = A⁻¹(u − N(y))`.
    pub fn local_inverse(&self) -> Result<Vec<Jet<S>>> {
        let m = self.dim();
        let order = self.order();
        let layout = self.comps[0].layout().clone();
        let a_inv: Vec<Vec<S>> = self
            .inverse_jacobian
            .iter()
            .map(|r| r.iter().map(|j| j.constant_term().clone()).collect())
            .collect();
        let a: Vec<Vec<S>> = self
            .jacobian
            .iter()
            .map(|r| r.iter().map(|j| j.constant_term().clone()).collect())
            .collect();
        // nonlinear part N(y) = ψ(y) − ψ(0) − A y
        let nonlinear: Vec<Jet<S>> = (0..m)
            .map(|i| {
                let mut n = self.comps[i].add_constant(&-self.target[i].clone());
                for (b, ab) in a[i].iter().enumerate() {
                    n = &n - &Jet::variable(&layout, order, b).scale(ab);
                }
                n
            })
            .collect();
        let zero_base = vec![S::zero(); m];
        let u: Vec<Jet<S>> = (0..m).map(|v| Jet::variable(&layout, order, v)).collect();
        let mut y = vec![Jet::zero(&layout, order); m];
        for _ in 0..=order {
            let n_of_y: Vec<Jet<S>> = nonlinear
                .iter()
                .map(|n| n.compose(&y, &zero_base))
                .collect::<Result<_>>()?;
            y = (0..m)
                .map(|i| {
                    (0..m).fold(Jet::zero(&layout, order), |acc, j| {
                        &acc + &(&u[j] - &n_of_y[j]).scale(&a_inv[i][j])
                    })
                })
                .collect();
        }
        Ok(y)
    }

    fn density_factor(&self, w: &Rational) -> Result<Jet<S>> {
        if num_traits::Zero::is_zero(w) {
            return Ok(Jet::one(self.abs_det.layout(), self.abs_det.order()));
        }
        self.abs_det.pow(w)
    }

    /// Pullback of a symmetric weighted tensor: Jacobian factors on covariant
    /// slots, inverse-Jacobian factors on contravariant slots, `|det Dψ|^w`.
    pub fn pullback_tensor(&self, t: &Tensor<S>) -> Result<Tensor<S>> {
        let m = self.dim();
        if t.dim() != m {
            return Err(Error::DimensionMismatch(t.dim(), m));
        }
        let composed: Vec<Jet<S>> = t
            .comps()
            .iter()
            .map(|c| self.compose(c))
            .collect::<Result<_>>()?;
        let composed = Tensor::new(m, t.valence(), t.weight().clone(), composed)?;
        let scale = self.density_factor(t.weight())?;
        let k = t.rank();
        let factor = |a: usize, c: usize| -> &Jet<S> {
            if t.valence().is_contravariant() {
                &self.inverse_jacobian[a][c]
            } else {
                &self.jacobian[c][a]
            }
        };
        let tuples: Vec<Vec<u8>> = ordered_tuples(m, k);
        let order = composed
            .order()
            .min(scale.order())
            .min(self.order().saturating_sub(1));
        Ok(Tensor::from_fn(m, t.valence(), t.weight().clone(), |a| {
            let mut acc = Jet::zero(composed.layout(), order);
            for c in &tuples {
                let mut term = composed.get(c).truncate(order);
                for (ai, ci) in a.iter().zip(c) {
                    term = &term * factor(*ai as usize, *ci as usize);
                }
                acc = &acc + &term;
            }
            &acc * &scale
        }))
    }

    pub fn pullback_metric(&self, g: &MetricJet<S>) -> Result<MetricJet<S>> {
        let t = self.pullback_tensor(&g.as_tensor())?;
        MetricJet::new(t.into_comps(), g.signature())
    }
}

fn ordered_tuples(m: usize, k: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..m as u8).map(move |c| {
                    let mut t = t.clone();
                    t.push(c);
                    t
                })
            })
            .collect();
    }
    out
}

/// Outcome of comparing two jets computed along different routes.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    /// Literal equality (rational) or within tolerance (float) to `order`.
    pub equal: bool,
    pub max_deviation: f64,
    /// Deviation relative to the larger coefficient magnitude (at least 1).
    pub relative_deviation: f64,
    /// Common order compared.
    pub order: usize,
}

impl CheckReport {
    pub fn compare<S: Scalar>(lhs: &Tensor<S>, rhs: &Tensor<S>) -> Self {
        let order = lhs.order().min(rhs.order());
        let (a, b) = (lhs.truncate(order), rhs.truncate(order));
        let max_deviation = a.max_deviation(&b);
        let scale = a
            .comps()
            .iter()
            .chain(b.comps())
            .flat_map(|j| j.coeffs().iter().map(|c| c.magnitude()))
            .fold(1.0, f64::max);
        let relative_deviation = max_deviation / scale;
        let equal = if S::EXACT {
            a.agrees_with(&b)
        } else {
            a.valence() == b.valence()
                && a.weight() == b.weight()
                && relative_deviation <= FLOAT_RELATIVE_TOLERANCE
        };
        CheckReport {
            equal,
            max_deviation,
            relative_deviation,
            order,
        }
    }
}

/// `Q(g)` versus `Q(e^{2φ}g)`, with the given coefficients.
pub fn check_conformal_invariance_with<S: Scalar>(
    g: &MetricJet<S>,
    cf: &ConformalFactor<S>,
    s: &Tensor<S>,
    f: &Tensor<S>,
    coeffs: &Coefficients,
) -> Result<CheckReport> {
    let g2 = rescale_metric(g, cf)?;
    let a = quantize_with(g, s, f, coeffs)?;
    let b = quantize_with(&g2, s, f, coeffs)?;
    Ok(CheckReport::compare(&a, &b))
}

pub fn check_conformal_invariance<S: Scalar>(
    g: &MetricJet<S>,
    cf: &ConformalFactor<S>,
    s: &Tensor<S>,
    f: &Tensor<S>,
    params: &QuantParams,
) -> Result<CheckReport> {
    let g2 = rescale_metric(g, cf)?;
    let a = quantize(g, s, f, params)?;
    let b = quantize(&g2, s, f, params)?;
    Ok(CheckReport::compare(&a, &b))
}

/// `Q(ψ*g, ψ*S)(ψ*f)` versus `ψ*(Q(g, S)(f))`.
pub fn check_naturality<S: Scalar>(
    g: &MetricJet<S>,
    psi: &ChartDiffeo<S>,
    s: &Tensor<S>,
    f: &Tensor<S>,
    params: &QuantParams,
) -> Result<CheckReport> {
    if psi.order() < params.k + 1 {
        return Err(Error::InsufficientOrder {
            what: "chart map",
            needed: params.k + 1,
            have: psi.order(),
        });
    }
    let lhs = quantize(
        &psi.pullback_metric(g)?,
        &psi.pullback_tensor(s)?,
        &psi.pullback_tensor(f)?,
        params,
    )?;
    let rhs = psi.pullback_tensor(&quantize(g, s, f, params)?)?;
    Ok(CheckReport::compare(&lhs, &rhs))
}

/// What a random case is generated from.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSpec {
    pub seed: u64,
    pub params: QuantParams,
    /// Jet order of `g`, `S`, `f` and `φ`; `ψ` gets one more.
    pub order: usize,
    pub signature: Signature,
}

impl CaseSpec {
    /// Order `k + 1`, Euclidean signature.
    pub fn new(seed: u64, params: QuantParams) -> Self {
        let order = params.k + 1;
        let signature = Signature::euclidean(params.m);
        CaseSpec {
            seed,
            params,
            order,
            signature,
        }
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    pub fn with_signature(mut self, signature: Signature) -> Self {
        self.signature = signature;
        self
    }
}

/// One seeded random input.
#[derive(Debug, Clone)]
pub struct Case<S: Scalar> {
    pub spec: CaseSpec,
    pub g: MetricJet<S>,
    /// Trace-free symbol of degree `k`, weight `δ`.
    pub s: Tensor<S>,
    /// Density of weight `λ`.
    pub f: Tensor<S>,
    pub phi: ConformalFactor<S>,
    pub psi: ChartDiffeo<S>,
}

struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    fn small(&mut self) -> Rational {
        let mut p = 0;
        while p == 0 {
            p = self.rng.random_range(-3i64..=3);
        }
        let q = self.rng.random_range(1i64..=3);
        rational(p, q)
    }

    /// Sparse polynomial with monomials of degree `lo..=hi`.
    fn poly<S: Scalar>(
        &mut self,
        layout: &alloc::sync::Arc<Layout>,
        order: usize,
        lo: usize,
        hi: usize,
    ) -> Jet<S> {
        let mut j = Jet::zero(layout, order);
        let mut terms: Vec<(Vec<u8>, S)> = Vec::new();
        for idx in 0..layout.len(hi.min(order)) {
            let d = layout.degree(idx);
            if d < lo || !self.rng.random_bool(0.5) {
                continue;
            }
            terms.push((
                layout.exponents(idx).to_vec(),
                S::from_rational(&self.small()),
            ));
        }
        if let Ok(t) = Jet::from_terms(
            layout,
            order,
            terms.iter().map(|(e, c)| (e.as_slice(), c.clone())),
        ) {
            j = t;
        }
        j
    }
}

/// Deterministic case from `spec`: `g` = model metric plus a perturbation
/// vanishing at the origin, `S` projected to be trace-free, `φ(0) = 0`, and
/// `ψ = A·y + quadratic` with `det A = ±1`.
pub fn generate_case<S: Scalar>(spec: &CaseSpec) -> Result<Case<S>> {
    let params = &spec.params;
    let (m, k, order) = (params.m, params.k, spec.order);
    if spec.signature.dim() != m {
        return Err(Error::DimensionMismatch(spec.signature.dim(), m));
    }
    if let Some(hit) = critical_for_degree(m, &params.delta(), k)
        .into_iter()
        .next()
    {
        return Err(Error::Critical(hit));
    }
    let layout = Layout::new(m, order + 1);
    let mut sm = Sampler {
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
    };

    let diag = spec.signature.diagonal();
    let comps = sym_indices(m, 2)
        .iter()
        .map(|i| {
            let p: Jet<S> = sm.poly(&layout, order, 1, order);
            if i[0] == i[1] {
                p.add_constant(&S::from_int(diag[i[0] as usize]))
            } else {
                p
            }
        })
        .collect();
    let g = MetricJet::new(comps, spec.signature)?;

    let raw = Tensor::from_fn(m, Valence::contravariant(k), params.delta(), |_| {
        sm.poly(&layout, order, 0, order)
    });
    let s = tracefree_project(&raw, &g)?;
    let f = Tensor::scalar(sm.poly(&layout, order, 0, order), params.lambda.clone());
    let phi = ConformalFactor::new(sm.poly(&layout, order, 1, order))?;

    // A = L·U with unit diagonals, hence det A = 1.
    let mut lower = vec![vec![0i64; m]; m];
    let mut upper = vec![vec![0i64; m]; m];
    for i in 0..m {
        lower[i][i] = 1;
        upper[i][i] = 1;
        for j in 0..i {
            lower[i][j] = sm.rng.random_range(-1..=1);
            upper[j][i] = sm.rng.random_range(-1..=1);
        }
    }
    let psi_comps = (0..m)
        .map(|a| {
            let mut c = sm.poly::<S>(&layout, order + 1, 2, 2);
            for b in 0..m {
                let entry: i64 = (0..m).map(|t| lower[a][t] * upper[t][b]).sum();
                if entry != 0 {
                    c = &c + &Jet::variable(&layout, order + 1, b).scale(&S::from_int(entry));
                }
            }
            c
        })
        .collect();
    let psi = ChartDiffeo::new(psi_comps)?;
    Ok(Case {
        spec: spec.clone(),
        g,
        s,
        f,
        phi,
        psi,
    })
}

impl<S: Scalar> Case<S> {
    pub fn conformal(&self) -> Result<CheckReport> {
        check_conformal_invariance(&self.g, &self.phi, &self.s, &self.f, &self.spec.params)
    }

    pub fn conformal_mutated(&self, mutation: Mutation) -> Result<CheckReport> {
        let coeffs = Coefficients::new(&self.spec.params)?.mutated(mutation)?;
        check_conformal_invariance_with(&self.g, &self.phi, &self.s, &self.f, &coeffs)
    }

    pub fn naturality(&self) -> Result<CheckReport> {
        check_naturality(&self.g, &self.psi, &self.s, &self.f, &self.spec.params)
    }

    /// Word-based quantization against the closed form for `k = 2, 3`.
    pub fn oracle(&self) -> Result<CheckReport> {
        let p = &self.spec.params;
        let q = quantize(&self.g, &self.s, &self.f, p)?;
        let o = match p.k {
            2 => quantize_order2_oracle(&self.g, &self.s, &self.f, p)?,
            3 => quantize_order3_oracle(&self.g, &self.s, &self.f, p)?,
            k => return Err(Error::Invalid(alloc::format!("no closed form for k = {k}"))),
        };
        Ok(CheckReport::compare(&q, &o))
    }

    /// On the model metric of the same signature: quantize versus raw partials.
    pub fn flat(&self) -> Result<CheckReport> {
        let p = &self.spec.params;
        let flat = MetricJet::flat(self.g.layout(), self.spec.order, self.spec.signature)?;
        let s = tracefree_project(&self.s, &flat)?;
        let q = quantize(&flat, &s, &self.f, p)?;
        let r = flat_reference(&s, &self.f, p)?;
        Ok(CheckReport::compare(&q, &r))
    }
}

/// Named pass/fail results of the structural identities on one case.
pub type StructuralReport = Vec<(&'static str, bool)>;

/// `∇g = 0`, Ricci symmetry, parallel volume density, trace-free preservation
/// under `Div` and every symbol-side plan row, the two Leibniz identities and
/// agreement of every word with its Leibniz normal form. The case must have
/// `k ≥ 3` so that `Div(i(r)S)` is defined.
pub fn structural_checks<S: Scalar>(case: &Case<S>) -> Result<StructuralReport> {
    let p = &case.spec.params;
    if p.k < 3 {
        return Err(Error::Invalid("structural checks need k ≥ 3".into()));
    }
    let g = &case.g;
    let m = g.dim();
    let conn = Connection::new(g)?;
    let curv = Curvature::new(&conn)?;
    let mut out: StructuralReport = Vec::new();

    let dg = covariant_derivative(&g.as_tensor(), &conn)?;
    out.push(("metric parallel", dg.iter().all(|t| t.is_zero())));

    let ric = curv.ricci_matrix();
    let sym = (0..m).all(|a| (0..a).all(|b| ric[a][b].agrees_with(&ric[b][a])));
    out.push(("ricci symmetric", sym));

    let det = linalg::determinant(&g.matrix())?;
    let abs_det = if det.constant_term().is_positive() {
        det
    } else {
        -det
    };
    let vol = Tensor::scalar(
        abs_det.pow(&rational(1, 2))?,
        Rational::from_integer(1.into()),
    );
    out.push((
        "volume density parallel",
        covariant_derivative(&vol, &conn)?
            .iter()
            .all(|t| t.is_zero()),
    ));

    let div_s = divergence(&case.s, &conn)?;
    out.push(("divergence keeps trace-free", trace(&div_s, g)?.is_zero()));

    let coeffs = Coefficients::new(p)?;
    let geom = Geometry::new(g, true)?;
    let mut rows_ok = true;
    for plan in plans(&coeffs)? {
        let img = apply_plan_symbol(&plan.symbol_words, &case.s, &geom)?;
        if img.rank() >= 2 && !trace(&img, g)?.is_zero() {
            rows_ok = false;
        }
    }
    out.push(("plan rows keep trace-free", rows_ok));

    let r = curv.r();
    let gdef = curv.deformation();
    let f = &case.f;
    let lhs = sym_derivative(&sym_product(gdef, f)?, &conn)?;
    let rhs = add(
        &sym_product(&sym_derivative(gdef, &conn)?, f)?,
        &sym_product(gdef, &sym_derivative(f, &conn)?)?,
    )?;
    out.push(("leibniz ∇_s(Γ∨f)", CheckReport::compare(&lhs, &rhs).equal));

    let lhs = divergence(&insert(r, &case.s)?, &conn)?;
    let rhs = add(
        &insert(&sym_derivative(r, &conn)?, &case.s)?,
        &insert(r, &div_s)?,
    )?;
    out.push(("leibniz Div(i(r)S)", CheckReport::compare(&lhs, &rhs).equal));

    let mut words_ok = true;
    for side in [Side::Density, Side::Symbol] {
        let input = match side {
            Side::Density => f.clone(),
            Side::Symbol => case.s.clone(),
        };
        for n in 1..=p.k {
            for word in compositions(n) {
                let direct = apply_word(side, &word, &input, &geom)?;
                let mut sum: Option<Tensor<S>> = None;
                for (term, mult) in normalize(&word) {
                    let t = apply_normal_term(side, &term.factors, term.power, &input, &geom)?
                        .scale_rational(&Rational::from_integer((mult as i64).into()));
                    sum = Some(match sum {
                        None => t,
                        Some(a) => add(&a, &t)?,
                    });
                }
                if let Some(sum) = sum {
                    if !CheckReport::compare(&direct, &sum).equal {
                        words_ok = false;
                    }
                }
            }
        }
    }
    out.push(("words match normal forms", words_ok));
    Ok(out)
}

fn add<S: Scalar>(a: &Tensor<S>, b: &Tensor<S>) -> Result<Tensor<S>> {
    let order = a.order().min(b.order());
    a.truncate(order).try_add(&b.truncate(order))
}

/// A word applied without coefficients.
fn apply_word<S: Scalar>(
    side: Side,
    word: &[Letter],
    input: &Tensor<S>,
    geom: &Geometry<S>,
) -> Result<Tensor<S>> {
    let conn = &geom.connection;
    let r = geom
        .curvature
        .as_ref()
        .ok_or(Error::Invalid("curvature missing".into()))?
        .r();
    word.iter()
        .rev()
        .try_fold(input.clone(), |acc, &l| match (side, l) {
            (Side::Density, Letter::D) => sym_derivative(&acc, conn),
            (Side::Density, Letter::T) => sym_product(r, &acc),
            (Side::Symbol, Letter::D) => divergence(&acc, conn),
            (Side::Symbol, Letter::T) => insert(r, &acc),
        })
}

/// `(∇_s^{q₁} r)⋯ D^p` applied to `input`.
fn apply_normal_term<S: Scalar>(
    side: Side,
    factors: &[usize],
    power: usize,
    input: &Tensor<S>,
    geom: &Geometry<S>,
) -> Result<Tensor<S>> {
    let conn = &geom.connection;
    let r = geom
        .curvature
        .as_ref()
        .ok_or(Error::Invalid("curvature missing".into()))?
        .r();
    let mut acc = match side {
        Side::Density => sym_derivative_power(input, power, conn)?,
        Side::Symbol => crate::calculus::divergence_power(input, power, conn)?,
    };
    for &q in factors {
        let dr = sym_derivative_power(r, q, conn)?;
        acc = match side {
            Side::Density => sym_product(&dr, &acc)?,
            Side::Symbol => insert(&dr, &acc)?,
        };
    }
    Ok(acc)
}

/// Short label for a parameter cell, e.g. `m=3 k=2 λ=1/3 μ=2/3`.
pub fn cell_label(p: &QuantParams) -> String {
    alloc::format!("m={} k={} λ={} μ={}", p.m, p.k, p.lambda, p.mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: usize, k: usize) -> QuantParams {
        QuantParams::new(m, rational(1, 3), rational(2, 3), k).unwrap()
    }

    #[test]
    fn generation_is_deterministic_and_trace_free() {
        let spec = CaseSpec::new(7, params(3, 2));
        let a: Case<Rational> = generate_case(&spec).unwrap();
        let b: Case<Rational> = generate_case(&spec).unwrap();
        assert_eq!(a.g.comps(), b.g.comps());
        assert_eq!(a.s, b.s);
        assert!(trace(&a.s, &a.g).unwrap().is_zero());
        let lor = spec.clone().with_signature(Signature::lorentzian(3));
        let c: Case<Rational> = generate_case(&lor).unwrap();
        assert_eq!(c.g.signature(), Signature { p: 2, q: 1 });
    }

    #[test]
    fn local_inverse_composes_to_identity() {
        let case: Case<Rational> = generate_case(&CaseSpec::new(3, params(3, 1))).unwrap();
        let inv = case.psi.local_inverse().unwrap();
        let zero = vec![Rational::from_integer(0.into()); 3];
        for (a, c) in case.psi.components().iter().enumerate() {
            let back = c.compose(&inv, &zero).unwrap();
            let u = Jet::variable(back.layout(), back.order(), a);
            assert_eq!(back, u);
        }
    }

    #[test]
    fn linear_scaling_pullback() {
        let l = Layout::new(3, 2);
        let psi = ChartDiffeo::<Rational>::new(
            (0..3)
                .map(|v| Jet::variable(&l, 2, v).scale(&rational(2, 1)))
                .collect(),
        )
        .unwrap();
        let g = MetricJet::flat(&l, 1, Signature::euclidean(3)).unwrap();
        let pg = psi.pullback_metric(&g).unwrap();
        assert_eq!(pg.g(0, 0).constant_term(), &rational(4, 1));
        assert!(pg.g(0, 1).is_zero());
        let f = Tensor::scalar(Jet::one(&l, 1), rational(1, 3));
        let pf = psi.pullback_tensor(&f).unwrap();
        assert_eq!(pf.value().constant_term(), &rational(2, 1));
    }

    #[test]
    fn zero_factor_and_constant_rescale() {
        let case: Case<Rational> = generate_case(&CaseSpec::new(1, params(3, 2))).unwrap();
        let zero = ConformalFactor::new(Jet::zero(case.g.layout(), case.g.order())).unwrap();
        let same = rescale_metric(&case.g, &zero).unwrap();
        assert_eq!(same.comps(), case.g.comps());
        let r = check_conformal_invariance(&case.g, &zero, &case.s, &case.f, &case.spec.params)
            .unwrap();
        assert!(r.equal);
    }
}
