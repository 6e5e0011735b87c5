//! Natural, conformally invariant quantization of trace-free symbols on a
//! pseudo-Riemannian chart.
//!
//! Everything here works on jets: truncated multivariate Taylor expansions at
//! a single chart point. With [`Rational`] scalars the whole pipeline is exact,
//! so conformal invariance, naturality and the principal-symbol condition can
//! be checked as literal equalities of jet coefficients. `f64` scalars are
//! supported for larger experiments.
//!
//! The crate is `no_std` and only needs `alloc`.
//!
//! Layout:
//! - [`jet`]: truncated Taylor arithmetic ([`Jet`], [`Layout`]).
//! - [`tensor`] and [`calculus`]: symmetric weighted tensors, Levi-Civita
//!   connection, curvature, `∇_s`, `Div`, `i(h)`, `∨`, trace-free projection.
//! - [`coefficients`]: `γ_n`, `C_{k,l}`, `α_{k,0}`, the `T₁`/`T₂` factors and
//!   criticality.
//! - [`quantize`]: operator-word expansion and assembly of `Q(g,S)(f)`, plus
//!   the closed-form order 2 and 3 oracles in [`oracle`].
//! - [`harness`]: conformal rescaling, chart pullbacks, random cases and the
//!   invariance checks.
#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod calculus;
pub mod coefficients;
mod error;
pub mod harness;
pub mod jet;
pub mod linalg;
pub mod oracle;
pub mod quantize;
pub mod scalar;
pub mod symbolic;
pub mod tensor;

pub use error::{Error, Result};
pub use jet::{Jet, Layout};
pub use scalar::{rational, Rational, Scalar};
pub use tensor::{MetricJet, Signature, Valence, WeightedTensorJet};
