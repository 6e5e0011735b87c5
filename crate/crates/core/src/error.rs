use alloc::string::String;

use crate::coefficients::CriticalHit;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("jet order {order} exceeds layout capacity {capacity}")]
    LayoutTooSmall { order: usize, capacity: usize },
    #[error("jet has zero constant term and is not invertible")]
    ZeroConstantTerm,
    #[error("power of a jet needs a positive constant term")]
    NonPositiveConstant,
    #[error("value is not representable in this scalar mode: {0}")]
    NotRepresentable(String),
    #[error("jet order exhausted: a derivative of an order-0 jet carries no information")]
    OrderExhausted,
    #[error("base point mismatch in composition (coordinate {0})")]
    BasePointMismatch(usize),
    #[error("insufficient jet order for {what}: need {needed}, have {have}")]
    InsufficientOrder {
        what: &'static str,
        needed: usize,
        have: usize,
    },
    #[error("valence mismatch: {0}")]
    Valence(String),
    #[error("metric is degenerate at the base point")]
    DegenerateMetric,
    #[error("metric signature {found:?} does not match declared {declared:?}")]
    SignatureMismatch {
        declared: (usize, usize),
        found: (usize, usize),
    },
    #[error("metric components are not symmetric")]
    AsymmetricMetric,
    #[error("dimension {0} not supported: the construction needs m >= 3")]
    DimensionTooSmall(usize),
    #[error("singular linear system")]
    Singular,
    #[error("critical shift value: gamma_{} = 0 (k = {}, l = {})", .0.n, .0.k, .0.l)]
    Critical(CriticalHit),
    #[error("symbol is not trace-free: i(g)S != 0")]
    NotTraceFree,
    #[error("invalid argument: {0}")]
    Invalid(String),
}
