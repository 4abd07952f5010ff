use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid jet: {0}")]
    InvalidJet(String),

    #[error("differentiability overdraw: {0}")]
    Overdraw(String),

    #[error("symbol variants do not match: {0} vs {1}")]
    VariantMismatch(&'static str, &'static str),

    #[error("unsupported recursion depth {0}: jets carry order-2 Taylor data, which covers symbol orders 1, 0, -1 only")]
    UnsupportedDepth(usize),

    #[error("contour integral needs a resolvent power d >= 1, got {0}")]
    BadResolventPower(i64),

    #[error("divergent xi moment: a={a}, b={b}, n={n}")]
    DivergentMoment { a: u32, b: u32, n: i64 },

    #[error("rational function has a pole at the evaluation point")]
    PoleAtZero,

    #[error("trace has a non-negligible imaginary part: {0}")]
    ComplexTrace(f64),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("{what} requires {cond}")]
    Domain { what: &'static str, cond: &'static str },

    #[error("regularized sum tail {tail:e} above tolerance {tol:e}")]
    TailAboveTolerance { tail: f64, tol: f64 },

    #[error("fit rejected: {0}")]
    FitRejected(String),

    #[error("empty jet field")]
    EmptyField,

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
