use thiserror::Error;

/// Failure to parse an expression. Columns are 1-based character offsets.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown function `{name}` at column {column}")]
    UnknownFunction { name: String, column: usize },
    #[error("non-integer exponent at column {column}")]
    NonIntegerExponent { column: usize },
    #[error("division by zero at column {column}")]
    DivisionByZero { column: usize },
}

impl ParseError {
    pub fn column(&self) -> usize {
        match self {
            ParseError::Syntax { column, .. }
            | ParseError::UnknownFunction { column, .. }
            | ParseError::NonIntegerExponent { column }
            | ParseError::DivisionByZero { column } => *column,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("domain error: {0}")]
    Domain(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("cyclic substitution through {}", .0.join(" -> "))]
    CyclicSubstitution(Vec<String>),
    #[error("invalid jet space: {0}")]
    InvalidJetSpec(String),
    #[error("no contact form for a top-order coordinate (|J| = {order})")]
    TopOrderContactForm { order: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("lambda-prolongation needs one independent and one dependent variable (got p = {p}, q = {q})")]
    NotScalarOde { p: usize, q: usize },
    #[error("coefficient `{0}` depends on derivatives; mark the field as generalized")]
    NotPointField(String),
    #[error("inconsistent mu: {0}")]
    InconsistentMu(String),
    #[error("invalid equation: {0}")]
    InvalidEquation(String),
    #[error("substitution closure failure: {0}")]
    SubstitutionClosure(String),
    #[error("mu is not closed: D_{i} lambda_{k} - D_{k} lambda_{i} = {residual}")]
    NotClosed {
        i: String,
        k: String,
        residual: String,
    },
    #[error("not a polynomial: {0}")]
    NonPolynomial(String),
    #[error("no potential found: {0}")]
    NoPotentialFound(String),
    #[error("invalid gauge function: {0}")]
    InvalidGauge(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
