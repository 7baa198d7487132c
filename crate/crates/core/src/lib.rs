pub mod cli;
pub mod compat;
pub mod error;
pub mod expr;
pub mod jet;
pub mod matrix;
pub mod prolong;
pub mod symmetry;
pub mod verdict;

pub use error::{Error, EvalError, ParseError, Result};
pub use expr::{Expr, Func, Node, Rational, Symbol, ZeroTest, ZeroTester};
pub use jet::{JetCoord, JetSpec, JetVectorField, MultiIndex, OneForm, TwoForm};
pub use matrix::ExprMatrix;
pub use prolong::{MuForm, PathCheck, PointVectorField};
pub use symmetry::DifferentialEquation;
pub use verdict::Verdict;
