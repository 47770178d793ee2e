//! Error type shared by every module.

use crate::model::Case;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operation requires {expected}, got {got:?}")]
    WrongCase { expected: &'static str, got: Case },

    /// A factorial (gamma function) was evaluated at one of its poles.
    #[error("gamma function pole at argument {0}")]
    Pole(f64),

    #[error("outside the asymptotic regime: {0}")]
    OutOfRegime(String),

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("bisection did not converge in bracket [{lo}, {hi}]")]
    Bisection { lo: f64, hi: f64 },

    #[error("pair {pair} unresolved: splitting {value:e} not above solver tolerance {tolerance:e}")]
    Unresolved { pair: usize, value: f64, tolerance: f64 },

    #[error("requested {requested} eigenvalues from a grid of {points} points")]
    TooManyEigenvalues { requested: usize, points: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
