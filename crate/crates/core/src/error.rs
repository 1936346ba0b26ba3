use thiserror::Error;

use crate::parser::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function has a pole at x = {0}")]
    Pole(f64),

    #[error("point x = {0} is outside the positive half-line")]
    NonPositivePoint(f64),

    #[error("order {order} outside the supported range {range} for {operator}")]
    OrderOutOfRange { operator: &'static str, order: f64, range: &'static str },

    #[error("term {term} is outside the domain of {operator}: {reason}")]
    TermDomain { operator: String, term: String, reason: &'static str },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("point x = {x} lies outside the sampled grid [0, {end}]")]
    OffGrid { x: f64, end: f64 },

    #[error("invalid domain [{lo}, {hi}]: need 0 < lo < hi")]
    InvalidDomain { lo: f64, hi: f64 },

    #[error("anchor x0 = {x0} is not interior to [{lo}, {hi}]")]
    AnchorOutsideDomain { x0: f64, lo: f64, hi: f64 },

    #[error("point x = {x} is outside the domain [{lo}, {hi}]")]
    PointOutsideDomain { x: f64, lo: f64, hi: f64 },

    #[error("quadrature did not converge: achieved error estimate {achieved:e} (requested {requested:e})")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("series term k = {k}: {source}")]
    SeriesTerm {
        k: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("in constituent {constituent}: {source}")]
    Constituent {
        constituent: String,
        #[source]
        source: Box<Error>,
    },

    #[error("audit needs {0} in the operator's domain")]
    MissingProbe(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    /// Innermost error after unwrapping series-term and constituent context.
    pub fn root(&self) -> &Error {
        match self {
            Error::SeriesTerm { source, .. } | Error::Constituent { source, .. } => source.root(),
            other => other,
        }
    }
}
