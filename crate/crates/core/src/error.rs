use std::fmt;

use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Pipeline stage of [`crate::solver::solve`] that produced an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Budget,
    Bracket,
    RootSearch,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Budget => "error budget",
            Stage::Bracket => "bracket construction",
            Stage::RootSearch => "root search",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("{y} lies outside the domain of `{label}`")]
    OutsideDomain { label: String, y: f64 },

    #[error("`{label}` evaluated to a non-finite value at {y}")]
    NonFinite { label: String, y: f64 },

    #[error("points {x} and {y} are too close to form a Leibniz ratio")]
    CoincidentPoints { x: f64, y: f64 },

    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("iteration limit of {iterations} reached (best value {best}, interval width {width})")]
    IterationLimit { iterations: usize, best: f64, width: f64 },

    #[error("no sign change of Δ(δ) - ε over [{a}, {b}] (values {fa}, {fb})")]
    NoSignChange { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("could not enclose the root for ε = {epsilon} after {expansions} expansions (last bracket [{a}, {b}])")]
    BracketInvalid {
        epsilon: f64,
        a: f64,
        b: f64,
        expansions: usize,
    },

    #[error("|f'(x)| = {derivative:e} at x = {x}; the derivative must not vanish")]
    ZeroDerivative { x: f64, derivative: f64 },

    #[error("{stage} failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(self, stage: Stage) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The error with any stage annotation stripped.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root_cause(),
            other => other,
        }
    }

    /// Short machine-readable reason code, used for skipped manifold cells.
    pub fn reason(&self) -> &'static str {
        match self.root_cause() {
            Error::Parse(_) => "parse-error",
            Error::Eval(_) | Error::NonFinite { .. } => "domain-error",
            Error::OutsideDomain { .. } => "outside-domain",
            Error::CoincidentPoints { .. } => "coincident-points",
            Error::InvalidInterval { .. } | Error::InvalidInput(_) => "invalid-input",
            Error::IterationLimit { .. } => "iteration-limit",
            Error::NoSignChange { .. } | Error::BracketInvalid { .. } => "bracket-failure",
            Error::ZeroDerivative { .. } => "zero-derivative",
            Error::Stage { .. } => unreachable!("root_cause strips stages"),
        }
    }
}
