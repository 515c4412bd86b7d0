use std::io;

use thiserror::Error;

/// Errors produced anywhere in the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("triangle {triangle} is degenerate or clockwise (signed area {signed_area:e})")]
    DegenerateTriangle { triangle: usize, signed_area: f64 },

    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifoldEdge(usize, usize),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("non-positive jacobian J = {jacobian:e}{}", element_suffix(*.element))]
    NonPositiveJacobian {
        jacobian: f64,
        element: Option<usize>,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("unsupported quadrature degree {0} (supported: 1..=6)")]
    UnsupportedQuadratureDegree(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("linear solve failed: {0}")]
    LinearSolveFailure(String),

    #[error("Newton did not converge in load step {step} after {iterations} iterations (|r| = {residual:e})")]
    NoConvergence {
        step: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("line search could not find an admissible state in load step {step}, iteration {iteration}")]
    LineSearchExhausted { step: usize, iteration: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

fn element_suffix(element: Option<usize>) -> String {
    match element {
        Some(e) => format!(" in element {e}"),
        None => String::new(),
    }
}

impl Error {
    /// Attach an element id to a jacobian failure raised at point level.
    pub fn in_element(self, element: usize) -> Self {
        match self {
            Error::NonPositiveJacobian { jacobian, .. } => Error::NonPositiveJacobian {
                jacobian,
                element: Some(element),
            },
            other => other,
        }
    }

    /// Failures that a smaller load increment may avoid.
    pub fn is_recoverable(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::LineSearchExhausted { .. }
                | Error::LinearSolveFailure(_)
                | Error::NonPositiveJacobian { .. }
        )
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
