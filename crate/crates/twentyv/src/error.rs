use std::fmt;

/// Errors raised by the numeric and combinatorial routines of this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Angle parameters outside the admissible domain.
    #[error("inadmissible parameters: {0}")]
    Domain(String),
    /// A closed form was evaluated at one of its poles.
    #[error("pole: {0}")]
    Pole(String),
    /// An argument lies outside the range where the formula is defined.
    #[error("out of range: {0}")]
    Range(String),
    /// Problem size exceeds the configured cap.
    #[error("size {n} exceeds cap {cap}")]
    Size { n: usize, cap: usize },
    /// Ice-rule or boundary violation at a node or boundary edge.
    #[error("invalid configuration at {0}")]
    InvalidConfiguration(Site),
    /// Iterative solver did not reach its tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },
    /// Malformed textual input.
    #[error("parse error: {0}")]
    Parse(String),
}

/// Location of a configuration defect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    Node { x: usize, y: usize },
    Boundary,
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Node { x, y } => write!(f, "node ({x}, {y})"),
            Site::Boundary => f.write_str("boundary"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
