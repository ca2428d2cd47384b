//! Error and validation types shared by every module.

use std::fmt;

/// A single violated parameter constraint, reported as data.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Field name as it appears in the parameter record (and config files).
    pub field: String,
    /// The offending value.
    pub value: f64,
    /// Human-readable constraint, e.g. `"must lie strictly inside (0, 1)"`.
    pub requirement: &'static str,
}

impl Violation {
    pub fn new(field: impl Into<String>, value: f64, requirement: &'static str) -> Self {
        Self {
            field: field.into(),
            value,
            requirement,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}: {}", self.field, self.value, self.requirement)
    }
}

impl std::error::Error for Violation {}

/// One or more constraint violations found while building a parameter record.
#[derive(Debug, Clone, PartialEq)]
pub struct InvalidParams(pub Vec<Violation>);

impl fmt::Display for InvalidParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for InvalidParams {}

impl From<Violation> for InvalidParams {
    fn from(v: Violation) -> Self {
        InvalidParams(vec![v])
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid parameters: {0}")]
    InvalidParams(#[from] InvalidParams),

    /// An argument outside the domain where the model is defined.
    #[error("{name} = {value}: {requirement}")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// The implicit equation has no admissible root in the search interval.
    #[error(
        "no admissible root: g(eta) does not change sign on [{lo}, {hi}] \
         (g(lo) = {g_lo:.6e}, g(hi) = {g_hi:.6e})"
    )]
    NoBracket {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    #[error("root finder did not meet tolerance within {iterations} iterations")]
    NoConvergence { iterations: usize },

    /// Sub-threshold models are undefined at or above threshold.
    #[error("pump power {pump_w} W is at or above the oscillation threshold {threshold_w} W")]
    AboveThreshold { pump_w: f64, threshold_w: f64 },

    #[error("fit needs at least {needed} rows, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// Wraps a failure inside a sweep with the offending grid value.
    #[error("at grid point {value}: {source}")]
    AtGridPoint {
        value: f64,
        #[source]
        source: Box<ModelError>,
    },
}

impl From<Violation> for ModelError {
    fn from(v: Violation) -> Self {
        ModelError::InvalidParams(v.into())
    }
}

impl ModelError {
    /// True for failures of the numerical machinery (no root bracket,
    /// non-convergence, above-threshold input) as opposed to bad inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            ModelError::NoBracket { .. }
            | ModelError::NoConvergence { .. }
            | ModelError::AboveThreshold { .. } => true,
            ModelError::AtGridPoint { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub(crate) fn at_grid_point(self, value: f64) -> Self {
        ModelError::AtGridPoint {
            value,
            source: Box::new(self),
        }
    }
}
