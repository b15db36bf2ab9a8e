use thiserror::Error;

/// A physical quantity fell outside the domain where the requested formula
/// is defined.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("{name} must be finite and positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("poisson ratio must lie in [0, {limit}), got {value}")]
    PoissonOutOfRange { value: f64, limit: f64 },
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<(), DomainError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(DomainError::NotPositive { name, value })
    }
}

/// A configuration failed validation before any simulation started.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{field} must be finite and positive, got {value}")]
    NotPositive { field: &'static str, value: f64 },
    #[error("{field} must be finite and nonnegative, got {value}")]
    Negative { field: &'static str, value: f64 },
    #[error("pluck_position_m must lie strictly inside the string (0, {length}), got {value}")]
    PluckOutsideString { value: f64, length: f64 },
    #[error("node_count must be at least 3, got {0}")]
    TooFewNodes(usize),
    #[error("step_count must be at least 2, got {0}")]
    TooFewSteps(usize),
    #[error("poisson_ratio must lie in [0, 0.5), got {0}")]
    PoissonOutOfRange(f64),
    #[error("thin-shell model requires thickness/radius < 0.1, got {0:.4}")]
    TooThick(f64),
    #[error("reference_index {index} is outside the grid (node_count {node_count})")]
    ReferenceOutsideGrid { index: usize, node_count: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing required key {0:?}")]
    MissingKey(&'static str),
    #[error("unknown key {0:?}")]
    UnknownKey(String),
}

/// Marker returned by a solver whose state stopped being physically
/// meaningful: a non-finite sample, or displacements exceeding a million
/// times the pluck amplitude. `step` is the first offending time index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("simulation diverged at step {step}")]
pub struct Diverged {
    pub step: usize,
}

/// Lookup failure against the built-in material table.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown material {name:?}; built-ins are Steel, Aluminum, Copper, Brass")]
pub struct UnknownMaterial {
    pub name: String,
}
