use thiserror::Error;

use crate::units::Unit;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unit mismatch: expected {expected}, found {found}")]
    UnitMismatch { expected: String, found: Unit },

    #[error("incompatible units {0} and {1}")]
    IncompatibleUnits(Unit, Unit),

    #[error("{0} must be finite")]
    NonFinite(&'static str),

    #[error("{name} out of range: {detail}")]
    OutOfRange { name: &'static str, detail: String },

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("material file line {line}: {message}")]
    MaterialSyntax { line: usize, message: String },

    #[error("CFL condition violated: v_max*dt/dz = {courant:.6} exceeds {limit:.6}")]
    Cfl { courant: f64, limit: f64 },

    #[error("non-finite field value at t = {t:e}")]
    NonFiniteField { t: f64 },

    #[error("too few zero crossings: found {found}, need at least 4")]
    TooFewCrossings { found: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(name: &'static str, detail: impl Into<String>) -> Error {
    Error::OutOfRange { name, detail: detail.into() }
}

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(name))
    }
}
