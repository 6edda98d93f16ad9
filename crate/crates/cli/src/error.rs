//! Failures and their exit codes: 1 for rejected input, 2 for numerical
//! failure.

use std::fmt;

use weingarten::classify::ClassifyError;
use weingarten::export::ExportError;
use weingarten::phi::PhiError;
use weingarten::radial::RadialError;
use weingarten::{GeometryError, IntegrateError};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

pub fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

impl From<PhiError> for CliError {
    fn from(e: PhiError) -> Self {
        validation(e.to_string())
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        validation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        validation(e.to_string())
    }
}

impl From<ExportError> for CliError {
    fn from(e: ExportError) -> Self {
        match e {
            ExportError::Io(_) => CliError::Numerical(e.to_string()),
            _ => validation(e.to_string()),
        }
    }
}

impl From<IntegrateError> for CliError {
    fn from(e: IntegrateError) -> Self {
        match e {
            IntegrateError::CharacterViolation { kind, min, max } => validation(format!(
                "{} character out of scope (a² + bφ ranges over [{min}, {max}])",
                format!("{kind:?}").to_lowercase()
            )),
            IntegrateError::InvalidStart { .. } => validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<RadialError> for CliError {
    fn from(e: RadialError) -> Self {
        match e {
            RadialError::Integrate(inner) => inner.into(),
            RadialError::NotApplicable { .. } | RadialError::InvalidExtent { .. } => {
                validation(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Integrate(inner) => inner.into(),
            ClassifyError::Radial(inner) => inner.into(),
            ClassifyError::AtSingularRadius { .. } | ClassifyError::NotApplicable { .. } => {
                validation(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}
