use std::fmt;

use serde::{Deserialize, Serialize};

/// One violated constraint on an input quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    /// Offending value as written (or formatted), when there is one.
    pub value: Option<String>,
    pub constraint: String,
    /// 1-based source line, when the value came from a scenario file.
    pub line: Option<usize>,
}

impl Violation {
    pub fn new(field: impl Into<String>, value: f64, constraint: impl Into<String>) -> Self {
        Violation { field: field.into(), value: Some(format!("{value}")), constraint: constraint.into(), line: None }
    }

    pub fn bare(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        Violation { field: field.into(), value: None, constraint: constraint.into(), line: None }
    }

    pub fn at_line(mut self, line: Option<usize>) -> Self {
        if self.line.is_none() {
            self.line = line;
        }
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        write!(f, "{} {}", self.field, self.constraint)?;
        if let Some(v) = &self.value {
            write!(f, " (got {v})")?;
        }
        Ok(())
    }
}

/// Complete list of violations found while validating an input.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationErrors(pub Vec<Violation>);

impl ValidationErrors {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Violation> {
        self.0.iter()
    }

    pub fn push(&mut self, v: Violation) {
        self.0.push(v);
    }

    pub fn extend(&mut self, other: ValidationErrors) {
        self.0.extend(other.0);
    }

    /// `Ok(())` when nothing was collected.
    pub fn into_result(self) -> std::result::Result<(), ValidationErrors> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(self)
        }
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input:\n{0}")]
    Validation(#[from] ValidationErrors),

    /// A formula was called outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical singularity in {context}")]
    Singular { context: String },

    #[error("integration failed at zeta = {zeta}: {reason}")]
    Integration { zeta: f64, reason: String },

    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
