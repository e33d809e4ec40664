use thiserror::Error;

/// Errors raised by the numerical kernel and the model layers built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument outside domain ({detail})")]
    Domain { func: &'static str, detail: String },

    #[error("{func}: series did not converge within {terms} terms")]
    NonConvergence { func: &'static str, terms: usize },

    #[error("{func}: unsupported parameters ({detail})")]
    Unsupported { func: &'static str, detail: String },

    #[error("quadrature did not reach tolerance: estimate {value:e}, error {abs_err:e}")]
    Quadrature { value: f64, abs_err: f64 },

    #[error("invalid configuration: {}", format_violations(.0))]
    InvalidConfig(Vec<Violation>),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// One failed requirement of a configuration, tied to the offending field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
