//! One-line diagnostics for the exit-code-2 path.
//!
//! Every recoverable failure in the command line — unreadable files,
//! malformed configs or tables, domain gates tripped by the core — is
//! carried as a single human-readable line and printed to stderr by
//! [`run_cli`](crate::run_cli).

use std::fmt;

/// A single-line error message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    message: String,
}

impl Diagnostic {
    pub fn new(message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            message: message.into(),
        }
    }

    /// Prefix with a context label: `"{context}: {err}"`.
    pub fn in_context(context: impl fmt::Display, err: impl fmt::Display) -> Diagnostic {
        Diagnostic::new(format!("{context}: {err}"))
    }

    /// Prefix with a table position (1-based line and field numbers).
    pub fn at_field(self, line: usize, field: usize) -> Diagnostic {
        Diagnostic::new(format!("line {line}: field {field}: {}", self.message))
    }

    pub fn message(&self) -> &str {
        &self.message
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<denslab_core::Error> for Diagnostic {
    fn from(err: denslab_core::Error) -> Diagnostic {
        Diagnostic::new(err.to_string())
    }
}

/// Result alias for the command-line layer.
pub type CliResult<T> = Result<T, Diagnostic>;
