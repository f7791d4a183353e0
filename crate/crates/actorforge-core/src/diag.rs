//! Diagnostics reported by the frontend, the resolver and the network linker.
//!
//! Parsing and resolution never abort the process: every failure is a
//! `Diagnostic` with a span, rendered as `file:line:col: severity: message`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl core::fmt::Display for Severity {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Severity::Error => write!(f, "error"),
            Severity::Warning => write!(f, "warning"),
            Severity::Info => write!(f, "info"),
        }
    }
}

/// What kind of rule produced a diagnostic. Tests key on this rather than on
/// message text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagCode {
    Lex,
    Parse,
    Name,
    Type,
    Direction,
    Connect,
}

impl core::fmt::Display for DiagCode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DiagCode::Lex => write!(f, "lex"),
            DiagCode::Parse => write!(f, "parse"),
            DiagCode::Name => write!(f, "name"),
            DiagCode::Type => write!(f, "type"),
            DiagCode::Direction => write!(f, "direction"),
            DiagCode::Connect => write!(f, "connect"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: SourceSpan,
    pub severity: Severity,
    pub code: DiagCode,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: DiagCode, span: SourceSpan, message: String) -> Self {
        Diagnostic { span, severity: Severity::Error, code, message }
    }

    /// Render in the `file:line:col: severity: message` form.
    pub fn render(&self) -> String {
        alloc::format!("{}: {}: {}", self.span, self.severity, self.message)
    }
}

impl core::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Convenience for operations that either succeed or report diagnostics.
pub type DiagResult<T> = Result<T, Vec<Diagnostic>>;
