//! Source locations attached to every token, AST node and diagnostic.

use alloc::sync::Arc;

/// A half-open region of source text, identified by file, 1-based line and
/// column, and length in characters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: Arc<str>,
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

impl SourceSpan {
    pub fn new(file: Arc<str>, line: u32, column: u32, length: u32) -> Self {
        debug_assert!(line >= 1 && column >= 1);
        SourceSpan { file, line, column, length }
    }

    /// A span for values that were synthesized rather than parsed.
    pub fn synthetic() -> Self {
        SourceSpan { file: Arc::from("<synthetic>"), line: 1, column: 1, length: 0 }
    }
}

impl core::fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}
