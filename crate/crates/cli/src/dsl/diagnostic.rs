use std::fmt;

/// Byte range into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// A positioned message. `line` and `column` are 1-based, the column counted
/// in characters; `excerpt` is the full source line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub line: usize,
    pub column: usize,
    pub excerpt: String,
    /// Number of characters to underline, at least 1.
    pub width: usize,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(src: &str, span: Span, message: impl Into<String>) -> Self {
        let start = span.start.min(src.len());
        let line_start = src[..start].rfind('\n').map_or(0, |i| i + 1);
        let line_end = src[start..].find('\n').map_or(src.len(), |i| start + i);
        let line = src[..start].matches('\n').count() + 1;
        let column = src[line_start..start].chars().count() + 1;
        let end = span.end.clamp(start, line_end);
        let width = src[start..end].chars().count().max(1);
        Diagnostic {
            severity: Severity::Error,
            message: message.into(),
            line,
            column,
            excerpt: src[line_start..line_end].trim_end_matches('\r').to_string(),
            width,
            span,
        }
    }

    /// Compiler-style rendering with a caret line under the offending text.
    pub fn render(&self, origin: &str) -> String {
        let number = self.line.to_string();
        let pad = " ".repeat(number.len());
        let indent: String = self
            .excerpt
            .chars()
            .take(self.column - 1)
            .map(|c| if c == '\t' { '\t' } else { ' ' })
            .collect();
        format!(
            "{}: {}\n{pad}--> {origin}:{}:{}\n{pad} |\n{number} | {}\n{pad} | {indent}{}\n",
            self.severity,
            self.message,
            self.line,
            self.column,
            self.excerpt,
            "^".repeat(self.width),
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.severity, self.message)
    }
}

impl std::error::Error for Diagnostic {}
