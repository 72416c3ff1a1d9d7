use std::fmt;

use serde::Serialize;

/// A character range in one source file. Line and column are 1-based and
/// count characters, not bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub file: String,
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

impl SourceSpan {
    pub fn new(file: impl Into<String>, line: u32, column: u32, length: u32) -> Self {
        SourceSpan {
            file: file.into(),
            line: line.max(1),
            column: column.max(1),
            length,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagnosticSeverity {
    Error,
    Warning,
}

impl fmt::Display for DiagnosticSeverity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosticSeverity::Error => "error",
            DiagnosticSeverity::Warning => "warning",
        })
    }
}

/// Stable diagnostic codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DiagnosticCode {
    UnterminatedString,
    InvalidCharacter,
    MalformedNumber,
    InvalidEscape,
    UnexpectedToken,
    UnknownAttribute,
    MissingAttribute,
    DuplicateAttribute,
    TypeMismatch,
    InvalidValue,
    DuplicateId,
    UnknownReference,
    DuplicateLink,
    CyclicParentChain,
    InvariantViolation,
    UnknownRule,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        use DiagnosticCode::*;
        match self {
            UnterminatedString => "P001",
            InvalidCharacter => "P002",
            MalformedNumber => "P003",
            InvalidEscape => "P004",
            UnexpectedToken => "P010",
            UnknownAttribute => "P011",
            MissingAttribute => "P012",
            DuplicateAttribute => "P013",
            TypeMismatch => "P020",
            InvalidValue => "P021",
            DuplicateId => "P030",
            UnknownReference => "P031",
            DuplicateLink => "P032",
            CyclicParentChain => "P033",
            InvariantViolation => "P034",
            UnknownRule => "P040",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub severity: DiagnosticSeverity,
    pub code: DiagnosticCode,
    pub message: String,
    pub span: SourceSpan,
}

impl ParseDiagnostic {
    pub fn error(code: DiagnosticCode, span: SourceSpan, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            severity: DiagnosticSeverity::Error,
            code,
            message: message.into(),
            span,
        }
    }
}

/// Renders as `file:line:col: severity[code]: message`.
impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}[{}]: {}",
            self.span, self.severity, self.code, self.message
        )
    }
}

impl Serialize for ParseDiagnostic {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("ParseDiagnostic", 4)?;
        s.serialize_field("severity", &self.severity)?;
        s.serialize_field("code", self.code.as_str())?;
        s.serialize_field("message", &self.message)?;
        s.serialize_field("span", &self.span)?;
        s.end()
    }
}
