use std::fmt;

use thiserror::Error;

/// Category of a [`ParseError`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lex,
    Syntax,
    DuplicateDefinition,
    Cycle,
    Unknown,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParseErrorKind::Lex => "lexical error",
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::DuplicateDefinition => "duplicate definition",
            ParseErrorKind::Cycle => "cyclic definition",
            ParseErrorKind::Unknown => "error",
        };
        f.write_str(s)
    }
}

/// Positioned diagnostic produced by the `.dlkb` parser. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn new(kind: ParseErrorKind, line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { line, column, message: message.into(), kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("cyclic terminology: {}", path.join(" -> "))]
    CyclicTBox { path: Vec<String> },

    /// A negated at-least restriction that the engine cannot decide without
    /// number-restriction merging.
    #[error("unsupported negation of `atleast {n} {role}`")]
    UnsupportedNegation { n: u32, role: String },

    #[error("unknown individual `{0}`")]
    UnknownIndividual(String),

    #[error("intersection cardinality {n_i} exceeds operand cardinality ({n_c}, {n_d})")]
    CardinalityViolation { n_c: usize, n_d: usize, n_i: usize },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
