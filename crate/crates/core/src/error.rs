use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RpqError {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("symbol '{0}' is not in the alphabet")]
    UnknownSymbol(char),

    #[error("unknown node '{0}'")]
    UnknownNode(String),

    #[error("node '{0}' already exists")]
    DuplicateNode(String),

    #[error("node '{0}' still has incident arcs")]
    NodeNotIsolated(String),

    #[error("arc {0} -{1}-> {2} does not exist")]
    MissingArc(String, char, String),

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("alphabet mismatch between database and query automaton")]
    AlphabetMismatch,

    #[error("symbol '#' is already part of the alphabet")]
    FreshSymbolTaken,

    #[error("query class is not supported by the restricted enumerators; use the baseline or sublinear enumerator")]
    UnsupportedClass,

    #[error("instance too large for the closure oracle ({0} product nodes)")]
    OracleTooLarge(usize),

    #[error("the database changed after the enumerator was created")]
    Stale,

    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

pub type Result<T> = std::result::Result<T, RpqError>;
