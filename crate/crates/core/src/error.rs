//! Crate-wide error and result types.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Malformed XML in an XES document. Line and column are 1-based and
    /// refer to the decompressed byte stream; they are 0 when the source
    /// cannot be re-inspected.
    #[error("XES syntax error at line {line}, column {column}: {message}")]
    XesSyntax { line: u64, column: u64, message: String },

    /// Structurally valid XML that violates the XES schema or strict-mode
    /// requirements.
    #[error("invalid XES content: {0}")]
    XesContent(String),

    #[error("invalid PNML: {0}")]
    Pnml(String),

    /// A classifier key or case identifier is absent from an event or trace.
    #[error("missing attribute {key:?}")]
    MissingAttribute { key: String },

    /// Input violates an operation's precondition (empty log, empty trace, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("transition {transition:?} is not enabled")]
    NotEnabled { transition: String },

    /// Violation of Petri-net construction rules (bipartiteness, duplicate
    /// or dangling nodes and arcs).
    #[error("invalid net structure: {0}")]
    NetStructure(String),

    /// A dependency graph cannot be converted because some activities are
    /// not on a path from a start activity to an end activity.
    #[error("dependency graph is not connected; unreachable activities: {activities:?}")]
    Disconnected { activities: Vec<String> },

    /// A metric is undefined for the given inputs (e.g. a replay that
    /// produced or consumed no tokens).
    #[error("degenerate input for metric: {0}")]
    Degenerate(String),
}
