use thiserror::Error;

/// Errors surfaced by the library. File-format problems carry enough context
/// to point at the offending line or ID.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input contains no usable edges")]
    EmptyGraph,

    #[error("node ID {0} out of range")]
    NodeRange(usize),

    #[error("unknown community {0}")]
    UnknownCommunity(usize),

    #[error("cover references node ID {0} absent from the graph")]
    UnknownNode(u64),

    #[error("node {node} is already a member of community {community}")]
    AlreadyMember { node: usize, community: usize },

    #[error("node {node} is not a member of community {community}")]
    NotMember { node: usize, community: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("undefined score: {0}")]
    UndefinedScore(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
