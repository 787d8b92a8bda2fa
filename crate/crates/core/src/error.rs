use thiserror::Error;

use crate::model::Link;

/// Errors raised by the exchange model, the search and the I/O layer.
///
/// Node and segment indices carried here are 0-based; `Display` renders
/// them 1-based so messages match the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("need at least 2 nodes, got {m}")]
    TooFewNodes { m: usize },

    #[error("universe size must be at least 1")]
    EmptyUniverse,

    #[error("universe size {n} exceeds the supported maximum of 4096 segments")]
    UniverseTooLarge { n: usize },

    #[error("segment {} is outside the universe 1..={n}", .segment + 1)]
    SegmentOutOfRange { segment: usize, n: usize },

    #[error("node {} is outside 1..={m}", .node + 1)]
    NodeOutOfRange { node: usize, m: usize },

    #[error("a link needs two distinct nodes, got node {} twice", .0 + 1)]
    SelfLink(usize),

    #[error("expected {expected} segment sets, found {found}")]
    SetCountMismatch { expected: usize, found: usize },

    #[error("segment ids of node {} must be strictly increasing (saw {} after {})", .node + 1, .next, .prev)]
    UnsortedSegments {
        node: usize,
        prev: usize,
        next: usize,
    },

    #[error("node {} starts with an empty segment set", .0 + 1)]
    EmptyInitialSet(usize),

    #[error("node {} starts with the whole universe", .0 + 1)]
    FullInitialSet(usize),

    #[error("invalid activation of link {link}: the give-and-take criterion does not hold")]
    InvalidActivation { link: Link },

    #[error("invalid activation at step {} (link {link})", .step + 1)]
    InvalidScheduleStep { step: usize, link: Link },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown algorithm id `{0}` (expected one of rand, glink, poly, ginc, rare)")]
    UnknownAlgorithm(String),

    #[error("search limit exceeded; best aggregate cardinality found so far is {best_alpha}")]
    LimitExceeded { best_alpha: usize },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
