use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while validating a block partition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("partition has no blocks")]
    NoBlocks,
    #[error("block {block} is empty")]
    EmptyBlock { block: usize },
    #[error("index {index} is out of range for a model of size {n}")]
    OutOfRange { index: usize, n: usize },
    #[error("index {index} appears in more than one block")]
    Overlap { index: usize },
    #[error("index {index} is not covered by any block")]
    Missing { index: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Partition(#[from] PartitionError),

    /// A vertex argument lies in the deleted set or outside the graph.
    #[error("vertex {vertex} is not available: {reason}")]
    Domain { vertex: usize, reason: &'static str },

    /// A submatrix `J_{G \ deleted}` turned out to be numerically singular.
    /// `deleted` holds the 0-based vertex ids that were removed from the graph.
    #[error("singular information submatrix after deleting vertices {deleted:?}")]
    Singular { deleted: Vec<usize> },

    #[error("information matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("graph is not a tree: {0}")]
    Topology(String),

    #[error("unsupported partition: {0}")]
    UnsupportedPartition(&'static str),

    #[error("invalid configuration: {0}")]
    Configuration(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric: entry ({row}, {col}) is {upper} but its mirror is {lower}")]
    Asymmetric {
        row: usize,
        col: usize,
        upper: f64,
        lower: f64,
    },

    #[error("diagonal entry {index} is zero")]
    ZeroDiagonal { index: usize },

    #[error("{}:{line}: index ({row}, {col}) is outside a {n}x{n} matrix", path.display())]
    IndexOutOfRange {
        path: PathBuf,
        line: usize,
        row: usize,
        col: usize,
        n: usize,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short machine-readable category used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Partition(_) => "partition",
            Error::Domain { .. } => "domain",
            Error::Singular { .. } => "singular",
            Error::NotPositiveDefinite => "not_positive_definite",
            Error::Topology(_) => "topology",
            Error::UnsupportedPartition(_) => "unsupported_partition",
            Error::Configuration(_) => "configuration",
            Error::Dimension(_) => "dimension",
            Error::Asymmetric { .. } => "asymmetric",
            Error::ZeroDiagonal { .. } => "zero_diagonal",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
