use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An input vector or scalar lies outside the domain of the operation
    /// (non-finite coordinates, dimension mismatch, non-positive variance, ...).
    #[error("input domain: {0}")]
    InputDomain(String),

    /// A lattice or nested pair could not be constructed from the given parameters.
    #[error("construction: {0}")]
    Construction(String),

    /// Message index does not address a coset leader of the pair.
    #[error("message index {index} out of range (pair carries {count} messages)")]
    MessageOutOfRange { index: u64, count: u64 },

    /// The network has source-destination paths of unequal hop counts.
    #[error("network is not layered (path hop counts range over {min_hops}..={max_hops}); reduce it to an ISI channel instead")]
    NotLayered { min_hops: usize, max_hops: usize },

    /// The gain graph contains a directed cycle.
    #[error("network contains a cycle through node `{node}`")]
    Cyclic { node: String },

    /// A network description failed validation; `field` locates the offending
    /// entry and `line` its position in the source file, when known.
    #[error("invalid network at {field}{}: {message}", .line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Network {
        field: String,
        message: String,
        line: Option<usize>,
    },

    /// The interleaver depth does not exceed the ISI memory.
    #[error("interleaver depth {depth} must exceed the ISI memory {memory}")]
    InterleaverDepth { depth: usize, memory: usize },

    /// Experiment configuration is inconsistent.
    #[error("config: {0}")]
    Config(String),

    /// Network description file could not be parsed.
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InputDomain(_) => "input_domain",
            Error::Construction(_) => "construction",
            Error::MessageOutOfRange { .. } => "message_out_of_range",
            Error::NotLayered { .. } => "not_layered",
            Error::Cyclic { .. } => "cyclic",
            Error::Network { .. } => "network",
            Error::InterleaverDepth { .. } => "interleaver_depth",
            Error::Config(_) => "config",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
