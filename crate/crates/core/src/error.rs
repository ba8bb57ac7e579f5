use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("alpha must lie in [0, 1], got {0}")]
    Alpha(f64),
    #[error("m_dist must be at least 1")]
    ZeroSamples,
    #[error("at least one of perturb_code / perturb_comment must be enabled")]
    NoStreams,
    #[error("{name} must lie in {range}, got {value}")]
    OutOfRange {
        name: &'static str,
        range: &'static str,
        value: f64,
    },
    #[error("invalid {name}: {message}")]
    Invalid { name: &'static str, message: String },
}

/// Malformed bundled or user-supplied text resource.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResourceError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("{0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("translation failed: {0}")]
pub struct TranslateError(pub String);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PerturbError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("sample {index}: {source}")]
    Translator {
        index: usize,
        #[source]
        source: TranslateError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("handshake failed: {0}")]
    Handshake(String),
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("malformed response: {0}")]
    Protocol(String),
    #[error("model returned an error: {0}")]
    Remote(String),
    #[error("query timed out after {0:?}")]
    Timeout(std::time::Duration),
    #[error("invalid input: {0}")]
    Input(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CausalError {
    #[error("{samples} perturbed samples but {outputs} model outputs")]
    Alignment { samples: usize, outputs: usize },
    #[error("empty design: {0}")]
    Empty(String),
    #[error("non-finite value during fit ({0})")]
    Numerical(String),
    #[error("fit for input {input:?} -> output {output:?}: {message}")]
    NumericalAt {
        input: String,
        output: String,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("invalid cluster count k={k} for {available} items")]
    InvalidK { k: usize, available: usize },
    #[error("graph is empty")]
    EmptyGraph,
    #[error("node {0} has zero degree")]
    ZeroDegree(usize),
    #[error("points have inconsistent dimensions")]
    Dimension,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("reading corpus: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate bug id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("no bug with id {0:?}")]
    UnknownBug(String),
}

/// Crate-level error, mainly for the pipeline and the command line.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error(transparent)]
    Perturb(#[from] PerturbError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Causal(#[from] CausalError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 1 validation, 2 transport, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Model(_) => 2,
            Error::Causal(CausalError::Numerical(_) | CausalError::NumericalAt { .. }) => 3,
            Error::Perturb(PerturbError::Translator { .. }) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
