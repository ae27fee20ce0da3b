use thiserror::Error;

/// Errors from constructors and simulators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A neuron or grounding parameter violates one of the required
    /// inequalities. The string names the violated inequality.
    #[error("invalid parameters: {0} violated")]
    InvalidParameters(String),

    #[error("capacity exceeded: {what} has {size} elements, limit is {limit}")]
    Capacity {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("unknown letter {letter:?} at position {position}")]
    UnknownLetter { letter: String, position: usize },

    #[error("input {value} at position {position} does not ground to any letter")]
    Ungroundable { value: f64, position: usize },

    /// A neuron state left every interval of its state partition.
    #[error("integrity error: neuron {neuron} ({name}) has state {value} outside its state partition at step {step}")]
    InterpretationGap {
        neuron: usize,
        name: String,
        value: f64,
        step: usize,
    },

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParameters(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
