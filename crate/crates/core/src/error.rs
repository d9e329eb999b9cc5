use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("not a walk: window {index} ({window:?}) is not an edge")]
    NotAWalk { index: usize, window: Vec<u32> },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("generation failed after {attempts} attempts: {detail}")]
    GenerationFailed { attempts: usize, detail: String },

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("certification failed after {attempts} systems: {detail}")]
    Certification { attempts: usize, detail: String },

    #[error("mixing bound inapplicable: {0}")]
    Inapplicable(String),

    #[error("transporter property ({property}) violated: {detail}")]
    InvalidTransporter { property: &'static str, detail: String },

    /// The flow construction has no path family for some ordered pair.
    #[error("flow refused: {0}")]
    FlowRefused(String),

    /// The pipeline cannot complete; carries the reason.
    #[error("pipeline aborted: {0}")]
    Aborted(String),

    #[error("counting overflow: {0}")]
    Overflow(String),
}

impl Error {
    /// True when the error stems from malformed caller input rather than a
    /// refusal by the mathematics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_) | Error::NotAWalk { .. } | Error::Unsupported(_)
        )
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
