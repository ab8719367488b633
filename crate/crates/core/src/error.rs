use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// A non-finite value was supplied or produced where finite reals are required.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// Non-finite values appeared inside a solver cycle.
    #[error("numerical breakdown in cycle {cycle}: {detail}")]
    Breakdown { cycle: usize, detail: String },

    /// The reference integrator produced a non-finite state.
    #[error("reference integrator blew up at step {step}")]
    BlowUp { step: usize },

    #[error("operation not supported for a {0}-mode solution")]
    UnsupportedMode(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
