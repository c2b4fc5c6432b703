use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Scenario violates a hard invariant (e.g. zero ensembles).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A closed form was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Sample set carries no usable spread (constant envelopes, too few samples).
    #[error("degenerate samples: {0}")]
    Degenerate(String),

    /// The MoM impedance matrix could not be factored.
    #[error("singular impedance matrix: {0}")]
    Singular(String),

    /// Geometry could not be realized (e.g. receiver collides with a wire).
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
