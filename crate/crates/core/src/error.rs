use thiserror::Error;

/// Errors raised by the phase-space engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid grid, threshold set or solver configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// Array shapes or grids do not line up.
    #[error("dimension error: {0}")]
    Dimension(String),
    /// A derivative order or band requirement exceeds what the grid resolves.
    #[error("resolution error: {0}")]
    Resolution(String),
    /// An argument is outside its admissible range.
    #[error("argument error: {0}")]
    Argument(String),
    /// Time step violates the stability bound of the explicit integrator.
    #[error("stability bound violated: {0}")]
    Cfl(String),
    /// A non-finite value appeared during time stepping.
    #[error("instability at step {step} (t = {time}): {detail}")]
    Instability {
        step: usize,
        time: f64,
        detail: String,
    },
    /// The requested combination is not supported.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
