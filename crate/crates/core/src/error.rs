use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected} values, got {found}")]
    Shape { expected: usize, found: usize },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// A function was evaluated outside its domain of definition.
    #[error("argument {value} outside the domain of {what}")]
    OutOfDomain { what: &'static str, value: f64 },

    #[error("singular linear system (zero pivot in column {column})")]
    Singular { column: usize },

    #[error(
        "Newton iteration did not converge in {iterations} iterations (residual {residual:.3e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("time step {dt:.3e} fell below the minimum {dt_min:.3e} at t = {time}")]
    StepUnderflow { dt: f64, dt_min: f64, time: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Shape { expected, found })
    }
}
