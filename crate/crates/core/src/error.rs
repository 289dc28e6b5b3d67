use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    /// An argument is outside the domain of the operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A moment that does not exist for the requested sample size.
    #[error("undefined moment: {0}")]
    UndefinedMoment(String),

    /// An iterative series or root search failed to converge.
    #[error("no convergence: {0}")]
    NonConvergence(String),

    /// Sample-size search ran past its ceiling without reaching the target.
    #[error("search failed: target power {target} not reached for n <= {ceiling}")]
    SearchCeiling { target: f64, ceiling: u32 },

    #[error(transparent)]
    Fit(#[from] FitError),
}

/// Degenerate least-squares fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("predictor values are all equal (S_XX = 0)")]
    DegenerateX,
    #[error("residual sum of squares is zero; t statistics are undefined")]
    PerfectFit,
    #[error("need matching xs and ys with at least 3 points (got {xs} and {ys})")]
    BadLength { xs: usize, ys: usize },
}

pub type Result<T> = std::result::Result<T, CoreError>;

pub(crate) fn invalid(msg: impl Into<String>) -> CoreError {
    CoreError::InvalidInput(msg.into())
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in (0, 1), got {p}")))
    }
}
