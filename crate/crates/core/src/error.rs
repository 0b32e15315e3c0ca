use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the requested function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {k} out of range 0..={m}")]
    Index { k: u32, m: u32 },

    /// A series failed to converge within its term budget.
    #[error("series did not converge after {terms} terms (a={a}, b={b}, z={z})")]
    NonConvergence {
        a: f64,
        b: f64,
        z: f64,
        terms: usize,
    },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("tolerance not met: best estimate {estimate} with error {error_estimate} (requested {requested})")]
    ToleranceNotMet {
        estimate: f64,
        error_estimate: f64,
        requested: f64,
    },

    #[error("integrand is not finite at x = {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("negative density {value} at x = {at}")]
    NegativeDensity { at: f64, value: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for errors caused by bad user input rather than numerical failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Index { .. } | Error::InvalidInput(_)
        )
    }
}
