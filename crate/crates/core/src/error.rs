use std::path::PathBuf;

use thiserror::Error;

use crate::sweep::config::ConfigError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular configuration: {0}")]
    Singular(String),

    #[error("quadrature did not converge: estimate {estimate:e} with error {achieved:e} after {evaluations} evaluations")]
    Quadrature {
        estimate: f64,
        achieved: f64,
        evaluations: usize,
    },

    #[error("principal-value pole at {pole} lies within {distance:e} of an integrand feature at {feature}")]
    PoleOnFeature {
        pole: f64,
        feature: f64,
        distance: f64,
    },

    #[error("step size collapsed to {step:e} at t = {t}")]
    StepCollapse { t: f64, step: f64 },

    #[error("fixed-point iteration did not converge at step {step} (residual {residual:e})")]
    FixedPoint { step: usize, residual: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Io { .. } => 3,
            _ => 2,
        }
    }
}
