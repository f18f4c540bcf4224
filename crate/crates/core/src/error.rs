use alloc::string::String;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("linearization failure: {0}")]
    LinearizationFailure(String),
    #[error("point outside validity radius: norm {norm:e} >= R = {radius:e}")]
    OutsideValidityRadius { norm: f64, radius: f64 },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("spectrum has no zero exponent within the clustering tolerance")]
    NoCenterExponent,
    #[error("splitting not converged: angle increment {increment:e} after horizon {horizon}")]
    SplittingNotConverged { increment: f64, horizon: usize },
    #[error("vector has a stable component of relative size {0:e}")]
    NotInvertibleDirection(f64),
    #[error("parameters infeasible: {0}")]
    ParametersInfeasible(String),
    #[error("radius failure: {0}")]
    RadiusFailure(String),
    #[error("vector is not in the center subspace (off-center part {0:e})")]
    NotInCenter(f64),
    #[error("fixed point not converged after {iterations} iterations: residual {residual:e}, contraction ratio {contraction_ratio:.4}")]
    FixedPointNotConverged {
        iterations: usize,
        residual: f64,
        contraction_ratio: f64,
    },
    #[error("fit failure: {0}")]
    FitFailure(String),
}

impl Error {
    /// Stable kebab-case name, used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::LinearizationFailure(_) => "linearization-failure",
            Error::OutsideValidityRadius { .. } => "outside-validity-radius",
            Error::NumericalFailure(_) => "numerical-failure",
            Error::NoCenterExponent => "no-center-exponent",
            Error::SplittingNotConverged { .. } => "splitting-not-converged",
            Error::NotInvertibleDirection(_) => "not-invertible-direction",
            Error::ParametersInfeasible(_) => "parameters-infeasible",
            Error::RadiusFailure(_) => "radius-failure",
            Error::NotInCenter(_) => "not-in-center",
            Error::FixedPointNotConverged { .. } => "fixed-point-not-converged",
            Error::FitFailure(_) => "fit-failure",
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn numerical(msg: impl Into<String>) -> Error {
    Error::NumericalFailure(msg.into())
}
