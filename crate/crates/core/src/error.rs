use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("integrand is not integrable at {endpoint}: exponent {exponent} <= -1")]
    NonIntegrable { endpoint: f64, exponent: f64 },

    #[error("adaptive quadrature stalled: error estimate {estimate:e} above requested {requested:e}")]
    ToleranceNotMet { estimate: f64, requested: f64 },

    #[error("endpoint exponent {slope} is too close to -1 to decide divergence")]
    AmbiguousExponent { slope: f64 },

    #[error("declared endpoint exponent {declared} does not match measured slope {measured}")]
    ExponentMismatch { declared: f64, measured: f64 },

    #[error("sequence neither converges nor diverges monotonically (last samples {last:?})")]
    Oscillatory { last: Vec<f64> },

    #[error("sequence diverges to +infinity")]
    DivergesUpward,

    #[error("step size underflow at r = {at}")]
    StepUnderflow { at: f64 },

    #[error("evaluation routes disagree: {first} vs {second}")]
    RouteMismatch { first: f64, second: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("hypothesis violated: scalar curvature {value:e} at arclength {at}")]
    HypothesisViolated { at: f64, value: f64 },

    #[error("metric is not twice differentiable at arclength {at} (left {left}, right {right})")]
    NotTwiceDifferentiable { at: f64, left: f64, right: f64 },

    #[error("conformal factor vanishes in the interior at arclength {at}")]
    FactorVanishesInterior { at: f64 },

    #[error("conformal factor has no 1 + c/r expansion at infinity")]
    NoExpansion,

    #[error("invalid resolution: {0}")]
    ResolutionInvalid(String),

    #[error("invalid model specification: {0}")]
    InvalidSpec(String),

    #[error("profile violates invariant: {0}")]
    Validation(String),

    #[error("profile parse error: {0}")]
    Parse(String),

    #[error("profile has no asymptotic tail")]
    NoTail,

    #[error("inner boundary is not a zero area singularity")]
    NotZas,

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by bad input rather than a failed computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidSpec(_)
                | Error::Validation(_)
                | Error::Parse(_)
                | Error::Io(_)
                | Error::ExponentMismatch { .. }
                | Error::NotZas
                | Error::NoTail
                | Error::ResolutionInvalid(_)
        )
    }
}
