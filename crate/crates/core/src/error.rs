use thiserror::Error;

/// Failure modes of the model, the closed-form phases and the numeric oracles.
///
/// Degenerate physics inputs are reported through these variants, never as
/// panics or NaN-valued phases.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("model parameters are not finite: g={g}, theta={theta}, phi={phi}")]
    InvalidParams { g: f64, theta: f64, phi: f64 },

    #[error("shifted eigenvalues {0} and {1} are closer than the tracking tolerance")]
    DegenerateRoots(f64, f64),

    #[error("Schmidt coefficients are degenerate (p1 - p2 = {0:e}); Schmidt vectors are not unique")]
    DegenerateSchmidt(f64),

    #[error("mixed-state phase undefined: reduced operators are degenerate")]
    UndefinedPhase,

    #[error("scale factor denominator vanishes ({0:e})")]
    SingularScaleFactor(f64),

    #[error("quadrature did not converge: relative change {change:e} at {panels} panels")]
    NonconvergentQuadrature { change: f64, panels: usize },

    #[error("eigenvalue gap {gap:e} below tolerance at path parameter s={s}")]
    DegenerateAlongPath { gap: f64, s: f64 },

    #[error("path is not closed on the direction sphere (endpoint mismatch {0:e})")]
    OpenPath(f64),

    #[error("state norm drifted by {0:e}")]
    NormDrift(f64),

    #[error("populations drifted by {0:e}; evolution is not adiabatic")]
    AdiabaticityFailure(f64),

    #[error("Schmidt coefficients vary along the path (max change {0:e}); subsystem phase is not defined")]
    TransitionPath(f64),

    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DegenerateSchmidt(_) | Error::UndefinedPhase => 3,
            Error::DegenerateRoots(..) | Error::DegenerateAlongPath { .. } => 4,
            Error::AdiabaticityFailure(_) | Error::NormDrift(_) => 5,
            Error::Usage(_) | Error::InvalidParams { .. } | Error::OpenPath(_) => 64,
            Error::SingularScaleFactor(_) | Error::TransitionPath(_) => 3,
            Error::NonconvergentQuadrature { .. } => 1,
        }
    }

    /// Short status label used in CSV rows.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParams { .. } => "invalid-params",
            Error::DegenerateRoots(..) => "degenerate-roots",
            Error::DegenerateSchmidt(_) => "degenerate-schmidt",
            Error::UndefinedPhase => "undefined-phase",
            Error::SingularScaleFactor(_) => "singular-scale-factor",
            Error::NonconvergentQuadrature { .. } => "nonconvergent-quadrature",
            Error::DegenerateAlongPath { .. } => "degenerate-along-path",
            Error::OpenPath(_) => "open-path",
            Error::NormDrift(_) => "norm-drift",
            Error::AdiabaticityFailure(_) => "adiabaticity-failure",
            Error::TransitionPath(_) => "transition-path",
            Error::Usage(_) => "usage",
        }
    }
}
