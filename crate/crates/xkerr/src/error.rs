use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("charging energy from ratio ({from_ratio:.6e}) and from capacitances ({from_caps:.6e}) disagree by more than 1%")]
    InconsistentChargingEnergy { from_ratio: f64, from_caps: f64 },

    #[error("shifted {mode} frequency is imaginary: ω₀(ω₀ + 4g_S) = {value:.6e}")]
    ImaginaryFrequency { mode: &'static str, value: f64 },

    #[error("truncation too small: {0}")]
    Truncation(String),

    #[error("steady state is not unique (null-space gap {gap:.3e})")]
    DegenerateSteadyState { gap: f64 },

    #[error("linear solver failed: {0}")]
    Solver(String),

    #[error("step size underflow at t = {t:.6e} s (h = {h:.3e} s)")]
    StepUnderflow { t: f64, h: f64 },

    #[error("correlation undefined: mean photon number {0:.3e} is too small")]
    UndefinedCorrelation(f64),

    #[error("mean-field iteration did not converge (residual {residual:.3e})")]
    MeanFieldNonConvergence { residual: f64 },

    #[error("mean-field Jacobian is singular near a fold")]
    MeanFieldFold,

    #[error("drift matrix is unstable; Lyapunov equation has no steady solution")]
    Unstable,

    #[error("covariance matrix is unphysical: {0}")]
    Unphysical(String),

    #[error("Wigner grid is too small: normalization {norm:.6}")]
    GridTooSmall { norm: f64 },

    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    /// Stable short identifier, suitable for data files.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::InconsistentChargingEnergy { .. } => "inconsistent_charging_energy",
            Error::ImaginaryFrequency { .. } => "imaginary_frequency",
            Error::Truncation(_) => "truncation",
            Error::DegenerateSteadyState { .. } => "degenerate_steady_state",
            Error::Solver(_) => "solver",
            Error::StepUnderflow { .. } => "step_underflow",
            Error::UndefinedCorrelation(_) => "undefined_correlation",
            Error::MeanFieldNonConvergence { .. } => "mean_field_non_convergence",
            Error::MeanFieldFold => "mean_field_fold",
            Error::Unstable => "unstable",
            Error::Unphysical(_) => "unphysical",
            Error::GridTooSmall { .. } => "grid_too_small",
            Error::Unsupported(_) => "unsupported",
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
