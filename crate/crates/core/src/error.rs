use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("degenerate series: zero sum of squared deviations")]
    DegenerateSeries,

    #[error("no observations exceed the threshold 1 - {delta}")]
    NoExceedances { delta: f64 },

    #[error("degenerate denominator in tail-index estimate")]
    DegenerateDenominator,

    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("sample size {got} is below the required minimum {need}")]
    SampleSize { need: usize, got: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("threshold selection failed: {0}")]
    Threshold(String),

    #[error("invalid experiment spec: {0}")]
    Spec(String),

    #[error("data format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line tool: 2 for input/data
    /// problems, 3 for numeric or estimation failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_)
            | Error::Spec(_)
            | Error::Format(_)
            | Error::Io(_)
            | Error::Csv(_)
            | Error::Json(_)
            | Error::DegenerateSeries => 2,
            Error::NoExceedances { .. }
            | Error::DegenerateDenominator
            | Error::Degenerate(_)
            | Error::SampleSize { .. }
            | Error::Numeric(_)
            | Error::Quadrature { .. }
            | Error::Threshold(_) => 3,
        }
    }

    /// True for failures the Monte Carlo engine counts instead of propagating.
    pub fn is_estimation_failure(&self) -> bool {
        self.exit_code() == 3 || matches!(self, Error::DegenerateSeries)
    }
}
