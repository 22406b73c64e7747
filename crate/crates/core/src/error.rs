use thiserror::Error;

use crate::scatter::ProbeTrajectory;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Integration hit `t_max` before the probe escaped; carries what was computed.
    #[error("unterminated trajectory: t_max = {t_max:.6e} s reached before escape")]
    UnterminatedTrajectory {
        t_max: f64,
        partial: Box<ProbeTrajectory>,
    },

    #[error("integrator failure: {0}")]
    IntegratorFailure(String),

    #[error("stereographic projection is singular at the pole (0, 0, -1)")]
    ProjectionSingular,

    #[error("grid insufficient: boundary amplitude {ratio:.3e} of max for state {state}")]
    GridInsufficient { state: usize, ratio: f64 },

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by bad input rather than a numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidParameter(_) | Error::GridInsufficient { .. })
    }
}
