use thiserror::Error;

use crate::degeneracy::CaseLabel;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (deviation {deviation:.3e}, allowed {allowed:.3e})")]
    NotHermitian { deviation: f64, allowed: f64 },

    #[error("invalid multipole tensor: {0}")]
    InvalidTensor(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operation not defined for {0:?}")]
    UnsupportedCase(CaseLabel),

    #[error("degeneracy conditions not satisfied: {0}")]
    NotDegenerate(String),

    #[error("phase consistency arg(zeta) = gamma + theta violated by {0:.3e}")]
    PhaseInconsistent(f64),

    #[error("no chart contains this point: {0}")]
    ChartUndefined(String),

    #[error("zero denominator in {0:?} frame; point is misrouted")]
    ZeroDenominator(CaseLabel),

    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal {off_diagonal:.3e})"
    )]
    NoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("frames are not comparable (overlap determinant {0:.3e} < 0.5)")]
    AlignmentFailed(f64),

    #[error("loop is not closed (endpoint mismatch {0:.3e})")]
    OpenLoop(f64),

    #[error("case changes along the path at t = {t}: {from:?} -> {to:?}")]
    CaseTransition {
        t: f64,
        from: CaseLabel,
        to: CaseLabel,
    },

    #[error("time step too large: |H| dt = {0:.3e} exceeds 0.1")]
    StepTooLarge(f64),
}
