use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShiftError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} is not above the offset {offset}")]
    IndexBelowOffset { index: usize, offset: usize },

    #[error("offset mismatch: expected {expected}, found {found}")]
    OffsetMismatch { expected: usize, found: usize },

    #[error("index {index} lies outside the weight table (last index {last})")]
    OutsideTable { index: usize, last: usize },

    #[error("log-magnitude {logmag} is outside the native float range")]
    OverflowNotRepresentable { logmag: f64 },

    #[error("adjoint of a {0} shift is not representable as a weighted shift")]
    UnsupportedAdjoint(&'static str),

    #[error("operator factors must share a direction")]
    DirectionMismatch,

    #[error("series tail could not be certified: {0}")]
    TailNotCertifiable(String),

    #[error("period {q} does not exceed the support excess {excess}")]
    QTooSmall { q: usize, excess: usize },

    #[error("schedule time exceeded {limit} while placing target {target}")]
    ScheduleOverflow { target: usize, limit: usize },
}

impl ShiftError {
    /// Numeric failures (as opposed to invalid input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            ShiftError::OverflowNotRepresentable { .. }
                | ShiftError::TailNotCertifiable(_)
                | ShiftError::ScheduleOverflow { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, ShiftError>;
