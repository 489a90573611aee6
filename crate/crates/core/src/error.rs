use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("embedding matrix is rank deficient after {attempts} draws")]
    RankDeficient { attempts: usize },

    #[error("row {row} of the embedding matrix is zero; that coordinate can never be spanned")]
    ZeroRow { row: usize },

    #[error("matrix is not positive definite (failed at pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("covariance matrix could not be factorized even with relative nugget {nugget:e}")]
    Conditioning { nugget: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("input coordinate {index} = {value} lies outside the unit interval")]
    OutOfDomain { index: usize, value: f64 },

    #[error("optimality gap {gap:e} is negative beyond tolerance; the recorded minimum is wrong")]
    NegativeGap { gap: f64 },

    #[error("duplicate elimination did not converge after {draws} draws")]
    DuplicateElimination { draws: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
