use thiserror::Error;

use crate::exact::{NumberError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("iterate m must be at least 1")]
    ZeroIterate,
    #[error("mean index {0} is not positive")]
    MeanIndexNotPositive(String),
    #[error("mean index {0} is irrational")]
    IrrationalMeanIndex(String),
    #[error("no quasi-period found up to T = {searched_up_to}; {near_miss}")]
    QuasiPeriodNotFound {
        searched_up_to: u64,
        near_miss: String,
    },
    #[error("{0}")]
    RangeClaimViolated(Box<RangeClaim>),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("d_{index} = {value} is nonzero beyond mu + 1")]
    DJTailNonzero { index: usize, value: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Number(#[from] NumberError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("epsilon term {value} at k = {k} leaves the interval ({lower}, {upper})")]
pub struct RangeClaim {
    pub k: u64,
    pub value: Rational,
    pub lower: Rational,
    pub upper: Rational,
}

pub type Result<T> = std::result::Result<T, Error>;
