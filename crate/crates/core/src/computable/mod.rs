//! Computable reals with effective convergence.
//!
//! A [`CReal`] answers every request for precision level `n` with a rational
//! within `2^-n` of the real it represents. Answers are cached and pure, so
//! replaying a query sequence reproduces the same rationals bit for bit.
//! Order between computable reals is only semi-decidable; [`compare_up_to`]
//! reports [`ComparisonVerdict::Unknown`] instead of guessing.

mod budget;
mod creal;
mod oracle;
mod sequence;
mod transcendental;

pub use budget::{set_step_budget, step_budget, StepMeter, DEFAULT_STEP_BUDGET};
pub use creal::{compare_up_to, CReal, ComparisonVerdict, Precision};
pub use oracle::{DigitOracle, QueryRecord};
pub use sequence::CRealSequence;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComputeError {
    #[error("approximation exceeded the step budget of {limit}")]
    BudgetExceeded { limit: u64 },
    #[error("divisor approximant at level {level} is not separated from zero")]
    InvalidSeparation { level: u32 },
    #[error("witness must be strictly positive")]
    NonPositiveWitness,
    #[error("logarithm argument must be positive")]
    NonPositiveLogArgument,
    #[error("coordinate {coord} out of range for a {dim}-dimensional oracle")]
    CoordinateOutOfRange { coord: usize, dim: usize },
    #[error("query for coordinate {coord} at level {level} was never recorded")]
    NotRecorded { coord: usize, level: u32 },
    #[error("splice prefix is not a valid approximant of the tail at level {level}")]
    InvalidSplice { level: u32 },
}
