//! The adversary: hypothesis checks, boundary bisection, threshold
//! decisions and finite-prefix fooling of solvers.

mod bisect;
mod conditions;
mod fooling;
mod threshold;

use thiserror::Error;

use crate::computable::ComputeError;
use crate::families::{FamilyError, FamilyName, Side};
use crate::rational::Rational;
use crate::solvers::SolverError;

pub use bisect::{bisect_path, bisect_path_from, default_offset, BisectionState, MembershipCall, BISECT_MAX_LEVEL};
pub use conditions::{verify_conditions, Condition, ConditionReport, ConditionResult, ConditionStatus};
pub use fooling::{fool_solver, guard_bits, FoolingConfig, FoolingReport, SideOutcome, REPORT_LEVEL};
pub use threshold::threshold_decide;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdversaryError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Compute(#[from] ComputeError),
    #[error("threshold {delta} is not above 2^(1-{level})")]
    ThresholdPrecondition { delta: Rational, level: u32 },
    #[error("bisection depth must be at least 1")]
    InvalidDepth,
    #[error("need at least 2 samples per side, got {got}")]
    TooFewSamples { got: usize },
    #[error("membership of t={t} still undecided at level {level}")]
    MembershipUndecided { t: Rational, level: u32 },
    #[error("tolerance {tol} must lie strictly between 0 and kappa/2")]
    ToleranceOutOfRange { tol: Rational },
    #[error("solver for {solver} cannot run on family {family}")]
    WrongFamily { family: FamilyName, solver: FamilyName },
    #[error("replaying the {side:?} query log produced a different solution")]
    ReplayMismatch { side: Side },
}

pub type Result<T, E = AdversaryError> = core::result::Result<T, E>;
