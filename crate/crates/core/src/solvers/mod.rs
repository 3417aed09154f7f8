//! Deterministic solvers that see their instance only through a
//! [`DigitOracle`], plus the value map.
//!
//! Iterative solvers work in exact rational arithmetic and round an iterate
//! to multiples of `2^-round_bits` once its denominators outgrow `2^round_bits`;
//! the rounding is part of the recorded trace.

mod blahut_arimoto;
mod cover;
mod lattice;
mod lp_vertex;
mod nn_gd;
mod reference;
mod wasserstein_argmax;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::computable::{CReal, ComputeError, DigitOracle};
use crate::families::{family, Family, FamilyError, FamilyName, Instance, Side};
use crate::rational::{round_dyadic, Rational};

pub use blahut_arimoto::{blahut_arimoto, blahut_arimoto_trace, BlahutArimotoSolver};
pub use cover::{cover_portfolio, cover_portfolio_trace, CoverSolver};
pub use lattice::EnumeratorSolver;
pub use lp_vertex::{lp_vertex_solve, LpVertexSolver};
pub use nn_gd::{loss_gradient, nn_gd_train, nn_gd_trace, GradientDescentSolver};
pub use reference::{CheatingReferenceSolver, ConstantSolver};
pub use wasserstein_argmax::{wasserstein_argmax, ArgmaxSolver};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Compute(#[from] ComputeError),
    #[error("initial point has a zero entry at index {index}")]
    ZeroInitEntry { index: usize },
    #[error("initial point is not a probability vector")]
    InitOffSimplex,
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("learning rate must be positive")]
    NonPositiveLearningRate,
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("no solver `{name}` for family {family}")]
    UnknownSolver { family: FamilyName, name: String },
    #[error("iteration budget must be at least 1")]
    ZeroBudget,
}

pub type Result<T, E = SolverError> = core::result::Result<T, E>;

pub const DEFAULT_ROUND_BITS: u32 = 128;

/// Budgets and side information for one solver run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveContext {
    pub iterations: u32,
    /// Level at which the solver reads its parameters.
    pub precision: u32,
    /// Region of the instance, available only to solvers that may cheat.
    pub side_hint: Option<Side>,
    pub round_bits: u32,
}

impl Default for SolveContext {
    fn default() -> Self {
        Self { iterations: 200, precision: 16, side_hint: None, round_bits: DEFAULT_ROUND_BITS }
    }
}

impl SolveContext {
    pub fn new(iterations: u32, precision: u32) -> Self {
        Self { iterations, precision, ..Self::default() }
    }
}

pub trait Solver: Send + Sync {
    fn name(&self) -> &'static str;
    fn family(&self) -> FamilyName;
    fn solve(&self, oracle: &mut DigitOracle, ctx: &SolveContext) -> Result<Vec<Rational>>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub step: usize,
    pub solution: Vec<Rational>,
    /// Objective approximated within `2^-TRACE_LEVEL`.
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IterationTrace {
    pub steps: Vec<TraceStep>,
}

pub const TRACE_LEVEL: u32 = 48;

impl IterationTrace {
    pub fn last(&self) -> Option<&TraceStep> {
        self.steps.last()
    }

    /// Whether values never decrease by more than the approximation slack.
    pub fn is_nondecreasing(&self) -> bool {
        let slack = crate::rational::pow2(1 - TRACE_LEVEL as i64);
        self.steps.windows(2).all(|w| w[1].value >= &w[0].value - &slack)
    }

    pub(crate) fn from_iterates(
        iterates: Vec<Vec<Rational>>,
        mut value: impl FnMut(&[Rational]) -> Result<Rational>,
    ) -> Result<Self> {
        let steps = iterates
            .into_iter()
            .enumerate()
            .map(|(step, solution)| Ok(TraceStep { step, value: value(&solution)?, solution }))
            .collect::<Result<_>>()?;
        Ok(Self { steps })
    }
}

fn fits(x: &Rational, bits: u32) -> bool {
    x.denom() <= &(num_bigint::BigInt::from(1) << bits as usize)
}

/// Rounds a probability vector to multiples of `2^-bits` when some
/// denominator exceeds `2^bits`, keeping it on the simplex: coordinates are
/// rounded to nearest and the remainder goes to the largest.
pub fn round_simplex(p: &[Rational], bits: u32) -> Vec<Rational> {
    if p.iter().all(|x| fits(x, bits)) {
        return p.to_vec();
    }
    let mut out: Vec<Rational> = p.iter().map(|x| round_dyadic(x, bits)).collect();
    let total: Rational = out.iter().sum();
    let remainder = crate::rational::int(1) - total;
    if let Some(largest) = (0..out.len()).rev().max_by(|&i, &j| p[i].cmp(&p[j])) {
        out[largest] += remainder;
    }
    out
}

/// Rounds coordinates whose denominator exceeds `2^bits` to the nearest
/// multiple of `2^-bits`.
pub(crate) fn round_vector(v: &[Rational], bits: u32) -> Vec<Rational> {
    v.iter().map(|x| if fits(x, bits) { x.clone() } else { round_dyadic(x, bits) }).collect()
}

pub(crate) fn check_init(p: &[Rational], expected: usize) -> Result<()> {
    if p.len() != expected {
        return Err(SolverError::DimensionMismatch { expected, got: p.len() });
    }
    if let Some(index) = p.iter().position(|x| !x.is_positive()) {
        return Err(SolverError::ZeroInitEntry { index });
    }
    if p.iter().sum::<Rational>() != crate::rational::int(1) {
        return Err(SolverError::InitOffSimplex);
    }
    Ok(())
}

pub(crate) fn uniform(n: usize) -> Vec<Rational> {
    let mut p = alloc::vec![crate::rational::rat(1, n as i64); n];
    if p.is_empty() {
        p.push(Rational::zero());
    }
    p
}

/// Optimal value: the objective at the oracle's representative optimizer.
///
/// Irrational optimizer coordinates are read at level 128 first.
pub fn optimal_value(family: &dyn Family, y: &Instance) -> Result<CReal> {
    let opt = family.optimizers(y)?;
    let x = opt.representative().iter().map(|c| c.approx(128)).collect::<Result<Vec<_>, _>>()?;
    let mut x = x;
    x.resize(family.solution_dim(), Rational::zero());
    Ok(family.objective(&x, &y.params)?)
}

/// Names of the solvers registered for a family.
pub fn solver_names(name: FamilyName) -> &'static [&'static str] {
    match name {
        FamilyName::Lp => &["vertex", "constant", "cheating-reference"],
        FamilyName::Portfolio => &["cover", "cheating-reference"],
        FamilyName::Channel => &["blahut-arimoto", "cheating-reference"],
        FamilyName::Nn => &["gd", "cheating-reference"],
        FamilyName::Wasserstein => &["argmax", "cheating-reference"],
        FamilyName::Sivp => &["enumerator", "cheating-reference"],
    }
}

/// The solver a fooling run uses by default for a family.
pub fn default_solver_name(name: FamilyName) -> &'static str {
    solver_names(name)[0]
}

pub fn solver(name: FamilyName, solver: &str) -> Result<Box<dyn Solver>> {
    Ok(match (name, solver) {
        (FamilyName::Lp, "vertex") => Box::new(LpVertexSolver),
        (FamilyName::Lp, "constant") => Box::new(ConstantSolver::lp_midpoint()),
        (FamilyName::Portfolio, "cover") => Box::new(CoverSolver::default()),
        (FamilyName::Channel, "blahut-arimoto") => Box::new(BlahutArimotoSolver::default()),
        (FamilyName::Nn, "gd") => Box::new(GradientDescentSolver::default()),
        (FamilyName::Wasserstein, "argmax") => Box::new(ArgmaxSolver),
        (FamilyName::Sivp, "enumerator") => Box::new(EnumeratorSolver::default()),
        (_, "cheating-reference") => Box::new(CheatingReferenceSolver::new(family(name))),
        _ => return Err(SolverError::UnknownSolver { family: name, name: solver.into() }),
    })
}
