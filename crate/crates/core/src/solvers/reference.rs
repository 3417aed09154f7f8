//! Baseline solvers that ignore or sidestep the digit restriction.

use alloc::boxed::Box;
use alloc::vec::Vec;

use num_traits::Zero;

use super::{Result, SolveContext, Solver, SolverError};
use crate::computable::{CReal, DigitOracle};
use crate::families::{Family, FamilyName, Location};
use crate::rational::{int, rat, Rational};

/// Returns a fixed point without reading anything.
#[derive(Debug, Clone)]
pub struct ConstantSolver {
    pub family: FamilyName,
    pub point: Vec<Rational>,
}

impl ConstantSolver {
    /// `(1, 1/2)` for the linear program, halfway between both sides' optimizers.
    pub fn lp_midpoint() -> Self {
        Self { family: FamilyName::Lp, point: alloc::vec![int(1), rat(1, 2)] }
    }
}

impl Solver for ConstantSolver {
    fn name(&self) -> &'static str {
        "constant"
    }

    fn family(&self) -> FamilyName {
        self.family
    }

    fn solve(&self, _oracle: &mut DigitOracle, _ctx: &SolveContext) -> Result<Vec<Rational>> {
        Ok(self.point.clone())
    }
}

/// Reads at least 64 bits and trusts the side hint, i.e. a membership
/// decider; without a hint it answers with a boundary optimizer.
pub struct CheatingReferenceSolver {
    family: Box<dyn Family>,
}

impl CheatingReferenceSolver {
    pub const MIN_PRECISION: u32 = 64;

    pub fn new(family: Box<dyn Family>) -> Self {
        Self { family }
    }
}

impl Solver for CheatingReferenceSolver {
    fn name(&self) -> &'static str {
        "cheating-reference"
    }

    fn family(&self) -> FamilyName {
        self.family.name()
    }

    fn solve(&self, oracle: &mut DigitOracle, ctx: &SolveContext) -> Result<Vec<Rational>> {
        let level = ctx.precision.max(Self::MIN_PRECISION);
        let params: Vec<CReal> = oracle.query_all(level)?.into_iter().map(CReal::from_rational).collect();
        let location = ctx.side_hint.map_or(Location::Boundary, Location::Side);
        let opt = self.family.optimizers_at(location, &params)?;
        let mut x = opt
            .representative()
            .iter()
            .map(|c| c.approx(ctx.round_bits))
            .collect::<Result<Vec<_>, _>>()
            .map_err(SolverError::from)?;
        x.resize(self.family.solution_dim(), Rational::zero());
        Ok(x)
    }
}
