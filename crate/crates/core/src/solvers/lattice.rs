use alloc::vec::Vec;

use super::{Result, SolveContext, Solver};
use crate::computable::DigitOracle;
use crate::families::{lattice_enumerate, FamilyName, OrderedBasis};
use crate::rational::Rational;

/// Reads the basis once and returns the first basis of the exact
/// enumeration over the rounded lattice.
#[derive(Debug, Clone, Copy)]
pub struct EnumeratorSolver {
    pub bound: i64,
}

impl Default for EnumeratorSolver {
    fn default() -> Self {
        Self { bound: 3 }
    }
}

impl Solver for EnumeratorSolver {
    fn name(&self) -> &'static str {
        "enumerator"
    }

    fn family(&self) -> FamilyName {
        FamilyName::Sivp
    }

    fn solve(&self, oracle: &mut DigitOracle, ctx: &SolveContext) -> Result<Vec<Rational>> {
        let p = oracle.query_all(ctx.precision)?;
        let basis = OrderedBasis::from_flat(&p)?;
        let found = lattice_enumerate(&basis, self.bound)?;
        Ok(found[0].basis.flat())
    }
}
