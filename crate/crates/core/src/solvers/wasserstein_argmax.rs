use alloc::vec::Vec;

use super::{Result, SolveContext, Solver, SolverError};
use crate::computable::DigitOracle;
use crate::families::{catalog, wasserstein_pairing, Density, FamilyName};
use crate::rational::Rational;

/// Catalog index and value of the best test function, first index on ties.
pub fn wasserstein_argmax(p1: &Density, p2: &Density) -> (usize, Rational) {
    let mut best: Option<(usize, Rational)> = None;
    for (i, f) in catalog().iter().enumerate() {
        let v = wasserstein_pairing(p1, p2, &f.values);
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((i, v));
        }
    }
    best.expect("catalog is nonempty")
}

/// Reads both densities once and returns the best catalog function.
#[derive(Debug, Clone, Copy, Default)]
pub struct ArgmaxSolver;

impl Solver for ArgmaxSolver {
    fn name(&self) -> &'static str {
        "argmax"
    }

    fn family(&self) -> FamilyName {
        FamilyName::Wasserstein
    }

    fn solve(&self, oracle: &mut DigitOracle, ctx: &SolveContext) -> Result<Vec<Rational>> {
        let p = oracle.query_all(ctx.precision)?;
        if p.len() != 6 {
            return Err(SolverError::DimensionMismatch { expected: 6, got: p.len() });
        }
        // rounded densities need not integrate to one; the pairing does not care
        let p1 = Density { a: p[0].clone(), b: p[1].clone(), c: p[2].clone() };
        let p2 = Density { a: p[3].clone(), b: p[4].clone(), c: p[5].clone() };
        let (index, _) = wasserstein_argmax(&p1, &p2);
        Ok(catalog()[index].values.clone())
    }
}
