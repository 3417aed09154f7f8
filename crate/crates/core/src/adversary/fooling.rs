//! Prefix fooling: a solver that read `k` digits of the boundary instance
//! cannot tell it apart from path instances `2^-(k+g)` away on either side,
//! whose optimizers are `kappa` apart.

use alloc::vec::Vec;

use num_traits::Zero;

use super::{AdversaryError, Result};
use crate::computable::{CReal, DigitOracle, QueryRecord};
use crate::families::{Family, FamilyName, RationalPiece, Side};
use crate::rational::{ceil_log2, int, pow2, rat, Rational};
use crate::solvers::{SolveContext, Solver};

/// Level at which errors and the gap are approximated in reports.
pub const REPORT_LEVEL: u32 = 48;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoolingConfig {
    pub tol: Rational,
    pub precision: u32,
    pub iterations: u32,
    pub round_bits: u32,
    pub max_retries: u32,
}

impl Default for FoolingConfig {
    fn default() -> Self {
        Self { tol: rat(1, 100), precision: 16, iterations: 200, round_bits: crate::solvers::DEFAULT_ROUND_BITS, max_retries: 5 }
    }
}

/// What the solver did on one of the two fooling inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideOutcome {
    pub side: Side,
    pub t: Rational,
    pub solution: Vec<Rational>,
    /// Solution mapped into the optimizer space.
    pub reduced: Vec<Rational>,
    pub optimizers: Vec<RationalPiece>,
    /// Distance to the optimizer set, within `2^-REPORT_LEVEL`.
    pub error: Rational,
    pub queries: Vec<QueryRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoolingReport {
    pub family: FamilyName,
    pub solver: &'static str,
    pub config: FoolingConfig,
    pub kappa: Rational,
    pub consumed_precision: u32,
    pub guard_bits: u32,
    pub retries: u32,
    pub center_solution: Vec<Rational>,
    pub center_queries: Vec<QueryRecord>,
    pub below: SideOutcome,
    pub above: SideOutcome,
    /// Both fooling inputs received identical digit answers.
    pub prefix_identical: bool,
    pub outputs_identical: bool,
    pub replay_identical: bool,
    pub max_error: Rational,
    pub error_sum: Rational,
    /// `max_error >= kappa/2 - tol`.
    pub verdict: bool,
    /// `error_sum >= kappa - 2 tol`.
    pub sum_bound: bool,
}

impl FoolingReport {
    pub fn side(&self, side: Side) -> &SideOutcome {
        match side {
            Side::Below => &self.below,
            Side::Above => &self.above,
        }
    }
}

/// `g = 2 + max(0, ceil(log2 L))`, so the path moves at most `2^-(k+2)`
/// between `t = 0` and `t = +-2^-(k+g)`.
pub fn guard_bits(family: &dyn Family) -> u32 {
    let l = family.path_lipschitz();
    if l.is_zero() {
        return 2;
    }
    2 + ceil_log2(&l).max(0) as u32
}

fn context(config: &FoolingConfig, side_hint: Option<Side>) -> SolveContext {
    SolveContext { iterations: config.iterations, precision: config.precision, side_hint, round_bits: config.round_bits }
}

struct Run {
    solution: Vec<Rational>,
    queries: Vec<QueryRecord>,
}

fn run(solver: &dyn Solver, sources: Vec<CReal>, ctx: &SolveContext) -> Result<Run> {
    let mut oracle = DigitOracle::new(sources);
    let solution = solver.solve(&mut oracle, ctx)?;
    Ok(Run { solution, queries: oracle.log().to_vec() })
}

fn spliced(family: &dyn Family, center: &[CReal], t: &Rational, k: u32) -> Result<Vec<CReal>> {
    let tail = family.path(t).params;
    Ok(center.iter().zip(&tail).map(|(p, q)| CReal::splice(p, q, k)).collect::<core::result::Result<_, _>>()?)
}

/// Builds a fooling pair for `solver` and measures its errors on both inputs.
pub fn fool_solver(family: &dyn Family, solver: &dyn Solver, config: &FoolingConfig) -> Result<FoolingReport> {
    if solver.family() != family.name() {
        return Err(AdversaryError::WrongFamily { family: family.name(), solver: solver.family() });
    }
    let kappa = family.kappa().approx(REPORT_LEVEL)?;
    let half_gap = &kappa / int(2);
    if config.tol <= Rational::zero() || config.tol >= half_gap {
        return Err(AdversaryError::ToleranceOutOfRange { tol: config.tol.clone() });
    }
    let center: Vec<CReal> = family.path_params(&CReal::zero()).iter().map(CReal::tight).collect();
    let center_run = run(solver, center.clone(), &context(config, None))?;
    let mut k = center_run.queries.iter().map(|q| q.level).max().unwrap_or(0);
    let guard = guard_bits(family);
    let mut retries = 0;
    let (below, above) = loop {
        let offset = pow2(-((k + guard) as i64));
        let mut outcomes = Vec::with_capacity(2);
        for (side, t) in [(Side::Below, -offset.clone()), (Side::Above, offset.clone())] {
            let r = run(solver, spliced(family, &center, &t, k)?, &context(config, Some(side)))?;
            outcomes.push((side, t, r));
        }
        let above = outcomes.pop().expect("two runs");
        let below = outcomes.pop().expect("two runs");
        if below.2.queries == above.2.queries || retries >= config.max_retries {
            break (below, above);
        }
        retries += 1;
        k = if k == 0 { 1 } else { 2 * k };
    };
    let prefix_identical = below.2.queries == above.2.queries;
    let outputs_identical = below.2.solution == above.2.solution;

    for (side, _, r) in [&below, &above] {
        let mut oracle = DigitOracle::replay(family.param_dim(), &r.queries);
        let again = solver.solve(&mut oracle, &context(config, Some(*side)))?;
        if again != r.solution {
            return Err(AdversaryError::ReplayMismatch { side: *side });
        }
    }

    let measure = |(side, t, r): (Side, Rational, Run)| -> Result<SideOutcome> {
        let opt = family.optimizers(&family.path(&t))?;
        let reduced = family.reduce_solution(&r.solution);
        let error = opt.distance_to_rational(&reduced, family.norm())?.approx(REPORT_LEVEL)?;
        Ok(SideOutcome {
            side,
            t,
            solution: r.solution,
            reduced,
            optimizers: opt.materialize(REPORT_LEVEL)?,
            error,
            queries: r.queries,
        })
    };
    let below = measure(below)?;
    let above = measure(above)?;
    let slack = pow2(2 - REPORT_LEVEL as i64);
    let max_error = below.error.clone().max(above.error.clone());
    let error_sum = &below.error + &above.error;
    let verdict = &max_error + &slack >= &half_gap - &config.tol;
    let sum_bound = &error_sum + &slack >= &kappa - int(2) * &config.tol;
    Ok(FoolingReport {
        family: family.name(),
        solver: solver.name(),
        config: config.clone(),
        kappa,
        consumed_precision: k,
        guard_bits: guard,
        retries,
        center_solution: center_run.solution,
        center_queries: center_run.queries,
        below,
        above,
        prefix_identical,
        outputs_identical,
        replay_identical: true,
        max_error,
        error_sum,
        verdict,
        sum_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{LpFamily, PortfolioFamily};
    use crate::solvers::{solver, ConstantSolver, CoverSolver, LpVertexSolver};

    #[test]
    fn vertex_solver_is_fooled() {
        let cfg = FoolingConfig { precision: 8, ..FoolingConfig::default() };
        let r = fool_solver(&LpFamily, &LpVertexSolver, &cfg).unwrap();
        assert!(r.verdict && r.sum_bound);
        assert_eq!(r.consumed_precision, 8);
        assert!(r.prefix_identical && r.outputs_identical && r.replay_identical);
        assert!(&r.above.t - &r.below.t <= pow2(2 - 8));
        assert!(r.max_error >= rat(499, 1000));
    }

    #[test]
    fn constant_solver_errs_by_half() {
        let r = fool_solver(&LpFamily, &ConstantSolver::lp_midpoint(), &FoolingConfig::default()).unwrap();
        assert_eq!(r.consumed_precision, 0);
        assert!(r.max_error >= rat(1, 2));
    }

    #[test]
    fn cover_is_fooled_at_alpha_one() {
        let r = fool_solver(&PortfolioFamily::default(), &CoverSolver::default(), &FoolingConfig::default()).unwrap();
        assert!(r.verdict && r.sum_bound);
    }

    #[test]
    fn cheating_reference_escapes() {
        let cheat = solver(FamilyName::Lp, "cheating-reference").unwrap();
        let r = fool_solver(&LpFamily, cheat.as_ref(), &FoolingConfig::default()).unwrap();
        assert!(!r.verdict);
        assert!(r.prefix_identical && !r.outputs_identical);
        assert!(r.below.error <= rat(1, 100) && r.above.error <= rat(1, 100));
    }

    #[test]
    fn tolerance_must_be_below_half_gap() {
        let cfg = FoolingConfig { tol: rat(1, 2), ..FoolingConfig::default() };
        assert!(matches!(fool_solver(&LpFamily, &LpVertexSolver, &cfg), Err(AdversaryError::ToleranceOutOfRange { .. })));
    }
}
