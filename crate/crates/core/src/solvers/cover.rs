//! Cover's multiplicative update for the log-optimal portfolio:
//! `b_i <- b_i E[X_i / (b . X)]`.

use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use super::{check_init, round_simplex, uniform, IterationTrace, Result, SolveContext, Solver, SolverError, TRACE_LEVEL};
use crate::computable::{CReal, DigitOracle};
use crate::families::{FamilyError, FamilyName, PortfolioFamily};
use crate::rational::{pow2, Rational};

fn wealth(b: &[Rational], row: &[Rational]) -> Rational {
    b.iter().zip(row).map(|(x, y)| x * y).sum()
}

fn check_market(rows: &[Vec<Rational>], probs: &[Rational], assets: usize) -> Result<()> {
    if rows.len() != probs.len() {
        return Err(SolverError::DimensionMismatch { expected: rows.len(), got: probs.len() });
    }
    if let Some(row) = rows.iter().find(|r| r.len() != assets) {
        return Err(SolverError::DimensionMismatch { expected: assets, got: row.len() });
    }
    if rows.iter().flatten().any(Signed::is_negative) || probs.iter().any(Signed::is_negative) {
        return Err(FamilyError::InvalidParameter("returns and probabilities must be nonnegative".into()).into());
    }
    Ok(())
}

/// Iterates of the update, starting with `init`.
pub fn cover_portfolio(
    rows: &[Vec<Rational>],
    probs: &[Rational],
    iterations: u32,
    init: &[Rational],
    round_bits: u32,
) -> Result<Vec<Vec<Rational>>> {
    check_init(init, rows.first().map_or(0, Vec::len))?;
    check_market(rows, probs, init.len())?;
    let mut iterates = Vec::with_capacity(iterations as usize + 1);
    iterates.push(init.to_vec());
    for _ in 0..iterations {
        let b = iterates.last().expect("nonempty");
        let wealths: Vec<Rational> = rows.iter().map(|r| wealth(b, r)).collect();
        if wealths.iter().zip(probs).any(|(w, p)| w.is_zero() && p.is_positive()) {
            return Err(FamilyError::InvalidParameter("portfolio wealth vanishes on an outcome".into()).into());
        }
        let next: Vec<Rational> = (0..b.len())
            .map(|i| {
                let ratio: Rational = rows
                    .iter()
                    .zip(&wealths)
                    .zip(probs)
                    .filter(|(_, p)| p.is_positive())
                    .map(|((r, w), p)| p * &r[i] / w)
                    .sum();
                &b[i] * ratio
            })
            .collect();
        iterates.push(round_simplex(&next, round_bits));
    }
    Ok(iterates)
}

/// `E[ln(b . X)]` for a positive-wealth portfolio.
fn log_wealth(b: &[Rational], rows: &[Vec<Rational>], probs: &[Rational]) -> Result<CReal> {
    let mut total = CReal::zero();
    for (row, p) in rows.iter().zip(probs) {
        if p.is_zero() {
            continue;
        }
        total = &total + &CReal::ln_rational(&wealth(b, row))?.scale(p);
    }
    Ok(total)
}

/// Iterates with their expected log-wealth in nats.
pub fn cover_portfolio_trace(
    rows: &[Vec<Rational>],
    probs: &[Rational],
    iterations: u32,
    init: &[Rational],
    round_bits: u32,
) -> Result<IterationTrace> {
    let iterates = cover_portfolio(rows, probs, iterations, init, round_bits)?;
    IterationTrace::from_iterates(iterates, |b| Ok(log_wealth(b, rows, probs)?.approx(TRACE_LEVEL)?))
}

/// Reads the market once and iterates from the uniform portfolio.
#[derive(Debug, Clone, Default)]
pub struct CoverSolver {
    pub market: PortfolioFamily,
}

impl Solver for CoverSolver {
    fn name(&self) -> &'static str {
        "cover"
    }

    fn family(&self) -> FamilyName {
        FamilyName::Portfolio
    }

    fn solve(&self, oracle: &mut DigitOracle, ctx: &SolveContext) -> Result<Vec<Rational>> {
        if ctx.iterations == 0 {
            return Err(SolverError::ZeroBudget);
        }
        let raw = oracle.query_all(ctx.precision)?;
        let floor = pow2(-(ctx.precision as i64));
        let raw: Vec<Rational> = raw.into_iter().map(|v| if v < floor { floor.clone() } else { v }).collect();
        let (rows, probs) = self.market.unpack(&raw);
        let iterates = cover_portfolio(&rows, &probs, ctx.iterations, &uniform(self.market.assets()), ctx.round_bits)?;
        Ok(iterates.into_iter().last().expect("nonempty"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn market(alpha: Rational) -> (Vec<Vec<Rational>>, Vec<Rational>) {
        let rows = (1..=3).map(|i| alloc::vec![int(i), &alpha * int(i)]).collect();
        (rows, alloc::vec![rat(1, 3); 3])
    }

    fn l1(a: &[Rational], b: &[Rational]) -> Rational {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
    }

    #[test]
    fn alpha_two_converges_to_second_asset() {
        let (rows, probs) = market(int(2));
        let it = cover_portfolio(&rows, &probs, 200, &uniform(2), 128).unwrap();
        assert!(l1(it.last().unwrap(), &[int(0), int(1)]) <= rat(1, 100));
    }

    #[test]
    fn alpha_half_converges_to_first_asset() {
        let (rows, probs) = market(rat(1, 2));
        let it = cover_portfolio(&rows, &probs, 200, &uniform(2), 128).unwrap();
        assert!(l1(it.last().unwrap(), &[int(1), int(0)]) <= rat(1, 100));
    }

    #[test]
    fn alpha_one_is_a_fixed_point() {
        let (rows, probs) = market(int(1));
        let init = [rat(1, 5), rat(4, 5)];
        let it = cover_portfolio(&rows, &probs, 10, &init, 128).unwrap();
        assert!(it.iter().all(|b| b == &init));
    }

    #[test]
    fn log_wealth_is_monotone() {
        let (rows, probs) = market(rat(3, 2));
        let trace = cover_portfolio_trace(&rows, &probs, 15, &[rat(9, 10), rat(1, 10)], 96).unwrap();
        assert!(trace.is_nondecreasing());
    }

    #[test]
    fn zero_init_rejected() {
        let (rows, probs) = market(int(2));
        assert_eq!(
            cover_portfolio(&rows, &probs, 1, &[int(0), int(1)], 64).unwrap_err(),
            SolverError::ZeroInitEntry { index: 0 }
        );
    }
}
