//! Blahut-Arimoto capacity iteration:
//! `p_x <- p_x exp(D(W_x || q)) / Z` with `q = W p`.

use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use super::{check_init, round_simplex, uniform, IterationTrace, Result, SolveContext, Solver, SolverError, TRACE_LEVEL};
use crate::computable::{CReal, DigitOracle};
use crate::families::{mutual_information, FamilyName, StochasticMatrix};
use crate::rational::{int, Rational};

fn step(w: &StochasticMatrix, p: &[Rational], round_bits: u32) -> Result<Vec<Rational>> {
    let q = w.output_distribution(p);
    let level = round_bits + 8;
    let mut weights = Vec::with_capacity(p.len());
    for (x, px) in p.iter().enumerate() {
        if px.is_zero() {
            weights.push(Rational::zero());
            continue;
        }
        let mut divergence = CReal::zero();
        for (y, qy) in q.iter().enumerate() {
            let wyx = w.entry(y, x);
            if wyx.is_zero() {
                continue;
            }
            divergence = &divergence + &CReal::ln_rational(&(wyx / qy))?.scale(wyx);
        }
        weights.push(px * divergence.exp().approx(level)?);
    }
    let total: Rational = weights.iter().sum();
    let next: Vec<Rational> = weights.iter().map(|v| v / &total).collect();
    Ok(round_simplex(&next, round_bits))
}

/// Iterates of the capacity iteration, starting with `init`.
pub fn blahut_arimoto(
    w: &StochasticMatrix,
    iterations: u32,
    init: &[Rational],
    round_bits: u32,
) -> Result<Vec<Vec<Rational>>> {
    check_init(init, w.inputs())?;
    let mut iterates = Vec::with_capacity(iterations as usize + 1);
    iterates.push(init.to_vec());
    for _ in 0..iterations {
        let next = step(w, iterates.last().expect("nonempty"), round_bits)?;
        iterates.push(next);
    }
    Ok(iterates)
}

/// Iterates with their mutual information in bits.
pub fn blahut_arimoto_trace(
    w: &StochasticMatrix,
    iterations: u32,
    init: &[Rational],
    round_bits: u32,
) -> Result<IterationTrace> {
    let iterates = blahut_arimoto(w, iterations, init, round_bits)?;
    IterationTrace::from_iterates(iterates, |p| Ok(mutual_information(p, w)?.approx(TRACE_LEVEL)?))
}

/// Clamps read entries into a column-stochastic matrix.
pub(crate) fn sanitize(outputs: usize, inputs: usize, raw: &[Rational]) -> Result<StochasticMatrix> {
    let mut entries: Vec<Rational> = raw.iter().map(|v| if v.is_negative() { Rational::zero() } else { v.clone() }).collect();
    for x in 0..inputs {
        let sum: Rational = (0..outputs).map(|y| &entries[y * inputs + x]).sum();
        for y in 0..outputs {
            let e = &mut entries[y * inputs + x];
            *e = if sum.is_zero() { int(1) / int(outputs as i64) } else { &*e / &sum };
        }
    }
    Ok(StochasticMatrix::new(outputs, inputs, entries)?)
}

/// Reads the channel once and runs the iteration from the uniform input.
#[derive(Debug, Clone, Copy)]
pub struct BlahutArimotoSolver {
    pub outputs: usize,
    pub inputs: usize,
}

impl Default for BlahutArimotoSolver {
    fn default() -> Self {
        Self { outputs: 2, inputs: 3 }
    }
}

impl Solver for BlahutArimotoSolver {
    fn name(&self) -> &'static str {
        "blahut-arimoto"
    }

    fn family(&self) -> FamilyName {
        FamilyName::Channel
    }

    fn solve(&self, oracle: &mut DigitOracle, ctx: &SolveContext) -> Result<Vec<Rational>> {
        if ctx.iterations == 0 {
            return Err(SolverError::ZeroBudget);
        }
        let raw = oracle.query_all(ctx.precision)?;
        let w = sanitize(self.outputs, self.inputs, &raw)?;
        let iterates = blahut_arimoto(&w, ctx.iterations, &uniform(self.inputs), ctx.round_bits)?;
        Ok(iterates.into_iter().last().expect("nonempty"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{pow2, rat};

    fn boundary_channel() -> StochasticMatrix {
        StochasticMatrix::new(2, 3, [1, 0, 0, 0, 1, 1].map(int).to_vec()).unwrap()
    }

    #[test]
    fn identity_channel_carries_one_bit() {
        let w = StochasticMatrix::new(2, 2, [1, 0, 0, 1].map(int).to_vec()).unwrap();
        let trace = blahut_arimoto_trace(&w, 3, &[rat(1, 2), rat(1, 2)], 64).unwrap();
        let last = trace.last().unwrap();
        assert_eq!(last.solution, [rat(1, 2), rat(1, 2)]);
        assert!((&last.value - int(1)).abs() <= pow2(-40));
    }

    #[test]
    fn boundary_channel_one_step_from_uniform() {
        let iterates = blahut_arimoto(&boundary_channel(), 1, &uniform(3), 64).unwrap();
        assert_eq!(iterates[1], [rat(1, 2), rat(1, 4), rat(1, 4)]);
    }

    #[test]
    fn values_are_monotone() {
        let w = StochasticMatrix::new(2, 3, [rat(9, 10), rat(1, 5), rat(1, 2), rat(1, 10), rat(4, 5), rat(1, 2)].to_vec())
            .unwrap();
        let init = [rat(1, 2), rat(1, 4), rat(1, 4)];
        let trace = blahut_arimoto_trace(&w, 20, &init, 64).unwrap();
        assert!(trace.is_nondecreasing());
    }

    #[test]
    fn zero_init_rejected() {
        let err = blahut_arimoto(&boundary_channel(), 1, &[rat(1, 2), rat(1, 2), int(0)], 64).unwrap_err();
        assert_eq!(err, SolverError::ZeroInitEntry { index: 2 });
    }

    #[test]
    fn sanitize_repairs_rounded_columns() {
        let raw = [rat(17, 16), rat(-1, 64), int(0), int(0), int(1), int(1)];
        let w = sanitize(2, 3, &raw).unwrap();
        assert_eq!(w.entry(0, 0), &int(1));
        assert_eq!(w.entry(0, 1), &int(0));
    }
}
