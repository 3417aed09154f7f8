//! Full-batch subgradient descent on the squared loss of the three-neuron
//! ReLU network, with the ReLU derivative at zero taken as zero.

use alloc::vec::Vec;

use num_traits::Signed;

use super::{round_vector, IterationTrace, Result, SolveContext, Solver, SolverError};
use crate::computable::DigitOracle;
use crate::families::{Dataset, FamilyName, NnWeights};
use crate::rational::{int, rat, Rational};

/// Subgradient of the squared loss with respect to the flat weights.
pub fn loss_gradient(data: &Dataset, w: &NnWeights) -> Vec<Rational> {
    let mut grad = alloc::vec![int(0); 9];
    for (x, y) in data.inputs.iter().zip(&data.targets) {
        let pre: Vec<Rational> = w.rows.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect();
        let out: Rational = pre.iter().filter(|v| v.is_positive()).sum();
        let residual = int(2) * (out - y);
        for (i, p) in pre.iter().enumerate() {
            if p.is_positive() {
                for j in 0..3 {
                    grad[3 * i + j] += &residual * &x[j];
                }
            }
        }
    }
    grad
}

/// Weight iterates, starting with `init`.
pub fn nn_gd_train(
    data: &Dataset,
    init: &NnWeights,
    steps: u32,
    learning_rate: &Rational,
    round_bits: u32,
) -> Result<Vec<NnWeights>> {
    if !learning_rate.is_positive() {
        return Err(SolverError::NonPositiveLearningRate);
    }
    let mut iterates = Vec::with_capacity(steps as usize + 1);
    iterates.push(init.clone());
    for _ in 0..steps {
        let w = iterates.last().expect("nonempty");
        let grad = loss_gradient(data, w);
        let next: Vec<Rational> = w.flat().iter().zip(&grad).map(|(a, g)| a - learning_rate * g).collect();
        iterates.push(NnWeights::from_flat(&round_vector(&next, round_bits))?);
    }
    Ok(iterates)
}

/// Weight iterates with their exact losses.
pub fn nn_gd_trace(
    data: &Dataset,
    init: &NnWeights,
    steps: u32,
    learning_rate: &Rational,
    round_bits: u32,
) -> Result<IterationTrace> {
    let iterates = nn_gd_train(data, init, steps, learning_rate, round_bits)?;
    IterationTrace::from_iterates(iterates.iter().map(NnWeights::flat).collect(), |w| {
        Ok(data.loss(&NnWeights::from_flat(w)?))
    })
}

/// Reads the dataset once and trains from a fixed initialization.
#[derive(Debug, Clone)]
pub struct GradientDescentSolver {
    pub init: NnWeights,
    pub learning_rate: Rational,
}

impl Default for GradientDescentSolver {
    fn default() -> Self {
        let row = |a: i64, b: i64| [int(a), int(b), int(0)];
        Self { init: NnWeights { rows: [row(1, 1), row(-1, 1), row(0, -2)] }, learning_rate: rat(1, 1000) }
    }
}

impl Solver for GradientDescentSolver {
    fn name(&self) -> &'static str {
        "gd"
    }

    fn family(&self) -> FamilyName {
        FamilyName::Nn
    }

    fn solve(&self, oracle: &mut DigitOracle, ctx: &SolveContext) -> Result<Vec<Rational>> {
        let params = oracle.query_all(ctx.precision)?;
        let data = Dataset::from_params(&params)?;
        let iterates = nn_gd_train(&data, &self.init, ctx.iterations, &self.learning_rate, ctx.round_bits)?;
        Ok(iterates.last().expect("nonempty").flat())
    }
}
