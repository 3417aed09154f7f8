//! Two-variable linear programs `max c.x` subject to `A x <= b`, solved by
//! enumerating basic feasible points.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use super::{Result, SolveContext, Solver, SolverError};
use crate::computable::DigitOracle;
use crate::families::FamilyName;
use crate::rational::Rational;

fn dot(a: &[Rational; 2], x: &[Rational; 2]) -> Rational {
    &a[0] * &x[0] + &a[1] * &x[1]
}

/// Optimal vertex, the lexicographically smallest among ties.
pub fn lp_vertex_solve(c: &[Rational; 2], rows: &[[Rational; 2]], bounds: &[Rational]) -> Result<[Rational; 2]> {
    if rows.len() != bounds.len() {
        return Err(SolverError::DimensionMismatch { expected: rows.len(), got: bounds.len() });
    }
    let feasible = |x: &[Rational; 2]| rows.iter().zip(bounds).all(|(a, b)| dot(a, x) <= *b);
    let mut vertices: Vec<[Rational; 2]> = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (a, b) = (&rows[i], &rows[j]);
            let det = &a[0] * &b[1] - &a[1] * &b[0];
            if det.is_zero() {
                continue;
            }
            let x = [
                (&bounds[i] * &b[1] - &a[1] * &bounds[j]) / &det,
                (&a[0] * &bounds[j] - &bounds[i] * &b[0]) / &det,
            ];
            if feasible(&x) {
                vertices.push(x);
            }
        }
    }
    if vertices.is_empty() {
        return Err(SolverError::Infeasible);
    }
    let mut rays: Vec<[Rational; 2]> = vec![c.clone()];
    for a in rows {
        rays.push([-&a[1], a[0].clone()]);
        rays.push([a[1].clone(), -&a[0]]);
    }
    let recedes = |d: &[Rational; 2]| rows.iter().all(|a| !dot(a, d).is_positive());
    if rays.iter().any(|d| (!d[0].is_zero() || !d[1].is_zero()) && recedes(d) && dot(c, d).is_positive()) {
        return Err(SolverError::Unbounded);
    }
    let best = vertices
        .into_iter()
        .min_by(|x, y| dot(c, y).cmp(&dot(c, x)).then_with(|| x.cmp(y)))
        .expect("nonempty");
    Ok(best)
}

/// Reads the whole program at the context precision and solves it exactly.
#[derive(Debug, Clone, Copy, Default)]
pub struct LpVertexSolver;

impl Solver for LpVertexSolver {
    fn name(&self) -> &'static str {
        "vertex"
    }

    fn family(&self) -> FamilyName {
        FamilyName::Lp
    }

    fn solve(&self, oracle: &mut DigitOracle, ctx: &SolveContext) -> Result<Vec<Rational>> {
        let p = oracle.query_all(ctx.precision)?;
        if p.len() != 14 {
            return Err(SolverError::DimensionMismatch { expected: 14, got: p.len() });
        }
        let c = [p[0].clone(), p[1].clone()];
        let rows: Vec<[Rational; 2]> = (0..4).map(|i| [p[2 + 2 * i].clone(), p[3 + 2 * i].clone()]).collect();
        Ok(lp_vertex_solve(&c, &rows, &p[10..14])?.to_vec())
    }
}
