//! Maximize `x1` subject to `x1 >= 0`, `x1 + t*x2 <= 1`, `0 <= x2 <= 1`.
//!
//! Parameters are `c` (2), the 4x2 constraint matrix row-major (8) and the
//! right-hand side (4). The path moves the single entry `A[1][1] = t`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, ToPrimitive};

use super::{
    check_dim, check_template, Family, FamilyError, FamilyName, Instance, Location, Norm,
    OptimizerSet, Result, Sense, Side, StatedKappa,
};
use crate::computable::CReal;
use crate::rational::{int, Rational};

/// Index of the moving constraint entry.
pub(crate) const MOVING_ENTRY: usize = 5;
const PARAMS: usize = 14;

#[derive(Debug, Clone, Copy, Default)]
pub struct LpFamily;

fn template() -> [Option<Rational>; PARAMS] {
    let fixed = |v: i64| Some(int(v));
    [
        fixed(1),
        fixed(0),
        fixed(-1),
        fixed(0),
        fixed(1),
        None,
        fixed(0),
        fixed(-1),
        fixed(0),
        fixed(1),
        fixed(0),
        fixed(1),
        fixed(0),
        fixed(1),
    ]
}

/// Splits a parameter vector into objective, constraint rows and bounds.
pub(crate) fn unpack(params: &[Rational]) -> ([Rational; 2], Vec<[Rational; 2]>, Vec<Rational>) {
    let c = [params[0].clone(), params[1].clone()];
    let rows = (0..4).map(|i| [params[2 + 2 * i].clone(), params[3 + 2 * i].clone()]).collect();
    let bounds = params[10..14].to_vec();
    (c, rows, bounds)
}

/// Feasible interval of `x1` for fixed `x2`; the region is bounded in `x1`.
fn column_range(rows: &[[Rational; 2]], bounds: &[Rational], x2: &Rational) -> Option<(Rational, Rational)> {
    let mut lower: Option<Rational> = None;
    let mut upper: Option<Rational> = None;
    for (a, b) in rows.iter().zip(bounds) {
        let rest = b - &a[1] * x2;
        if a[0].is_positive() {
            let v = rest / &a[0];
            upper = Some(upper.map_or(v.clone(), |u| u.min(v)));
        } else if a[0].is_negative() {
            let v = rest / &a[0];
            lower = Some(lower.map_or(v.clone(), |l| l.max(v)));
        } else if rest.is_negative() {
            return None;
        }
    }
    let (lower, upper) = (lower?, upper?);
    (lower <= upper).then_some((lower, upper))
}

impl Family for LpFamily {
    fn name(&self) -> FamilyName {
        FamilyName::Lp
    }

    fn solution_dim(&self) -> usize {
        2
    }

    fn param_dim(&self) -> usize {
        PARAMS
    }

    fn norm(&self) -> Norm {
        Norm::L2
    }

    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn path_lipschitz(&self) -> Rational {
        int(1)
    }

    fn path_params(&self, t: &CReal) -> Vec<CReal> {
        template()
            .into_iter()
            .map(|entry| entry.map_or_else(|| t.clone(), CReal::from_rational))
            .collect()
    }

    fn boundary_pair(&self, params: &[CReal]) -> Result<(CReal, CReal)> {
        check_dim(PARAMS, params.len())?;
        Ok((params[MOVING_ENTRY].clone(), CReal::zero()))
    }

    fn optimizers_at(&self, location: Location, params: &[CReal]) -> Result<OptimizerSet> {
        check_dim(PARAMS, params.len())?;
        let one = CReal::one();
        Ok(match location {
            Location::Side(Side::Above) => OptimizerSet::points(2, vec![vec![one, CReal::zero()]]),
            Location::Side(Side::Below) => {
                OptimizerSet::points(2, vec![vec![&one - &params[MOVING_ENTRY], one]])
            }
            Location::Boundary => OptimizerSet::segment(vec![one.clone(), CReal::zero()], vec![one.clone(), one]),
        })
    }

    fn objective(&self, x: &[Rational], params: &[CReal]) -> Result<CReal> {
        check_dim(2, x.len())?;
        check_dim(PARAMS, params.len())?;
        Ok(&params[0].scale(&x[0]) + &params[1].scale(&x[1]))
    }

    fn check_slice(&self, params: &[CReal]) -> Result<()> {
        check_template(params, &template())
    }

    /// Sweeps `x2` over the grid and maximizes over `x1` exactly in each
    /// column, so that flat faces do not smear the argmax along the grid.
    fn brute_force(&self, y: &Instance, resolution: &Rational) -> Result<Vec<Vec<Rational>>> {
        self.check_instance(y)?;
        if !resolution.is_positive() {
            return Err(FamilyError::NonPositiveResolution);
        }
        let params = y.approx_params(64)?;
        let (c, rows, bounds) = unpack(&params);
        let columns = (int(1) / resolution).floor().to_i64().unwrap_or(0);
        let mut best: Option<Rational> = None;
        let mut argmax = Vec::new();
        for j in 0..=columns {
            let x2 = resolution * int(j);
            let Some((lower, upper)) = column_range(&rows, &bounds, &x2) else { continue };
            let x1 = if c[0].is_negative() { lower } else { upper };
            let value = &c[0] * &x1 + &c[1] * &x2;
            let x = vec![x1, x2];
            match &best {
                Some(b) if value < *b => {}
                Some(b) if value == *b => argmax.push(x),
                _ => {
                    best = Some(value);
                    argmax = vec![x];
                }
            }
        }
        if argmax.is_empty() {
            return Err(FamilyError::Unsupported("no feasible grid column".into()));
        }
        Ok(argmax)
    }

    fn kappa(&self) -> CReal {
        CReal::one()
    }

    fn stated_kappa(&self) -> StatedKappa {
        StatedKappa { text: "1", value: Some(CReal::one()) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::computable::ComparisonVerdict;
    use crate::rational::rat;

    #[test]
    fn objective_at_known_optimizer() {
        let y = LpFamily.path(&rat(1, 2));
        let v = LpFamily.objective(&[int(1), int(0)], &y.params).unwrap();
        assert_eq!(v.as_rational(), Some(&int(1)));
    }

    #[test]
    fn optimizers_on_each_side() {
        let below = LpFamily.optimizers(&LpFamily.path(&rat(-1, 2))).unwrap();
        let pts = below.materialize(10).unwrap();
        assert_eq!(pts, vec![super::super::optset::RationalPiece::Point(vec![rat(3, 2), int(1)])]);
        let above = LpFamily.optimizers(&LpFamily.path(&rat(1, 2))).unwrap();
        assert_eq!(above.materialize(0).unwrap(), vec![super::super::optset::RationalPiece::Point(vec![int(1), int(0)])]);
        assert!(!LpFamily.optimizers(&LpFamily.path(&int(0))).unwrap().is_finite());
    }

    #[test]
    fn membership_reads_moving_entry() {
        use crate::computable::Precision;
        let f = LpFamily;
        assert_eq!(f.membership(&f.path(&rat(-1, 4)), Precision(4)).unwrap(), ComparisonVerdict::Below);
        assert_eq!(f.membership(&f.path(&rat(1, 4)), Precision(4)).unwrap(), ComparisonVerdict::Above);
        assert_eq!(f.membership(&f.path(&rat(1, 1024)), Precision(4)).unwrap(), ComparisonVerdict::Unknown);
    }

    #[test]
    fn oracle_over_boundary_reads_zero() {
        use crate::computable::DigitOracle;
        let mut oracle = DigitOracle::new(LpFamily.path(&int(0)).params);
        let q = oracle.query(MOVING_ENTRY, 4).unwrap();
        assert!(q.abs() <= rat(1, 16));
    }

    #[test]
    fn off_slice_instance_rejected() {
        let mut y = LpFamily.path(&rat(1, 2));
        y.params[0] = CReal::from_int(2);
        assert!(matches!(LpFamily.optimizers(&y), Err(FamilyError::Unsupported(_))));
    }

    #[test]
    fn brute_force_finds_vertex() {
        let pts = LpFamily.brute_force(&LpFamily.path(&rat(1, 2)), &rat(1, 64)).unwrap();
        assert_eq!(pts, vec![vec![int(1), int(0)]]);
        let seg = LpFamily.brute_force(&LpFamily.path(&int(0)), &rat(1, 64)).unwrap();
        assert_eq!(seg.len(), 65);
        let tilted = LpFamily.brute_force(&LpFamily.path(&rat(-1, 5)), &rat(1, 64)).unwrap();
        assert_eq!(tilted, vec![vec![rat(6, 5), int(1)]]);
    }
}
