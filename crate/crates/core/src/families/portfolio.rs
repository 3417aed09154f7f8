//! Log-optimal portfolio over `n` equally likely outcomes.
//!
//! Outcome `i` (1-based) pays `i` on the first asset and `i * alpha` on the
//! second, with `alpha = 1 + t/2` along the path. Further assets, when
//! configured, pay a constant `pad_return < 1/2` and are never worth holding.
//! Parameters: the `n x m` outcome matrix row-major, then the `n`
//! probabilities.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Signed;

use super::brute::{grid_point, near_max, simplex_grid, unit_steps};
use super::{
    check_dim, check_template, Family, FamilyError, FamilyName, Instance, Location, Norm, OptimizerSet,
    Result, Sense, Side, StatedKappa,
};
use crate::computable::CReal;
use crate::rational::{int, pow2, rat, to_f64, Rational};

#[derive(Debug, Clone)]
pub struct PortfolioFamily {
    outcomes: usize,
    assets: usize,
    pad_return: Rational,
}

impl Default for PortfolioFamily {
    fn default() -> Self {
        Self { outcomes: 3, assets: 2, pad_return: rat(1, 4) }
    }
}

impl PortfolioFamily {
    pub fn new(outcomes: usize, assets: usize, pad_return: Rational) -> Result<Self> {
        if outcomes == 0 || assets < 2 {
            return Err(FamilyError::InvalidParameter("need at least one outcome and two assets".into()));
        }
        if !pad_return.is_positive() || pad_return >= rat(1, 2) {
            return Err(FamilyError::InvalidParameter("padding return must lie in (0, 1/2)".into()));
        }
        Ok(Self { outcomes, assets, pad_return })
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn assets(&self) -> usize {
        self.assets
    }

    fn unit(&self, asset: usize) -> Vec<CReal> {
        (0..self.assets).map(|j| if j == asset { CReal::one() } else { CReal::zero() }).collect()
    }

    fn template(&self) -> Vec<Option<Rational>> {
        let mut t = Vec::with_capacity(self.param_dim());
        for i in 1..=self.outcomes {
            t.push(Some(int(i as i64)));
            t.push(None);
            t.extend((2..self.assets).map(|_| Some(self.pad_return.clone())));
        }
        t.extend((0..self.outcomes).map(|_| Some(rat(1, self.outcomes as i64))));
        t
    }

    /// Splits parameters into outcome rows and probabilities.
    pub fn unpack<T: Clone>(&self, params: &[T]) -> (Vec<Vec<T>>, Vec<T>) {
        let m = self.assets;
        let rows = (0..self.outcomes).map(|i| params[i * m..(i + 1) * m].to_vec()).collect();
        (rows, params[self.outcomes * m..].to_vec())
    }
}

/// `sum_i p_i ln(b . x_i)`, in floating point.
pub(crate) fn log_wealth_f64(b: &[f64], rows: &[Vec<f64>], probs: &[f64]) -> f64 {
    rows.iter()
        .zip(probs)
        .map(|(x, p)| p * libm::log(x.iter().zip(b).map(|(xi, bi)| xi * bi).sum::<f64>()))
        .sum()
}

impl Family for PortfolioFamily {
    fn name(&self) -> FamilyName {
        FamilyName::Portfolio
    }

    fn solution_dim(&self) -> usize {
        self.assets
    }

    fn param_dim(&self) -> usize {
        self.outcomes * self.assets + self.outcomes
    }

    fn norm(&self) -> Norm {
        Norm::L1
    }

    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn path_lipschitz(&self) -> Rational {
        rat(self.outcomes as i64, 2)
    }

    fn path_params(&self, t: &CReal) -> Vec<CReal> {
        let alpha = &t.scale(&rat(1, 2)) + &CReal::one();
        let mut params = Vec::with_capacity(self.param_dim());
        for i in 1..=self.outcomes {
            params.push(CReal::from_int(i as i64));
            params.push(alpha.scale(&int(i as i64)));
            params.extend((2..self.assets).map(|_| CReal::from_rational(self.pad_return.clone())));
        }
        params.extend((0..self.outcomes).map(|_| CReal::from_rational(rat(1, self.outcomes as i64))));
        params
    }

    fn boundary_pair(&self, params: &[CReal]) -> Result<(CReal, CReal)> {
        check_dim(self.param_dim(), params.len())?;
        Ok((params[1].clone(), params[0].clone()))
    }

    fn optimizers_at(&self, location: Location, params: &[CReal]) -> Result<OptimizerSet> {
        check_dim(self.param_dim(), params.len())?;
        Ok(match location {
            Location::Side(Side::Below) => OptimizerSet::points(self.assets, vec![self.unit(0)]),
            Location::Side(Side::Above) => OptimizerSet::points(self.assets, vec![self.unit(1)]),
            Location::Boundary => OptimizerSet::segment(self.unit(0), self.unit(1)),
        })
    }

    fn objective(&self, x: &[Rational], params: &[CReal]) -> Result<CReal> {
        check_dim(self.assets, x.len())?;
        check_dim(self.param_dim(), params.len())?;
        let (rows, probs) = self.unpack(params);
        let mut total = CReal::zero();
        for (row, p) in rows.iter().zip(&probs) {
            let wealth = row.iter().zip(x).fold(CReal::zero(), |acc, (xi, bi)| &acc + &xi.scale(bi));
            let witness = wealth.approx(30)? - pow2(-30);
            if !witness.is_positive() {
                return Err(FamilyError::InvalidParameter("portfolio wealth must be positive".into()));
            }
            total = &total + &(p * &wealth.ln(&witness)?);
        }
        Ok(total)
    }

    fn check_slice(&self, params: &[CReal]) -> Result<()> {
        check_template(params, &self.template())?;
        let m = self.assets;
        if let Some(first) = params[1].as_rational() {
            for i in 1..=self.outcomes {
                if let Some(v) = params[(i - 1) * m + 1].as_rational() {
                    if *v != first * int(i as i64) {
                        return Err(FamilyError::Unsupported("second asset must pay i * alpha".into()));
                    }
                }
            }
        }
        if !params[1].approx(20)?.is_positive() {
            return Err(FamilyError::Unsupported("alpha must be positive".into()));
        }
        Ok(())
    }

    fn brute_force(&self, y: &Instance, resolution: &Rational) -> Result<Vec<Vec<Rational>>> {
        self.check_instance(y)?;
        let steps = unit_steps(resolution)?;
        let params: Vec<f64> = y.approx_params(64)?.iter().map(to_f64).collect();
        let (rows, probs) = self.unpack(&params);
        let grid = simplex_grid(self.assets, steps);
        let values: Vec<f64> = grid
            .iter()
            .map(|parts| {
                let b: Vec<f64> = parts.iter().map(|&k| k as f64 / steps as f64).collect();
                log_wealth_f64(&b, &rows, &probs)
            })
            .collect();
        Ok(near_max(&values, 1e-12).into_iter().map(|i| grid_point(&grid[i], steps)).collect())
    }

    fn kappa(&self) -> CReal {
        CReal::from_int(2)
    }

    fn stated_kappa(&self) -> StatedKappa {
        StatedKappa { text: "2", value: Some(CReal::from_int(2)) }
    }
}
