//! Fitting a three-neuron ReLU network `x -> sum_i relu(<w_i, x>)` to one of
//! two 14-point datasets by least squares.
//!
//! With `eps = |t|/100`, the dataset for `t < 0` is fit exactly by the rows
//! `(1, 1, eps/2)`, `(-1, 1, eps/3)`, `(0, -2, eps/6)` and by nothing else
//! up to row order; the dataset for `t > 0` by the negated rows. At `t = 0`
//! every input has the form `(0, 0, z)` and every target is zero.
//! Parameters: for each point its three coordinates followed by its target.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Signed;

use super::brute::unit_steps;
use super::{
    check_dim, Family, FamilyError, FamilyName, Instance, Location, Norm, OptimizerSet, Piece, Result,
    Sense, Side, StatedKappa,
};
use crate::computable::CReal;
use crate::rational::{int, rat, to_f64, Rational};

pub const DATASET_SIZE: usize = 14;

/// Third input coordinate of each point; the first seven have inputs
/// `(eps, 0, z)`, the last seven `(0, eps, z)`.
fn heights() -> [Rational; DATASET_SIZE] {
    [
        int(-4),
        int(-2),
        int(-1),
        int(0),
        int(1),
        int(3),
        int(6),
        int(-6),
        int(-3),
        rat(-5, 2),
        int(-2),
        int(6),
        int(12),
        int(18),
    ]
}

/// Targets as multiples of `eps`, for the `t < 0` and `t > 0` datasets.
fn target_factors(side: Side) -> [Rational; DATASET_SIZE] {
    match side {
        Side::Below => [
            int(0),
            int(0),
            rat(1, 2),
            int(1),
            rat(5, 3),
            int(3),
            int(6),
            int(0),
            int(0),
            rat(1, 6),
            rat(1, 3),
            int(7),
            int(12),
            int(18),
        ],
        Side::Above => [
            int(4),
            int(2),
            rat(3, 2),
            int(1),
            rat(2, 3),
            int(0),
            int(0),
            int(6),
            int(3),
            rat(8, 3),
            rat(7, 3),
            int(1),
            int(0),
            int(0),
        ],
    }
}

/// Hidden-layer weights, one row per neuron.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NnWeights {
    pub rows: [[Rational; 3]; 3],
}

impl NnWeights {
    pub fn from_flat(w: &[Rational]) -> Result<Self> {
        check_dim(9, w.len())?;
        let row = |i: usize| [w[3 * i].clone(), w[3 * i + 1].clone(), w[3 * i + 2].clone()];
        Ok(Self { rows: [row(0), row(1), row(2)] })
    }

    pub fn flat(&self) -> Vec<Rational> {
        self.rows.iter().flatten().cloned().collect()
    }

    pub fn permuted(&self, order: [usize; 3]) -> Self {
        Self { rows: order.map(|i| self.rows[i].clone()) }
    }
}

/// All six row orders.
pub(crate) const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// The exact-fit weights for the dataset on `side` at scale `eps`.
pub fn gamma_weights(eps: &Rational, side: Side) -> NnWeights {
    let sign = match side {
        Side::Below => int(1),
        Side::Above => int(-1),
    };
    let row = |a: i64, b: i64, c: Rational| [&sign * int(a), &sign * int(b), &sign * c * eps];
    NnWeights { rows: [row(1, 1, rat(1, 2)), row(-1, 1, rat(1, 3)), row(0, -2, rat(1, 6))] }
}

pub fn nn_realize(w: &NnWeights, x: &[Rational; 3]) -> Rational {
    w.rows
        .iter()
        .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum::<Rational>())
        .filter(|v| v.is_positive())
        .sum()
}

/// Inputs and targets of a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub inputs: Vec<[Rational; 3]>,
    pub targets: Vec<Rational>,
}

impl Dataset {
    /// The exact dataset on `side` with scale `eps`.
    pub fn constructed(eps: &Rational, side: Side) -> Self {
        let inputs = heights()
            .into_iter()
            .enumerate()
            .map(|(k, z)| if k < 7 { [eps.clone(), int(0), z] } else { [int(0), eps.clone(), z] })
            .collect();
        let targets = target_factors(side).iter().map(|f| f * eps).collect();
        Self { inputs, targets }
    }

    /// Reads points from a flat parameter vector.
    pub fn from_params(params: &[Rational]) -> Result<Self> {
        if !params.len().is_multiple_of(4) {
            return Err(FamilyError::DimensionMismatch { expected: params.len() / 4 * 4, got: params.len() });
        }
        let (inputs, targets) = params
            .chunks(4)
            .map(|c| ([c[0].clone(), c[1].clone(), c[2].clone()], c[3].clone()))
            .unzip();
        Ok(Self { inputs, targets })
    }

    /// Sum of squared residuals.
    pub fn loss(&self, w: &NnWeights) -> Rational {
        self.inputs
            .iter()
            .zip(&self.targets)
            .map(|(x, y)| {
                let r = nn_realize(w, x) - y;
                &r * &r
            })
            .sum()
    }

    pub(crate) fn loss_f64(&self, w: &[f64]) -> f64 {
        self.inputs
            .iter()
            .zip(&self.targets)
            .map(|(x, y)| {
                let x: Vec<f64> = x.iter().map(to_f64).collect();
                let out: f64 = (0..3)
                    .map(|i| (0..3).map(|j| w[3 * i + j] * x[j]).sum::<f64>())
                    .filter(|v| *v > 0.0)
                    .sum();
                let r = out - to_f64(y);
                r * r
            })
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NnFamily {
    points: usize,
}

impl Default for NnFamily {
    fn default() -> Self {
        Self { points: DATASET_SIZE }
    }
}

impl NnFamily {
    /// A family whose datasets have `points >= 14` entries, repeating the
    /// constructed points cyclically.
    pub fn new(points: usize) -> Result<Self> {
        if points < DATASET_SIZE {
            return Err(FamilyError::InvalidParameter("datasets need at least 14 points".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    fn eps_of(params: &[CReal]) -> CReal {
        params[0].clone()
    }

    fn orbit(&self, eps: &CReal, side: Side) -> OptimizerSet {
        let sign = match side {
            Side::Below => int(1),
            Side::Above => int(-1),
        };
        let entry = |v: i64| CReal::from_rational(&sign * int(v));
        let rows = [
            [entry(1), entry(1), eps.scale(&(&sign * rat(1, 2)))],
            [entry(-1), entry(1), eps.scale(&(&sign * rat(1, 3)))],
            [entry(0), entry(-2), eps.scale(&(&sign * rat(1, 6)))],
        ];
        let points = PERMUTATIONS
            .iter()
            .map(|order| order.iter().flat_map(|&i| rows[i].iter().cloned()).collect())
            .collect();
        OptimizerSet::points(9, points)
    }
}

impl Family for NnFamily {
    fn name(&self) -> FamilyName {
        FamilyName::Nn
    }

    fn solution_dim(&self) -> usize {
        9
    }

    fn param_dim(&self) -> usize {
        4 * self.points
    }

    fn norm(&self) -> Norm {
        Norm::L1
    }

    fn sense(&self) -> Sense {
        Sense::Minimize
    }

    fn path_lipschitz(&self) -> Rational {
        rat(18, 100)
    }

    fn path_params(&self, t: &CReal) -> Vec<CReal> {
        let neg = (-t).max(&CReal::zero()).scale(&rat(1, 100));
        let pos = t.max(&CReal::zero()).scale(&rat(1, 100));
        let eps = &neg + &pos;
        let (below, above) = (target_factors(Side::Below), target_factors(Side::Above));
        let h = heights();
        let mut params = Vec::with_capacity(self.param_dim());
        for k in (0..DATASET_SIZE).cycle().take(self.points) {
            if k < 7 {
                params.extend([eps.clone(), CReal::zero()]);
            } else {
                params.extend([CReal::zero(), eps.clone()]);
            }
            params.push(CReal::from_rational(h[k].clone()));
            params.push(&neg.scale(&below[k]) + &pos.scale(&above[k]));
        }
        params
    }

    fn boundary_pair(&self, params: &[CReal]) -> Result<(CReal, CReal)> {
        check_dim(self.param_dim(), params.len())?;
        Ok((params[3].clone(), params[4 * 6 + 3].clone()))
    }

    fn optimizers_at(&self, location: Location, params: &[CReal]) -> Result<OptimizerSet> {
        check_dim(self.param_dim(), params.len())?;
        let eps = Self::eps_of(params);
        Ok(match location {
            Location::Side(side) => self.orbit(&eps, side),
            Location::Boundary => OptimizerSet::new(
                9,
                vec![Piece::Flat { fixed: vec![(2, CReal::zero()), (5, CReal::zero()), (8, CReal::zero())] }],
            ),
        })
    }

    fn objective(&self, x: &[Rational], params: &[CReal]) -> Result<CReal> {
        check_dim(9, x.len())?;
        check_dim(self.param_dim(), params.len())?;
        let mut total = CReal::zero();
        for point in params.chunks(4) {
            let mut out = CReal::zero();
            for row in x.chunks(3) {
                let pre = (0..3).fold(CReal::zero(), |acc, j| &acc + &point[j].scale(&row[j]));
                out = &out + &pre.max(&CReal::zero());
            }
            let r = &out - &point[3];
            total = &total + &(&r * &r);
        }
        Ok(total)
    }

    fn check_slice(&self, params: &[CReal]) -> Result<()> {
        check_dim(self.param_dim(), params.len())?;
        let h = heights();
        let mut template: Vec<Option<Rational>> = Vec::with_capacity(self.param_dim());
        for k in (0..DATASET_SIZE).cycle().take(self.points) {
            if k < 7 {
                template.extend([None, Some(int(0))]);
            } else {
                template.extend([Some(int(0)), None]);
            }
            template.extend([Some(h[k].clone()), None]);
        }
        super::check_template(params, &template)?;
        if !params.iter().all(CReal::is_exact) {
            return Ok(());
        }
        let exact: Vec<Rational> = params.iter().map(|p| p.as_rational().unwrap().clone()).collect();
        let eps = exact[0].clone();
        if eps.is_negative() {
            return Err(FamilyError::Unsupported("scale must be nonnegative".into()));
        }
        let data = Dataset::from_params(&exact)?;
        let matches = |side: Side| {
            let reference = Dataset::constructed(&eps, side);
            (0..self.points).all(|i| {
                let k = i % DATASET_SIZE;
                data.inputs[i] == reference.inputs[k] && data.targets[i] == reference.targets[k]
            })
        };
        if matches(Side::Below) || matches(Side::Above) {
            Ok(())
        } else {
            Err(FamilyError::Unsupported("dataset is not one of the constructed datasets".into()))
        }
    }

    fn brute_force(&self, y: &Instance, resolution: &Rational) -> Result<Vec<Vec<Rational>>> {
        self.check_instance(y)?;
        let step = int(1) / int(unit_steps(resolution)? as i64);
        let params = y.approx_params(64)?;
        let data = Dataset::from_params(&params)?;
        let eps = params[0].clone();
        let scale = libm::fmax(to_f64(&eps), 1e-300);
        let mut out = Vec::new();
        for side in [Side::Below, Side::Above] {
            let base = gamma_weights(&eps, side);
            for order in PERMUTATIONS {
                let center = base.permuted(order).flat();
                for code in 0..3usize.pow(9) {
                    let mut c = code;
                    let mut w = center.clone();
                    for wi in w.iter_mut() {
                        *wi += &step * int((c % 3) as i64 - 1);
                        c /= 3;
                    }
                    let wf: Vec<f64> = w.iter().map(to_f64).collect();
                    if data.loss_f64(&wf) <= 1e-16 * scale * scale {
                        out.push(w);
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn kappa(&self) -> CReal {
        CReal::from_int(6)
    }

    fn stated_kappa(&self) -> StatedKappa {
        StatedKappa { text: "8", value: Some(CReal::from_int(8)) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::optset::RationalPiece;

    #[test]
    fn gamma_fits_its_dataset_exactly() {
        for eps in [rat(1, 100), rat(1, 7), int(1)] {
            for side in [Side::Below, Side::Above] {
                let data = Dataset::constructed(&eps, side);
                assert!(data.loss(&gamma_weights(&eps, side)) == int(0));
                assert!(data.loss(&gamma_weights(&eps, side.other())).is_positive());
            }
        }
    }

    #[test]
    fn realization_examples() {
        let eps = rat(1, 10);
        let g = gamma_weights(&eps, Side::Below);
        assert_eq!(nn_realize(&g, &[eps.clone(), int(0), int(6)]), int(6) * &eps);
        assert_eq!(nn_realize(&g, &[int(0), int(0), int(0)]), int(0));
    }

    #[test]
    fn path_carries_constructed_datasets() {
        let f = NnFamily::default();
        let y = f.path(&rat(-1, 2));
        let params = y.approx_params(0).unwrap();
        assert_eq!(Dataset::from_params(&params).unwrap(), Dataset::constructed(&rat(1, 200), Side::Below));
        let y = f.path(&rat(1, 4));
        let params = y.approx_params(0).unwrap();
        assert_eq!(Dataset::from_params(&params).unwrap(), Dataset::constructed(&rat(1, 400), Side::Above));
    }

    #[test]
    fn loss_objective_matches_dataset_loss() {
        let f = NnFamily::default();
        let y = f.path(&rat(-1, 2));
        let g = gamma_weights(&rat(1, 200), Side::Below).flat();
        assert_eq!(f.objective(&g, &y.params).unwrap().as_rational(), Some(&int(0)));
        let other = gamma_weights(&rat(1, 200), Side::Above).flat();
        let data = Dataset::constructed(&rat(1, 200), Side::Below);
        let want = data.loss(&NnWeights::from_flat(&other).unwrap());
        assert_eq!(f.objective(&other, &y.params).unwrap().as_rational(), Some(&want));
    }

    #[test]
    fn orbit_has_six_points_and_flat_at_boundary() {
        let f = NnFamily::default();
        let opt = f.optimizers(&f.path(&rat(1, 2))).unwrap();
        assert_eq!(opt.materialize(10).unwrap().len(), 6);
        let b = f.optimizers(&f.path(&int(0))).unwrap();
        assert!(matches!(b.materialize(0).unwrap()[0], RationalPiece::Flat { .. }));
    }

    #[test]
    fn repeated_points_for_larger_datasets() {
        let f = NnFamily::new(20).unwrap();
        let y = f.path(&rat(-1, 3));
        assert_eq!(y.params.len(), 80);
        f.check_instance(&y).unwrap();
        assert!(NnFamily::new(13).is_err());
    }

    #[test]
    fn foreign_dataset_rejected() {
        let f = NnFamily::default();
        let mut y = f.path(&rat(-1, 2));
        y.params[3] = CReal::from_int(5);
        assert!(matches!(f.optimizers(&y), Err(FamilyError::Unsupported(_))));
    }
}
