//! Capacity-achieving input distributions of discrete memoryless channels.
//!
//! The core channel has two outputs and three inputs:
//! `W = [[1, a, b], [0, 1 - a, 1 - b]]` with `a = max(t, 0)`, `b = max(-t, 0)`.
//! For `t < 0` the first two inputs form a noiseless binary channel, for
//! `t > 0` the first and third do. Larger alphabets embed the core: extra
//! inputs copy the first column and extra outputs are never produced, and
//! solutions are folded back by adding the mass of extra inputs to the first.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::brute::{grid_point, near_max, simplex_grid, unit_steps};
use super::{
    check_dim, Family, FamilyError, FamilyName, Instance, Location, Norm, OptimizerSet, Result, Sense,
    Side, StatedKappa,
};
use crate::computable::CReal;
use crate::rational::{int, rat, to_f64, Rational};

/// Column-stochastic matrix: entry `(y, x)` is the probability of output `y`
/// given input `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticMatrix {
    outputs: usize,
    inputs: usize,
    entries: Vec<Rational>,
}

impl StochasticMatrix {
    /// Row-major entries, one row per output.
    pub fn new(outputs: usize, inputs: usize, entries: Vec<Rational>) -> Result<Self> {
        check_dim(outputs * inputs, entries.len())?;
        if outputs == 0 || inputs == 0 {
            return Err(FamilyError::InvalidParameter("empty channel".into()));
        }
        if entries.iter().any(Signed::is_negative) {
            return Err(FamilyError::InvalidParameter("negative transition probability".into()));
        }
        for x in 0..inputs {
            let sum: Rational = (0..outputs).map(|y| &entries[y * inputs + x]).sum();
            if !sum.is_one() {
                return Err(FamilyError::InvalidParameter(alloc::format!("column {x} sums to {sum}")));
            }
        }
        Ok(Self { outputs, inputs, entries })
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn entry(&self, output: usize, input: usize) -> &Rational {
        &self.entries[output * self.inputs + input]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    /// Output distribution for input distribution `p`.
    pub fn output_distribution(&self, p: &[Rational]) -> Vec<Rational> {
        (0..self.outputs).map(|y| (0..self.inputs).map(|x| &p[x] * self.entry(y, x)).sum()).collect()
    }
}

/// `I(p, W)` in bits.
pub fn mutual_information(p: &[Rational], w: &StochasticMatrix) -> Result<CReal> {
    check_dim(w.inputs(), p.len())?;
    if p.iter().any(Signed::is_negative) || !p.iter().sum::<Rational>().is_one() {
        return Err(FamilyError::InvalidParameter("input distribution off the simplex".into()));
    }
    let q = w.output_distribution(p);
    let mut nats = CReal::zero();
    #[allow(clippy::needless_range_loop)]
    for x in 0..w.inputs() {
        for (y, qy) in q.iter().enumerate() {
            let joint = &p[x] * w.entry(y, x);
            if joint.is_zero() {
                continue;
            }
            let ratio = w.entry(y, x) / qy;
            nats = &nats + &CReal::ln_rational(&ratio)?.scale(&joint);
        }
    }
    Ok(nats.div(&CReal::ln2(), 2)?)
}

/// `h2(x) = -x log2 x - (1 - x) log2 (1 - x)`, zero at the endpoints.
pub fn binary_entropy(x: &Rational) -> Result<CReal> {
    if x.is_negative() || *x > int(1) {
        return Err(FamilyError::InvalidParameter("binary entropy needs 0 <= x <= 1".into()));
    }
    let term = |v: &Rational| -> Result<CReal> {
        if v.is_zero() {
            Ok(CReal::zero())
        } else {
            Ok(CReal::log2_rational(v)?.scale(&-v))
        }
    };
    Ok(&term(x)? + &term(&(int(1) - x))?)
}

pub(crate) fn mutual_information_f64(p: &[f64], w: &[f64], outputs: usize, inputs: usize) -> f64 {
    let q: Vec<f64> = (0..outputs).map(|y| (0..inputs).map(|x| p[x] * w[y * inputs + x]).sum()).collect();
    let mut total = 0.0;
    for x in 0..inputs {
        for y in 0..outputs {
            let joint = p[x] * w[y * inputs + x];
            if joint > 0.0 {
                total += joint * libm::log2(w[y * inputs + x] / q[y]);
            }
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelFamily {
    inputs: usize,
    outputs: usize,
}

impl Default for ChannelFamily {
    fn default() -> Self {
        Self { inputs: 3, outputs: 2 }
    }
}

impl ChannelFamily {
    pub fn new(inputs: usize, outputs: usize) -> Result<Self> {
        if inputs < 3 || outputs < 2 {
            return Err(FamilyError::InvalidParameter("channel needs at least 3 inputs and 2 outputs".into()));
        }
        Ok(Self { inputs, outputs })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    /// Exact matrix for exact parameters.
    pub fn matrix(&self, params: &[CReal]) -> Result<StochasticMatrix> {
        check_dim(self.param_dim(), params.len())?;
        let entries = params
            .iter()
            .map(|p| p.as_rational().cloned().ok_or_else(|| FamilyError::Unsupported("channel entries must be exact".into())))
            .collect::<Result<Vec<_>>>()?;
        StochasticMatrix::new(self.outputs, self.inputs, entries)
    }

    fn core_point(first: Rational, second: Rational, third: Rational) -> Vec<CReal> {
        vec![CReal::from_rational(first), CReal::from_rational(second), CReal::from_rational(third)]
    }
}

impl Family for ChannelFamily {
    fn name(&self) -> FamilyName {
        FamilyName::Channel
    }

    fn solution_dim(&self) -> usize {
        self.inputs
    }

    fn reduced_dim(&self) -> usize {
        3
    }

    fn param_dim(&self) -> usize {
        self.inputs * self.outputs
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
        let a = t.max(&CReal::zero());
        let b = (-t).max(&CReal::zero());
        let one = CReal::one();
        let mut params = vec![CReal::zero(); self.param_dim()];
        let n = self.inputs;
        params[0] = one.clone();
        params[1] = a.clone();
        params[2] = b.clone();
        params[n] = CReal::zero();
        params[n + 1] = &one - &a;
        params[n + 2] = &one - &b;
        for p in &mut params[3..n] {
            *p = one.clone();
        }
        params
    }

    fn boundary_pair(&self, params: &[CReal]) -> Result<(CReal, CReal)> {
        check_dim(self.param_dim(), params.len())?;
        Ok((params[1].clone(), params[2].clone()))
    }

    fn optimizers_at(&self, location: Location, params: &[CReal]) -> Result<OptimizerSet> {
        check_dim(self.param_dim(), params.len())?;
        let half = rat(1, 2);
        let first = Self::core_point(half.clone(), half.clone(), Rational::zero());
        let second = Self::core_point(half.clone(), Rational::zero(), half.clone());
        // a moving entry of exactly 1 duplicates the first column
        let duplicated = |entry: &CReal| entry.as_rational().is_some_and(|q| *q == int(1));
        let shared = Self::core_point(Rational::zero(), half.clone(), half);
        Ok(match location {
            Location::Side(Side::Below) if duplicated(&params[2]) => OptimizerSet::segment(first, shared),
            Location::Side(Side::Above) if duplicated(&params[1]) => OptimizerSet::segment(second, shared),
            Location::Side(Side::Below) => OptimizerSet::points(3, vec![first]),
            Location::Side(Side::Above) => OptimizerSet::points(3, vec![second]),
            Location::Boundary => OptimizerSet::segment(first, second),
        })
    }

    fn reduce_solution(&self, x: &[Rational]) -> Vec<Rational> {
        let folded: Rational = x[0].clone() + x[3..].iter().sum::<Rational>();
        vec![folded, x[1].clone(), x[2].clone()]
    }

    fn objective(&self, x: &[Rational], params: &[CReal]) -> Result<CReal> {
        mutual_information(x, &self.matrix(params)?)
    }

    fn check_slice(&self, params: &[CReal]) -> Result<()> {
        check_dim(self.param_dim(), params.len())?;
        let n = self.inputs;
        let mut template: Vec<Option<Rational>> = vec![Some(Rational::zero()); self.param_dim()];
        template[0] = Some(int(1));
        template[1] = None;
        template[2] = None;
        template[n + 1] = None;
        template[n + 2] = None;
        for entry in &mut template[3..n] {
            *entry = Some(int(1));
        }
        super::check_template(params, &template)?;
        if let (Some(a), Some(b)) = (params[1].as_rational(), params[2].as_rational()) {
            if a.is_positive() && b.is_positive() {
                return Err(FamilyError::Unsupported("at most one of W[0][1], W[0][2] may be positive".into()));
            }
        }
        if params.iter().all(CReal::is_exact) {
            self.matrix(params)?;
        }
        Ok(())
    }

    fn brute_force(&self, y: &Instance, resolution: &Rational) -> Result<Vec<Vec<Rational>>> {
        self.check_instance(y)?;
        let steps = unit_steps(resolution)?;
        let w: Vec<f64> = y.approx_params(64)?.iter().map(to_f64).collect();
        let grid = simplex_grid(self.inputs, steps);
        let values: Vec<f64> = grid
            .iter()
            .map(|parts| {
                let p: Vec<f64> = parts.iter().map(|&k| k as f64 / steps as f64).collect();
                mutual_information_f64(&p, &w, self.outputs, self.inputs)
            })
            .collect();
        let mut out: Vec<Vec<Rational>> = near_max(&values, 1e-12)
            .into_iter()
            .map(|i| self.reduce_solution(&grid_point(&grid[i], steps)))
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn kappa(&self) -> CReal {
        CReal::from_rational(rat(1, 2)).sqrt_nonneg()
    }

    fn stated_kappa(&self) -> StatedKappa {
        StatedKappa { text: ">2", value: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::pow2;

    fn close(x: &CReal, want: &Rational, bits: u32) -> bool {
        (x.approx(bits + 2).unwrap() - want).abs() <= pow2(-(bits as i64))
    }

    #[test]
    fn entropy_values() {
        assert!(close(&binary_entropy(&rat(1, 2)).unwrap(), &int(1), 40));
        assert_eq!(binary_entropy(&int(0)).unwrap().approx(30).unwrap(), int(0));
        // h2(1/4) = 2 - (3/4) log2 3
        let h = binary_entropy(&rat(1, 4)).unwrap();
        let expected = &CReal::from_int(2) - &CReal::log2_rational(&int(3)).unwrap().scale(&rat(3, 4));
        assert!((h.approx(40).unwrap() - expected.approx(40).unwrap()).abs() <= pow2(-39));
    }

    #[test]
    fn information_of_boundary_channel() {
        let f = ChannelFamily::default();
        let w = f.matrix(&f.path(&int(0)).params).unwrap();
        let i = mutual_information(&[rat(1, 2), rat(1, 4), rat(1, 4)], &w).unwrap();
        assert!(close(&i, &int(1), 40));
        let point_mass = mutual_information(&[int(1), int(0), int(0)], &w).unwrap();
        assert_eq!(point_mass.approx(30).unwrap(), int(0));
    }

    #[test]
    fn first_region_channel_carries_one_bit() {
        let f = ChannelFamily::default();
        let w = f.matrix(&f.path(&rat(-3, 10)).params).unwrap();
        let i = mutual_information(&[rat(1, 2), rat(1, 2), int(0)], &w).unwrap();
        assert!(close(&i, &int(1), 40));
        assert_eq!(w.entry(0, 2), &rat(3, 10));
    }

    #[test]
    fn optimizers_follow_sides() {
        let f = ChannelFamily::default();
        let opt = f.optimizers(&f.path(&rat(-3, 10))).unwrap();
        assert_eq!(
            opt.materialize(0).unwrap(),
            vec![super::super::optset::RationalPiece::Point(vec![rat(1, 2), rat(1, 2), int(0)])]
        );
        let d = f.kappa().approx(30).unwrap();
        assert!((to_f64(&d) - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
    }

    #[test]
    fn embedding_preserves_optimizers() {
        let f = ChannelFamily::new(5, 4).unwrap();
        let y = f.path(&rat(1, 2));
        let w = f.matrix(&y.params).unwrap();
        assert_eq!(w.entry(0, 4), &int(1));
        assert_eq!(w.entry(3, 1), &int(0));
        let pts = f.brute_force(&y, &rat(1, 8)).unwrap();
        assert_eq!(pts, vec![vec![rat(1, 2), int(0), rat(1, 2)]]);
        assert_eq!(f.reduce_solution(&[rat(1, 8), int(0), rat(1, 2), rat(1, 8), rat(1, 4)]), vec![rat(1, 2), int(0), rat(1, 2)]);
    }

    #[test]
    fn non_stochastic_matrix_rejected() {
        assert!(StochasticMatrix::new(2, 2, vec![int(1), rat(1, 2), int(0), rat(1, 3)]).is_err());
        assert!(StochasticMatrix::new(1, 1, vec![int(-1)]).is_err());
    }
}
