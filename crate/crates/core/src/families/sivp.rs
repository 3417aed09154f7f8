//! Shortest independent vectors in the plane: over all bases of the lattice
//! spanned by `(1, 1)` and `(-1 - lambda, 0)`, minimize the sum of the two
//! Euclidean lengths.
//!
//! With `u = (-lambda, 1)`, `v = (1 + lambda, 0)` and `w = (1, 1)`, the
//! minimizing bases are built from `{u, v}` when `lambda < sqrt(2) - 1` and
//! from `{u, w}` when `lambda > sqrt(2) - 1`, in either order and with either
//! signs. Along the path `lambda = t/100 + sqrt(2) - 1`.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{Signed, Zero};

use super::brute::near_max;
use super::{
    check_dim, check_template, Family, FamilyError, FamilyName, Instance, Location, Norm, OptimizerSet, Result,
    Sense, Side, StatedKappa,
};
use crate::computable::CReal;
use crate::rational::{cmp_sqrt_sums, from_f64_exact, int, rat, to_f64, Rational};

/// Two planar vectors in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedBasis {
    pub vectors: [[Rational; 2]; 2],
}

impl OrderedBasis {
    pub fn new(first: [Rational; 2], second: [Rational; 2]) -> Result<Self> {
        let b = Self { vectors: [first, second] };
        if b.determinant().is_zero() {
            return Err(FamilyError::InvalidParameter("basis vectors are linearly dependent".into()));
        }
        Ok(b)
    }

    pub fn from_flat(v: &[Rational]) -> Result<Self> {
        check_dim(4, v.len())?;
        Self::new([v[0].clone(), v[1].clone()], [v[2].clone(), v[3].clone()])
    }

    pub fn flat(&self) -> Vec<Rational> {
        self.vectors.iter().flatten().cloned().collect()
    }

    pub fn determinant(&self) -> Rational {
        let [a, b] = &self.vectors;
        &a[0] * &b[1] - &a[1] * &b[0]
    }

    pub fn squared_norms(&self) -> [Rational; 2] {
        self.vectors.clone().map(|v| &v[0] * &v[0] + &v[1] * &v[1])
    }
}

/// One basis found by [`lattice_enumerate`], with its integer coefficients
/// over the input basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumeratedBasis {
    pub coefficients: [[i64; 2]; 2],
    pub basis: OrderedBasis,
}

impl EnumeratedBasis {
    pub fn norm_sum(&self) -> CReal {
        let [a, b] = self.basis.squared_norms();
        &CReal::from_rational(a).sqrt_nonneg() + &CReal::from_rational(b).sqrt_nonneg()
    }

    /// Exact comparison of norm sums.
    pub fn cmp_norm_sum(&self, other: &Self) -> Ordering {
        let (na, nb) = (self.basis.squared_norms(), other.basis.squared_norms());
        cmp_sqrt_sums([&na[0], &na[1]], [&nb[0], &nb[1]])
    }
}

/// All ordered lattice bases whose coefficients over `basis` are bounded by
/// `bound` in absolute value, sorted by the sum of Euclidean lengths with
/// ties broken by the coefficient tuples.
pub fn lattice_enumerate(basis: &OrderedBasis, bound: i64) -> Result<Vec<EnumeratedBasis>> {
    if bound < 1 {
        return Err(FamilyError::InvalidParameter("coefficient bound must be at least 1".into()));
    }
    let [b1, b2] = &basis.vectors;
    let combo = |k: [i64; 2]| -> [Rational; 2] {
        [int(k[0]) * &b1[0] + int(k[1]) * &b2[0], int(k[0]) * &b1[1] + int(k[1]) * &b2[1]]
    };
    let coeffs: Vec<[i64; 2]> = (-bound..=bound)
        .flat_map(|i| (-bound..=bound).map(move |j| [i, j]))
        .filter(|k| *k != [0, 0])
        .collect();
    let mut out = Vec::new();
    for k in &coeffs {
        for l in &coeffs {
            if (k[0] * l[1] - k[1] * l[0]).abs() != 1 {
                continue;
            }
            out.push(EnumeratedBasis { coefficients: [*k, *l], basis: OrderedBasis { vectors: [combo(*k), combo(*l)] } });
        }
    }
    let norms: Vec<[Rational; 2]> = out.iter().map(|e| e.basis.squared_norms()).collect();
    let mut order: Vec<usize> = (0..out.len()).collect();
    order.sort_by(|&i, &j| {
        let by_norm = cmp_sqrt_sums([&norms[i][0], &norms[i][1]], [&norms[j][0], &norms[j][1]]);
        by_norm.then_with(|| out[i].coefficients.cmp(&out[j].coefficients))
    });
    Ok(order.into_iter().map(|i| out[i].clone()).collect())
}

fn sqrt2() -> CReal {
    CReal::from_int(2).sqrt(&int(1)).expect("positive witness")
}

/// Orders and signs of a two-vector set.
fn variants(p: &[CReal; 2], q: &[CReal; 2]) -> Vec<Vec<CReal>> {
    let mut out = Vec::with_capacity(8);
    for (first, second) in [(p, q), (q, p)] {
        for s1 in [false, true] {
            for s2 in [false, true] {
                let sign = |v: &[CReal; 2], neg: bool| -> [CReal; 2] {
                    if neg {
                        [-&v[0], -&v[1]]
                    } else {
                        v.clone()
                    }
                };
                let a = sign(first, s1);
                let b = sign(second, s2);
                out.push(vec![a[0].clone(), a[1].clone(), b[0].clone(), b[1].clone()]);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SivpFamily;

impl SivpFamily {
    fn lambda(params: &[CReal]) -> CReal {
        -&(&params[2] + &CReal::one())
    }
}

impl Family for SivpFamily {
    fn name(&self) -> FamilyName {
        FamilyName::Sivp
    }

    fn solution_dim(&self) -> usize {
        4
    }

    fn param_dim(&self) -> usize {
        4
    }

    fn norm(&self) -> Norm {
        Norm::L2
    }

    fn sense(&self) -> Sense {
        Sense::Minimize
    }

    fn path_lipschitz(&self) -> Rational {
        rat(1, 100)
    }

    fn path_params(&self, t: &CReal) -> Vec<CReal> {
        let second = -&(&t.scale(&rat(1, 100)) + &sqrt2());
        vec![CReal::one(), CReal::one(), second, CReal::zero()]
    }

    fn boundary_pair(&self, params: &[CReal]) -> Result<(CReal, CReal)> {
        check_dim(4, params.len())?;
        Ok((Self::lambda(params), &sqrt2() - &CReal::one()))
    }

    fn optimizers_at(&self, location: Location, params: &[CReal]) -> Result<OptimizerSet> {
        check_dim(4, params.len())?;
        let lambda = Self::lambda(params);
        let u = [-&lambda, CReal::one()];
        let v = [&CReal::one() + &lambda, CReal::zero()];
        let w = [CReal::one(), CReal::one()];
        let first = || OptimizerSet::points(4, variants(&u, &v));
        let second = || OptimizerSet::points(4, variants(&u, &w));
        Ok(match location {
            Location::Side(Side::Below) => first(),
            Location::Side(Side::Above) => second(),
            Location::Boundary => first().union(second()),
        })
    }

    fn objective(&self, x: &[Rational], _params: &[CReal]) -> Result<CReal> {
        check_dim(4, x.len())?;
        let len = |a: &Rational, b: &Rational| CReal::from_rational(a * a + b * b).sqrt_nonneg();
        Ok(&len(&x[0], &x[1]) + &len(&x[2], &x[3]))
    }

    fn check_slice(&self, params: &[CReal]) -> Result<()> {
        check_template(params, &[Some(int(1)), Some(int(1)), None, Some(int(0))])?;
        let lambda = Self::lambda(params).approx(20)?;
        if !(lambda > rat(1, 64) && lambda < rat(1, 2) - rat(1, 64)) {
            return Err(FamilyError::Unsupported("lambda must lie inside (0, 1/2)".into()));
        }
        Ok(())
    }

    fn brute_force(&self, y: &Instance, resolution: &Rational) -> Result<Vec<Vec<Rational>>> {
        self.check_instance(y)?;
        if !resolution.is_positive() {
            return Err(FamilyError::NonPositiveResolution);
        }
        let p: Vec<f64> = y.approx_params(64)?.iter().map(to_f64).collect();
        let combo = |k: [i64; 2]| [k[0] as f64 * p[0] + k[1] as f64 * p[2], k[0] as f64 * p[1] + k[1] as f64 * p[3]];
        let mut bases = Vec::new();
        for k0 in -3i64..=3 {
            for k1 in -3i64..=3 {
                for l0 in -3i64..=3 {
                    for l1 in -3i64..=3 {
                        if (k0 * l1 - k1 * l0).abs() == 1 {
                            let (a, b) = (combo([k0, k1]), combo([l0, l1]));
                            bases.push([a[0], a[1], b[0], b[1]]);
                        }
                    }
                }
            }
        }
        let values: Vec<f64> =
            bases.iter().map(|b| -(libm::hypot(b[0], b[1]) + libm::hypot(b[2], b[3]))).collect();
        near_max(&values, 1e-9)
            .into_iter()
            .map(|i| {
                bases[i]
                    .iter()
                    .map(|&v| from_f64_exact(v).ok_or_else(|| FamilyError::InvalidParameter("non-finite coordinate".into())))
                    .collect()
            })
            .collect()
    }

    fn kappa(&self) -> CReal {
        (&CReal::from_int(4) - &sqrt2().scale(&int(2))).sqrt(&rat(1, 2)).expect("positive witness")
    }

    fn stated_kappa(&self) -> StatedKappa {
        StatedKappa { text: "sqrt(2)", value: Some(sqrt2()) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis_at(lambda: Rational) -> OrderedBasis {
        OrderedBasis::new([int(1), int(1)], [int(-1) - lambda, int(0)]).unwrap()
    }

    #[test]
    fn integer_lattice_minimum_is_two() {
        let found = lattice_enumerate(&basis_at(int(0)), 2).unwrap();
        assert_eq!(found[0].norm_sum().as_rational(), Some(&int(2)));
        let best: Vec<_> = found.iter().take_while(|e| e.cmp_norm_sum(&found[0]) == Ordering::Equal).collect();
        assert!(best.iter().any(|e| e.basis.flat() == vec![int(0), int(1), int(1), int(0)]));
        assert_eq!(best.len(), 8);
    }

    #[test]
    fn half_lambda_prefers_diagonal() {
        let found = lattice_enumerate(&basis_at(rat(1, 2)), 3).unwrap();
        let best: Vec<_> = found.iter().take_while(|e| e.cmp_norm_sum(&found[0]) == Ordering::Equal).collect();
        assert!(best.iter().any(|e| e.basis.flat() == vec![rat(-1, 2), int(1), int(1), int(1)]));
    }

    #[test]
    fn unimodular_rebasing_keeps_minimum() {
        let b = basis_at(rat(1, 5));
        let [b1, b2] = b.vectors.clone();
        let rebased = OrderedBasis::new(
            [&b1[0] + &b2[0], &b1[1] + &b2[1]],
            [&b1[0] + int(2) * &b2[0], &b1[1] + int(2) * &b2[1]],
        )
        .unwrap();
        let x = lattice_enumerate(&b, 3).unwrap();
        let y = lattice_enumerate(&rebased, 3).unwrap();
        assert_eq!(x[0].cmp_norm_sum(&y[0]), Ordering::Equal);
    }

    #[test]
    fn enumeration_bound_three_agrees_with_five() {
        for lambda in [rat(1, 10), rat(2, 5), rat(41, 100), rat(43, 100)] {
            let small = lattice_enumerate(&basis_at(lambda.clone()), 3).unwrap();
            let large = lattice_enumerate(&basis_at(lambda), 5).unwrap();
            assert_eq!(small[0].cmp_norm_sum(&large[0]), Ordering::Equal);
        }
    }

    #[test]
    fn gap_at_critical_lambda() {
        let k = to_f64(&SivpFamily.kappa().approx(40).unwrap());
        assert!((k - (4.0 - 2.0 * core::f64::consts::SQRT_2).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn optimizers_match_enumeration_on_both_sides() {
        for t in [rat(-1, 2), rat(1, 2)] {
            let y = SivpFamily.path(&t);
            let opt = SivpFamily.optimizers(&y).unwrap();
            let found = SivpFamily.brute_force(&y, &rat(1, 64)).unwrap();
            assert_eq!(found.len(), 8);
            let h = super::super::hausdorff_distance(&opt, &found, Norm::L2).unwrap();
            assert!(h < 1e-9);
        }
    }

    #[test]
    fn dependent_basis_rejected() {
        assert!(OrderedBasis::new([int(1), int(2)], [int(2), int(4)]).is_err());
    }
}
