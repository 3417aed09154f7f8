//! Dual Wasserstein-1 distance over a finite catalog of 1-Lipschitz
//! piecewise-linear test functions on `[-1/2, 1/2]`.
//!
//! Densities have the form `a + b x + c |x|`. Along the path the first
//! density is `1 + |t| x` for `t < 0` and `1 + t - 4 t |x|` for `t > 0`; the
//! second is uniform. Solutions are test functions, stored as their values
//! at `-1/2, -1/4, 0, 1/4, 1/2`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use super::brute::{near_max, unit_steps};
use super::{
    check_dim, exact_point, Family, FamilyError, FamilyName, Instance, Location, Norm, OptimizerSet, Result,
    Sense, Side, StatedKappa,
};
use crate::computable::CReal;
use crate::rational::{int, rat, to_f64, Rational};

pub const CATALOG_SIZE: usize = 16;
const SAMPLES: usize = 5;

/// Density `a + b x + c |x|` on `[-1/2, 1/2]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Density {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl Density {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Result<Self> {
        if &a + &c / int(4) != int(1) {
            return Err(FamilyError::NotNormalized);
        }
        let d = Self { a, b, c };
        if [rat(-1, 2), int(0), rat(1, 2)].iter().any(|x| d.at(x).is_negative()) {
            return Err(FamilyError::InvalidParameter("density takes negative values".into()));
        }
        Ok(d)
    }

    pub fn uniform() -> Self {
        Self { a: int(1), b: int(0), c: int(0) }
    }

    pub fn at(&self, x: &Rational) -> Rational {
        &self.a + &self.b * x + &self.c * x.abs()
    }

    /// `E[f]` for the piecewise-linear interpolant of `values`.
    pub fn expectation(&self, values: &[Rational]) -> Rational {
        let h = rat(1, (values.len() - 1) as i64);
        let x = |i: usize| rat(-1, 2) + &h * int(i as i64);
        let mut total = Rational::zero();
        for i in 0..values.len() - 1 {
            // the integrand is quadratic on each cell, so Simpson's rule is exact
            let mid_f = (&values[i] + &values[i + 1]) / int(2);
            let mid_x = (x(i) + x(i + 1)) / int(2);
            let g0 = &values[i] * self.at(&x(i));
            let g1 = &values[i + 1] * self.at(&x(i + 1));
            let gm = mid_f * self.at(&mid_x);
            total += (g0 + int(4) * gm + g1) * &h / int(6);
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogFunction {
    pub name: &'static str,
    pub values: Vec<Rational>,
}

fn sample_grid() -> Vec<Rational> {
    (0..SAMPLES as i64).map(|i| rat(i - 2, 4)).collect()
}

/// The test functions, in tie-breaking order.
pub fn catalog() -> Vec<CatalogFunction> {
    let q = rat(1, 4);
    let clamp = |x: &Rational| x.clone().max(-q.clone()).min(q.clone());
    type Entry<'a> = (&'static str, &'a dyn Fn(&Rational) -> Rational);
    let entries: [Entry; CATALOG_SIZE] = [
        ("x", &|x| x.clone()),
        ("x+1/4", &|x| x + rat(1, 4)),
        ("-x", &|x| -x),
        ("-x+1/4", &|x| rat(1, 4) - x),
        ("|x|", &|x| x.abs()),
        ("|x|+1/4", &|x| x.abs() + rat(1, 4)),
        ("-|x|", &|x| -x.abs()),
        ("-|x|+1/4", &|x| rat(1, 4) - x.abs()),
        ("clamp(x,1/4)", &|x| clamp(x)),
        ("-clamp(x,1/4)", &|x| -clamp(x)),
        ("|x-1/4|", &|x| (x - rat(1, 4)).abs()),
        ("|x+1/4|", &|x| (x + rat(1, 4)).abs()),
        ("-|x-1/4|", &|x| -(x - rat(1, 4)).abs()),
        ("-|x+1/4|", &|x| -(x + rat(1, 4)).abs()),
        ("||x|-1/4|", &|x| (x.abs() - rat(1, 4)).abs()),
        ("-||x|-1/4|", &|x| -(x.abs() - rat(1, 4)).abs()),
    ];
    let grid = sample_grid();
    entries
        .into_iter()
        .map(|(name, f)| CatalogFunction { name, values: grid.iter().map(f).collect() })
        .collect()
}

/// `|E_p1[f] - E_p2[f]|`.
pub fn wasserstein_pairing(p1: &Density, p2: &Density, values: &[Rational]) -> Rational {
    (p1.expectation(values) - p2.expectation(values)).abs()
}

fn class(side: Side) -> core::ops::Range<usize> {
    match side {
        Side::Below => 0..4,
        Side::Above => 4..8,
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct WassersteinFamily;

impl WassersteinFamily {
    pub fn densities(params: &[CReal]) -> Result<(Density, Density)> {
        check_dim(6, params.len())?;
        let q: Vec<Rational> = params
            .iter()
            .map(|p| p.as_rational().cloned().ok_or_else(|| FamilyError::Unsupported("densities must be exact".into())))
            .collect::<Result<_>>()?;
        Ok((Density::new(q[0].clone(), q[1].clone(), q[2].clone())?, Density::new(q[3].clone(), q[4].clone(), q[5].clone())?))
    }

    fn class_set(range: core::ops::Range<usize>) -> OptimizerSet {
        let cat = catalog();
        OptimizerSet::points(SAMPLES, cat[range].iter().map(|f| exact_point(&f.values)).collect())
    }
}

impl Family for WassersteinFamily {
    fn name(&self) -> FamilyName {
        FamilyName::Wasserstein
    }

    fn solution_dim(&self) -> usize {
        SAMPLES
    }

    fn param_dim(&self) -> usize {
        6
    }

    fn norm(&self) -> Norm {
        Norm::FunctionL2
    }

    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn path_lipschitz(&self) -> Rational {
        int(4)
    }

    fn path_params(&self, t: &CReal) -> Vec<CReal> {
        let pos = t.max(&CReal::zero());
        let neg = (-t).max(&CReal::zero());
        vec![
            &CReal::one() + &pos,
            neg,
            pos.scale(&int(-4)),
            CReal::one(),
            CReal::zero(),
            CReal::zero(),
        ]
    }

    fn boundary_pair(&self, params: &[CReal]) -> Result<(CReal, CReal)> {
        check_dim(6, params.len())?;
        Ok((-&params[1], params[2].scale(&rat(1, 4))))
    }

    fn optimizers_at(&self, location: Location, params: &[CReal]) -> Result<OptimizerSet> {
        check_dim(6, params.len())?;
        Ok(match location {
            Location::Side(side) => Self::class_set(class(side)),
            Location::Boundary => Self::class_set(0..CATALOG_SIZE),
        })
    }

    fn objective(&self, x: &[Rational], params: &[CReal]) -> Result<CReal> {
        check_dim(SAMPLES, x.len())?;
        let (p1, p2) = Self::densities(params)?;
        Ok(CReal::from_rational(wasserstein_pairing(&p1, &p2, x)))
    }

    fn check_slice(&self, params: &[CReal]) -> Result<()> {
        super::check_template(params, &[None, None, None, Some(int(1)), Some(int(0)), Some(int(0))])?;
        if params.iter().all(CReal::is_exact) {
            let (p1, _) = Self::densities(params)?;
            if !p1.b.is_zero() && !p1.c.is_zero() {
                return Err(FamilyError::Unsupported("density must be linear or a tent".into()));
            }
            if p1.b.is_negative() || p1.c.is_positive() {
                return Err(FamilyError::Unsupported("density slope signs off the path".into()));
            }
        }
        Ok(())
    }

    fn brute_force(&self, y: &Instance, resolution: &Rational) -> Result<Vec<Vec<Rational>>> {
        self.check_instance(y)?;
        let cells = (unit_steps(resolution)? as usize * 16).max(1024).next_multiple_of(4);
        let p: Vec<f64> = y.approx_params(64)?.iter().map(to_f64).collect();
        let density = |x: f64, o: usize| p[o] + p[o + 1] * x + p[o + 2] * libm::fabs(x);
        let cat = catalog();
        let values: Vec<f64> = cat
            .iter()
            .map(|f| {
                let v: Vec<f64> = f.values.iter().map(to_f64).collect();
                let interp = |x: f64| {
                    let s = (x + 0.5) * 4.0;
                    let i = libm::floor(s).clamp(0.0, 3.0) as usize;
                    v[i] + (v[i + 1] - v[i]) * (s - i as f64)
                };
                let h = 1.0 / cells as f64;
                let diff: f64 = (0..cells)
                    .map(|k| {
                        let x = -0.5 + (k as f64 + 0.5) * h;
                        interp(x) * (density(x, 0) - density(x, 3)) * h
                    })
                    .sum();
                libm::fabs(diff)
            })
            .collect();
        Ok(near_max(&values, 1e-9).into_iter().map(|i| cat[i].values.clone()).collect())
    }

    fn kappa(&self) -> CReal {
        CReal::from_rational(rat(5, 48)).sqrt_nonneg()
    }

    fn stated_kappa(&self) -> StatedKappa {
        StatedKappa { text: "sqrt(5)/(4*sqrt(3))", value: Some(self.kappa()) }
    }
}
