use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};
use spin::Mutex;

use super::{ComputeError, StepMeter};
use crate::rational::{ceil_log2, int, magnitude_bits, pow2, sqrt_floor, Rational};

/// Requested accuracy: an answer at level `n` is within `2^-n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Precision(pub u32);

impl Precision {
    pub const fn new(level: u32) -> Self {
        Self(level)
    }

    pub const fn get(self) -> u32 {
        self.0
    }

    /// The error bound `2^-n` as an exact rational.
    pub fn tolerance(self) -> Rational {
        pow2(-(self.0 as i64))
    }
}

impl From<u32> for Precision {
    fn from(level: u32) -> Self {
        Self(level)
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2^-{}", self.0)
    }
}

type ApproxFn = dyn Fn(u32, &mut StepMeter) -> Result<Rational, ComputeError> + Send + Sync;

enum Repr {
    Exact(Rational),
    Lazy {
        approximate: Box<ApproxFn>,
        cache: Mutex<BTreeMap<u32, Rational>>,
    },
}

/// A real number given by rational approximants with error at most `2^-n`.
#[derive(Clone)]
pub struct CReal(Arc<Repr>);

impl fmt::Debug for CReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Repr::Exact(q) => write!(f, "CReal({q})"),
            Repr::Lazy { cache, .. } => match cache.lock().iter().next_back() {
                Some((level, q)) => write!(f, "CReal(~{q} at level {level})"),
                None => f.write_str("CReal(<lazy>)"),
            },
        }
    }
}

impl From<Rational> for CReal {
    fn from(q: Rational) -> Self {
        Self::from_rational(q)
    }
}

impl CReal {
    pub fn from_rational(q: Rational) -> Self {
        Self(Arc::new(Repr::Exact(q)))
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(int(v))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// Wraps an approximator. The closure must return a rational within
    /// `2^-n` of one fixed real for every `n`.
    pub fn from_fn<F>(approximate: F) -> Self
    where
        F: Fn(u32, &mut StepMeter) -> Result<Rational, ComputeError> + Send + Sync + 'static,
    {
        Self(Arc::new(Repr::Lazy {
            approximate: Box::new(approximate),
            cache: Mutex::new(BTreeMap::new()),
        }))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match &*self.0 {
            Repr::Exact(q) => Some(q),
            Repr::Lazy { .. } => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.as_rational().is_some()
    }

    pub fn approx(&self, level: impl Into<Precision>) -> Result<Rational, ComputeError> {
        let mut meter = StepMeter::with_global_budget();
        self.approx_with(level.into().0, &mut meter)
    }

    /// Like [`CReal::approx`] but with an explicit step limit.
    pub fn approx_budgeted(&self, level: impl Into<Precision>, limit: u64) -> Result<Rational, ComputeError> {
        let mut meter = StepMeter::new(limit);
        self.approx_with(level.into().0, &mut meter)
    }

    pub fn approx_with(&self, level: u32, meter: &mut StepMeter) -> Result<Rational, ComputeError> {
        match &*self.0 {
            Repr::Exact(q) => Ok(q.clone()),
            Repr::Lazy { approximate, cache } => {
                if let Some(q) = cache.lock().get(&level) {
                    return Ok(q.clone());
                }
                meter.tick(1)?;
                let q = approximate(level, meter)?;
                cache.lock().insert(level, q.clone());
                Ok(q)
            }
        }
    }

    /// Error bound of the level-`n` answer: zero for exact values.
    pub fn error_bound(&self, level: u32) -> Rational {
        if self.is_exact() {
            Rational::zero()
        } else {
            pow2(-(level as i64))
        }
    }

    /// Bits `b` with `|x| <= 2^b`, read from the level-0 approximant.
    pub(crate) fn magnitude_with(&self, meter: &mut StepMeter) -> Result<u32, ComputeError> {
        let q = self.approx_with(0, meter)?;
        let bound = if self.is_exact() { q.abs() } else { q.abs() + int(1) };
        Ok(magnitude_bits(&bound))
    }

    /// Same real, answering level `n` with the level `n + 1` approximant.
    pub fn tight(&self) -> CReal {
        if self.is_exact() {
            return self.clone();
        }
        let x = self.clone();
        CReal::from_fn(move |n, m| x.approx_with(n + 1, m))
    }

    pub fn scale(&self, factor: &Rational) -> CReal {
        if factor.is_zero() {
            return CReal::zero();
        }
        if let Some(q) = self.as_rational() {
            return CReal::from_rational(q * factor);
        }
        let x = self.clone();
        let factor = factor.clone();
        let extra = magnitude_bits(&factor);
        CReal::from_fn(move |n, m| Ok(x.approx_with(n + extra, m)? * &factor))
    }

    pub fn max(&self, other: &CReal) -> CReal {
        if let (Some(a), Some(b)) = (self.as_rational(), other.as_rational()) {
            return CReal::from_rational(a.max(b).clone());
        }
        let (x, y) = (self.clone(), other.clone());
        CReal::from_fn(move |n, m| {
            let a = x.approx_with(n, m)?;
            let b = y.approx_with(n, m)?;
            Ok(if a >= b { a } else { b })
        })
    }

    pub fn min(&self, other: &CReal) -> CReal {
        -&(-self).max(&-other)
    }

    pub fn abs(&self) -> CReal {
        self.max(&-self)
    }

    /// `1/y`, given a level `m` whose approximant exceeds `2^(1-m)` in magnitude.
    pub fn recip(&self, witness: impl Into<Precision>) -> Result<CReal, ComputeError> {
        let m = witness.into().0;
        let probe = self.approx(m)?;
        if probe.abs() <= pow2(1 - m as i64) {
            return Err(ComputeError::InvalidSeparation { level: m });
        }
        if let Some(q) = self.as_rational() {
            return Ok(CReal::from_rational(q.recip()));
        }
        let y = self.clone();
        Ok(CReal::from_fn(move |n, meter| {
            let b = y.approx_with(n + 2 * m + 1, meter)?;
            Ok(b.recip())
        }))
    }

    pub fn div(&self, divisor: &CReal, witness: impl Into<Precision>) -> Result<CReal, ComputeError> {
        Ok(self * &divisor.recip(witness)?)
    }

    /// `sqrt(x)` for `x >= witness > 0`.
    pub fn sqrt(&self, witness: &Rational) -> Result<CReal, ComputeError> {
        if !witness.is_positive() {
            return Err(ComputeError::NonPositiveWitness);
        }
        if let Some(q) = self.as_rational() {
            if let Some(root) = exact_sqrt(q) {
                return Ok(CReal::from_rational(root));
            }
        }
        // sqrt(witness) >= 2^-shift
        let shift = ((ceil_log2(&witness.recip()).max(0) + 1) / 2) as u32;
        let x = self.clone();
        let floor = witness.clone();
        Ok(CReal::from_fn(move |n, m| {
            let a = x.approx_with(n + 2 + shift, m)?;
            let a = if a < floor { floor.clone() } else { a };
            m.tick(1)?;
            Ok(sqrt_floor(&a, n + 2))
        }))
    }

    /// `sqrt(x)` for `x >= 0` without a separation witness.
    pub fn sqrt_nonneg(&self) -> CReal {
        if let Some(q) = self.as_rational() {
            if let Some(root) = exact_sqrt(q) {
                return CReal::from_rational(root);
            }
        }
        let x = self.clone();
        CReal::from_fn(move |n, m| {
            let a = x.approx_with(2 * n + 2, m)?;
            let a = if a.is_negative() { Rational::zero() } else { a };
            m.tick(1)?;
            Ok(sqrt_floor(&a, n + 2))
        })
    }

    /// Answers from `prefix` up to level `splice_level` and from `tail` above it.
    ///
    /// Fails unless every prefix answer is a valid approximant of `tail`.
    pub fn splice(prefix: &CReal, tail: &CReal, splice_level: u32) -> Result<CReal, ComputeError> {
        const GUARD: u32 = 8;
        for level in 0..=splice_level {
            let p = prefix.approx(level)?;
            let ok = match tail.as_rational() {
                Some(t) => (&p - t).abs() <= pow2(-(level as i64)),
                None => {
                    let t = tail.approx(level + GUARD)?;
                    (&p - &t).abs() <= pow2(-(level as i64)) - pow2(-((level + GUARD) as i64))
                }
            };
            if !ok {
                return Err(ComputeError::InvalidSplice { level });
            }
        }
        let (p, t) = (prefix.clone(), tail.clone());
        Ok(CReal::from_fn(move |n, m| {
            if n <= splice_level {
                p.approx_with(n, m)
            } else {
                t.approx_with(n, m)
            }
        }))
    }
}

pub(crate) fn exact_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

impl Neg for &CReal {
    type Output = CReal;

    fn neg(self) -> CReal {
        if let Some(q) = self.as_rational() {
            return CReal::from_rational(-q);
        }
        let x = self.clone();
        CReal::from_fn(move |n, m| Ok(-x.approx_with(n, m)?))
    }
}

impl Neg for CReal {
    type Output = CReal;

    fn neg(self) -> CReal {
        -&self
    }
}

impl Add for &CReal {
    type Output = CReal;

    fn add(self, rhs: &CReal) -> CReal {
        if let (Some(a), Some(b)) = (self.as_rational(), rhs.as_rational()) {
            return CReal::from_rational(a + b);
        }
        let (x, y) = (self.clone(), rhs.clone());
        CReal::from_fn(move |n, m| Ok(x.approx_with(n + 1, m)? + y.approx_with(n + 1, m)?))
    }
}

impl Sub for &CReal {
    type Output = CReal;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: &CReal) -> CReal {
        if let (Some(a), Some(b)) = (self.as_rational(), rhs.as_rational()) {
            return CReal::from_rational(a - b);
        }
        let (x, y) = (self.clone(), rhs.clone());
        CReal::from_fn(move |n, m| Ok(x.approx_with(n + 1, m)? - y.approx_with(n + 1, m)?))
    }
}

impl Mul for &CReal {
    type Output = CReal;

    fn mul(self, rhs: &CReal) -> CReal {
        match (self.as_rational(), rhs.as_rational()) {
            (Some(a), _) => return rhs.scale(a),
            (_, Some(b)) => return self.scale(b),
            _ => {}
        }
        let (x, y) = (self.clone(), rhs.clone());
        CReal::from_fn(move |n, m| {
            let bx = x.magnitude_with(m)?;
            let by = y.magnitude_with(m)?;
            let a = x.approx_with(n + 2 + by, m)?;
            let b = y.approx_with(n + 1 + bx, m)?;
            Ok(a * b)
        })
    }
}

macro_rules! owned_binop {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for CReal {
            type Output = CReal;
            fn $method(self, rhs: CReal) -> CReal {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&CReal> for CReal {
            type Output = CReal;
            fn $method(self, rhs: &CReal) -> CReal {
                (&self).$method(rhs)
            }
        }
    )*};
}

owned_binop!(Add add, Sub sub, Mul mul);

/// Outcome of a bounded-precision comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComparisonVerdict {
    Below,
    Above,
    Unknown,
}

impl ComparisonVerdict {
    pub fn is_decided(self) -> bool {
        self != ComparisonVerdict::Unknown
    }
}

/// Compares `x` and `y` from their level-`n` approximants alone.
///
/// `Below` and `Above` are always correct. `Unknown` is returned whenever the
/// approximants differ by no more than their combined error, or by no more
/// than `2^-n`, so it implies `|x - y| <= 2^(2-n)`.
pub fn compare_up_to(x: &CReal, y: &CReal, level: impl Into<Precision>) -> Result<ComparisonVerdict, ComputeError> {
    let n = level.into().0;
    let a = x.approx(n)?;
    let b = y.approx(n)?;
    let slack = x.error_bound(n) + y.error_bound(n);
    let resolution = pow2(-(n as i64));
    let threshold = if slack > resolution { slack } else { resolution };
    let diff = a - b;
    Ok(if diff > threshold {
        ComparisonVerdict::Above
    } else if diff < -threshold {
        ComparisonVerdict::Below
    } else {
        ComparisonVerdict::Unknown
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn lazy(q: Rational) -> CReal {
        CReal::from_fn(move |_, _| Ok(q.clone()))
    }

    fn within(q: &Rational, target: &Rational, level: u32) -> bool {
        (q - target).abs() <= pow2(-(level as i64))
    }

    fn sqrt2() -> CReal {
        CReal::from_int(2).sqrt(&int(1)).unwrap()
    }

    #[test]
    fn exact_rational_is_its_own_approximant() {
        let x = CReal::from_rational(rat(1, 3));
        assert_eq!(x.approx(3).unwrap(), rat(1, 3));
    }

    #[test]
    fn sqrt_two_squares_close_to_two() {
        let q = sqrt2().approx(10).unwrap();
        let sq = &q * &q;
        assert!(sq > int(2) - pow2(-8) && sq < int(2) + pow2(-8));
    }

    #[test]
    fn sum_of_thirds_and_sixths() {
        let s = &CReal::from_rational(rat(1, 3)) + &CReal::from_rational(rat(1, 6));
        for n in 0..=64 {
            assert!(within(&s.approx(n).unwrap(), &rat(1, 2), n));
        }
        let lazy = &lazy(rat(1, 3)) + &sqrt2();
        let back = &lazy - &sqrt2();
        for n in 0..=64 {
            assert!(within(&back.approx(n).unwrap(), &rat(1, 3), n));
        }
    }

    #[test]
    fn zero_times_anything() {
        let p = &CReal::zero() * &sqrt2();
        assert_eq!(p.approx(17).unwrap(), Rational::zero());
    }

    #[test]
    fn self_difference_is_small() {
        let x = sqrt2();
        let d = &x - &x;
        for n in [0, 5, 30] {
            assert!(d.approx(n).unwrap().abs() <= pow2(-(n as i64)));
        }
    }

    #[test]
    fn division_by_three() {
        let q = CReal::one().div(&CReal::from_int(3), 0).unwrap();
        assert!(within(&q.approx(5).unwrap(), &rat(1, 3), 5));
        let lazy_three = (&sqrt2() - &sqrt2()) + CReal::from_int(3);
        let q = CReal::one().div(&lazy_three, 0).unwrap();
        assert!(within(&q.approx(5).unwrap(), &rat(1, 3), 5));
    }

    #[test]
    fn division_rejects_bad_witness() {
        let err = CReal::one().div(&CReal::zero(), 10).unwrap_err();
        assert_eq!(err, ComputeError::InvalidSeparation { level: 10 });
        let tiny = CReal::from_rational(pow2(-20));
        assert!(CReal::one().div(&tiny, 3).is_err());
        assert!(CReal::one().div(&tiny, 25).is_ok());
    }

    #[test]
    fn sqrt_examples() {
        let two = CReal::from_int(4).sqrt(&int(1)).unwrap();
        assert!(within(&two.approx(20).unwrap(), &int(2), 20));
        let half = CReal::from_rational(rat(1, 4)).sqrt(&rat(1, 8)).unwrap();
        for n in 0..40 {
            assert_eq!(half.approx(n).unwrap(), rat(1, 2));
        }
        assert_eq!(CReal::from_int(2).sqrt(&int(0)).unwrap_err(), ComputeError::NonPositiveWitness);
        assert_eq!(CReal::from_int(2).sqrt(&int(-1)).unwrap_err(), ComputeError::NonPositiveWitness);
    }

    #[test]
    fn sqrt_of_lazy_value() {
        let lazy_four = &(&sqrt2() * &sqrt2()) + &CReal::from_int(2);
        let r = lazy_four.sqrt(&int(1)).unwrap();
        for n in [0, 7, 40] {
            let got = r.approx(n).unwrap();
            assert!(within(&got, &int(2), n), "level {n}: {got} from {}", lazy_four.approx(n + 3).unwrap());
        }
        let z = (&sqrt2() - &sqrt2()).sqrt_nonneg();
        assert!(within(&z.approx(12).unwrap(), &int(0), 12));
    }

    #[test]
    fn comparison_examples() {
        let x = sqrt2();
        for n in 0..20 {
            assert_eq!(compare_up_to(&x, &x, n).unwrap(), ComparisonVerdict::Unknown);
        }
        let three_halves = CReal::from_rational(rat(3, 2));
        assert_eq!(compare_up_to(&x, &three_halves, 4).unwrap(), ComparisonVerdict::Below);
        let tiny = CReal::from_rational(pow2(-10));
        assert_eq!(compare_up_to(&CReal::zero(), &tiny, 2).unwrap(), ComparisonVerdict::Unknown);
        assert_eq!(compare_up_to(&CReal::zero(), &tiny, 12).unwrap(), ComparisonVerdict::Below);
    }

    #[test]
    fn budget_is_enforced() {
        let mut x = sqrt2();
        for _ in 0..50 {
            x = &x + &sqrt2();
        }
        let err = x.approx_budgeted(30, 10).unwrap_err();
        assert_eq!(err, ComputeError::BudgetExceeded { limit: 10 });
        assert!(x.approx_budgeted(30, 10_000).is_ok());
    }

    #[test]
    fn splice_switches_sources() {
        let center = CReal::from_int(0).tight();
        let tail = CReal::from_rational(pow2(-12));
        let s = CReal::splice(&center, &tail, 8).unwrap();
        assert_eq!(s.approx(8).unwrap(), Rational::zero());
        assert_eq!(s.approx(9).unwrap(), pow2(-12));
        let far = CReal::from_rational(rat(1, 2));
        assert_eq!(
            CReal::splice(&center, &far, 8).unwrap_err(),
            ComputeError::InvalidSplice { level: 2 }
        );
    }

    #[test]
    fn max_min_abs() {
        let a = CReal::from_rational(rat(-3, 4));
        assert_eq!(a.abs().as_rational(), Some(&rat(3, 4)));
        let m = sqrt2().max(&CReal::from_int(1));
        assert!(within(&m.approx(20).unwrap(), &sqrt2().approx(30).unwrap(), 19));
        let lo = (-sqrt2()).min(&CReal::from_int(-1));
        assert!(lo.approx(10).unwrap() < int(-1));
    }

    fn rational_strategy() -> impl Strategy<Value = Rational> {
        (-1000i64..1000, 1i64..500).prop_map(|(n, d)| rat(n, d))
    }

    fn consistent(x: &CReal, max_level: u32) -> bool {
        let approxes: alloc::vec::Vec<Rational> = (0..=max_level).map(|n| x.approx(n).unwrap()).collect();
        approxes.iter().enumerate().all(|(n, a)| {
            approxes.iter().enumerate().all(|(m, b)| {
                (a - b).abs() <= pow2(-(n as i64)) + pow2(-(m as i64))
            })
        })
    }

    proptest! {
        #[test]
        fn arithmetic_on_rationals_is_exact(a in rational_strategy(), b in rational_strategy(), n in 0u32..64) {
            let (x, y) = (lazy(a.clone()), lazy(b.clone()));
            prop_assert!(within(&(&x + &y).approx(n).unwrap(), &(&a + &b), n));
            prop_assert!(within(&(&x - &y).approx(n).unwrap(), &(&a - &b), n));
            prop_assert!(within(&(&x * &y).approx(n).unwrap(), &(&a * &b), n));
            if !b.is_zero() {
                let witness = (ceil_log2(&b.recip()).max(0) + 2) as u32;
                let q = x.div(&y, witness).unwrap();
                prop_assert!(within(&q.approx(n).unwrap(), &(&a / &b), n));
            }
        }

        #[test]
        fn compare_never_contradicts_order(a in rational_strategy(), b in rational_strategy(), n in 0u32..40) {
            let verdict = compare_up_to(&CReal::from_rational(a.clone()), &lazy(b.clone()), n).unwrap();
            match verdict {
                ComparisonVerdict::Below => prop_assert!(a < b),
                ComparisonVerdict::Above => prop_assert!(a > b),
                ComparisonVerdict::Unknown => prop_assert!((&a - &b).abs() <= pow2(2 - n as i64)),
            }
        }

        #[test]
        fn constructed_reals_are_cross_level_consistent(a in 1i64..200, b in rational_strategy()) {
            let root = CReal::from_int(a).sqrt(&int(1)).unwrap();
            let combo = &(&root * &lazy(b)) + &root.scale(&rat(-3, 7));
            prop_assert!(consistent(&root, 24));
            prop_assert!(consistent(&combo, 24));
            prop_assert!(consistent(&combo.abs().max(&root), 24));
        }
    }
}
