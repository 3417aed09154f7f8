//! Logarithms and exponentials in binary fixed point.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{CReal, ComputeError, StepMeter};
use crate::rational::{ceil_log2, from_fixed, int, rat, to_fixed, Rational};

const GUARD_BITS: u32 = 24;

// atanh(z) * 2^p, for 0 <= z <= 1/3, error below 2^-(p - GUARD_BITS + 4).
fn atanh_fixed(z: &Rational, p: u32, meter: &mut StepMeter) -> Result<BigInt, ComputeError> {
    let zf = to_fixed(z, p);
    let z2 = (&zf * &zf) >> p as usize;
    let mut power = zf;
    let mut sum = BigInt::zero();
    let mut k: u32 = 0;
    while !power.is_zero() {
        meter.tick(1)?;
        sum += &power / BigInt::from(2 * k + 1);
        power = (&power * &z2) >> p as usize;
        k += 1;
    }
    Ok(sum)
}

fn ln2_fixed(p: u32, meter: &mut StepMeter) -> Result<BigInt, ComputeError> {
    Ok(atanh_fixed(&rat(1, 3), p, meter)? << 1)
}

/// `ln(q)` within `2^-n` for a positive rational.
fn ln_rational_approx(q: &Rational, n: u32, meter: &mut StepMeter) -> Result<Rational, ComputeError> {
    if !q.is_positive() {
        return Err(ComputeError::NonPositiveLogArgument);
    }
    if q.is_one() {
        return Ok(Rational::zero());
    }
    // q = 2^e * mantissa with mantissa in [1, 2)
    let mut e = ceil_log2(q);
    let mut mantissa = q / crate::rational::pow2(e);
    if mantissa < int(1) {
        e -= 1;
        mantissa *= int(2);
    }
    let e_bits = 64 - e.unsigned_abs().leading_zeros();
    let p = n + GUARD_BITS + e_bits;
    let z = (&mantissa - int(1)) / (&mantissa + int(1));
    let atanh = atanh_fixed(&z, p, meter)?;
    let total = (atanh << 1) + ln2_fixed(p, meter)? * BigInt::from(e);
    Ok(from_fixed(total, p))
}

// exp(q) within 2^-n.
fn exp_rational_approx(q: &Rational, n: u32, meter: &mut StepMeter) -> Result<Rational, ComputeError> {
    if q.is_zero() {
        return Ok(int(1));
    }
    // halve until |r| <= 1/2, then square back
    let halvings = (ceil_log2(q) + 1).max(0) as u32;
    let r = q / crate::rational::pow2(halvings as i64);
    // e^q < 2^(3q/2 + 1) for q > 0
    let growth = if q.is_positive() {
        (q * rat(3, 2)).ceil().to_integer().try_into().unwrap_or(u32::MAX / 4) + 1
    } else {
        0
    };
    let p = n + GUARD_BITS + 2 * halvings + growth;
    let rf = to_fixed(&r, p);
    let one = BigInt::one() << p as usize;
    let mut term = one.clone();
    let mut sum = one;
    let mut k: u32 = 1;
    loop {
        meter.tick(1)?;
        term = ((&term * &rf) >> p as usize) / BigInt::from(k);
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    for _ in 0..halvings {
        meter.tick(1)?;
        sum = (&sum * &sum) >> p as usize;
    }
    Ok(from_fixed(sum, p))
}

impl CReal {
    pub fn ln2() -> CReal {
        CReal::from_fn(|n, m| Ok(from_fixed(ln2_fixed(n + GUARD_BITS, m)?, n + GUARD_BITS)))
    }

    /// Natural logarithm of a positive rational.
    pub fn ln_rational(q: &Rational) -> Result<CReal, ComputeError> {
        if !q.is_positive() {
            return Err(ComputeError::NonPositiveLogArgument);
        }
        if q.is_one() {
            return Ok(CReal::zero());
        }
        let q = q.clone();
        Ok(CReal::from_fn(move |n, m| ln_rational_approx(&q, n + 1, m)))
    }

    /// `ln(x)` for `x >= witness > 0`.
    pub fn ln(&self, witness: &Rational) -> Result<CReal, ComputeError> {
        if !witness.is_positive() {
            return Err(ComputeError::NonPositiveWitness);
        }
        if let Some(q) = self.as_rational() {
            return CReal::ln_rational(q);
        }
        let extra = (ceil_log2(&witness.recip()).max(0)) as u32;
        let x = self.clone();
        let floor = witness.clone();
        Ok(CReal::from_fn(move |n, m| {
            let a = x.approx_with(n + 2 + extra, m)?;
            let a = if a < floor { floor.clone() } else { a };
            ln_rational_approx(&a, n + 1, m)
        }))
    }

    pub fn log2_rational(q: &Rational) -> Result<CReal, ComputeError> {
        CReal::ln_rational(q)?.div(&CReal::ln2(), 2)
    }

    pub fn log2(&self, witness: &Rational) -> Result<CReal, ComputeError> {
        self.ln(witness)?.div(&CReal::ln2(), 2)
    }

    pub fn exp_rational(q: &Rational) -> CReal {
        if q.is_zero() {
            return CReal::one();
        }
        let q = q.clone();
        CReal::from_fn(move |n, m| exp_rational_approx(&q, n + 1, m))
    }

    pub fn exp(&self) -> CReal {
        if let Some(q) = self.as_rational() {
            return CReal::exp_rational(q);
        }
        let x = self.clone();
        CReal::from_fn(move |n, m| {
            // exp is e^(|x|+1)-Lipschitz near x; e < 2^(3/2)
            let bits = x.magnitude_with(m)?;
            let lipschitz_bits = 2 * (1u32 << bits.min(20)) + 2;
            let a = x.approx_with(n + 1 + lipschitz_bits, m)?;
            exp_rational_approx(&a, n + 1, m)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{pow2, to_f64};
    use proptest::prelude::*;

    fn close(x: &CReal, want: f64, n: u32) -> bool {
        (to_f64(&x.approx(n).unwrap()) - want).abs() <= 2f64.powi(-(n as i32)) + 1e-15
    }

    #[test]
    fn ln_of_known_values() {
        assert!(close(&CReal::ln2(), core::f64::consts::LN_2, 50));
        assert!(close(&CReal::ln_rational(&int(10)).unwrap(), 10f64.ln(), 48));
        assert!(close(&CReal::ln_rational(&rat(1, 1000)).unwrap(), (0.001f64).ln(), 40));
        assert_eq!(CReal::ln_rational(&int(1)).unwrap().approx(30).unwrap(), Rational::zero());
        assert!(CReal::ln_rational(&int(0)).is_err());
        assert!(CReal::ln_rational(&int(-3)).is_err());
    }

    #[test]
    fn log2_of_powers_of_two() {
        for e in [-7i64, -1, 1, 3, 20] {
            let v = CReal::log2_rational(&pow2(e)).unwrap().approx(40).unwrap();
            assert!((v - int(e)).abs() <= pow2(-40));
        }
    }

    #[test]
    fn exp_of_known_values() {
        assert!(close(&CReal::exp_rational(&int(1)), core::f64::consts::E, 48));
        assert!(close(&CReal::exp_rational(&int(-5)), (-5f64).exp(), 48));
        assert!(close(&CReal::exp_rational(&rat(7, 2)), 3.5f64.exp(), 40));
        let lazy = CReal::ln2().exp();
        assert!((lazy.approx(40).unwrap() - int(2)).abs() <= pow2(-40));
    }

    #[test]
    fn ln_of_lazy_value_uses_witness() {
        let x = CReal::exp_rational(&rat(3, 4));
        let back = x.ln(&int(1)).unwrap();
        assert!((back.approx(40).unwrap() - rat(3, 4)).abs() <= pow2(-40));
        assert_eq!(x.ln(&int(0)).unwrap_err(), ComputeError::NonPositiveWitness);
    }

    proptest! {
        #[test]
        fn ln_exp_roundtrip(num in -200i64..200, den in 1i64..16, n in 0u32..60) {
            let q = rat(num, den);
            let e = CReal::exp_rational(&q);
            // e^q >= 2^(-3|q|/2 - 1)
            let bits = (q.abs() * rat(3, 2)).ceil().to_integer().try_into().unwrap_or(0i64) + 1;
            let witness = pow2(-bits);
            let back = e.ln(&witness).unwrap();
            prop_assert!((back.approx(n).unwrap() - &q).abs() <= pow2(-(n as i64)));
        }

        #[test]
        fn ln_is_additive(a in 1i64..10_000, b in 1i64..10_000) {
            let lhs = CReal::ln_rational(&(int(a) * int(b))).unwrap();
            let rhs = &CReal::ln_rational(&int(a)).unwrap() + &CReal::ln_rational(&int(b)).unwrap();
            prop_assert!((lhs.approx(50).unwrap() - rhs.approx(50).unwrap()).abs() <= pow2(-49));
        }
    }
}
