//! Exact rational helpers shared by every module.
//!
//! All ground truth in the crate is a [`Rational`]: an arbitrary precision
//! fraction kept in lowest terms with a positive denominator.

use alloc::format;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// `2^exp` for any signed exponent.
pub fn pow2(exp: i64) -> Rational {
    let mag = BigInt::one() << exp.unsigned_abs() as usize;
    if exp >= 0 {
        Rational::from_integer(mag)
    } else {
        Rational::new(BigInt::one(), mag)
    }
}

/// Smallest `e` with `|q| <= 2^e`; zero maps to `i64::MIN`.
pub fn ceil_log2(q: &Rational) -> i64 {
    if q.is_zero() {
        return i64::MIN;
    }
    let num = q.numer().abs();
    let den = q.denom().clone();
    let mut e = num.bits() as i64 - den.bits() as i64;
    // num/den lies in (2^(e-1), 2^(e+1)); settle the last bit exactly.
    loop {
        let fits = if e >= 0 {
            num <= &den << e as usize
        } else {
            &num << (-e) as usize <= den
        };
        if fits {
            let below = e - 1;
            let fits_below = if below >= 0 {
                num <= &den << below as usize
            } else {
                &num << (-below) as usize <= den
            };
            if fits_below {
                e = below;
                continue;
            }
            return e;
        }
        e += 1;
    }
}

/// Bits needed so that `|q| <= 2^bits`, clamped at zero.
pub fn magnitude_bits(q: &Rational) -> u32 {
    let e = ceil_log2(q);
    if e <= 0 {
        0
    } else {
        e as u32
    }
}

/// `floor(q * 2^k) / 2^k`.
pub fn floor_dyadic(q: &Rational, k: u32) -> Rational {
    let scale = BigInt::one() << k as usize;
    let scaled = (q * Rational::from_integer(scale.clone())).floor();
    Rational::new(scaled.to_integer(), scale)
}

/// Nearest multiple of `2^-k`, ties rounded up.
pub fn round_dyadic(q: &Rational, k: u32) -> Rational {
    let scale = BigInt::one() << k as usize;
    let scaled = q * Rational::from_integer(scale.clone()) + rat(1, 2);
    Rational::new(scaled.floor().to_integer(), scale)
}

/// `floor(q * 2^k)` as an integer.
pub fn to_fixed(q: &Rational, k: u32) -> BigInt {
    let scaled = q.numer() << k as usize;
    scaled.div_floor(q.denom())
}

pub fn from_fixed(value: BigInt, k: u32) -> Rational {
    Rational::new(value, BigInt::one() << k as usize)
}

pub fn to_f64(q: &Rational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back to a 64-bit mantissa for huge numerators and denominators.
    let shift = q.numer().bits().max(q.denom().bits()) as i64 - 64;
    if shift <= 0 {
        return f64::NAN;
    }
    let n = (q.numer() >> shift as usize).to_f64().unwrap_or(f64::NAN);
    let d = (q.denom() >> shift as usize).to_f64().unwrap_or(f64::NAN);
    n / d
}

pub fn from_f64_exact(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}

/// Floor of the square root of a non-negative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    match n.sign() {
        Sign::Minus => BigInt::zero(),
        _ => {
            let mag: BigUint = n.magnitude().clone();
            BigInt::from(mag.sqrt())
        }
    }
}

// floor(sqrt(a) * 2^p) / 2^p, within 2^(1-p) of sqrt(a).
pub fn sqrt_floor(a: &Rational, p: u32) -> Rational {
    let scaled = (a.numer() << (2 * p) as usize) / a.denom();
    let root = isqrt(&scaled);
    Rational::new(root, BigInt::one() << p as usize)
}

/// Compares `sqrt(a0) + sqrt(a1)` with `sqrt(b0) + sqrt(b1)` exactly.
///
/// All four inputs must be non-negative.
pub fn cmp_sqrt_sums(a: [&Rational; 2], b: [&Rational; 2]) -> Ordering {
    // Squaring both sides leaves 2*sqrt(pa) - 2*sqrt(pb) against r.
    let pa = a[0] * a[1];
    let pb = b[0] * b[1];
    let r = (b[0] + b[1]) - (a[0] + a[1]);
    cmp_twice_sqrt_diff(&pa, &pb, &r)
}

// Sign of 2*(sqrt(p) - sqrt(q)) - r for p, q >= 0.
fn cmp_twice_sqrt_diff(p: &Rational, q: &Rational, r: &Rational) -> Ordering {
    let lhs_sign = p.cmp(q);
    let r_sign = r.cmp(&Rational::zero());
    match (lhs_sign, r_sign) {
        (Ordering::Equal, _) => Ordering::Equal.cmp(&r_sign),
        (Ordering::Greater, Ordering::Less | Ordering::Equal) => Ordering::Greater,
        (Ordering::Less, Ordering::Greater | Ordering::Equal) => Ordering::Less,
        (Ordering::Greater, Ordering::Greater) => {
            // compare 4(p + q - 2 sqrt(pq)) with r^2
            cmp_squared_gap(p, q, r)
        }
        (Ordering::Less, Ordering::Less) => cmp_squared_gap(q, p, &-r).reverse(),
    }
}

// For p > q and r > 0: sign of 2(sqrt(p) - sqrt(q)) - r.
fn cmp_squared_gap(p: &Rational, q: &Rational, r: &Rational) -> Ordering {
    // 4(p+q) - r^2 versus 8 sqrt(pq)
    let lhs = int(4) * (p + q) - r * r;
    if lhs.is_negative() {
        return Ordering::Less;
    }
    let lhs_sq = &lhs * &lhs;
    let rhs_sq = int(64) * p * q;
    lhs_sq.cmp(&rhs_sq)
}

/// Renders as `p/q`, always with an explicit denominator.
pub fn to_fraction_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Decimal rendering rounded half away from zero to `places` digits.
pub fn to_decimal_string(q: &Rational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = q.abs() * Rational::from_integer(scale.clone()) + rat(1, 2);
    let digits = scaled.floor().to_integer();
    let (whole, frac) = digits.div_rem(&scale);
    let sign = if q.is_negative() && !digits.is_zero() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{whole}");
    }
    let frac = format!("{frac}");
    let pad = places as usize - frac.len();
    format!("{sign}{whole}.{}{frac}", "0".repeat(pad))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError {
    input: String,
}

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}` is not a rational (expected p/q, an integer or a decimal)", self.input)
    }
}

impl core::error::Error for ParseRationalError {}

/// Accepts `p/q`, plain integers and finite decimals such as `-0.125`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError { input: String::from(s) };
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = whole.starts_with('-');
        let whole_abs = whole.trim_start_matches(['-', '+']);
        let whole: BigInt = if whole_abs.is_empty() {
            BigInt::zero()
        } else {
            whole_abs.parse().map_err(|_| err())?
        };
        let frac_val: BigInt = frac.parse().map_err(|_| err())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let mag = Rational::new(whole * &scale + frac_val, scale);
        return Ok(if negative { -mag } else { mag });
    }
    let n: BigInt = s.parse().map_err(|_| err())?;
    Ok(Rational::from_integer(n))
}
