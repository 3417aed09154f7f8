use num_traits::Signed;

use super::{AdversaryError, Result};
use crate::computable::{CReal, ComparisonVerdict};
use crate::rational::{pow2, Rational};

/// Decides whether `z` clears `delta` from a single level-`level` approximant.
///
/// Requires `2^(1 - level) < delta`. `Above` guarantees `z >= delta - 2^-level`
/// and `Below` guarantees `z < delta + 2^-level`.
pub fn threshold_decide(z: &CReal, delta: &Rational, level: u32) -> Result<ComparisonVerdict> {
    if !delta.is_positive() || pow2(1 - level as i64) >= *delta {
        return Err(AdversaryError::ThresholdPrecondition { delta: delta.clone(), level });
    }
    let r = z.approx(level)?;
    Ok(if r >= *delta { ComparisonVerdict::Above } else { ComparisonVerdict::Below })
}
