use alloc::vec::Vec;

use super::{AdversaryError, Result};
use crate::computable::{ComparisonVerdict, Precision};
use crate::families::Family;
use crate::rational::{int, pow2, rat, Rational};

/// Highest membership level tried at one bisection midpoint.
pub const BISECT_MAX_LEVEL: u32 = 256;

/// Bracket `a < b < c` around the boundary point with `b` the midpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisectionState {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub depth: u32,
}

impl BisectionState {
    pub fn width(&self) -> Rational {
        &self.c - &self.a
    }

    /// `2^(2 - depth)`.
    pub fn expected_width(depth: u32) -> Rational {
        pow2(2 - depth as i64)
    }
}

/// One membership decision made during a bisection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipCall {
    pub t: Rational,
    pub level: u32,
    pub verdict: ComparisonVerdict,
}

/// Offset of the initial midpoint; it keeps every midpoint off the dyadics.
pub fn default_offset() -> Rational {
    rat(-1, 3)
}

/// Bisects the path with the membership decider, starting from
/// `(offset - 1, offset, offset + 1)`.
pub fn bisect_path_from(family: &dyn Family, depth: u32, offset: &Rational) -> Result<(BisectionState, Vec<MembershipCall>)> {
    if depth == 0 {
        return Err(AdversaryError::InvalidDepth);
    }
    let mut state = BisectionState { a: offset - int(1), b: offset.clone(), c: offset + int(1), depth: 1 };
    let mut calls = Vec::new();
    while state.depth < depth {
        let call = decide(family, &state.b)?;
        let below = call.verdict == ComparisonVerdict::Below;
        calls.push(call);
        let (a, c) = if below { (state.b.clone(), state.c.clone()) } else { (state.a.clone(), state.b.clone()) };
        state = BisectionState { b: (&a + &c) / int(2), a, c, depth: state.depth + 1 };
    }
    Ok((state, calls))
}

pub fn bisect_path(family: &dyn Family, depth: u32) -> Result<BisectionState> {
    Ok(bisect_path_from(family, depth, &default_offset())?.0)
}

fn decide(family: &dyn Family, t: &Rational) -> Result<MembershipCall> {
    let y = family.path(t);
    let mut level = 8;
    while level <= BISECT_MAX_LEVEL {
        let verdict = family.membership(&y, Precision(level))?;
        if verdict.is_decided() {
            return Ok(MembershipCall { t: t.clone(), level, verdict });
        }
        level *= 2;
    }
    Err(AdversaryError::MembershipUndecided { t: t.clone(), level: BISECT_MAX_LEVEL })
}
