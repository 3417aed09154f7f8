//! Sample-based checks of the seven hypotheses that make a family
//! impossible to solve from finite-precision input.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use super::{AdversaryError, Result};
use crate::computable::{compare_up_to, CReal, ComparisonVerdict, Precision};
use crate::families::{Family, FamilyName, Location, OptimizerSet, RationalPiece, Sense, Side};
use crate::rational::{int, pow2, rat, Rational};

const LEVEL: u32 = 64;
const NEAR_ZERO_EXP: i64 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
}

impl Condition {
    pub const ALL: [Condition; 7] =
        [Condition::I, Condition::II, Condition::III, Condition::IV, Condition::V, Condition::VI, Condition::VII];

    pub fn label(self) -> &'static str {
        match self {
            Condition::I => "i",
            Condition::II => "ii",
            Condition::III => "iii",
            Condition::IV => "iv",
            Condition::V => "v",
            Condition::VI => "vi",
            Condition::VII => "vii",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Condition::I => "regions are disjoint",
            Condition::II => "regions touch: parameter distance tends to zero",
            Condition::III => "optimizer sets stay kappa apart",
            Condition::IV => "path endpoints lie in the regions, midpoint on the boundary",
            Condition::V => "each region's optimizers beat the other's",
            Condition::VI => "optimizers cluster by region",
            Condition::VII => "membership decider is never wrong",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConditionStatus {
    VerifiedOnSamples,
    AssertedByConstruction,
    Failed(String),
}

impl ConditionStatus {
    pub fn is_ok(&self) -> bool {
        !matches!(self, ConditionStatus::Failed(_))
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ConditionStatus::VerifiedOnSamples => "verified-on-samples",
            ConditionStatus::AssertedByConstruction => "asserted-by-construction",
            ConditionStatus::Failed(_) => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionResult {
    pub condition: Condition,
    pub status: ConditionStatus,
    pub evidence: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    pub family: FamilyName,
    pub samples: usize,
    pub results: Vec<ConditionResult>,
}

impl ConditionReport {
    pub fn all_ok(&self) -> bool {
        self.results.iter().all(|r| r.status.is_ok())
    }

    pub fn status(&self, condition: Condition) -> &ConditionStatus {
        &self.results.iter().find(|r| r.condition == condition).expect("every condition is reported").status
    }

    pub fn failed(&self) -> Vec<Condition> {
        self.results.iter().filter(|r| !r.status.is_ok()).map(|r| r.condition).collect()
    }
}

struct Sample {
    t: Rational,
    side: Side,
    verdict: ComparisonVerdict,
    optimizers: Vec<Vec<Rational>>,
}

fn side_points(family: &dyn Family, t: &Rational) -> Result<Vec<Vec<Rational>>> {
    let opt = family.optimizers(&family.path(t))?;
    Ok(opt
        .materialize(LEVEL)?
        .into_iter()
        .filter_map(|p| match p {
            RationalPiece::Point(x) => Some(x),
            _ => None,
        })
        .collect())
}

fn ok_if(failures: Vec<String>, pass: String) -> (ConditionStatus, String) {
    match failures.first() {
        None => (ConditionStatus::VerifiedOnSamples, pass),
        Some(first) => (ConditionStatus::Failed(first.clone()), format!("{} failing samples; first: {first}", failures.len())),
    }
}

fn approx(x: &CReal) -> Result<Rational> {
    Ok(x.approx(LEVEL)?)
}

/// Checks the seven conditions on `samples` interior path points per side,
/// `t = +-i/(samples+1)`.
pub fn verify_conditions(family: &dyn Family, samples: usize) -> Result<ConditionReport> {
    if samples < 2 {
        return Err(AdversaryError::TooFewSamples { got: samples });
    }
    let mut points = Vec::with_capacity(2 * samples);
    for i in 1..=samples as i64 {
        let n = samples as i64 + 1;
        for (t, side) in [(rat(-i, n), Side::Below), (rat(i, n), Side::Above)] {
            let y = family.path(&t);
            let verdict = family.membership(&y, Precision(LEVEL))?;
            let optimizers = side_points(family, &t)?;
            points.push(Sample { t, side, verdict, optimizers });
        }
    }
    let kappa = family.kappa();
    let norm = family.norm();
    let mut results = Vec::with_capacity(7);
    let mut push = |condition: Condition, (status, evidence): (ConditionStatus, String)| {
        results.push(ConditionResult { condition, status, evidence });
    };

    // (i)
    let verdicts_of = |side: Side| -> Vec<ComparisonVerdict> {
        points.iter().filter(|s| s.side == side && s.verdict.is_decided()).map(|s| s.verdict).collect()
    };
    let (below, above) = (verdicts_of(Side::Below), verdicts_of(Side::Above));
    let shared: Vec<String> = below
        .iter()
        .filter(|v| above.contains(v))
        .take(1)
        .map(|v| format!("verdict {v:?} occurs on both sides of the boundary"))
        .collect();
    let undecided = points.iter().filter(|s| !s.verdict.is_decided()).count();
    push(Condition::I, ok_if(shared, format!("{} samples decided, {undecided} undecided, no verdict shared", points.len() - undecided)));

    // (ii)
    let mut distances = Vec::new();
    for j in 1..=20i64 {
        let lo = family.path(&-pow2(-j)).approx_params(LEVEL)?;
        let hi = family.path(&pow2(-j)).approx_params(LEVEL)?;
        let d = lo.iter().zip(&hi).map(|(a, b)| (a - b).abs()).max().unwrap_or_else(Rational::zero);
        distances.push(d);
    }
    let slack = pow2(2 - LEVEL as i64);
    let mut failures: Vec<String> = distances
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] > &w[0] + &slack)
        .map(|(j, _)| format!("distance grows between j={} and j={}", j + 1, j + 2))
        .collect();
    let last = distances.last().cloned().unwrap_or_else(Rational::zero);
    if last > pow2(-10) {
        failures.push(format!("distance {last} at t=+-2^-20 does not approach zero"));
    }
    push(Condition::II, ok_if(failures, format!("max-norm parameter distance at t=+-2^-20 is {last}")));

    // (iii)
    let threshold = approx(&kappa)? - pow2(-8);
    let mut failures = Vec::new();
    let mut observed: Option<Rational> = None;
    let as_set = |pts: &[Vec<Rational>]| OptimizerSet::rational_points(pts.to_vec());
    let negatives: Vec<&Sample> = points.iter().filter(|s| s.side == Side::Below).collect();
    let positives: Vec<&Sample> = points.iter().filter(|s| s.side == Side::Above).collect();
    let positive_sets: Vec<OptimizerSet> = positives.iter().map(|s| as_set(&s.optimizers)).collect();
    for n in &negatives {
        let set = as_set(&n.optimizers);
        for (p, pset) in positives.iter().zip(&positive_sets) {
            let d = approx(&set.set_distance(pset, norm)?)?;
            if observed.as_ref().is_none_or(|o| d < *o) {
                observed = Some(d.clone());
            }
            if d < threshold {
                failures.push(format!("distance {d} between t={} and t={}", n.t, p.t));
            }
        }
    }
    let observed = observed.unwrap_or_else(Rational::zero);
    push(Condition::III, ok_if(failures, format!("minimum sampled distance {observed} >= kappa - 2^-8")));

    // (iv)
    let mut failures = Vec::new();
    for (t, side) in [(int(-1), Side::Below), (int(1), Side::Above)] {
        let y = family.path(&t);
        family.check_instance(&y)?;
        let v = family.membership(&y, Precision(LEVEL))?;
        if v != side.verdict() {
            failures.push(format!("endpoint t={t} classified {v:?}"));
        }
    }
    let center = family.path(&Rational::zero());
    family.check_instance(&center)?;
    let (lhs, rhs) = family.boundary_pair(&center.params)?;
    let exact_tie = matches!((lhs.as_rational(), rhs.as_rational()), (Some(a), Some(b)) if a == b);
    let v = family.membership(&center, Precision(LEVEL))?;
    if v.is_decided() {
        failures.push(format!("t=0 classified {v:?} at level {LEVEL}"));
    }
    let (status, evidence) = ok_if(failures, String::from("endpoints decided correctly, t=0 undecided"));
    let status = if status.is_ok() && exact_tie { ConditionStatus::AssertedByConstruction } else { status };
    push(Condition::IV, (status, evidence));

    // (v)
    let mut failures = Vec::new();
    for s in &points {
        let params = &family.path(&s.t).params;
        let own = family.optimizers_at(Location::Side(s.side), params)?.representative();
        let other = family.optimizers_at(Location::Side(s.side.other()), params)?.representative();
        let value = |x: &[CReal]| -> Result<CReal> {
            let mut q = x.iter().map(|c| c.approx(2 * LEVEL)).collect::<core::result::Result<Vec<_>, _>>()?;
            q.resize(family.solution_dim(), Rational::zero());
            Ok(family.objective(&q, params)?)
        };
        let (a, b) = (value(&own)?, value(&other)?);
        let want = match family.sense() {
            Sense::Maximize => ComparisonVerdict::Above,
            Sense::Minimize => ComparisonVerdict::Below,
        };
        let got = compare_up_to(&a, &b, LEVEL)?;
        if got != want {
            failures.push(format!("at t={} own optimizer compares {got:?} against the other side's", s.t));
        }
    }
    push(Condition::V, ok_if(failures, String::from("own-side optimizers strictly better on every sample")));

    // (vi)
    let near = [side_points(family, &-pow2(-NEAR_ZERO_EXP))?, side_points(family, &pow2(-NEAR_ZERO_EXP))?];
    let near_sets = [as_set(&near[0]), as_set(&near[1])];
    let mut failures = Vec::new();
    for s in &points {
        let (own, other) = match s.side {
            Side::Below => (&near_sets[0], &near_sets[1]),
            Side::Above => (&near_sets[1], &near_sets[0]),
        };
        for x in &s.optimizers {
            let d_own = own.distance_to_rational(x, norm)?;
            let d_other = other.distance_to_rational(x, norm)?;
            if compare_up_to(&d_own, &d_other, LEVEL)? != ComparisonVerdict::Below {
                failures.push(format!("optimizer at t={} is not closer to its own side", s.t));
            }
        }
    }
    push(Condition::VI, ok_if(failures, String::from("every sampled optimizer is nearer its own side at t=+-2^-30")));

    // (vii)
    let failures: Vec<String> = points
        .iter()
        .filter(|s| s.verdict.is_decided() && s.verdict != s.side.verdict())
        .map(|s| format!("t={} classified {:?}", s.t, s.verdict))
        .collect();
    push(Condition::VII, ok_if(failures, format!("{} decided samples, all on the correct side", points.len() - undecided)));

    Ok(ConditionReport { family: family.name(), samples, results })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{ChannelFamily, LpFamily};

    #[test]
    fn lp_passes_everything() {
        let r = verify_conditions(&LpFamily, 12).unwrap();
        assert!(r.all_ok(), "{r:?}");
        assert_eq!(r.results.len(), 7);
    }

    #[test]
    fn channel_parameter_distance_shrinks() {
        let r = verify_conditions(&ChannelFamily::default(), 4).unwrap();
        assert_eq!(r.status(Condition::II), &ConditionStatus::VerifiedOnSamples);
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(verify_conditions(&LpFamily, 1), Err(AdversaryError::TooFewSamples { got: 1 })));
    }
}
