//! Serializable views of core results. Exact rationals are written as
//! `p/q` strings; decimal companions are rounded to 12 places.

use optgap_core::adversary::{ConditionReport, FoolingReport, SideOutcome};
use optgap_core::computable::QueryRecord;
use optgap_core::families::{Family, RationalPiece};
use optgap_core::rational::{to_decimal_string, to_fraction_string, Rational};
use optgap_core::solvers::{solver_names, IterationTrace};
use serde::{Deserialize, Serialize};

pub const DECIMAL_PLACES: u32 = 12;

/// Level at which irrational constants are rendered.
pub const CONSTANT_LEVEL: u32 = 48;

pub fn frac(q: &Rational) -> String {
    to_fraction_string(q)
}

pub fn dec(q: &Rational) -> String {
    to_decimal_string(q, DECIMAL_PLACES)
}

pub fn fracs(v: &[Rational]) -> Vec<String> {
    v.iter().map(frac).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyEntry {
    pub name: String,
    /// Exact gap when it is rational.
    pub kappa: Option<String>,
    pub kappa_decimal: String,
    pub stated_kappa: String,
    pub stated_kappa_decimal: Option<String>,
    /// The computed gap differs from the stated one by more than `2^-20`.
    pub discrepancy: bool,
    pub norm: String,
    pub t0: String,
    pub solvers: Vec<String>,
}

impl FamilyEntry {
    pub fn of(family: &dyn Family) -> Result<Self, crate::CliError> {
        let kappa = family.kappa();
        let approx = kappa.approx(CONSTANT_LEVEL)?;
        let stated = family.stated_kappa();
        let stated_approx = stated.value.as_ref().map(|v| v.approx(CONSTANT_LEVEL)).transpose()?;
        let tolerance = optgap_core::rational::pow2(-20);
        let discrepancy = match &stated_approx {
            Some(s) => (s - &approx).abs() > tolerance,
            None => true,
        };
        Ok(Self {
            name: family.name().to_string(),
            kappa: kappa.as_rational().map(frac),
            kappa_decimal: dec(&approx),
            stated_kappa: stated.text.to_string(),
            stated_kappa_decimal: stated_approx.as_ref().map(dec),
            discrepancy,
            norm: family.norm().to_string(),
            t0: "0".into(),
            solvers: solver_names(family.name()).iter().map(|s| s.to_string()).collect(),
        })
    }

    /// Gap as printed in listings: the exact value when rational, else the
    /// 12-place decimal.
    pub fn kappa_display(&self) -> String {
        match &self.kappa {
            Some(exact) => exact.strip_suffix("/1").unwrap_or(exact).to_string(),
            None => self.kappa_decimal.clone(),
        }
    }
}

use num_traits::Signed;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryDto {
    pub coord: usize,
    pub level: u32,
    pub answer: String,
}

impl From<&QueryRecord> for QueryDto {
    fn from(q: &QueryRecord) -> Self {
        Self { coord: q.coord, level: q.level, answer: frac(&q.answer) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PieceDto {
    Point { x: Vec<String> },
    Segment { from: Vec<String>, to: Vec<String> },
    Flat { fixed: Vec<(usize, String)> },
}

impl From<&RationalPiece> for PieceDto {
    fn from(p: &RationalPiece) -> Self {
        match p {
            RationalPiece::Point(x) => PieceDto::Point { x: fracs(x) },
            RationalPiece::Segment(a, b) => PieceDto::Segment { from: fracs(a), to: fracs(b) },
            RationalPiece::Flat { fixed } => PieceDto::Flat { fixed: fixed.iter().map(|(i, v)| (*i, frac(v))).collect() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideDto {
    pub side: String,
    pub t: String,
    pub solution: Vec<String>,
    pub reduced: Vec<String>,
    pub optimizers: Vec<PieceDto>,
    pub error: String,
    pub error_decimal: String,
    pub queries: Vec<QueryDto>,
}

impl From<&SideOutcome> for SideDto {
    fn from(s: &SideOutcome) -> Self {
        Self {
            side: format!("{:?}", s.side).to_lowercase(),
            t: frac(&s.t),
            solution: fracs(&s.solution),
            reduced: fracs(&s.reduced),
            optimizers: s.optimizers.iter().map(PieceDto::from).collect(),
            error: frac(&s.error),
            error_decimal: dec(&s.error),
            queries: s.queries.iter().map(QueryDto::from).collect(),
        }
    }
}

pub const FOOLING_NOTE: &str = "finite-prefix fooling only; the Banach-Mazur strengthening has no finite counterpart";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoolingReportDto {
    pub family: String,
    pub solver: String,
    pub precision: u32,
    pub iterations: u32,
    pub round_bits: u32,
    pub seed: u64,
    pub tol: String,
    pub kappa: String,
    pub kappa_decimal: String,
    pub consumed_precision: u32,
    pub guard_bits: u32,
    pub retries: u32,
    pub center_solution: Vec<String>,
    pub center_queries: Vec<QueryDto>,
    pub below: SideDto,
    pub above: SideDto,
    pub prefix_identical: bool,
    pub outputs_identical: bool,
    pub replay_identical: bool,
    pub max_error: String,
    pub max_error_decimal: String,
    pub error_sum: String,
    pub verdict: bool,
    pub sum_bound: bool,
    pub note: String,
}

impl FoolingReportDto {
    pub fn new(r: &FoolingReport, seed: u64) -> Self {
        Self {
            family: r.family.to_string(),
            solver: r.solver.to_string(),
            precision: r.config.precision,
            iterations: r.config.iterations,
            round_bits: r.config.round_bits,
            seed,
            tol: frac(&r.config.tol),
            kappa: frac(&r.kappa),
            kappa_decimal: dec(&r.kappa),
            consumed_precision: r.consumed_precision,
            guard_bits: r.guard_bits,
            retries: r.retries,
            center_solution: fracs(&r.center_solution),
            center_queries: r.center_queries.iter().map(QueryDto::from).collect(),
            below: SideDto::from(&r.below),
            above: SideDto::from(&r.above),
            prefix_identical: r.prefix_identical,
            outputs_identical: r.outputs_identical,
            replay_identical: r.replay_identical,
            max_error: frac(&r.max_error),
            max_error_decimal: dec(&r.max_error),
            error_sum: frac(&r.error_sum),
            verdict: r.verdict,
            sum_bound: r.sum_bound,
            note: FOOLING_NOTE.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionDto {
    pub condition: String,
    pub summary: String,
    pub status: String,
    pub evidence: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReportDto {
    pub family: String,
    pub samples: usize,
    pub seed: u64,
    pub all_ok: bool,
    pub conditions: Vec<ConditionDto>,
}

impl ConditionReportDto {
    pub fn new(r: &ConditionReport, seed: u64) -> Self {
        Self {
            family: r.family.to_string(),
            samples: r.samples,
            seed,
            all_ok: r.all_ok(),
            conditions: r
                .results
                .iter()
                .map(|c| ConditionDto {
                    condition: c.condition.label().into(),
                    summary: c.condition.summary().into(),
                    status: c.status.as_str().into(),
                    evidence: c.evidence.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapRow {
    pub t: String,
    pub side: String,
    pub optimizer: Vec<String>,
    pub value: String,
    pub distance_to_other_side: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapTable {
    pub family: FamilyEntry,
    /// Length of each `optimizer` vector.
    pub optimizer_dim: usize,
    pub seed: u64,
    pub rows: Vec<GapRow>,
    /// Set when the table stopped early; holds the error message.
    pub incomplete: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStepDto {
    pub step: usize,
    pub value: String,
    pub solution: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDto {
    pub steps: Vec<TraceStepDto>,
}

impl From<&IterationTrace> for TraceDto {
    fn from(t: &IterationTrace) -> Self {
        Self {
            steps: t
                .steps
                .iter()
                .map(|s| TraceStepDto { step: s.step, value: frac(&s.value), solution: fracs(&s.solution) })
                .collect(),
        }
    }
}

/// Run metadata kept apart from reports so that reports stay byte-identical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub command: String,
    pub version: String,
    pub generated_unix_seconds: u64,
}

impl Metadata {
    pub fn now(command: impl Into<String>) -> Self {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self { command: command.into(), version: env!("CARGO_PKG_VERSION").into(), generated_unix_seconds: secs }
    }
}
