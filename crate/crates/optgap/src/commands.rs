//! Subcommand bodies. Each returns the text for stdout and an exit code;
//! `main` only parses arguments and prints.

use std::fs;
use std::path::{Path, PathBuf};

use num_traits::Signed;
use optgap_core::adversary::{fool_solver, verify_conditions, AdversaryError, FoolingConfig};
use optgap_core::computable::ComputeError;
use optgap_core::families::{all_families, family, Family, FamilyError, FamilyName, OptimizerSet, RationalPiece};
use optgap_core::rational::{int, pow2, Rational};
use optgap_core::solvers::{default_solver_name, optimal_value, solver, SolverError, DEFAULT_ROUND_BITS};

use crate::config::{ExperimentConfig, Format};
use crate::csv_export::{write_conditions_csv, write_fooling_csv, write_gap_csv};
use crate::dto::{
    dec, frac, fracs, ConditionReportDto, FamilyEntry, FoolingReportDto, GapRow, GapTable, Metadata, CONSTANT_LEVEL,
};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub written: Vec<PathBuf>,
}

pub fn parse_family(name: &str) -> Result<FamilyName, CliError> {
    name.parse().map_err(|e: FamilyError| CliError::Config(e.to_string()))
}

pub fn registry() -> Result<Vec<FamilyEntry>, CliError> {
    all_families().iter().map(|f| FamilyEntry::of(f.as_ref())).collect()
}

pub fn list(json: bool) -> Result<Outcome, CliError> {
    let entries = registry()?;
    let stdout = if json {
        serde_json::to_string_pretty(&entries)? + "\n"
    } else {
        entries
            .iter()
            .map(|e| format!("{} κ={} {} t0={} solvers={}\n", e.name, e.kappa_display(), e.norm, e.t0, e.solvers.join(",")))
            .collect()
    };
    Ok(Outcome { exit_code: 0, stdout, written: Vec::new() })
}

fn is_budget_error(e: &CliError) -> bool {
    fn family(e: &FamilyError) -> bool {
        matches!(e, FamilyError::Compute(ComputeError::BudgetExceeded { .. }))
    }
    fn solver(e: &SolverError) -> bool {
        match e {
            SolverError::Compute(ComputeError::BudgetExceeded { .. }) => true,
            SolverError::Family(f) => family(f),
            _ => false,
        }
    }
    match e {
        CliError::Compute(ComputeError::BudgetExceeded { .. }) => true,
        CliError::Family(f) => family(f),
        CliError::Solver(s) => solver(s),
        CliError::Adversary(a) => match a {
            AdversaryError::Compute(ComputeError::BudgetExceeded { .. }) => true,
            AdversaryError::Family(f) => family(f),
            AdversaryError::Solver(s) => solver(s),
            _ => false,
        },
        _ => false,
    }
}

fn point_set(set: &OptimizerSet) -> Result<OptimizerSet, CliError> {
    let points: Vec<Vec<Rational>> = set
        .materialize(CONSTANT_LEVEL)?
        .into_iter()
        .filter_map(|p| match p {
            RationalPiece::Point(x) => Some(x),
            _ => None,
        })
        .collect();
    Ok(OptimizerSet::rational_points(points))
}

/// Distance between two optimizer sets; pairs of continua fall back to
/// their isolated points.
fn set_distance(a: &OptimizerSet, b: &OptimizerSet, family: &dyn Family) -> Result<Rational, CliError> {
    let d = match a.set_distance(b, family.norm()) {
        Err(FamilyError::ContinuumPair) => point_set(a)?.set_distance(&point_set(b)?, family.norm())?,
        other => other?,
    };
    Ok(d.approx(CONSTANT_LEVEL)?)
}

fn gap_row(family: &dyn Family, t: &Rational) -> Result<GapRow, CliError> {
    let here = family.path(t);
    let opt = family.optimizers(&here)?;
    let other = family.optimizers(&family.path(&-t))?;
    let optimizer = opt.representative().iter().map(|c| c.approx(CONSTANT_LEVEL)).collect::<Result<Vec<_>, _>>()?;
    let value = optimal_value(family, &here)?.approx(CONSTANT_LEVEL)?;
    Ok(GapRow {
        t: frac(t),
        side: if t.is_negative() { "below" } else { "above" }.into(),
        optimizer: fracs(&optimizer),
        value: frac(&value),
        distance_to_other_side: frac(&set_distance(&opt, &other, family)?),
    })
}

/// Dyadic grid `t = +-2^-j`, `j = 1..=depth`, in increasing order of `t`.
pub fn gap_grid(depth: u32) -> Vec<Rational> {
    let below = (1..=depth as i64).map(|j| -pow2(-j));
    let above = (1..=depth as i64).rev().map(|j| pow2(-j));
    below.chain(above).collect()
}

pub fn gap_table(family: &dyn Family, config: &ExperimentConfig) -> Result<GapTable, CliError> {
    let mut rows = Vec::new();
    let mut incomplete = None;
    for t in gap_grid(config.gap_depth) {
        match gap_row(family, &t) {
            Ok(row) => rows.push(row),
            Err(e) if is_budget_error(&e) => {
                incomplete = Some(format!("stopped at t={}: {e}", frac(&t)));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(GapTable { family: FamilyEntry::of(family)?, optimizer_dim: family.reduced_dim(), seed: config.seed, rows, incomplete })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    fs::write(path, bytes).map_err(CliError::io(path))
}

fn json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes `stem.json` and `stem.meta.json`.
fn write_json<T: serde::Serialize>(dir: &Path, stem: &str, value: &T, command: &str) -> Result<Vec<PathBuf>, CliError> {
    let report = dir.join(format!("{stem}.json"));
    let meta = dir.join(format!("{stem}.meta.json"));
    write_file(&report, &json_bytes(value)?)?;
    write_file(&meta, &json_bytes(&Metadata::now(command))?)?;
    Ok(vec![report, meta])
}

fn write_csv(dir: &Path, stem: &str, emit: impl FnOnce(&mut Vec<u8>) -> Result<(), CliError>) -> Result<PathBuf, CliError> {
    let path = dir.join(format!("{stem}.csv"));
    let mut bytes = Vec::new();
    emit(&mut bytes)?;
    write_file(&path, &bytes)?;
    Ok(path)
}

fn stated_line(entry: &FamilyEntry) -> String {
    let stated = match &entry.stated_kappa_decimal {
        Some(d) => format!("{} = {d}", entry.stated_kappa),
        None => entry.stated_kappa.clone(),
    };
    let flag = if entry.discrepancy { " (differs from computed)" } else { "" };
    format!("κ={} computed={} stated {stated}{flag} norm={}\n", entry.kappa_display(), entry.kappa_decimal, entry.norm)
}

pub fn gap(name: FamilyName, config: &ExperimentConfig) -> Result<Outcome, CliError> {
    config.validate()?;
    let fam = family(name);
    let table = gap_table(fam.as_ref(), config)?;
    let stem = format!("{name}-gap");
    let mut written = Vec::new();
    if config.wants(Format::Json) {
        written.extend(write_json(&config.out_dir, &stem, &table, "gap")?);
    }
    if config.wants(Format::Csv) {
        written.push(write_csv(&config.out_dir, &stem, |w| write_gap_csv(w, &table))?);
    }
    let mut stdout = format!("{name} ");
    stdout += &stated_line(&table.family);
    stdout += &format!("{} rows over t=+-2^-j, j=1..{}\n", table.rows.len(), config.gap_depth);
    let exit_code = match &table.incomplete {
        Some(reason) => {
            stdout += &format!("incomplete: {reason}\n");
            1
        }
        None => 0,
    };
    Ok(Outcome { exit_code, stdout, written })
}

pub fn fooling_config(config: &ExperimentConfig) -> Result<FoolingConfig, CliError> {
    Ok(FoolingConfig {
        tol: config.tolerance()?,
        precision: config.precision,
        iterations: config.iterations,
        round_bits: DEFAULT_ROUND_BITS,
        max_retries: 5,
    })
}

pub fn fooling_report(name: FamilyName, solver_name: &str, config: &ExperimentConfig) -> Result<FoolingReportDto, CliError> {
    config.validate()?;
    let fam = family(name);
    let s = solver(name, solver_name).map_err(|e| match e {
        SolverError::UnknownSolver { .. } => CliError::Config(e.to_string()),
        other => other.into(),
    })?;
    let report = fool_solver(fam.as_ref(), s.as_ref(), &fooling_config(config)?)?;
    Ok(FoolingReportDto::new(&report, config.seed))
}

pub fn fool(name: FamilyName, solver_name: Option<&str>, config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let solver_name = solver_name.unwrap_or(default_solver_name(name));
    let report = fooling_report(name, solver_name, config)?;
    let stem = format!("{name}-{solver_name}-fool");
    let mut written = Vec::new();
    if config.wants(Format::Json) {
        written.extend(write_json(&config.out_dir, &stem, &report, "fool")?);
    }
    if config.wants(Format::Csv) {
        written.push(write_csv(&config.out_dir, &stem, |w| write_fooling_csv(w, &report))?);
    }
    let half_gap = dec(&(optgap_core::rational::parse_rational(&report.kappa).expect("own output") / int(2)));
    let mut stdout = format!(
        "{name}/{solver_name}: consumed precision {} (guard {} bits, {} retries)\n",
        report.consumed_precision, report.guard_bits, report.retries
    );
    for side in [&report.below, &report.above] {
        stdout += &format!("  t={} error={}\n", side.t, side.error_decimal);
    }
    stdout += &format!(
        "  prefix identical: {}, outputs identical: {}, replay identical: {}\n",
        report.prefix_identical, report.outputs_identical, report.replay_identical
    );
    stdout += &format!(
        "  max error {} vs κ/2 = {half_gap}, tol {}: verdict {}\n",
        report.max_error_decimal,
        report.tol,
        if report.verdict { "achieved" } else { "not achieved" }
    );
    Ok(Outcome { exit_code: if report.verdict { 0 } else { 1 }, stdout, written })
}

pub fn conditions_report(name: FamilyName, config: &ExperimentConfig) -> Result<ConditionReportDto, CliError> {
    config.validate()?;
    let fam = family(name);
    let report = verify_conditions(fam.as_ref(), config.samples)?;
    Ok(ConditionReportDto::new(&report, config.seed))
}

pub fn validate(name: FamilyName, config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let report = conditions_report(name, config)?;
    let stem = format!("{name}-validate");
    let mut written = Vec::new();
    if config.wants(Format::Json) {
        written.extend(write_json(&config.out_dir, &stem, &report, "validate")?);
    }
    if config.wants(Format::Csv) {
        written.push(write_csv(&config.out_dir, &stem, |w| write_conditions_csv(w, &report))?);
    }
    let mut stdout = format!("{name}: {} samples per side\n", report.samples);
    for c in &report.conditions {
        stdout += &format!("  ({}) {}: {}\n", c.condition, c.status, c.evidence);
    }
    Ok(Outcome { exit_code: if report.all_ok { 0 } else { 1 }, stdout, written })
}
