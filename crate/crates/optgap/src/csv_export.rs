use std::io::Write;

use optgap_core::rational::parse_rational;
use optgap_core::solvers::IterationTrace;

use crate::dto::{dec, ConditionReportDto, FoolingReportDto, GapTable};
use crate::CliError;

fn decimal(exact: &str) -> String {
    parse_rational(exact).map(|q| dec(&q)).unwrap_or_else(|_| exact.to_string())
}

/// Columns `t, side, x0.., value, distance_to_other_side, kappa`.
pub fn write_gap_csv<W: Write>(out: W, table: &GapTable) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let dim = table.optimizer_dim;
    let mut header = vec!["t".to_string(), "side".to_string()];
    header.extend((0..dim).map(|i| format!("x{i}")));
    header.extend(["value", "distance_to_other_side", "kappa"].map(String::from));
    w.write_record(&header)?;
    for row in &table.rows {
        let mut rec = vec![decimal(&row.t), row.side.clone()];
        rec.extend(row.optimizer.iter().map(|x| decimal(x)));
        rec.push(decimal(&row.value));
        rec.push(decimal(&row.distance_to_other_side));
        rec.push(table.family.kappa_decimal.clone());
        w.write_record(&rec)?;
    }
    w.flush().map_err(CliError::io("csv output"))?;
    Ok(())
}

/// Columns `step, value, x0..`.
pub fn write_trace_csv<W: Write>(out: W, trace: &IterationTrace) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let dim = trace.steps.first().map_or(0, |s| s.solution.len());
    let mut header = vec!["step".to_string(), "value".to_string()];
    header.extend((0..dim).map(|i| format!("x{i}")));
    w.write_record(&header)?;
    for s in &trace.steps {
        let mut rec = vec![s.step.to_string(), dec(&s.value)];
        rec.extend(s.solution.iter().map(dec));
        w.write_record(&rec)?;
    }
    w.flush().map_err(CliError::io("csv output"))?;
    Ok(())
}

/// One summary row per fooling report.
pub fn write_fooling_csv<W: Write>(out: W, report: &FoolingReportDto) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "family",
        "solver",
        "consumed_precision",
        "t_below",
        "t_above",
        "error_below",
        "error_above",
        "kappa",
        "verdict",
    ])?;
    w.write_record([
        report.family.clone(),
        report.solver.clone(),
        report.consumed_precision.to_string(),
        decimal(&report.below.t),
        decimal(&report.above.t),
        report.below.error_decimal.clone(),
        report.above.error_decimal.clone(),
        report.kappa_decimal.clone(),
        report.verdict.to_string(),
    ])?;
    w.flush().map_err(CliError::io("csv output"))?;
    Ok(())
}

pub fn write_conditions_csv<W: Write>(out: W, report: &ConditionReportDto) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["family", "condition", "status", "evidence"])?;
    for c in &report.conditions {
        w.write_record([report.family.as_str(), &c.condition, &c.status, &c.evidence])?;
    }
    w.flush().map_err(CliError::io("csv output"))?;
    Ok(())
}
