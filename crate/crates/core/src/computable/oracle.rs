use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{CReal, ComputeError, Precision};
use crate::rational::Rational;

/// One answered request: coordinate, level and the rational handed out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryRecord {
    pub coord: usize,
    pub level: u32,
    pub answer: Rational,
}

/// The only window a black-box solver gets onto its input.
///
/// Every answer is logged in order; the log is the evidence of how many
/// digits the solver actually read.
#[derive(Debug, Clone)]
pub struct DigitOracle {
    sources: Vec<CReal>,
    log: Vec<QueryRecord>,
}

impl DigitOracle {
    pub fn new(sources: Vec<CReal>) -> Self {
        Self { sources, log: Vec::new() }
    }

    /// An oracle that can only repeat the answers recorded in `log`.
    pub fn replay(dim: usize, log: &[QueryRecord]) -> Self {
        let mut tables: Vec<BTreeMap<u32, Rational>> = alloc::vec![BTreeMap::new(); dim];
        for record in log {
            if let Some(table) = tables.get_mut(record.coord) {
                table.insert(record.level, record.answer.clone());
            }
        }
        let sources = tables
            .into_iter()
            .enumerate()
            .map(|(coord, table)| {
                let table = Arc::new(table);
                CReal::from_fn(move |level, _| {
                    table.get(&level).cloned().ok_or(ComputeError::NotRecorded { coord, level })
                })
            })
            .collect();
        Self::new(sources)
    }

    pub fn dim(&self) -> usize {
        self.sources.len()
    }

    pub fn query(&mut self, coord: usize, level: impl Into<Precision>) -> Result<Rational, ComputeError> {
        let level = level.into().get();
        let source = self
            .sources
            .get(coord)
            .ok_or(ComputeError::CoordinateOutOfRange { coord, dim: self.sources.len() })?;
        let answer = source.approx(level)?;
        self.log.push(QueryRecord { coord, level, answer: answer.clone() });
        Ok(answer)
    }

    /// Reads every coordinate at one level.
    pub fn query_all(&mut self, level: impl Into<Precision>) -> Result<Vec<Rational>, ComputeError> {
        let level = level.into();
        (0..self.dim()).map(|c| self.query(c, level)).collect()
    }

    pub fn log(&self) -> &[QueryRecord] {
        &self.log
    }

    /// Highest level queried so far, zero when nothing was asked.
    pub fn consumed_precision(&self) -> u32 {
        self.log.iter().map(|r| r.level).max().unwrap_or(0)
    }

    pub fn answered_identically(&self, other: &DigitOracle) -> bool {
        self.log == other.log
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn oracle() -> DigitOracle {
        let root = CReal::from_int(2).sqrt(&int(1)).unwrap();
        DigitOracle::new(alloc::vec![CReal::from_rational(rat(1, 3)), root])
    }

    #[test]
    fn requery_is_identical_and_logged() {
        let mut o = oracle();
        let a = o.query(1, 9).unwrap();
        let b = o.query(1, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(o.log().len(), 2);
    }

    #[test]
    fn consumed_precision_is_max_level() {
        let mut o = oracle();
        for level in [3, 7, 5] {
            o.query(0, level).unwrap();
        }
        assert_eq!(o.consumed_precision(), 7);
    }

    #[test]
    fn out_of_range_coordinate() {
        let mut o = oracle();
        assert_eq!(o.query(2, 1).unwrap_err(), ComputeError::CoordinateOutOfRange { coord: 2, dim: 2 });
        assert!(o.log().is_empty());
    }

    #[test]
    fn replay_reproduces_answers_and_rejects_new_queries() {
        let mut o = oracle();
        let first: Vec<_> = [(0, 4), (1, 12), (1, 3)].iter().map(|&(c, l)| o.query(c, l).unwrap()).collect();
        let mut r = DigitOracle::replay(2, o.log());
        let again: Vec<_> = [(0, 4), (1, 12), (1, 3)].iter().map(|&(c, l)| r.query(c, l).unwrap()).collect();
        assert_eq!(first, again);
        assert!(r.answered_identically(&o));
        assert_eq!(r.query(1, 13).unwrap_err(), ComputeError::NotRecorded { coord: 1, level: 13 });
    }
}
