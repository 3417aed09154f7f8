use alloc::sync::Arc;

use super::{CReal, ComputeError, Precision};
use crate::rational::Rational;

type TermFn = dyn Fn(usize, u32) -> Result<Rational, ComputeError> + Send + Sync;

/// A computable sequence of reals: `approx(i, k)` is within `2^-k` of term `i`.
#[derive(Clone)]
pub struct CRealSequence(Arc<TermFn>);

impl core::fmt::Debug for CRealSequence {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("CRealSequence")
    }
}

impl CRealSequence {
    pub fn new<F>(approximate: F) -> Self
    where
        F: Fn(usize, u32) -> Result<Rational, ComputeError> + Send + Sync + 'static,
    {
        Self(Arc::new(approximate))
    }

    /// A sequence of rationals, each its own exact representation.
    pub fn from_rationals<F>(term: F) -> Self
    where
        F: Fn(usize) -> Rational + Send + Sync + 'static,
    {
        Self::new(move |i, _| Ok(term(i)))
    }

    pub fn approx(&self, index: usize, level: impl Into<Precision>) -> Result<Rational, ComputeError> {
        (self.0)(index, level.into().get())
    }

    pub fn term(&self, index: usize) -> CReal {
        let f = self.0.clone();
        CReal::from_fn(move |level, meter| {
            meter.tick(1)?;
            f(index, level)
        })
    }
}
