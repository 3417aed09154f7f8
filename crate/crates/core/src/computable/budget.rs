use core::sync::atomic::{AtomicU64, Ordering};

use super::ComputeError;

pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;

static STEP_BUDGET: AtomicU64 = AtomicU64::new(DEFAULT_STEP_BUDGET);

/// Sets the number of elementary steps one top-level query may spend.
pub fn set_step_budget(steps: u64) {
    STEP_BUDGET.store(steps.max(1), Ordering::Relaxed);
}

pub fn step_budget() -> u64 {
    STEP_BUDGET.load(Ordering::Relaxed)
}

/// Step counter threaded through one top-level approximation request.
#[derive(Debug)]
pub struct StepMeter {
    used: u64,
    limit: u64,
}

impl StepMeter {
    pub fn new(limit: u64) -> Self {
        Self { used: 0, limit }
    }

    pub fn with_global_budget() -> Self {
        Self::new(step_budget())
    }

    pub fn tick(&mut self, steps: u64) -> Result<(), ComputeError> {
        self.used = self.used.saturating_add(steps);
        if self.used > self.limit {
            Err(ComputeError::BudgetExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }
}
