//! Node-count budgets for the exhaustive searches.
//!
//! Budgets are explicit counters, never wall-clock timeouts, so verdicts
//! stay deterministic and trustworthy.

use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("search budget exhausted")]
pub struct BudgetExhausted;

#[derive(Debug, Clone, Copy)]
pub struct Budget {
    left: u64,
}

impl Budget {
    pub fn new(nodes: u64) -> Self {
        Budget { left: nodes }
    }

    pub fn unlimited() -> Self {
        Budget { left: u64::MAX }
    }

    /// Consumes one search node.
    pub fn tick(&mut self) -> Result<(), BudgetExhausted> {
        if self.left == 0 {
            return Err(BudgetExhausted);
        }
        self.left -= 1;
        Ok(())
    }

    pub fn remaining(&self) -> u64 {
        self.left
    }
}
