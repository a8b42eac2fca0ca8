//! Expansion budgets shared by the exact engines.

use crate::error::{Error, Result};

/// Environment variable that overrides every expansion budget.
pub const BUDGET_ENV: &str = "PTF_FOOL_BUDGET";

/// Default ceiling on elementary multiply-accumulate steps in one exact expansion.
pub const DEFAULT_BUDGET: u128 = 200_000_000;

/// Default maximum degree of a monomial.
pub const DEFAULT_MAX_DEGREE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_ops: u128,
}

impl Budget {
    pub fn new(max_ops: u128) -> Self {
        Self { max_ops }
    }

    /// Default budget, overridden by `PTF_FOOL_BUDGET` when it parses.
    pub fn from_env() -> Self {
        let max_ops = std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().replace('_', "").parse::<u128>().ok())
            .unwrap_or(DEFAULT_BUDGET);
        Self { max_ops }
    }

    pub fn check(&self, needed: u128) -> Result<()> {
        if needed > self.max_ops {
            Err(Error::BudgetExceeded { needed, budget: self.max_ops })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::from_env()
    }
}
