//! Entrywise sampling schemes.
//!
//! * [`hybrid`]: independent keep/drop of every entry with probability
//!   `min(1, s·p*)`, where `p*` is the per-entry max of the ℓ1-mass, row-ℓ1
//!   and column-ℓ1 distributions.
//! * [`rows`]: `s` draws with replacement from every row's ℓ1 distribution,
//!   giving a hard bound on row sparsity.
//! * [`vector`]: the same ℓ1 draw applied to a single vector.

pub mod budget;
pub mod hybrid;
pub mod rows;
pub mod vector;

pub use budget::{budget, budget_from_parts, SampleBudget};
pub use hybrid::{sparsify_hybrid, HybridDistribution, HybridSparsifier};
pub use rows::{l1_row_budget, sparsify_l1_rows};
pub use vector::{l1_sample_vector, sparsify_vector_l1};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of one sparsification run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    /// Target relative spectral error ε.
    pub eps: f64,
    /// Multiplier on the asymptotic sample budget.
    pub c_over: f64,
    pub seed: u64,
    /// Use this budget `s` instead of the formula.
    pub budget_override: Option<f64>,
}

impl SampleConfig {
    pub fn new(eps: f64, c_over: f64, seed: u64) -> Self {
        Self { eps, c_over, seed, budget_override: None }
    }

    pub fn with_budget(mut self, s: f64) -> Self {
        self.budget_override = Some(s);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("eps must be > 0, got {}", self.eps)));
        }
        if !(self.c_over > 0.0 && self.c_over.is_finite()) {
            return Err(Error::InvalidArgument(format!("oversampling constant must be > 0, got {}", self.c_over)));
        }
        if let Some(s) = self.budget_override {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidArgument(format!("budget must be > 0, got {s}")));
            }
        }
        Ok(())
    }
}
