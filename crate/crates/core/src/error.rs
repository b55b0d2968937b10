use thiserror::Error;

use crate::closed::UpBasis;
use crate::model::ModelError;
use crate::omega::{Natural, OmegaError};
use crate::oracles::OracleError;

/// Failure of a basis computation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError<N: Natural> {
    /// An oracle answered UNKNOWN or the budget ran out. `partial` holds the
    /// complement elements found so far, when the computation keeps any.
    #[error("budget exhausted after {steps} steps")]
    BudgetExhausted { steps: u64, partial: Option<UpBasis<N>> },
    #[error("system is not normalized")]
    NotNormalized,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Omega(#[from] OmegaError),
}

impl<N: Natural> AnalysisError<N> {
    pub fn is_budget(&self) -> bool {
        matches!(self, AnalysisError::BudgetExhausted { .. })
    }
}
