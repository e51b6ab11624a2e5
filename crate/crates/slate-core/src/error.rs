use thiserror::Error;

use crate::{AgentId, StatementId};

/// Errors raised by core operations when their contracts are violated.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid instance: budget must be at least 1")]
    ZeroBudget,
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("assignment maps agent {agent:?} to statement {statement:?} outside the slate")]
    AssignmentOutsideSlate {
        agent: AgentId,
        statement: StatementId,
    },
}
