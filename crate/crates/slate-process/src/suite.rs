use slate_core::{AgentId, Payload, UtilityValue};
use thiserror::Error;

/// A statement produced by a generative query, before the process has
/// assigned it a run-unique id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatementDraft {
    pub payload: Payload,
    pub cost: u64,
}

impl StatementDraft {
    pub fn text(text: impl Into<String>, cost: u64) -> Self {
        StatementDraft {
            payload: Payload::Text(text.into()),
            cost,
        }
    }
}

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("discriminative query failed: {0}")]
    Disc(String),
    #[error("generative query failed: {0}")]
    Gen(String),
}

/// The only access the process has to the statement universe and the agents'
/// utilities: a discriminative query estimating one agent's utility for one
/// statement, and a generative query proposing a statement of bounded cost
/// for a group of agents at a utility level.
///
/// Implementations carry their own rng state and caches; a suite must be
/// cloned (with derived seeds) before being used by a second concurrent run.
pub trait QuerySuite {
    /// Estimate the utility agent `agent` derives from `statement`.
    fn disc(&mut self, agent: AgentId, statement: &Payload) -> Result<UtilityValue, QueryError>;

    /// Propose a statement of cost at most `cost_cap` aimed at agents in
    /// `active` approving it at `level`. May return `None`; real adapters
    /// cannot always produce a statement under a small cap.
    fn gen(
        &mut self,
        active: &[AgentId],
        level: UtilityValue,
        cost_cap: u64,
    ) -> Result<Option<StatementDraft>, QueryError>;
}
