use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{CoreError, UtilityValue};

/// Identifier of a statement, unique within a run. Ids are handed out by a
/// per-run monotone counter, so every tie-break on statement identity is
/// reproducible under a fixed seed.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct StatementId(pub u64);

/// Agent index, dense in `0..n`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct AgentId(pub u32);

impl AgentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Statement content. Either free text (cost = word count) or a partial
/// opinion vector over issues (cost = number of issues addressed).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Payload {
    Text(String),
    /// Map issue index -> opinion in `1..=b`.
    Opinions(BTreeMap<u32, u32>),
}

impl Payload {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Payload::Text(t) => Some(t),
            Payload::Opinions(_) => None,
        }
    }
}

/// The unit of selection: an opaque payload plus a nonnegative integer cost.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub id: StatementId,
    pub payload: Payload,
    pub cost: u64,
}

/// An agent, described by an opaque payload (review text, comment bundle,
/// or an ideal opinion vector rendered elsewhere).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agent {
    pub id: AgentId,
    pub description: String,
}

/// The problem container: agent roster, budget, and the descending grid of
/// utility levels the selection process iterates over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub agents: Vec<Agent>,
    pub budget: u64,
    pub level_grid: Vec<UtilityValue>,
}

impl Instance {
    pub fn new(
        agents: Vec<Agent>,
        budget: u64,
        level_grid: Vec<UtilityValue>,
    ) -> Result<Self, CoreError> {
        if budget == 0 {
            return Err(CoreError::ZeroBudget);
        }
        if level_grid.is_empty() {
            return Err(CoreError::InvalidInstance(
                "level grid must be nonempty".into(),
            ));
        }
        if !level_grid.windows(2).all(|w| w[0] > w[1]) {
            return Err(CoreError::InvalidInstance(
                "level grid must be strictly descending".into(),
            ));
        }
        for (k, agent) in agents.iter().enumerate() {
            if agent.id.index() != k {
                return Err(CoreError::InvalidInstance(format!(
                    "agent ids must be dense 0..n, found {:?} at position {k}",
                    agent.id
                )));
            }
        }
        Ok(Instance {
            agents,
            budget,
            level_grid,
        })
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn agent_ids(&self) -> impl Iterator<Item = AgentId> + '_ {
        (0..self.agents.len() as u32).map(AgentId)
    }
}

/// A set of statements in order of addition. Total cost is bounded by the
/// budget of the owning instance.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Slate {
    pub statements: Vec<Statement>,
}

impl Slate {
    pub fn total_cost(&self) -> u64 {
        self.statements.iter().map(|s| s.cost).sum()
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn contains(&self, id: StatementId) -> bool {
        self.statements.iter().any(|s| s.id == id)
    }

    pub fn get(&self, id: StatementId) -> Option<&Statement> {
        self.statements.iter().find(|s| s.id == id)
    }
}

/// A (possibly partial) map from agents to the slate statement representing
/// them. Iteration order is deterministic.
pub type Assignment = BTreeMap<AgentId, StatementId>;
