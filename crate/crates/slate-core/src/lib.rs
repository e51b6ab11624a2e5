//! Shared domain types for budget-constrained proportional slate selection:
//! statements with costs, agents, utility values, slates, assignments, and
//! the quota / support / balancedness arithmetic everything else builds on.

mod error;
mod ops;
mod types;
mod utility;

pub use error::CoreError;
pub use ops::{is_balanced, quota, quota_floor, support};
pub use types::{
    Agent, AgentId, Assignment, Instance, Payload, Slate, Statement, StatementId,
};
pub use utility::UtilityValue;
