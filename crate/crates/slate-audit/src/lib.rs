//! Proportionality auditing.
//!
//! Searches for coalitions witnessing that a slate under-serves a cohesive
//! group relative to the share of the budget the group controls, both
//! against a concrete agent-to-statement assignment and against the slate
//! as a whole. Also provides the maximum-weight balanced assignment used to
//! evaluate slates that come without their own assignment.

mod flow;
mod sample;
mod witness;

pub use flow::max_weight_balanced_assignment;
pub use sample::sample_violation_rate;
pub use witness::{
    assigned_utilities, check_cjr, max_violation_ratio, max_violation_ratio_checked,
    violation_curve, AuditError, AuditReport, CandidateTable, ViolationWitness,
};
