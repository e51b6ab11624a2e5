use crate::{AgentId, Assignment, CoreError, Slate, UtilityValue};

/// The number of agents a statement of the given cost "deserves":
/// `ceil(cost * n / B)`, computed in exact integer arithmetic.
pub fn quota(cost: u64, n: usize, budget: u64) -> Result<u64, CoreError> {
    if budget == 0 {
        return Err(CoreError::ZeroBudget);
    }
    let num = (cost as u128) * (n as u128);
    Ok(num.div_ceil(budget as u128) as u64)
}

/// Floor counterpart of [`quota`]; the lower end of the balanced range.
pub fn quota_floor(cost: u64, n: usize, budget: u64) -> Result<u64, CoreError> {
    if budget == 0 {
        return Err(CoreError::ZeroBudget);
    }
    let num = (cost as u128) * (n as u128);
    Ok((num / budget as u128) as u64)
}

/// Number of agents in `agents` whose utility for the statement is at least
/// `level`, where utilities are supplied by `utility_of`.
pub fn support<I>(
    agents: I,
    level: UtilityValue,
    mut utility_of: impl FnMut(AgentId) -> UtilityValue,
) -> usize
where
    I: IntoIterator<Item = AgentId>,
{
    agents
        .into_iter()
        .filter(|&a| utility_of(a) >= level)
        .count()
}

/// True iff every slate statement is assigned either its floor- or its
/// ceiling-quota of agents. Totality of the assignment is a separate
/// concern; this only checks per-statement counts.
pub fn is_balanced(
    assignment: &Assignment,
    slate: &Slate,
    n: usize,
    budget: u64,
) -> Result<bool, CoreError> {
    let mut counts = vec![0u64; slate.len()];
    for (&agent, &sid) in assignment {
        match slate.statements.iter().position(|s| s.id == sid) {
            Some(k) => counts[k] += 1,
            None => {
                return Err(CoreError::AssignmentOutsideSlate {
                    agent,
                    statement: sid,
                })
            }
        }
    }
    for (k, statement) in slate.statements.iter().enumerate() {
        let lo = quota_floor(statement.cost, n, budget)?;
        let hi = quota(statement.cost, n, budget)?;
        if counts[k] < lo || counts[k] > hi {
            return Ok(false);
        }
    }
    Ok(true)
}
