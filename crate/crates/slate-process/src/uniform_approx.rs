use num_rational::Ratio;
use slate_core::{Assignment, Instance, Slate, Statement, StatementId, UtilityValue};

use crate::run::{CandidateRecord, ProcessError, RoundRecord, SlateResult};
use crate::suite::QuerySuite;

/// Unit-cost process with a relaxed acceptance threshold.
///
/// All statements are treated as unit cost, so the budget is the number of
/// statements to select. Candidates are generated at every level from the
/// current one up to the top with cost cap `floor(1/mu)`, and a statement is
/// accepted once `n*gamma / (B*gamma + 1)` of the active agents approve it;
/// the same number (rounded up) of its highest-scoring approvers are then
/// retired. On success this trades a slight overspend per group for a
/// tighter proportionality bound than the plain quota rule when `mu` and
/// `gamma` are known.
pub fn run_uniform_approx<S>(
    instance: &Instance,
    suite: &mut S,
    mu: Ratio<i64>,
    gamma: Ratio<i64>,
) -> Result<SlateResult, ProcessError>
where
    S: QuerySuite + ?Sized,
{
    let one = Ratio::from_integer(1);
    if mu <= Ratio::from_integer(0) || mu > one {
        return Err(ProcessError::Config("mu must lie in (0, 1]".into()));
    }
    if gamma <= Ratio::from_integer(0) || gamma > one {
        return Err(ProcessError::Config("gamma must lie in (0, 1]".into()));
    }
    let n = instance.num_agents();
    if n == 0 {
        return Err(ProcessError::Config("instance has no agents".into()));
    }
    let budget = instance.budget;

    // threshold = n*gamma / (B*gamma + 1), kept exact.
    let threshold = Ratio::from_integer(n as i64) * gamma
        / (Ratio::from_integer(budget as i64) * gamma + one);
    let removal = threshold.ceil().to_integer().max(1) as usize;
    let cost_cap = (one / mu).floor().to_integer() as u64;

    let mut active: Vec<slate_core::AgentId> = instance.agent_ids().collect();
    let mut slate = Slate::default();
    let mut assignment = Assignment::new();
    let mut trace: Vec<RoundRecord> = Vec::new();
    let mut bank: Vec<Statement> = Vec::new();
    let mut next_id = 0u64;

    let grid = &instance.level_grid;
    let mut level_idx = 0usize;
    while level_idx < grid.len() && !active.is_empty() && slate.total_cost() < budget {
        let level = grid[level_idx];
        let mut round = RoundRecord {
            level,
            cost_cap,
            candidates: Vec::new(),
            chosen: None,
            added: false,
            removed: Vec::new(),
            oracle_errors: Vec::new(),
        };

        let mut best: Option<(Statement, Vec<(slate_core::AgentId, UtilityValue)>)> = None;
        for &gen_level in &grid[..=level_idx] {
            let Some(draft) = suite.gen(&active, gen_level, cost_cap)? else {
                continue;
            };
            let statement = Statement {
                id: StatementId(next_id),
                payload: draft.payload,
                cost: 1,
            };
            next_id += 1;
            bank.push(statement.clone());

            let mut supporters = Vec::new();
            for &agent in &active {
                let value = suite.disc(agent, &statement.payload)?;
                if value >= level {
                    supporters.push((agent, value));
                }
            }
            round.candidates.push(CandidateRecord {
                statement: statement.id,
                cost: statement.cost,
                support: supporters.len(),
            });
            let better = match &best {
                None => true,
                Some((bs, bsup)) => {
                    supporters.len() > bsup.len()
                        || (supporters.len() == bsup.len() && statement.id < bs.id)
                }
            };
            if better {
                best = Some((statement, supporters));
            }
        }

        let accepted = match best {
            Some((statement, mut supporters))
                if Ratio::from_integer(supporters.len() as i64) >= threshold =>
            {
                round.chosen = Some(statement.id);
                supporters.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
                supporters.truncate(removal);
                for &(agent, value) in &supporters {
                    active.retain(|&a| a != agent);
                    assignment.insert(agent, statement.id);
                    round.removed.push((agent, value));
                }
                slate.statements.push(statement);
                round.added = true;
                true
            }
            other => {
                if let Some((statement, _)) = other {
                    round.chosen = Some(statement.id);
                }
                false
            }
        };
        trace.push(round);
        if !accepted {
            level_idx += 1;
        }
    }

    // Leftover agents are attached to arbitrary slate statements while
    // preserving balancedness: fill the emptiest statement first and never
    // push any statement past its ceiling quota.
    if !slate.is_empty() && !active.is_empty() {
        let ceil_quota = slate_core::quota(1, n, budget)?;
        let mut counts: Vec<(usize, u64)> = slate
            .statements
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let c = assignment.values().filter(|&&sid| sid == s.id).count() as u64;
                (k, c)
            })
            .collect();
        let mut leftovers = std::mem::take(&mut active);
        leftovers.sort_unstable();
        for agent in leftovers {
            counts.sort_by_key(|&(k, c)| (c, k));
            if let Some(slot) = counts.iter_mut().find(|&&mut (_, c)| c < ceil_quota) {
                assignment.insert(agent, slate.statements[slot.0].id);
                slot.1 += 1;
            } else {
                active.push(agent);
            }
        }
    }

    Ok(SlateResult {
        slate,
        assignment,
        unassigned: active,
        trace,
        bank,
    })
}
