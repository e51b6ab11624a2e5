use serde::{Deserialize, Serialize};
use slate_core::{
    quota, AgentId, Assignment, CoreError, Instance, Payload, Slate, Statement, StatementId,
    UtilityValue,
};
use thiserror::Error;

use crate::config::{LevelExpansion, ProcessConfig, Variant};
use crate::suite::{QueryError, QuerySuite};

#[derive(Debug, Error)]
pub enum ProcessError {
    #[error("process config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error("budget exceeded: slate cost {slate_cost} > budget {budget}")]
    BudgetExceeded { slate_cost: u64, budget: u64 },
    #[error("process invariant violated: {0}")]
    InvariantViolated(String),
}

/// Per-candidate view of one round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub statement: StatementId,
    pub cost: u64,
    pub support: usize,
}

/// One round of the process: a (level, cost cap) pair, the candidates seen,
/// and what happened.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub level: UtilityValue,
    pub cost_cap: u64,
    pub candidates: Vec<CandidateRecord>,
    pub chosen: Option<StatementId>,
    pub added: bool,
    /// Agents removed this round together with the discriminative value that
    /// ranked them.
    pub removed: Vec<(AgentId, UtilityValue)>,
    /// Oracle contract violations observed this round (offending statements
    /// were discarded).
    pub oracle_errors: Vec<String>,
}

/// Everything a process run produces: the slate, the induced agent
/// assignment, the full round trace, and the bank of every statement the
/// generative side ever produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlateResult {
    pub slate: Slate,
    pub assignment: Assignment,
    /// Agents still unrepresented at termination.
    pub unassigned: Vec<AgentId>,
    pub trace: Vec<RoundRecord>,
    pub bank: Vec<Statement>,
}

impl SlateResult {
    pub fn assigned_utility<F>(&self, agent: AgentId, mut true_utility: F) -> UtilityValue
    where
        F: FnMut(AgentId, &Statement) -> UtilityValue,
    {
        match self.assignment.get(&agent) {
            Some(sid) => {
                let statement = self.slate.get(*sid).expect("assignment within slate");
                true_utility(agent, statement)
            }
            // Unrepresented agents count as deriving zero utility.
            None => UtilityValue::ZERO,
        }
    }
}

struct Banker {
    next_id: u64,
    bank: Vec<Statement>,
}

impl Banker {
    fn new() -> Self {
        Banker {
            next_id: 0,
            bank: Vec::new(),
        }
    }

    /// Returns the index in the bank, stamping a fresh id for unseen content
    /// when deduplication is requested.
    fn admit(&mut self, payload: Payload, cost: u64, dedup: bool) -> usize {
        if dedup {
            if let Some(k) = self
                .bank
                .iter()
                .position(|s| s.payload == payload && s.cost == cost)
            {
                return k;
            }
        }
        let id = StatementId(self.next_id);
        self.next_id += 1;
        self.bank.push(Statement { id, payload, cost });
        self.bank.len() - 1
    }
}

/// Runs the main democratic process.
///
/// The outer loop descends the instance's level grid; the inner loop walks
/// the configured cost caps, skipping caps that exceed the remaining budget.
/// Each round gathers candidates from the generative query (and, when the
/// statement bank is enabled, from previously generated statements), counts
/// supporters among the active agents via the discriminative query, and adds
/// the most supported candidate whenever its supporters cover its quota.
/// Supporters with the highest discriminative values are then retired and
/// assigned to the added statement.
pub fn run_process<S>(
    instance: &Instance,
    suite: &mut S,
    config: &ProcessConfig,
) -> Result<SlateResult, ProcessError>
where
    S: QuerySuite + ?Sized,
{
    config.validate(instance.budget)?;
    let n = instance.num_agents();
    if n == 0 {
        return Err(ProcessError::Config("instance has no agents".into()));
    }
    let budget = instance.budget;
    let unit_cost = config.variant == Variant::UnitCost;
    // Unit-cost acceptance and removal use floor(n/B), clamped to 1 so that
    // an accepted statement always retires at least one agent.
    let unit_quota = ((n as u64) / budget).max(1);

    let mut active: Vec<AgentId> = instance.agent_ids().collect();
    let mut slate = Slate::default();
    let mut assignment = Assignment::new();
    let mut trace: Vec<RoundRecord> = Vec::new();
    let mut banker = Banker::new();
    // Bank indices of statements already in the slate (never re-offered).
    let mut slated: Vec<usize> = Vec::new();

    let grid = &instance.level_grid;
    'outer: for (level_idx, &level) in grid.iter().enumerate() {
        if active.is_empty() {
            break;
        }
        let final_level = level_idx + 1 == grid.len();
        let min_cost = if final_level {
            0
        } else {
            config.min_statement_cost
        };

        let mut j = 0usize;
        while j < config.cost_list.len() {
            if active.is_empty() {
                break 'outer;
            }
            let cap = config.cost_list[j];
            let remaining = budget - slate.total_cost();
            if remaining < cap {
                j += 1;
                continue;
            }
            if !unit_cost {
                // Removal accounting guarantees B - c(W) >= |S| * B / n here.
                if (remaining as u128) * (n as u128) < (active.len() as u128) * (budget as u128) {
                    return Err(ProcessError::InvariantViolated(format!(
                        "remaining budget {remaining} below |S|*B/n with |S|={}",
                        active.len()
                    )));
                }
            }

            let mut round = RoundRecord {
                level,
                cost_cap: cap,
                candidates: Vec::new(),
                chosen: None,
                added: false,
                removed: Vec::new(),
                oracle_errors: Vec::new(),
            };

            // Candidate collection: one generative call per expanded level,
            // plus the filtered statement bank when enabled.
            let mut candidate_idx: Vec<usize> = Vec::new();
            let gen_levels: &[UtilityValue] = match config.level_expansion {
                LevelExpansion::Current => &grid[level_idx..=level_idx],
                LevelExpansion::CurrentAndAbove => &grid[..=level_idx],
            };
            let gen_cap = if unit_cost { u64::MAX } else { cap };
            for &gen_level in gen_levels {
                match suite.gen(&active, gen_level, gen_cap)? {
                    None => {}
                    Some(draft) => {
                        let cost = if unit_cost { 1 } else { draft.cost };
                        if !unit_cost && cost > cap {
                            round.oracle_errors.push(format!(
                                "generative query returned cost {cost} above cap {cap}"
                            ));
                            continue;
                        }
                        if cost == 0 || (!unit_cost && cost < min_cost) {
                            continue;
                        }
                        let k = banker.admit(draft.payload, cost, config.use_statement_bank);
                        if !slated.contains(&k) && !candidate_idx.contains(&k) {
                            candidate_idx.push(k);
                        }
                    }
                }
            }
            if config.use_statement_bank {
                for k in 0..banker.bank.len() {
                    let s = &banker.bank[k];
                    if s.cost <= cap
                        && s.cost >= min_cost.max(1)
                        && !slated.contains(&k)
                        && !candidate_idx.contains(&k)
                    {
                        candidate_idx.push(k);
                    }
                }
            }

            // Supporter counting. One discriminative evaluation per
            // (agent, candidate) pair per round, reused for removal ranking.
            let mut best: Option<(usize, Vec<(AgentId, UtilityValue)>)> = None;
            for &k in &candidate_idx {
                let payload = banker.bank[k].payload.clone();
                let mut supporters: Vec<(AgentId, UtilityValue)> = Vec::new();
                for &agent in &active {
                    let value = suite.disc(agent, &payload)?;
                    if value >= level {
                        supporters.push((agent, value));
                    }
                }
                round.candidates.push(CandidateRecord {
                    statement: banker.bank[k].id,
                    cost: banker.bank[k].cost,
                    support: supporters.len(),
                });
                let better = match &best {
                    None => true,
                    Some((bk, bs)) => {
                        supporters.len() > bs.len()
                            || (supporters.len() == bs.len()
                                && banker.bank[k].id < banker.bank[*bk].id)
                    }
                };
                if better {
                    best = Some((k, supporters));
                }
            }

            let Some((best_k, mut supporters)) = best else {
                j += 1;
                trace.push(round);
                continue;
            };
            let chosen = banker.bank[best_k].clone();
            round.chosen = Some(chosen.id);

            let threshold = if unit_cost {
                unit_quota
            } else {
                quota(chosen.cost, n, budget)?
            };
            if (supporters.len() as u64) < threshold {
                j += 1;
                trace.push(round);
                continue;
            }

            // Retire the quota of supporters with the highest discriminative
            // values; ties broken towards the lowest agent id.
            supporters.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            supporters.truncate(threshold as usize);
            for &(agent, value) in &supporters {
                active.retain(|&a| a != agent);
                assignment.insert(agent, chosen.id);
                round.removed.push((agent, value));
            }
            slated.push(best_k);
            slate.statements.push(chosen);
            round.added = true;
            trace.push(round);

            let slate_cost = slate.total_cost();
            if slate_cost > budget {
                return Err(ProcessError::BudgetExceeded { slate_cost, budget });
            }
        }
    }

    // The unit-cost variant keeps the assignment total by attaching the
    // final-round remainder to the last statement.
    if unit_cost && !slate.is_empty() {
        let last = slate.statements.last().unwrap().id;
        for agent in active.drain(..) {
            assignment.insert(agent, last);
        }
    }

    Ok(SlateResult {
        slate,
        assignment,
        unassigned: active,
        trace,
        bank: banker.bank,
    })
}
