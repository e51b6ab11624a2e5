use std::ops::Add;

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use slate_core::{is_balanced, quota, AgentId, Assignment, Slate, Statement, UtilityValue};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AuditError {
    #[error(transparent)]
    Core(#[from] slate_core::CoreError),
    #[error("assignment is not balanced")]
    Unbalanced,
    #[error("candidate table shape mismatch: {0}")]
    Shape(String),
    #[error("statement bank is empty")]
    EmptyBank,
    #[error("balanced assignment infeasible: {0}")]
    Infeasible(String),
}

/// Utilities of a set of candidate statements for every agent, the search
/// space of the violation audit.
#[derive(Debug, Clone)]
pub struct CandidateTable<T> {
    n: usize,
    costs: Vec<u64>,
    utilities: Vec<T>,
}

impl<T: Copy> CandidateTable<T> {
    pub fn new(n: usize) -> Self {
        CandidateTable {
            n,
            costs: Vec::new(),
            utilities: Vec::new(),
        }
    }

    pub fn push(&mut self, cost: u64, utilities: &[T]) {
        assert_eq!(utilities.len(), self.n, "one utility per agent");
        self.costs.push(cost);
        self.utilities.extend_from_slice(utilities);
    }

    pub fn from_fn(n: usize, costs: &[u64], mut utility: impl FnMut(usize, usize) -> T) -> Self {
        let mut table = CandidateTable::new(n);
        let mut row = Vec::with_capacity(n);
        for (k, &cost) in costs.iter().enumerate() {
            row.clear();
            row.extend((0..n).map(|i| utility(k, i)));
            table.push(cost, &row);
        }
        table
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn cost(&self, k: usize) -> u64 {
        self.costs[k]
    }

    pub fn row(&self, k: usize) -> &[T] {
        &self.utilities[k * self.n..(k + 1) * self.n]
    }
}

/// A concrete certificate that a coalition is under-served: all coalition
/// members value `candidate` at or above `threshold` while sitting strictly
/// more than `slack` below it under their assigned representation, and the
/// coalition is `ratio` times the candidate's quota.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationWitness<T> {
    pub candidate: usize,
    pub cost: u64,
    pub coalition: Vec<AgentId>,
    pub threshold: T,
    pub ratio: Ratio<i64>,
    pub slack: T,
}

/// Per-agent utility of the representation an agent ends up with.
/// Unrepresented agents count as deriving zero utility.
pub fn assigned_utilities<F>(
    slate: &Slate,
    assignment: &Assignment,
    n: usize,
    mut utility: F,
) -> Vec<UtilityValue>
where
    F: FnMut(usize, &Statement) -> UtilityValue,
{
    (0..n)
        .map(|agent| match assignment.get(&AgentId(agent as u32)) {
            Some(sid) => {
                let statement = slate.get(*sid).expect("assignment within slate");
                utility(agent, statement)
            }
            None => UtilityValue::ZERO,
        })
        .collect()
}

/// Scans one candidate: returns the best (count / quota) ratio over all
/// thresholds together with the threshold achieving it.
///
/// Only the candidate's own distinct utility values need to be considered
/// as thresholds: the coalition count is a step function of the threshold
/// with steps exactly at those values.
fn best_threshold<T>(row: &[T], shifted: &[T], quota: u64) -> (Ratio<i64>, Option<T>)
where
    T: Copy + Ord,
{
    let n = row.len();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_unstable_by(|&a, &b| row[b as usize].cmp(&row[a as usize]));

    let mut best = Ratio::zero();
    let mut best_theta = None;
    // Sorted multiset of shifted assigned utilities among agents whose
    // candidate utility is at least the current threshold.
    let mut prefix: Vec<T> = Vec::with_capacity(n);
    let mut pos = 0usize;
    while pos < n {
        let theta = row[order[pos] as usize];
        // Admit every agent tied at this threshold.
        while pos < n && row[order[pos] as usize] == theta {
            let value = shifted[order[pos] as usize];
            let at = prefix.partition_point(|&x| x < value);
            prefix.insert(at, value);
            pos += 1;
        }
        // Coalition: admitted agents whose shifted utility is below theta.
        let count = prefix.partition_point(|&x| x < theta);
        let ratio = Ratio::new(count as i64, quota as i64);
        if ratio > best {
            best = ratio;
            best_theta = Some(theta);
        }
    }
    (best, best_theta)
}

fn coalition_for<T>(row: &[T], shifted: &[T], theta: T) -> Vec<AgentId>
where
    T: Copy + Ord,
{
    (0..row.len())
        .filter(|&i| row[i] >= theta && shifted[i] < theta)
        .map(|i| AgentId(i as u32))
        .collect()
}

/// The largest `d` for which some coalition, candidate statement, and
/// threshold certify a `(slack, d)` violation against the given per-agent
/// assigned utilities. Returns 0 with no witness when no candidate admits a
/// nonempty coalition. Candidates whose quota is zero are free and cannot
/// witness disproportionality; they are skipped.
pub fn max_violation_ratio<T>(
    table: &CandidateTable<T>,
    assigned: &[T],
    slack: T,
    budget: u64,
) -> Result<(Ratio<i64>, Option<ViolationWitness<T>>), AuditError>
where
    T: Copy + Ord + Add<Output = T>,
{
    if assigned.len() != table.n {
        return Err(AuditError::Shape(format!(
            "{} assigned utilities for {} agents",
            assigned.len(),
            table.n
        )));
    }
    let n = table.n;
    let shifted: Vec<T> = assigned.iter().map(|&a| a + slack).collect();

    let mut best = Ratio::zero();
    let mut best_at: Option<(usize, T)> = None;
    for k in 0..table.len() {
        let q = quota(table.cost(k), n, budget)?;
        if q == 0 {
            continue;
        }
        let (ratio, theta) = best_threshold(table.row(k), &shifted, q);
        if ratio > best {
            best = ratio;
            best_at = theta.map(|t| (k, t));
        }
    }
    let witness = best_at.map(|(k, theta)| ViolationWitness {
        candidate: k,
        cost: table.cost(k),
        coalition: coalition_for(table.row(k), &shifted, theta),
        threshold: theta,
        ratio: best,
        slack,
    });
    Ok((best, witness))
}

/// Spec-facing wrapper over [`max_violation_ratio`] that enforces the
/// balancedness contract of the assignment being audited.
pub fn max_violation_ratio_checked<F>(
    table: &CandidateTable<UtilityValue>,
    slate: &Slate,
    assignment: &Assignment,
    slate_utility: F,
    slack: UtilityValue,
    budget: u64,
) -> Result<(Ratio<i64>, Option<ViolationWitness<UtilityValue>>), AuditError>
where
    F: FnMut(usize, &Statement) -> UtilityValue,
{
    if !is_balanced(assignment, slate, table.n, budget)? {
        return Err(AuditError::Unbalanced);
    }
    let assigned = assigned_utilities(slate, assignment, table.n, slate_utility);
    max_violation_ratio(table, &assigned, slack, budget)
}

/// Slate-level violation check: dissatisfaction is measured against every
/// slate statement rather than the assigned one. `best_slate_utility[i]`
/// must hold agent `i`'s maximum utility across the slate. Returns the
/// first witness of ratio at least `d`, scanning candidates in order.
pub fn check_cjr<T>(
    table: &CandidateTable<T>,
    best_slate_utility: &[T],
    slack: T,
    d: Ratio<i64>,
    budget: u64,
) -> Result<Option<ViolationWitness<T>>, AuditError>
where
    T: Copy + Ord + Add<Output = T>,
{
    if best_slate_utility.len() != table.n {
        return Err(AuditError::Shape(format!(
            "{} slate utilities for {} agents",
            best_slate_utility.len(),
            table.n
        )));
    }
    let shifted: Vec<T> = best_slate_utility.iter().map(|&a| a + slack).collect();
    for k in 0..table.len() {
        let q = quota(table.cost(k), table.n, budget)?;
        if q == 0 {
            continue;
        }
        let (ratio, theta) = best_threshold(table.row(k), &shifted, q);
        if ratio >= d {
            let theta = theta.expect("positive ratio has a threshold");
            return Ok(Some(ViolationWitness {
                candidate: k,
                cost: table.cost(k),
                coalition: coalition_for(table.row(k), &shifted, theta),
                threshold: theta,
                ratio,
                slack,
            }));
        }
    }
    Ok(None)
}

/// Violation ratios across a grid of slack values. The curve is
/// nonincreasing in the slack.
#[derive(Debug, Clone)]
pub struct AuditReport<T> {
    pub points: Vec<(T, Ratio<i64>, Option<ViolationWitness<T>>)>,
}

pub fn violation_curve<T>(
    table: &CandidateTable<T>,
    assigned: &[T],
    slacks: &[T],
    budget: u64,
) -> Result<AuditReport<T>, AuditError>
where
    T: Copy + Ord + Add<Output = T>,
{
    let mut points = Vec::with_capacity(slacks.len());
    for &b in slacks {
        let (ratio, witness) = max_violation_ratio(table, assigned, b, budget)?;
        points.push((b, ratio, witness));
    }
    Ok(AuditReport { points })
}
