use num_integer::Integer;
use num_rational::Ratio;
use slate_core::{quota, quota_floor, AgentId, Assignment, Slate, UtilityValue};

use crate::witness::AuditError;

/// Maximum-weight balanced assignment of agents to slate statements.
///
/// Every statement must end up with either its floor- or ceiling-quota of
/// agents while the summed utility is maximized. Solved as a min-cost
/// max-flow with negated utilities; per-statement lower bounds are encoded
/// as a high-reward first tranche on the statement-to-sink arcs, which any
/// optimal solution saturates whenever the bounds are feasible. All
/// arithmetic runs on scaled integers (utilities times their common
/// denominator), so the optimum is exact.
///
/// `utilities[agent][statement]` indexes statements by their position in
/// the slate. The optimal total utility is unique even when the assignment
/// achieving it is not.
pub fn max_weight_balanced_assignment(
    utilities: &[Vec<UtilityValue>],
    slate: &Slate,
    budget: u64,
) -> Result<(Assignment, UtilityValue), AuditError> {
    let n = utilities.len();
    let w = slate.len();
    if n == 0 || w == 0 {
        return Err(AuditError::Infeasible(
            "no agents or empty slate".to_string(),
        ));
    }
    for row in utilities {
        if row.len() != w {
            return Err(AuditError::Shape(format!(
                "expected {w} utilities per agent, found {}",
                row.len()
            )));
        }
    }

    let lows: Vec<u64> = slate
        .statements
        .iter()
        .map(|s| quota_floor(s.cost, n, budget))
        .collect::<Result<_, _>>()?;
    let highs: Vec<u64> = slate
        .statements
        .iter()
        .map(|s| quota(s.cost, n, budget))
        .collect::<Result<_, _>>()?;
    let low_sum: u64 = lows.iter().sum();
    let high_sum: u64 = highs.iter().sum();
    if (n as u64) < low_sum {
        return Err(AuditError::Infeasible(format!(
            "floor quotas require {low_sum} agents but only {n} exist"
        )));
    }
    if (n as u64) > high_sum {
        return Err(AuditError::Infeasible(format!(
            "ceiling quotas hold {high_sum} agents but {n} must be assigned"
        )));
    }

    // Common denominator so all arc costs are integers.
    let mut denom: i64 = 1;
    for row in utilities {
        for u in row {
            denom = denom.lcm(&u.denom());
        }
    }
    let scaled = |u: UtilityValue| -> i64 { u.numer() * (denom / u.denom()) };
    let max_abs = utilities
        .iter()
        .flatten()
        .map(|&u| scaled(u).abs())
        .max()
        .unwrap_or(0);
    // Reward dominating any utility effect: forces lower-bound tranches full.
    let bonus = (max_abs as i128 + 1) * (n as i128 + 1);

    let mut graph = McmfGraph::new(2 + n + w);
    let source = 0usize;
    let sink = 1usize;
    let agent_node = |i: usize| 2 + i;
    let statement_node = |k: usize| 2 + n + k;

    for i in 0..n {
        graph.add_edge(source, agent_node(i), 1, 0);
        for k in 0..w {
            graph.add_edge(agent_node(i), statement_node(k), 1, -(scaled(utilities[i][k]) as i128));
        }
    }
    for k in 0..w {
        if lows[k] > 0 {
            graph.add_edge(statement_node(k), sink, lows[k] as i64, -bonus);
        }
        if highs[k] > lows[k] {
            graph.add_edge(statement_node(k), sink, (highs[k] - lows[k]) as i64, 0);
        }
    }

    let pushed = graph.min_cost_flow(source, sink, n as i64);
    if pushed != n as i64 {
        return Err(AuditError::Infeasible(format!(
            "could only route {pushed} of {n} agents"
        )));
    }

    let mut assignment = Assignment::new();
    let mut total = Ratio::<i64>::new(0, 1);
    for i in 0..n {
        for k in 0..w {
            if graph.flow_between(agent_node(i), statement_node(k)) > 0 {
                assignment.insert(AgentId(i as u32), slate.statements[k].id);
                total += Ratio::new(utilities[i][k].numer(), utilities[i][k].denom());
            }
        }
    }
    Ok((
        assignment,
        UtilityValue::new(*total.numer(), *total.denom()),
    ))
}

struct Edge {
    to: usize,
    cap: i64,
    cost: i128,
    flow: i64,
}

/// Successive shortest augmenting paths with Bellman-Ford path search
/// (costs may be negative); graphs here are tiny.
struct McmfGraph {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl McmfGraph {
    fn new(nodes: usize) -> Self {
        McmfGraph {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: i128) {
        self.adj[from].push(self.edges.len());
        self.edges.push(Edge {
            to,
            cap,
            cost,
            flow: 0,
        });
        self.adj[to].push(self.edges.len());
        self.edges.push(Edge {
            to: from,
            cap: 0,
            cost: -cost,
            flow: 0,
        });
    }

    fn min_cost_flow(&mut self, source: usize, sink: usize, want: i64) -> i64 {
        let nodes = self.adj.len();
        let mut pushed = 0i64;
        while pushed < want {
            let mut dist = vec![i128::MAX; nodes];
            let mut pred: Vec<Option<usize>> = vec![None; nodes];
            dist[source] = 0;
            // Bellman-Ford
            for _ in 0..nodes {
                let mut improved = false;
                for node in 0..nodes {
                    if dist[node] == i128::MAX {
                        continue;
                    }
                    for &eid in &self.adj[node] {
                        let edge = &self.edges[eid];
                        if edge.cap - edge.flow > 0 && dist[node] + edge.cost < dist[edge.to] {
                            dist[edge.to] = dist[node] + edge.cost;
                            pred[edge.to] = Some(eid);
                            improved = true;
                        }
                    }
                }
                if !improved {
                    break;
                }
            }
            if pred[sink].is_none() {
                break;
            }
            // Bottleneck along the path.
            let mut bottleneck = want - pushed;
            let mut node = sink;
            while let Some(eid) = pred[node] {
                let edge = &self.edges[eid];
                bottleneck = bottleneck.min(edge.cap - edge.flow);
                node = self.edges[eid ^ 1].to;
            }
            let mut node = sink;
            while let Some(eid) = pred[node] {
                self.edges[eid].flow += bottleneck;
                self.edges[eid ^ 1].flow -= bottleneck;
                node = self.edges[eid ^ 1].to;
            }
            pushed += bottleneck;
        }
        pushed
    }

    fn flow_between(&self, from: usize, to: usize) -> i64 {
        self.adj[from]
            .iter()
            .map(|&eid| &self.edges[eid])
            .filter(|e| e.to == to)
            .map(|e| e.flow)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use slate_core::{Payload, Statement, StatementId};

    fn slate_with_costs(costs: &[u64]) -> Slate {
        Slate {
            statements: costs
                .iter()
                .enumerate()
                .map(|(k, &cost)| Statement {
                    id: StatementId(k as u64),
                    payload: Payload::Text(format!("s{k}")),
                    cost,
                })
                .collect(),
        }
    }

    #[test]
    fn equal_utilities_any_balanced_assignment() {
        let slate = slate_with_costs(&[2, 2]);
        let utilities = vec![vec![UtilityValue::from_int(3); 2]; 4];
        let (assignment, total) = max_weight_balanced_assignment(&utilities, &slate, 4).unwrap();
        assert_eq!(total, UtilityValue::from_int(12));
        assert!(slate_core::is_balanced(&assignment, &slate, 4, 4).unwrap());
        assert_eq!(assignment.len(), 4);
    }

    #[test]
    fn diagonal_optimum() {
        let slate = slate_with_costs(&[1, 1]);
        let utilities = vec![
            vec![UtilityValue::from_int(5), UtilityValue::from_int(1)],
            vec![UtilityValue::from_int(1), UtilityValue::from_int(5)],
        ];
        let (assignment, total) = max_weight_balanced_assignment(&utilities, &slate, 2).unwrap();
        assert_eq!(total, UtilityValue::from_int(10));
        assert_eq!(assignment[&AgentId(0)], StatementId(0));
        assert_eq!(assignment[&AgentId(1)], StatementId(1));
    }

    #[test]
    fn infeasible_bounds_name_deficit() {
        // Two statements of cost 3 under B=4 and n=4: floors are 3+3 > 4.
        let slate = slate_with_costs(&[3, 3]);
        let utilities = vec![vec![UtilityValue::ZERO; 2]; 4];
        let err = max_weight_balanced_assignment(&utilities, &slate, 4).unwrap_err();
        assert!(matches!(err, AuditError::Infeasible(_)));
        assert!(err.to_string().contains("6"));
    }

    #[test]
    fn respects_floor_quotas_even_when_costly() {
        // Cost-3 statement must take 3 agents even though everyone prefers
        // the cheap one.
        let slate = slate_with_costs(&[3, 1]);
        let utilities: Vec<Vec<UtilityValue>> = (0..4)
            .map(|_| vec![UtilityValue::from_int(0), UtilityValue::from_int(9)])
            .collect();
        let (assignment, total) = max_weight_balanced_assignment(&utilities, &slate, 4).unwrap();
        let to_big = assignment
            .values()
            .filter(|&&sid| sid == StatementId(0))
            .count();
        assert_eq!(to_big, 3);
        assert_eq!(total, UtilityValue::from_int(9));
    }

    #[test]
    fn fractional_utilities_stay_exact() {
        let slate = slate_with_costs(&[1, 1]);
        let utilities = vec![
            vec![UtilityValue::new(1, 2), UtilityValue::new(2, 5)],
            vec![UtilityValue::new(1, 5), UtilityValue::new(1, 2)],
        ];
        let (_, total) = max_weight_balanced_assignment(&utilities, &slate, 2).unwrap();
        assert_eq!(total, UtilityValue::from_int(1));
    }
}
