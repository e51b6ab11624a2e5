use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use slate_core::{Agent, AgentId, Instance, Payload, UtilityValue};

/// The issue/opinion world: `num_issues` issues, opinions in
/// `1..=opinion_count`, one uniformly random ideal opinion vector per agent.
///
/// A statement addressing issue `j` with opinion `o` contributes
/// `floor(b/2) - |ideal_j - o|` to an agent's utility, so utilities are
/// integers; the utility grid the selection process walks runs from the
/// maximum achievable value down to 1.
///
/// Statements are indexed by a radix encoding over `(b+1)^|I|`: digit `j`
/// is 0 when issue `j` is not addressed and the opinion value otherwise.
/// Index 0 is the empty statement of cost 0; it exists in the universe but
/// is never proposed by the query oracles.
#[derive(Debug, Clone)]
pub struct SyntheticEnv {
    pub num_issues: u32,
    pub opinion_count: u32,
    pub budget: u64,
    pub seed: u64,
    /// `n x |I|` ideal opinions, entries in `1..=opinion_count`.
    pub ideals: Vec<Vec<u32>>,
    /// Utilities in whole units, laid out `[statement * n + agent]`.
    utilities: Vec<i32>,
    costs: Vec<u8>,
}

impl SyntheticEnv {
    /// Draws agent ideals i.i.d. uniformly over `1..=opinion_count` from the
    /// seeded generator and precomputes the full utility matrix.
    pub fn new(seed: u64, num_issues: u32, opinion_count: u32, n: usize, budget: u64) -> Self {
        assert!(num_issues >= 1 && opinion_count >= 1 && n >= 1 && budget >= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ideals: Vec<Vec<u32>> = (0..n)
            .map(|_| {
                (0..num_issues)
                    .map(|_| rng.gen_range(1..=opinion_count))
                    .collect()
            })
            .collect();

        let universe = (opinion_count as u64 + 1).pow(num_issues) as usize;
        let mut utilities = vec![0i32; universe * n];
        let mut costs = vec![0u8; universe];
        let radix = opinion_count as usize + 1;
        let weight = (opinion_count / 2) as i32;
        for idx in 0..universe {
            let mut rest = idx;
            let mut cost = 0u8;
            // Accumulate per-issue contributions digit by digit.
            let row = &mut utilities[idx * n..(idx + 1) * n];
            for j in 0..num_issues as usize {
                let digit = (rest % radix) as i32;
                rest /= radix;
                if digit != 0 {
                    cost += 1;
                    for (agent, u) in row.iter_mut().enumerate() {
                        *u += weight - (ideals[agent][j] as i32 - digit).abs();
                    }
                }
            }
            costs[idx] = cost;
        }

        SyntheticEnv {
            num_issues,
            opinion_count,
            budget,
            seed,
            ideals,
            utilities,
            costs,
        }
    }

    pub fn num_agents(&self) -> usize {
        self.ideals.len()
    }

    pub fn universe_size(&self) -> usize {
        self.costs.len()
    }

    pub fn statement_cost(&self, idx: usize) -> u64 {
        self.costs[idx] as u64
    }

    /// Per-issue utility weight `floor(b/2)`.
    pub fn issue_weight(&self) -> i32 {
        (self.opinion_count / 2) as i32
    }

    /// Utility of `agent` for the statement with universe index `idx`.
    pub fn utility_int(&self, agent: usize, idx: usize) -> i32 {
        self.utilities[idx * self.num_agents() + agent]
    }

    pub fn utility(&self, agent: usize, idx: usize) -> UtilityValue {
        UtilityValue::from_int(self.utility_int(agent, idx) as i64)
    }

    /// Per-agent utilities of one statement.
    pub fn utility_row(&self, idx: usize) -> &[i32] {
        let n = self.num_agents();
        &self.utilities[idx * n..(idx + 1) * n]
    }

    /// Highest achievable utility: every issue matched.
    pub fn max_utility(&self) -> i32 {
        (self.num_issues as i32) * self.issue_weight()
    }

    /// Lowest achievable utility.
    pub fn min_utility(&self) -> i32 {
        (self.num_issues as i32) * (self.issue_weight() - self.opinion_count as i32 + 1)
    }

    /// The descending unit-step level grid the process iterates: from the
    /// maximum achievable utility down to 1 (a single all-zero level in the
    /// degenerate case where nothing positive is achievable).
    pub fn level_grid_int(&self) -> Vec<i32> {
        let top = self.max_utility();
        if top >= 1 {
            (1..=top).rev().collect()
        } else {
            vec![top]
        }
    }

    pub fn level_grid(&self) -> Vec<UtilityValue> {
        self.level_grid_int()
            .into_iter()
            .map(|l| UtilityValue::from_int(l as i64))
            .collect()
    }

    pub fn instance(&self) -> Instance {
        let agents = self
            .ideals
            .iter()
            .enumerate()
            .map(|(i, ideal)| Agent {
                id: AgentId(i as u32),
                description: ideal
                    .iter()
                    .map(|o| o.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            })
            .collect();
        Instance::new(agents, self.budget, self.level_grid()).expect("valid synthetic instance")
    }

    pub fn payload_of(&self, idx: usize) -> Payload {
        let mut rest = idx;
        let radix = self.opinion_count as usize + 1;
        let mut opinions = BTreeMap::new();
        for j in 0..self.num_issues {
            let digit = (rest % radix) as u32;
            rest /= radix;
            if digit != 0 {
                opinions.insert(j, digit);
            }
        }
        Payload::Opinions(opinions)
    }

    pub fn index_of(&self, payload: &Payload) -> Option<usize> {
        let Payload::Opinions(opinions) = payload else {
            return None;
        };
        let radix = self.opinion_count as usize + 1;
        let mut idx = 0usize;
        for (&issue, &opinion) in opinions {
            if issue >= self.num_issues || opinion == 0 || opinion > self.opinion_count {
                return None;
            }
            idx += (opinion as usize) * radix.pow(issue);
        }
        Some(idx)
    }

    /// Direct evaluation of the utility formula for an arbitrary partial
    /// opinion vector (not necessarily from the enumerated universe).
    pub fn true_utility(&self, agent: usize, payload: &Payload) -> UtilityValue {
        let Payload::Opinions(opinions) = payload else {
            panic!("synthetic utilities are defined for opinion payloads");
        };
        let weight = self.issue_weight() as i64;
        let mut total = 0i64;
        for (&issue, &opinion) in opinions {
            let ideal = self.ideals[agent][issue as usize] as i64;
            total += weight - (ideal - opinion as i64).abs();
        }
        UtilityValue::from_int(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_dimensions() {
        let env = SyntheticEnv::new(0, 5, 5, 60, 15);
        assert_eq!(env.universe_size(), 6usize.pow(5));
        assert_eq!(env.num_agents(), 60);
        assert_eq!(env.max_utility(), 10);
        assert_eq!(env.min_utility(), -10);
        let grid = env.level_grid_int();
        assert_eq!(grid.first(), Some(&10));
        assert_eq!(grid.last(), Some(&1));
    }

    #[test]
    fn same_seed_same_ideals() {
        let a = SyntheticEnv::new(7, 5, 5, 60, 15);
        let b = SyntheticEnv::new(7, 5, 5, 60, 15);
        assert_eq!(a.ideals, b.ideals);
        let c = SyntheticEnv::new(8, 5, 5, 60, 15);
        assert_ne!(a.ideals, c.ideals);
    }

    #[test]
    fn empty_statement_is_worthless() {
        let env = SyntheticEnv::new(0, 3, 4, 5, 3);
        for agent in 0..5 {
            assert_eq!(env.utility(agent, 0), UtilityValue::ZERO);
        }
        assert_eq!(env.statement_cost(0), 0);
    }

    #[test]
    fn utility_formula_extremes() {
        let env = SyntheticEnv::new(11, 5, 5, 6, 15);
        // A statement matching an agent's ideal on all five issues is worth
        // 5 * 2 = 10; a single-issue statement at distance 4 is worth
        // 2 - 4 = -2.
        let agent = 2;
        let full = Payload::Opinions(
            (0..5u32)
                .map(|j| (j, env.ideals[agent][j as usize]))
                .collect(),
        );
        assert_eq!(env.true_utility(agent, &full), UtilityValue::from_int(10));

        let ideal0 = env.ideals[agent][0];
        let far = if ideal0 >= 3 { ideal0 - 4 } else { ideal0 + 4 };
        if (1..=5).contains(&far) {
            let single = Payload::Opinions([(0u32, far)].into_iter().collect());
            assert_eq!(
                env.true_utility(agent, &single),
                UtilityValue::from_int(-2)
            );
        }
    }

    #[test]
    fn support_counting_against_partial_statement() {
        // Two issues, three opinions: the issue weight is 1. Ideals (1,1)
        // and (3,3); the statement fixing issue 0 to opinion 1 is worth 1 to
        // the first agent and -1 to the second, so exactly one agent clears
        // level 1/2.
        let mut env = SyntheticEnv::new(0, 2, 3, 2, 2);
        env.ideals = vec![vec![1, 1], vec![3, 3]];
        let statement = Payload::Opinions([(0u32, 1u32)].into_iter().collect());
        let utilities: Vec<UtilityValue> =
            (0..2).map(|i| env.true_utility(i, &statement)).collect();
        assert_eq!(utilities[0], UtilityValue::from_int(1));
        assert_eq!(utilities[1], UtilityValue::from_int(-1));
        let level = UtilityValue::from_halves(1);
        let approvers = utilities.iter().filter(|&&u| u >= level).count();
        assert_eq!(approvers, 1);
    }

    #[test]
    fn payload_round_trip() {
        let env = SyntheticEnv::new(5, 3, 4, 4, 3);
        for idx in 0..env.universe_size() {
            let payload = env.payload_of(idx);
            assert_eq!(env.index_of(&payload), Some(idx));
            if let Payload::Opinions(map) = &payload {
                assert_eq!(map.len() as u64, env.statement_cost(idx));
            }
        }
    }

    #[test]
    fn matrix_matches_direct_formula() {
        let env = SyntheticEnv::new(9, 3, 3, 8, 6);
        for idx in 0..env.universe_size() {
            let payload = env.payload_of(idx);
            for agent in 0..8 {
                assert_eq!(env.utility(agent, idx), env.true_utility(agent, &payload));
            }
        }
    }
}
