use num_rational::Ratio;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use slate_core::{AgentId, Payload, UtilityValue};
use slate_process::{QueryError, QuerySuite, StatementDraft};

use crate::SyntheticEnv;

/// How simulated errors are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorMode {
    /// Discriminative noise uniform over `[-beta, beta]`; generative query
    /// sampled uniformly from the admissible set.
    Uniform,
    /// Discriminative noise is `+beta` or `-beta` with equal probability;
    /// generative query sampled from the admissible statements with the
    /// worst support ratio.
    WorstCase,
}

/// Error parameters of the simulated approximate queries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorModel {
    /// Additive discriminative error bound (utility units).
    pub beta: u32,
    /// Multiplicative support accuracy of the generative query, in (0, 1].
    pub gamma: Ratio<i64>,
    /// Additive level slack of the generative query (utility units).
    pub delta: Ratio<i64>,
    /// Cost-cap accuracy of the generative query, in (0, 1].
    pub mu: Ratio<i64>,
    pub mode: ErrorMode,
    pub seed: u64,
}

impl ErrorModel {
    pub fn exact(seed: u64) -> Self {
        ErrorModel {
            beta: 0,
            gamma: Ratio::from_integer(1),
            delta: Ratio::from_integer(0),
            mu: Ratio::from_integer(1),
            mode: ErrorMode::Uniform,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), QueryError> {
        let zero = Ratio::zero();
        let one = Ratio::from_integer(1);
        if self.gamma <= zero || self.gamma > one {
            return Err(QueryError::Gen("gamma must lie in (0, 1]".into()));
        }
        if self.mu <= zero || self.mu > one {
            return Err(QueryError::Gen("mu must lie in (0, 1]".into()));
        }
        if self.delta.is_negative() {
            return Err(QueryError::Gen("delta must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Cumulative support counts for every statement in the universe at every
/// half-unit level, valid for one specific active-agent set.
struct SupportTable {
    active: Vec<AgentId>,
    /// `[statement * num_levels + bucket]`, bucket 0 = highest level.
    cum: Vec<u16>,
    /// `max_sup[bucket * (|I|+1) + cost]` = best support among statements of
    /// cost at most `cost`.
    max_sup: Vec<u16>,
}

struct Oracle {
    env: SyntheticEnv,
    table: Option<SupportTable>,
}

impl Oracle {
    fn num_levels(&self) -> usize {
        (self.env.max_utility() - self.env.min_utility() + 1) as usize
    }

    /// Bucket for "utility >= threshold" lookups; thresholds above the
    /// maximum have no supporters, thresholds at or below the minimum are
    /// supported by every active agent.
    fn sup(&self, table: &SupportTable, idx: usize, threshold: i64) -> usize {
        if threshold > self.env.max_utility() as i64 {
            return 0;
        }
        if threshold <= self.env.min_utility() as i64 {
            return table.active.len();
        }
        let bucket = (self.env.max_utility() as i64 - threshold) as usize;
        table.cum[idx * self.num_levels() + bucket] as usize
    }

    fn max_sup(&self, table: &SupportTable, threshold: i64, cost_cap: u64) -> usize {
        let cap = cost_cap.min(self.env.num_issues as u64) as usize;
        if cap == 0 || threshold > self.env.max_utility() as i64 {
            return 0;
        }
        if threshold <= self.env.min_utility() as i64 {
            return table.active.len();
        }
        let bucket = (self.env.max_utility() as i64 - threshold) as usize;
        let width = self.env.num_issues as usize + 1;
        table.max_sup[bucket * width + cap] as usize
    }

    fn table_for(&mut self, active: &[AgentId]) -> &SupportTable {
        let stale = match &self.table {
            Some(t) => t.active != active,
            None => true,
        };
        if stale {
            let levels = self.num_levels();
            let universe = self.env.universe_size();
            let width = self.env.num_issues as usize + 1;
            let max_u = self.env.max_utility();
            let mut cum = vec![0u16; universe * levels];
            let mut max_sup = vec![0u16; levels * width];
            for idx in 0..universe {
                let row = self.env.utility_row(idx);
                let slot = &mut cum[idx * levels..(idx + 1) * levels];
                for &agent in active {
                    let bucket = (max_u - row[agent.index()]) as usize;
                    slot[bucket] += 1;
                }
                let mut acc = 0u16;
                for bucket in 0..levels {
                    acc += slot[bucket];
                    slot[bucket] = acc;
                }
                let cost = self.env.statement_cost(idx) as usize;
                if cost >= 1 {
                    for bucket in 0..levels {
                        for cap in cost..width {
                            let cell = &mut max_sup[bucket * width + cap];
                            *cell = (*cell).max(slot[bucket]);
                        }
                    }
                }
            }
            self.table = Some(SupportTable {
                active: active.to_vec(),
                cum,
                max_sup,
            });
        }
        self.table.as_ref().unwrap()
    }

    /// Smallest integer threshold equivalent to "utility >= level" for
    /// integer-valued utilities.
    fn level_threshold(level: UtilityValue) -> i64 {
        Ratio::new(level.numer(), level.denom()).ceil().to_integer()
    }
}

/// Exact query oracles: the discriminative query returns true utilities and
/// the generative query returns a maximum-support statement within the cost
/// cap via full enumeration, breaking ties uniformly at random.
pub struct ExactSuite {
    oracle: Oracle,
    rng: ChaCha8Rng,
    scratch: Vec<u32>,
}

impl ExactSuite {
    pub fn new(env: SyntheticEnv, seed: u64) -> Self {
        ExactSuite {
            oracle: Oracle { env, table: None },
            rng: ChaCha8Rng::seed_from_u64(seed),
            scratch: Vec::new(),
        }
    }

    pub fn env(&self) -> &SyntheticEnv {
        &self.oracle.env
    }
}

impl QuerySuite for ExactSuite {
    fn disc(&mut self, agent: AgentId, statement: &Payload) -> Result<UtilityValue, QueryError> {
        Ok(self.oracle.env.true_utility(agent.index(), statement))
    }

    fn gen(
        &mut self,
        active: &[AgentId],
        level: UtilityValue,
        cost_cap: u64,
    ) -> Result<Option<StatementDraft>, QueryError> {
        if cost_cap < 1 {
            // Degenerate cap: only the empty statement fits.
            return Ok(Some(StatementDraft {
                payload: self.oracle.env.payload_of(0),
                cost: 0,
            }));
        }
        let threshold = Oracle::level_threshold(level);
        self.oracle.table_for(active);
        let table = self.oracle.table.take().unwrap();
        let best = self.oracle.max_sup(&table, threshold, cost_cap);
        // Candidates are the statements using the full cost allowance. Any
        // cheaper statement extends to this cost by adding centre opinions
        // (which never lower utility here), so the achievable support is the
        // same as over all statements within the cap.
        let target_cost = cost_cap.min(self.oracle.env.num_issues as u64);
        self.scratch.clear();
        for idx in 1..self.oracle.env.universe_size() {
            if self.oracle.env.statement_cost(idx) == target_cost
                && self.oracle.sup(&table, idx, threshold) == best
            {
                self.scratch.push(idx as u32);
            }
        }
        let choice = self.scratch[self.rng.gen_range(0..self.scratch.len())] as usize;
        let draft = StatementDraft {
            payload: self.oracle.env.payload_of(choice),
            cost: self.oracle.env.statement_cost(choice),
        };
        self.oracle.table = Some(table);
        Ok(Some(draft))
    }
}

/// Simulated approximate queries.
///
/// The discriminative query adds an integer perturbation drawn from
/// `[-beta, beta]` (or `{-beta, +beta}` in worst-case mode) on every call.
/// The generative query computes the feasible set of statements whose
/// support at `level - delta` is at least `gamma` times the best support
/// achievable at `level` among statements of cost at most `ceil(mu * cap)`,
/// then samples from it — uniformly, or uniformly among the worst-supported
/// feasible statements in worst-case mode.
pub struct NoisySuite {
    oracle: Oracle,
    model: ErrorModel,
    rng: ChaCha8Rng,
    scratch: Vec<u32>,
}

impl NoisySuite {
    pub fn new(env: SyntheticEnv, model: ErrorModel) -> Result<Self, QueryError> {
        model.validate()?;
        let rng = ChaCha8Rng::seed_from_u64(model.seed);
        Ok(NoisySuite {
            oracle: Oracle { env, table: None },
            model,
            rng,
            scratch: Vec::new(),
        })
    }

    pub fn env(&self) -> &SyntheticEnv {
        &self.oracle.env
    }
}

impl QuerySuite for NoisySuite {
    fn disc(&mut self, agent: AgentId, statement: &Payload) -> Result<UtilityValue, QueryError> {
        let truth = self.oracle.env.true_utility(agent.index(), statement);
        let beta = self.model.beta as i64;
        if beta == 0 {
            return Ok(truth);
        }
        let noise = match self.model.mode {
            ErrorMode::Uniform => self.rng.gen_range(-beta..=beta),
            ErrorMode::WorstCase => {
                if self.rng.gen::<bool>() {
                    beta
                } else {
                    -beta
                }
            }
        };
        Ok(truth + UtilityValue::from_int(noise))
    }

    fn gen(
        &mut self,
        active: &[AgentId],
        level: UtilityValue,
        cost_cap: u64,
    ) -> Result<Option<StatementDraft>, QueryError> {
        if cost_cap < 1 {
            return Ok(Some(StatementDraft {
                payload: self.oracle.env.payload_of(0),
                cost: 0,
            }));
        }
        // Support of the returned statement is measured at level - delta;
        // utilities are integers, so thresholds round up.
        let exact_level = Ratio::new(level.numer(), level.denom());
        let level_t = exact_level.ceil().to_integer();
        let relaxed_t = (exact_level - self.model.delta).ceil().to_integer();
        // The reference optimum only searches statements of cost at most
        // ceil(mu * cap).
        let mu_cap_ratio = self.model.mu * Ratio::from_integer(cost_cap.min(i64::MAX as u64) as i64);
        let mu_cap = mu_cap_ratio.ceil().to_integer().max(0) as u64;

        self.oracle.table_for(active);
        let table = self.oracle.table.take().unwrap();
        let reference = self.oracle.max_sup(&table, level_t, mu_cap);

        self.scratch.clear();
        let mut worst = usize::MAX;
        // Same full-allowance candidate filter as the exact query; the
        // admissible set stays nonempty because the centre-opinion extension
        // of the reference maximizer is itself admissible.
        let target_cost = cost_cap.min(self.oracle.env.num_issues as u64);
        for idx in 1..self.oracle.env.universe_size() {
            if self.oracle.env.statement_cost(idx) != target_cost {
                continue;
            }
            let sup = self.oracle.sup(&table, idx, relaxed_t);
            // count >= gamma * reference, compared exactly.
            let feasible = (sup as i64) * self.model.gamma.denom()
                >= self.model.gamma.numer() * reference as i64;
            if !feasible {
                continue;
            }
            match self.model.mode {
                ErrorMode::Uniform => self.scratch.push(idx as u32),
                ErrorMode::WorstCase => {
                    if sup < worst {
                        worst = sup;
                        self.scratch.clear();
                    }
                    if sup == worst {
                        self.scratch.push(idx as u32);
                    }
                }
            }
        }
        self.oracle.table = Some(table);
        if self.scratch.is_empty() {
            // The reference maximizer itself is always feasible for
            // delta >= 0 and mu <= 1, so an empty set signals a bug.
            return Err(QueryError::Gen(format!(
                "no statement meets gamma * reference = {} * {reference}",
                self.model.gamma
            )));
        }
        let choice = self.scratch[self.rng.gen_range(0..self.scratch.len())] as usize;
        Ok(Some(StatementDraft {
            payload: self.oracle.env.payload_of(choice),
            cost: self.oracle.env.statement_cost(choice),
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_zero_is_exact() {
        let env = SyntheticEnv::new(1, 3, 3, 6, 6);
        let model = ErrorModel::exact(5);
        let mut noisy = NoisySuite::new(env.clone(), model).unwrap();
        for agent in 0..6 {
            for idx in 0..env.universe_size() {
                let payload = env.payload_of(idx);
                assert_eq!(
                    noisy.disc(AgentId(agent), &payload).unwrap(),
                    env.utility(agent as usize, idx)
                );
            }
        }
    }

    #[test]
    fn noisy_disc_stays_within_beta() {
        let env = SyntheticEnv::new(2, 3, 3, 6, 6);
        let mut model = ErrorModel::exact(5);
        model.beta = 2;
        let mut noisy = NoisySuite::new(env.clone(), model).unwrap();
        let payload = env.payload_of(7);
        for agent in 0..6u32 {
            for _ in 0..200 {
                let value = noisy.disc(AgentId(agent), &payload).unwrap();
                let diff = value - env.true_utility(agent as usize, &payload);
                assert!(diff.abs() <= UtilityValue::from_int(2));
            }
        }
    }

    #[test]
    fn worst_case_noise_is_always_extreme() {
        let env = SyntheticEnv::new(2, 3, 3, 6, 6);
        let mut model = ErrorModel::exact(5);
        model.beta = 1;
        model.mode = ErrorMode::WorstCase;
        let mut noisy = NoisySuite::new(env.clone(), model).unwrap();
        let payload = env.payload_of(3);
        for _ in 0..100 {
            let value = noisy.disc(AgentId(1), &payload).unwrap();
            let diff = value - env.true_utility(1, &payload);
            assert_eq!(diff.abs(), UtilityValue::from_int(1));
        }
    }

    #[test]
    fn uniform_noise_distribution_is_flat() {
        // Chi-squared goodness of fit for the disc error at beta=1 over
        // {-1, 0, 1}: with 2 degrees of freedom the 1% critical value is
        // 9.21.
        let env = SyntheticEnv::new(4, 5, 5, 10, 15);
        let mut model = ErrorModel::exact(123);
        model.beta = 1;
        let mut noisy = NoisySuite::new(env.clone(), model).unwrap();
        let payload = env.payload_of(42);
        let truth = env.true_utility(3, &payload);
        let mut counts = [0u32; 3];
        let draws = 10_000;
        for _ in 0..draws {
            let diff = noisy.disc(AgentId(3), &payload).unwrap() - truth;
            let k = (diff.numer() / diff.denom().max(1) + 1) as usize;
            counts[k] += 1;
        }
        let expected = draws as f64 / 3.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 9.21, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn exact_gen_collapse_of_noisy_gen() {
        // gamma = 1, delta = 0, mu = 1 restricts the feasible set to the
        // exact maximizer set.
        let env = SyntheticEnv::new(2, 2, 2, 2, 2);
        let mut exact = ExactSuite::new(env.clone(), 99);
        let mut noisy = NoisySuite::new(env.clone(), ErrorModel::exact(99)).unwrap();
        let active: Vec<AgentId> = (0..2).map(AgentId).collect();
        let level = UtilityValue::from_halves(1);
        for cap in 1..=2 {
            let a = exact.gen(&active, level, cap).unwrap().unwrap();
            let b = noisy.gen(&active, level, cap).unwrap().unwrap();
            // Same seeded rng over the same candidate set.
            assert_eq!(a, b);
        }
    }

    #[test]
    fn gen_with_zero_cap_returns_empty_statement() {
        let env = SyntheticEnv::new(2, 2, 2, 2, 2);
        let mut exact = ExactSuite::new(env, 1);
        let draft = exact
            .gen(&[AgentId(0)], UtilityValue::ZERO, 0)
            .unwrap()
            .unwrap();
        assert_eq!(draft.cost, 0);
    }
}
