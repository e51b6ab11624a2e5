use serde::{Deserialize, Serialize};
use slate_core::Instance;

use crate::run::ProcessError;

/// Which levels the generative query is called with in a round running at
/// grid level `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelExpansion {
    /// Only `l` itself.
    Current,
    /// Every grid level from the top down to `l`.
    CurrentAndAbove,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    Fast,
    Complex,
    Uniform,
    UnitCost,
    Custom,
}

impl Variant {
    pub fn label(&self) -> &'static str {
        match self {
            Variant::Fast => "fast",
            Variant::Complex => "complex",
            Variant::Uniform => "uniform",
            Variant::UnitCost => "unit_cost",
            Variant::Custom => "custom",
        }
    }
}

/// Parameters of the selection process: the list of cost caps walked in each
/// round, the level expansion for generative calls, and the statement-bank
/// behaviour used by the text pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessConfig {
    /// Cost caps, walked in the listed order within a level. Caps exceeding
    /// the remaining budget are skipped.
    pub cost_list: Vec<u64>,
    pub level_expansion: LevelExpansion,
    /// Reject generated and banked candidates cheaper than this (0 =
    /// disabled). Waived once the process reaches the final grid level.
    pub min_statement_cost: u64,
    /// Re-offer every previously generated statement within the current cost
    /// cap as a candidate.
    pub use_statement_bank: bool,
    pub variant: Variant,
}

impl ProcessConfig {
    /// The four named instantiations. `k_or_cost` is the single cost cap of
    /// the uniform variant and is ignored by the others.
    pub fn named(
        variant: Variant,
        instance: &Instance,
        k_or_cost: Option<u64>,
    ) -> Result<Self, ProcessError> {
        let b = instance.budget;
        let n = instance.num_agents() as u64;
        let config = match variant {
            Variant::Fast => {
                // {floor(j*B/n) | j in [n]}, deduplicated, zeros dropped
                // (a zero-cost generative call is degenerate), largest first.
                let mut costs: Vec<u64> = (1..=n).map(|j| j * b / n).filter(|&c| c > 0).collect();
                costs.sort_unstable();
                costs.dedup();
                costs.reverse();
                ProcessConfig {
                    cost_list: costs,
                    level_expansion: LevelExpansion::Current,
                    min_statement_cost: 0,
                    use_statement_bank: false,
                    variant,
                }
            }
            Variant::Complex => ProcessConfig {
                cost_list: (1..=b).rev().collect(),
                level_expansion: LevelExpansion::CurrentAndAbove,
                min_statement_cost: 0,
                use_statement_bank: false,
                variant,
            },
            Variant::Uniform => {
                let cost = k_or_cost.ok_or_else(|| {
                    ProcessError::Config("uniform variant requires a cost value".into())
                })?;
                ProcessConfig {
                    cost_list: vec![cost],
                    level_expansion: LevelExpansion::Current,
                    min_statement_cost: 0,
                    use_statement_bank: false,
                    variant,
                }
            }
            Variant::UnitCost => ProcessConfig {
                cost_list: vec![1],
                level_expansion: LevelExpansion::Current,
                min_statement_cost: 0,
                use_statement_bank: false,
                variant,
            },
            Variant::Custom => {
                return Err(ProcessError::Config(
                    "custom configs are built directly, not via named()".into(),
                ))
            }
        };
        config.validate(b)?;
        Ok(config)
    }

    pub fn custom(
        cost_list: Vec<u64>,
        level_expansion: LevelExpansion,
        min_statement_cost: u64,
        use_statement_bank: bool,
    ) -> Self {
        ProcessConfig {
            cost_list,
            level_expansion,
            min_statement_cost,
            use_statement_bank,
            variant: Variant::Custom,
        }
    }

    pub fn validate(&self, budget: u64) -> Result<(), ProcessError> {
        if self.cost_list.is_empty() {
            return Err(ProcessError::Config("cost list must be nonempty".into()));
        }
        if self.variant != Variant::UnitCost {
            if let Some(&bad) = self.cost_list.iter().find(|&&c| c == 0 || c > budget) {
                return Err(ProcessError::Config(format!(
                    "cost value {bad} outside [1, {budget}]"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use slate_core::{Agent, AgentId, UtilityValue};

    fn instance(n: u32, budget: u64) -> Instance {
        let agents = (0..n)
            .map(|i| Agent {
                id: AgentId(i),
                description: String::new(),
            })
            .collect();
        Instance::new(
            agents,
            budget,
            vec![UtilityValue::from_int(1), UtilityValue::from_int(0)],
        )
        .unwrap()
    }

    #[test]
    fn fast_costs_drop_zero_and_dedup() {
        let cfg = ProcessConfig::named(Variant::Fast, &instance(60, 15), None).unwrap();
        let expect: Vec<u64> = (1..=15).rev().collect();
        assert_eq!(cfg.cost_list, expect);
        assert_eq!(cfg.level_expansion, LevelExpansion::Current);
    }

    #[test]
    fn fast_costs_when_budget_exceeds_agents() {
        // n=4, B=8: floor(2j) = {2,4,6,8}
        let cfg = ProcessConfig::named(Variant::Fast, &instance(4, 8), None).unwrap();
        assert_eq!(cfg.cost_list, vec![8, 6, 4, 2]);
    }

    #[test]
    fn complex_walks_every_cost_with_expanded_levels() {
        let cfg = ProcessConfig::named(Variant::Complex, &instance(60, 15), None).unwrap();
        assert_eq!(cfg.cost_list, (1..=15).rev().collect::<Vec<_>>());
        assert_eq!(cfg.level_expansion, LevelExpansion::CurrentAndAbove);
    }

    #[test]
    fn uniform_requires_cost() {
        assert!(ProcessConfig::named(Variant::Uniform, &instance(60, 15), None).is_err());
        let cfg = ProcessConfig::named(Variant::Uniform, &instance(60, 15), Some(5)).unwrap();
        assert_eq!(cfg.cost_list, vec![5]);
    }
}
