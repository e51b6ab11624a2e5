//! Validation of discriminative scorers against real up/down votes: does a
//! scorer give a user's upvoted statements higher scores than their
//! downvoted ones?

use serde::{Deserialize, Serialize};

use crate::stats::{clopper_pearson_95, cohen_kappa, mean, pearson};

/// One validation subject: a user description plus the statements they
/// up- and downvoted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VotedAgent {
    pub id: String,
    pub description: String,
    pub upvoted: Vec<String>,
    pub downvoted: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScorerValidation {
    pub name: String,
    /// Fraction of agents whose mean score on upvoted statements exceeds
    /// the mean on downvoted ones.
    pub fraction_correct: f64,
    pub ci_95: (f64, f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VoteValidationReport {
    pub scorers: Vec<ScorerValidation>,
    /// Pearson correlation between the two scorers' per-agent
    /// (mean up - mean down) difference vectors.
    pub pearson_r: f64,
    /// Cohen's kappa on the per-agent up>down indicators.
    pub cohen_kappa: f64,
    pub agents_used: usize,
    pub agents_skipped: usize,
}

/// Runs both scorers over every agent's votes. Agents with fewer than
/// `min_votes` of either kind are skipped with a warning.
pub fn vote_validation<F, G>(
    agents: &[VotedAgent],
    mut scorer_a: F,
    mut scorer_b: G,
    names: (&str, &str),
    min_votes: usize,
) -> VoteValidationReport
where
    F: FnMut(&VotedAgent, &str) -> f64,
    G: FnMut(&VotedAgent, &str) -> f64,
{
    let mut diffs_a = Vec::new();
    let mut diffs_b = Vec::new();
    let mut skipped = 0usize;
    for agent in agents {
        if agent.upvoted.len() < min_votes || agent.downvoted.len() < min_votes {
            log::warn!(
                "skipping agent {}: {} upvotes / {} downvotes (need {min_votes})",
                agent.id,
                agent.upvoted.len(),
                agent.downvoted.len()
            );
            skipped += 1;
            continue;
        }
        let mean_of = |scores: Vec<f64>| mean(&scores);
        let up_a = mean_of(agent.upvoted.iter().map(|s| scorer_a(agent, s)).collect());
        let down_a = mean_of(agent.downvoted.iter().map(|s| scorer_a(agent, s)).collect());
        let up_b = mean_of(agent.upvoted.iter().map(|s| scorer_b(agent, s)).collect());
        let down_b = mean_of(agent.downvoted.iter().map(|s| scorer_b(agent, s)).collect());
        diffs_a.push(up_a - down_a);
        diffs_b.push(up_b - down_b);
    }

    let used = diffs_a.len();
    let indicator = |diffs: &[f64]| -> Vec<bool> { diffs.iter().map(|&d| d > 0.0).collect() };
    let ind_a = indicator(&diffs_a);
    let ind_b = indicator(&diffs_b);
    let scorer_report = |name: &str, ind: &[bool]| {
        let correct = ind.iter().filter(|&&x| x).count();
        ScorerValidation {
            name: name.to_string(),
            fraction_correct: if used == 0 {
                0.0
            } else {
                correct as f64 / used as f64
            },
            ci_95: if used == 0 {
                (0.0, 1.0)
            } else {
                clopper_pearson_95(correct, used)
            },
        }
    };

    VoteValidationReport {
        scorers: vec![scorer_report(names.0, &ind_a), scorer_report(names.1, &ind_b)],
        pearson_r: pearson(&diffs_a, &diffs_b),
        cohen_kappa: cohen_kappa(&ind_a, &ind_b),
        agents_used: used,
        agents_skipped: skipped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agent(id: u32, n_up: usize, n_down: usize) -> VotedAgent {
        VotedAgent {
            id: id.to_string(),
            description: format!("user {id}"),
            upvoted: (0..n_up).map(|k| format!("up{k}")).collect(),
            downvoted: (0..n_down).map(|k| format!("down{k}")).collect(),
        }
    }

    #[test]
    fn perfect_scorer_is_fully_correct_and_self_correlated() {
        let agents: Vec<VotedAgent> = (0..20).map(|i| agent(i, 5, 5)).collect();
        let perfect = |_: &VotedAgent, s: &str| if s.starts_with("up") { 1.0 } else { -1.0 };
        let report = vote_validation(&agents, perfect, perfect, ("a", "b"), 5);
        assert_eq!(report.scorers[0].fraction_correct, 1.0);
        assert_eq!(report.scorers[1].fraction_correct, 1.0);
        assert!((report.pearson_r - 1.0).abs() < 1e-12);
        assert!((report.cohen_kappa - 1.0).abs() < 1e-12);
    }

    #[test]
    fn independent_coin_flip_scorers_decorrelate() {
        use rand::{Rng, SeedableRng};
        let agents: Vec<VotedAgent> = (0..400).map(|i| agent(i, 5, 5)).collect();
        let mut rng_a = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let mut rng_b = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let report = vote_validation(
            &agents,
            move |_, _| if rng_a.gen::<bool>() { 1.0 } else { 0.0 },
            move |_, _| if rng_b.gen::<bool>() { 1.0 } else { 0.0 },
            ("coin_a", "coin_b"),
            5,
        );
        assert!(report.pearson_r.abs() < 0.15, "r = {}", report.pearson_r);
    }

    #[test]
    fn under_voted_agents_are_skipped() {
        let mut agents: Vec<VotedAgent> = (0..4).map(|i| agent(i, 5, 5)).collect();
        agents.push(agent(99, 4, 5));
        agents.push(agent(100, 5, 2));
        let any = |_: &VotedAgent, _: &str| 1.0;
        let report = vote_validation(&agents, any, any, ("a", "b"), 5);
        assert_eq!(report.agents_used, 4);
        assert_eq!(report.agents_skipped, 2);
    }
}
