//! Comparative evaluation of slates produced by different methods under an
//! independent utility oracle.

use std::collections::BTreeMap;

use anyhow::{Context, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use slate_audit::{assigned_utilities, max_weight_balanced_assignment, sample_violation_rate};
use slate_core::{Assignment, Instance, Slate, Statement, UtilityValue};

use crate::stats::{mean, paired_t_test, quantile};

/// A method's slate, optionally with the assignment the method itself
/// produced. Methods without one are assigned by maximum-weight balanced
/// matching under the evaluation utilities (which favours them).
#[derive(Debug, Clone)]
pub struct MethodSlate {
    pub slate: Slate,
    pub assignment: Option<Assignment>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: String,
    pub mean_utility: f64,
    pub q1_utility: f64,
    /// Two-sided paired t-test p-value against the reference method; None
    /// for the reference itself.
    pub p_value_vs_reference: Option<f64>,
    /// Fraction of bank statements certifying an exact violation.
    pub violation_rate: Option<f64>,
    pub per_agent_utility: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub reference: String,
    pub methods: Vec<MethodReport>,
}

/// Evaluates every method's slate under the given utility oracle.
///
/// `reference` names the method other methods' p-values are computed
/// against. `bank` is the statement pool sampled for the violation rate of
/// the reference method's run (pass per-method banks via `banks` when
/// available).
pub fn evaluate_slates<F>(
    slates: &BTreeMap<String, MethodSlate>,
    instance: &Instance,
    mut utility: F,
    banks: &BTreeMap<String, Vec<Statement>>,
    reference: &str,
    violation_sample_size: usize,
    rng: &mut impl Rng,
) -> Result<EvalReport>
where
    F: FnMut(usize, &Statement) -> UtilityValue,
{
    let n = instance.num_agents();
    let mut methods = Vec::new();

    let mut reference_utilities: Option<Vec<f64>> = None;
    for (name, entry) in slates {
        let assignment = match &entry.assignment {
            Some(a) => a.clone(),
            None => {
                let utilities: Vec<Vec<UtilityValue>> = (0..n)
                    .map(|agent| {
                        entry
                            .slate
                            .statements
                            .iter()
                            .map(|s| utility(agent, s))
                            .collect()
                    })
                    .collect();
                max_weight_balanced_assignment(&utilities, &entry.slate, instance.budget)
                    .with_context(|| format!("balanced assignment for method {name}"))?
                    .0
            }
        };
        let assigned = assigned_utilities(&entry.slate, &assignment, n, &mut utility);
        let per_agent: Vec<f64> = assigned.iter().map(|u| u.to_f64()).collect();
        let violation_rate = match banks.get(name) {
            Some(bank) if !bank.is_empty() => Some(sample_violation_rate(
                bank,
                &assigned,
                instance.budget,
                &mut utility,
                violation_sample_size,
                rng,
            )?),
            _ => None,
        };
        if name == reference {
            reference_utilities = Some(per_agent.clone());
        }
        methods.push(MethodReport {
            method: name.clone(),
            mean_utility: mean(&per_agent),
            q1_utility: quantile(&per_agent, 0.25),
            p_value_vs_reference: None,
            violation_rate,
            per_agent_utility: per_agent,
        });
    }

    let reference_utilities = reference_utilities
        .with_context(|| format!("reference method {reference} missing from slates"))?;
    for report in &mut methods {
        if report.method != reference {
            report.p_value_vs_reference = Some(paired_t_test(
                &report.per_agent_utility,
                &reference_utilities,
            ));
        }
    }

    Ok(EvalReport {
        reference: reference.to_string(),
        methods,
    })
}
