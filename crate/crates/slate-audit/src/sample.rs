use num_rational::Ratio;
use rand::Rng;
use slate_core::{Statement, UtilityValue};

use crate::witness::{max_violation_ratio, AuditError, CandidateTable};

/// Fraction of statements from the bank that certify an exact violation
/// against the given per-agent assigned utilities.
///
/// Samples `sample_size` statements uniformly with replacement and checks
/// each one in isolation for a coalition of at least its full quota.
pub fn sample_violation_rate<F>(
    bank: &[Statement],
    assigned: &[UtilityValue],
    budget: u64,
    mut utility: F,
    sample_size: usize,
    rng: &mut impl Rng,
) -> Result<f64, AuditError>
where
    F: FnMut(usize, &Statement) -> UtilityValue,
{
    if bank.is_empty() {
        return Err(AuditError::EmptyBank);
    }
    let n = assigned.len();
    let one = Ratio::new(1, 1);
    let mut violating = 0usize;
    for _ in 0..sample_size {
        let statement = &bank[rng.gen_range(0..bank.len())];
        let mut table = CandidateTable::new(n);
        let row: Vec<UtilityValue> = (0..n).map(|i| utility(i, statement)).collect();
        table.push(statement.cost, &row);
        let (ratio, _) = max_violation_ratio(&table, assigned, UtilityValue::ZERO, budget)?;
        if ratio >= one {
            violating += 1;
        }
    }
    Ok(violating as f64 / sample_size as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use slate_core::{Payload, StatementId};

    fn statement(id: u64, cost: u64) -> Statement {
        Statement {
            id: StatementId(id),
            payload: Payload::Text(format!("s{id}")),
            cost,
        }
    }

    #[test]
    fn empty_bank_is_an_error() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let err = sample_violation_rate(
            &[],
            &[UtilityValue::ZERO],
            1,
            |_, _| UtilityValue::ZERO,
            10,
            &mut rng,
        )
        .unwrap_err();
        assert!(matches!(err, AuditError::EmptyBank));
    }

    #[test]
    fn satisfied_agents_yield_zero_rate() {
        let bank: Vec<Statement> = (0..3).map(|k| statement(k, 1)).collect();
        let assigned = vec![UtilityValue::from_int(6); 5];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let rate = sample_violation_rate(
            &bank,
            &assigned,
            5,
            |_, _| UtilityValue::from_int(6),
            100,
            &mut rng,
        )
        .unwrap();
        assert_eq!(rate, 0.0);
    }

    #[test]
    fn planted_violating_fraction_is_recovered() {
        // 10 unit-cost statements, 4 of which give every agent utility 9
        // while everyone sits at 0: each of those four alone is a violation.
        let bank: Vec<Statement> = (0..10).map(|k| statement(k, 1)).collect();
        let assigned = vec![UtilityValue::ZERO; 8];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let rate = sample_violation_rate(
            &bank,
            &assigned,
            8,
            |_, s| {
                if s.id.0 < 4 {
                    UtilityValue::from_int(9)
                } else {
                    UtilityValue::ZERO
                }
            },
            2000,
            &mut rng,
        )
        .unwrap();
        // Binomial with p = 0.4 over 2000 draws: three sigma is about 0.033.
        assert!((rate - 0.4).abs() < 0.04, "rate = {rate}");
    }
}
