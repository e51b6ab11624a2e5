//! Small statistics toolbox used by the evaluation reports.

use statrs::distribution::{Beta, ContinuousCDF, StudentsT};

/// Arithmetic mean; 0 for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Quantile via linear interpolation between order statistics.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    assert!((0.0..=1.0).contains(&q));
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}

/// Mean of the bottom 10% of values (at least one).
pub fn bottom_decile_mean(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = (sorted.len() / 10).max(1);
    mean(&sorted[..k])
}

/// Two-sided paired t-test across matched observations. Returns the p-value
/// for the hypothesis that both samples share the same mean. Degenerate
/// cases: all differences zero gives 1.0; a nonzero constant difference
/// gives 0.0.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    if n < 2 {
        return 1.0;
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let d_mean = mean(&diffs);
    let var = diffs.iter().map(|d| (d - d_mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    if var == 0.0 {
        return if d_mean == 0.0 { 1.0 } else { 0.0 };
    }
    let t = d_mean / (var / n as f64).sqrt();
    let dist = StudentsT::new(0.0, 1.0, n as f64 - 1.0).expect("valid dof");
    2.0 * (1.0 - dist.cdf(t.abs()))
}

/// Pearson correlation coefficient; 0 when either side has no variance.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let ma = mean(a);
    let mb = mean(b);
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    if va == 0.0 || vb == 0.0 {
        return 0.0;
    }
    cov / (va * vb).sqrt()
}

/// Cohen's kappa for two binary raters.
pub fn cohen_kappa(a: &[bool], b: &[bool]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    if n == 0.0 {
        return 0.0;
    }
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / n;
    let pa = a.iter().filter(|&&x| x).count() as f64 / n;
    let pb = b.iter().filter(|&&x| x).count() as f64 / n;
    let expected = pa * pb + (1.0 - pa) * (1.0 - pb);
    if (1.0 - expected).abs() < 1e-12 {
        return if (agree - 1.0).abs() < 1e-12 { 1.0 } else { 0.0 };
    }
    (agree - expected) / (1.0 - expected)
}

/// Exact (Clopper-Pearson) 95% confidence interval for a binomial fraction.
pub fn clopper_pearson_95(successes: usize, trials: usize) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let alpha = 0.05;
    let k = successes as f64;
    let n = trials as f64;
    let lower = if successes == 0 {
        0.0
    } else {
        Beta::new(k, n - k + 1.0)
            .expect("valid beta")
            .inverse_cdf(alpha / 2.0)
    };
    let upper = if successes == trials {
        1.0
    } else {
        Beta::new(k + 1.0, n - k)
            .expect("valid beta")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    (lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_interpolates() {
        let values = vec![1.0, 2.0, 3.0, 4.0];
        assert!((quantile(&values, 0.25) - 1.75).abs() < 1e-12);
        assert_eq!(quantile(&values, 0.0), 1.0);
        assert_eq!(quantile(&values, 1.0), 4.0);
    }

    #[test]
    fn t_test_of_identical_samples_is_one() {
        let a = vec![3.0, 4.0, 5.0, 2.5];
        assert_eq!(paired_t_test(&a, &a), 1.0);
    }

    #[test]
    fn t_test_detects_constant_shift() {
        let a = vec![3.0, 4.0, 5.0, 2.5];
        let b: Vec<f64> = a.iter().map(|x| x + 1.0).collect();
        assert_eq!(paired_t_test(&a, &b), 0.0);
        let mut c = b.clone();
        c[0] += 0.5;
        let p = paired_t_test(&a, &c);
        assert!(p < 0.05, "p = {p}");
    }

    #[test]
    fn pearson_of_identical_is_one() {
        let a = vec![1.0, 5.0, 3.0, 2.0];
        assert!((pearson(&a, &a) - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = a.iter().map(|x| -x).collect();
        assert!((pearson(&a, &neg) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn kappa_perfect_agreement() {
        let a = vec![true, false, true, true];
        assert!((cohen_kappa(&a, &a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clopper_pearson_brackets_point_estimate() {
        let (lo, hi) = clopper_pearson_95(43, 51);
        let p = 43.0 / 51.0;
        assert!(lo < p && p < hi);
        // Matches the usual exact interval for 84% of 51 within a percent.
        assert!((lo - 0.725).abs() < 0.015, "lo = {lo}");
        assert!((hi - 0.921).abs() < 0.015, "hi = {hi}");
    }
}
