//! Monte-Carlo sweeps over the synthetic environment: per-instance process
//! runs, full-universe proportionality audits, and aggregation across seeds.

use num_rational::Ratio;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use slate_audit::{max_violation_ratio, CandidateTable};
use slate_process::{run_process, ProcessConfig, QuerySuite, Variant};
use slate_synth::{ErrorMode, ErrorModel, ExactSuite, NoisySuite, SyntheticEnv};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Process(#[from] slate_process::ProcessError),
    #[error(transparent)]
    Audit(#[from] slate_audit::AuditError),
    #[error(transparent)]
    Query(#[from] slate_process::QueryError),
    #[error(
        "guarantee breach: {variant} run (setting {setting}, instance {instance}) admits a \
         ({slack}, {ratio}) witness against the ({slack}, {bound}) guarantee"
    )]
    GuaranteeBreach {
        variant: &'static str,
        setting: String,
        instance: usize,
        slack: String,
        ratio: String,
        bound: String,
    },
    #[error("sweep config error: {0}")]
    Config(String),
}

/// Synthetic environment dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvParams {
    pub num_issues: u32,
    pub opinion_count: u32,
    pub n: usize,
    pub budget: u64,
}

impl Default for EnvParams {
    fn default() -> Self {
        EnvParams {
            num_issues: 5,
            opinion_count: 5,
            n: 60,
            budget: 15,
        }
    }
}

/// One error setting of the simulated queries (seed-free; per-instance
/// seeds are derived during the sweep).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorSpec {
    pub beta: u32,
    pub gamma: Ratio<i64>,
    pub delta: Ratio<i64>,
    pub mu: Ratio<i64>,
    pub mode: ErrorMode,
}

impl ErrorSpec {
    pub fn exact() -> Self {
        ErrorSpec {
            beta: 0,
            gamma: Ratio::from_integer(1),
            delta: Ratio::from_integer(0),
            mu: Ratio::from_integer(1),
            mode: ErrorMode::Uniform,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.beta == 0
            && self.gamma == Ratio::from_integer(1)
            && self.delta == Ratio::from_integer(0)
            && self.mu == Ratio::from_integer(1)
    }

    pub fn label(&self) -> String {
        let mode = match self.mode {
            ErrorMode::Uniform => "uniform",
            ErrorMode::WorstCase => "worst_case",
        };
        format!(
            "beta={} delta={} mu={} gamma={} mode={mode}",
            self.beta, self.delta, self.mu, self.gamma
        )
    }

    /// Slack `2*beta + delta` of the guarantee, when it lands on the
    /// integer audit grid.
    pub fn guarantee_slack(&self) -> Option<i32> {
        let slack = Ratio::from_integer(2 * self.beta as i64) + self.delta;
        if *slack.denom() == 1 {
            Some(*slack.numer() as i32)
        } else {
            None
        }
    }

    /// The `1 / (gamma * mu)` coalition-ratio bound of the guarantee.
    pub fn guarantee_ratio_bound(&self) -> Ratio<i64> {
        (self.gamma * self.mu).recip()
    }
}

/// A full sweep: error settings x process variants x seeded instances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub env: EnvParams,
    pub settings: Vec<ErrorSpec>,
    pub variants: Vec<Variant>,
    pub num_instances: usize,
    pub base_seed: u64,
    /// Slack values (utility units) of the violation curve.
    pub slack_grid: Vec<u32>,
}

impl SweepSpec {
    /// The four error settings of the headline comparison, in the given
    /// noise mode.
    pub fn standard_settings(mode: ErrorMode) -> Vec<ErrorSpec> {
        [
            (0u32, Ratio::from_integer(1), Ratio::from_integer(0), Ratio::from_integer(1)),
            (1, Ratio::new(17, 20), Ratio::from_integer(1), Ratio::new(17, 20)),
            (2, Ratio::new(7, 10), Ratio::from_integer(2), Ratio::new(7, 10)),
            (3, Ratio::new(11, 20), Ratio::from_integer(3), Ratio::new(11, 20)),
        ]
        .into_iter()
        .map(|(beta, gamma, delta, mu)| ErrorSpec {
            beta,
            gamma,
            delta,
            mu,
            mode,
        })
        .collect()
    }
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            env: EnvParams::default(),
            settings: SweepSpec::standard_settings(ErrorMode::Uniform),
            variants: vec![Variant::Uniform, Variant::Fast, Variant::Complex],
            num_instances: 100,
            base_seed: 0,
            slack_grid: (0..=10).collect(),
        }
    }
}

/// Metrics of one process run on one instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceMetrics {
    pub instance: usize,
    pub variant: Variant,
    /// Mean true utility of the representation across all agents
    /// (unrepresented agents count as zero).
    pub mean_utility: f64,
    /// Mean utility of the bottom tenth of agents.
    pub bottom_decile_mean: f64,
    /// Largest violation ratio per slack-grid value, audited against the
    /// full statement universe.
    pub max_d: Vec<f64>,
    /// Whether an exact violation (slack 0, ratio >= 1) exists.
    pub violated: bool,
    /// Number of violating slack values on the grid (prefix length, by
    /// monotonicity of the curve).
    pub violating_slacks: usize,
    pub num_unassigned: usize,
}

/// Aggregate across instances for one (setting, variant) cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepCell {
    pub setting: String,
    pub variant: Variant,
    pub n_instances: usize,
    pub mean_utility: f64,
    pub mean_bottom_decile: f64,
    /// Mean of the per-instance max violation ratios, per slack value.
    pub mean_max_d: Vec<f64>,
    /// Mean number of violating slack values at full quota.
    pub mean_violating_slacks: f64,
    pub violation_count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub slack_grid: Vec<u32>,
    pub cells: Vec<SweepCell>,
}

/// Deterministic per-task seed derivation (splitmix64 finalizer).
pub fn derive_seed(base: u64, salt: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9E3779B97F4A7C15)
        .wrapping_add(salt.wrapping_mul(0xBF58476D1CE4E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Candidate table spanning the entire nonempty universe, with utilities in
/// half-units.
pub fn universe_table(env: &SyntheticEnv) -> CandidateTable<i32> {
    let mut table = CandidateTable::new(env.num_agents());
    for idx in 0..env.universe_size() {
        let cost = env.statement_cost(idx);
        if cost >= 1 {
            table.push(cost, env.utility_row(idx));
        }
    }
    table
}

fn make_suite(
    env: &SyntheticEnv,
    error: &ErrorSpec,
    seed: u64,
) -> Result<Box<dyn QuerySuite>, SweepError> {
    if error.is_exact() {
        Ok(Box::new(ExactSuite::new(env.clone(), seed)))
    } else {
        let model = ErrorModel {
            beta: error.beta,
            gamma: error.gamma,
            delta: error.delta,
            mu: error.mu,
            mode: error.mode,
            seed,
        };
        Ok(Box::new(NoisySuite::new(env.clone(), model)?))
    }
}

/// Runs every requested variant on the instance with the given index and
/// audits the outcomes against the full universe.
pub fn run_setting_instance(
    env_params: EnvParams,
    error: &ErrorSpec,
    variants: &[Variant],
    base_seed: u64,
    index: usize,
    slack_grid: &[u32],
    config_override: Option<&dyn Fn(Variant, &mut ProcessConfig)>,
) -> Result<Vec<InstanceMetrics>, SweepError> {
    let env_seed = derive_seed(base_seed, index as u64);
    let env = SyntheticEnv::new(
        env_seed,
        env_params.num_issues,
        env_params.opinion_count,
        env_params.n,
        env_params.budget,
    );
    let instance = env.instance();
    let table = universe_table(&env);
    let n = env_params.n;

    let mut out = Vec::with_capacity(variants.len());
    for &variant in variants {
        let mut config = ProcessConfig::named(
            variant,
            &instance,
            Some(env_params.num_issues as u64),
        )?;
        if let Some(adjust) = config_override {
            adjust(variant, &mut config);
        }
        // Salted by variant tag so a scan over a subset of variants sees
        // the same runs as a full sweep.
        let salt = match variant {
            Variant::Fast => 1,
            Variant::Complex => 2,
            Variant::Uniform => 3,
            Variant::UnitCost => 4,
            Variant::Custom => 5,
        };
        let suite_seed = derive_seed(env_seed, salt);
        let mut suite = make_suite(&env, error, suite_seed)?;
        let result = run_process(&instance, suite.as_mut(), &config)?;

        // Per-agent true utility of the representation; zero when
        // unrepresented.
        let mut assigned = vec![0i32; n];
        for (&agent, &sid) in &result.assignment {
            let statement = result.slate.get(sid).expect("assignment within slate");
            let idx = env
                .index_of(&statement.payload)
                .expect("synthetic payload round-trips");
            assigned[agent.index()] = env.utility_int(agent.index(), idx);
        }
        let utilities: Vec<f64> = assigned.iter().map(|&u| u as f64).collect();

        let mut max_d = Vec::with_capacity(slack_grid.len());
        let mut max_d_exact = Vec::with_capacity(slack_grid.len());
        for &slack in slack_grid {
            let (ratio, _) =
                max_violation_ratio(&table, &assigned, slack as i32, env_params.budget)?;
            max_d_exact.push(ratio);
            max_d.push(ratio.to_f64().unwrap_or(f64::NAN));
        }
        let one = Ratio::from_integer(1);
        let violated = max_d_exact.first().is_some_and(|&r| r >= one);
        let violating_slacks = max_d_exact.iter().take_while(|&&r| r >= one).count();

        // Hard guarantee of the complex variant: no (2*beta+delta,
        // 1/(gamma*mu)) witness, at any error setting.
        if variant == Variant::Complex {
            if let Some(slack) = error.guarantee_slack() {
                let (ratio, _) =
                    max_violation_ratio(&table, &assigned, slack, env_params.budget)?;
                let bound = error.guarantee_ratio_bound();
                if ratio >= bound {
                    return Err(SweepError::GuaranteeBreach {
                        variant: variant.label(),
                        setting: error.label(),
                        instance: index,
                        slack: slack.to_string(),
                        ratio: ratio.to_string(),
                        bound: bound.to_string(),
                    });
                }
            }
        }

        out.push(InstanceMetrics {
            instance: index,
            variant,
            mean_utility: crate::stats::mean(&utilities),
            bottom_decile_mean: crate::stats::bottom_decile_mean(&utilities),
            max_d,
            violated,
            violating_slacks,
            num_unassigned: result.unassigned.len(),
        });
    }
    Ok(out)
}

fn aggregate(
    setting: &ErrorSpec,
    variant: Variant,
    metrics: &[InstanceMetrics],
    slack_grid: &[u32],
) -> SweepCell {
    let of_variant: Vec<&InstanceMetrics> = metrics
        .iter()
        .filter(|m| m.variant == variant)
        .collect();
    let k = of_variant.len();
    let mean_of = |f: &dyn Fn(&InstanceMetrics) -> f64| -> f64 {
        of_variant.iter().map(|m| f(m)).sum::<f64>() / k.max(1) as f64
    };
    SweepCell {
        setting: setting.label(),
        variant,
        n_instances: k,
        mean_utility: mean_of(&|m| m.mean_utility),
        mean_bottom_decile: mean_of(&|m| m.bottom_decile_mean),
        mean_max_d: (0..slack_grid.len())
            .map(|i| mean_of(&|m| m.max_d[i]))
            .collect(),
        mean_violating_slacks: mean_of(&|m| m.violating_slacks as f64),
        violation_count: of_variant.iter().filter(|m| m.violated).count(),
    }
}

/// Runs the full sweep. Instances run in parallel with per-instance derived
/// seeds; aggregation is ordered by instance index, so results do not
/// depend on scheduling.
pub fn run_error_sweep(spec: &SweepSpec) -> Result<SweepOutcome, SweepError> {
    run_error_sweep_with(spec, None)
}

pub fn run_error_sweep_with(
    spec: &SweepSpec,
    config_override: Option<&(dyn Fn(Variant, &mut ProcessConfig) + Sync)>,
) -> Result<SweepOutcome, SweepError> {
    if spec.num_instances == 0 {
        return Err(SweepError::Config("num_instances must be positive".into()));
    }
    let mut cells = Vec::new();
    for setting in &spec.settings {
        let mut per_instance: Vec<Vec<InstanceMetrics>> = (0..spec.num_instances)
            .into_par_iter()
            .map(|index| {
                run_setting_instance(
                    spec.env,
                    setting,
                    &spec.variants,
                    spec.base_seed,
                    index,
                    &spec.slack_grid,
                    config_override.map(|f| f as &dyn Fn(Variant, &mut ProcessConfig)),
                )
            })
            .collect::<Result<_, _>>()?;
        per_instance.sort_by_key(|ms| ms.first().map_or(0, |m| m.instance));
        let flat: Vec<InstanceMetrics> = per_instance.into_iter().flatten().collect();
        for &variant in &spec.variants {
            cells.push(aggregate(setting, variant, &flat, &spec.slack_grid));
        }
    }
    Ok(SweepOutcome {
        slack_grid: spec.slack_grid.clone(),
        cells,
    })
}

/// Which error parameter a scan varies, holding the others exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanParam {
    Beta,
    Delta,
    MuGamma,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanPoint {
    pub param: ScanParam,
    pub value: Ratio<i64>,
    pub variant: Variant,
    pub n_instances: usize,
    /// Mean over instances of the largest violation ratio at slack 0.
    pub mean_max_d_at_zero: f64,
    /// Mean over instances of the number of violating slack values at full
    /// quota (d = 1); one plus the largest violating slack when any.
    pub mean_violating_slacks: f64,
    pub violation_count: usize,
}

/// Scans one error parameter over the given values, keeping all other
/// parameters accurate.
pub fn run_param_scan(
    param: ScanParam,
    values: &[Ratio<i64>],
    env: EnvParams,
    variants: &[Variant],
    num_instances: usize,
    base_seed: u64,
    mode: ErrorMode,
) -> Result<Vec<ScanPoint>, SweepError> {
    let one = Ratio::from_integer(1);
    let mut points = Vec::new();
    for &value in values {
        let setting = match param {
            ScanParam::Beta => {
                if *value.denom() != 1 || *value.numer() < 0 {
                    return Err(SweepError::Config(format!(
                        "beta must be a nonnegative integer, got {value}"
                    )));
                }
                ErrorSpec {
                    beta: *value.numer() as u32,
                    ..ErrorSpec::exact()
                }
            }
            ScanParam::Delta => ErrorSpec {
                delta: value,
                ..ErrorSpec::exact()
            },
            ScanParam::MuGamma => {
                if value <= Ratio::from_integer(0) || value > one {
                    return Err(SweepError::Config(format!(
                        "mu/gamma must lie in (0, 1], got {value}"
                    )));
                }
                ErrorSpec {
                    gamma: value,
                    mu: value,
                    ..ErrorSpec::exact()
                }
            }
        };
        let spec = SweepSpec {
            env,
            settings: vec![ErrorSpec { mode, ..setting }],
            variants: variants.to_vec(),
            num_instances,
            base_seed,
            slack_grid: (0..=10).collect(),
        };
        // Reuse the sweep driver per value to keep seed derivation aligned
        // with plain sweeps.
        let outcome = run_error_sweep(&spec)?;
        for cell in outcome.cells {
            points.push(ScanPoint {
                param,
                value,
                variant: cell.variant,
                n_instances: cell.n_instances,
                mean_max_d_at_zero: cell.mean_max_d[0],
                mean_violating_slacks: cell.mean_violating_slacks,
                violation_count: cell.violation_count,
            });
        }
    }
    Ok(points)
}
