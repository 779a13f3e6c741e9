//! Experiment harness: run protocols, per-segment metrics, phi sweeps, and
//! metric/distance variant comparisons.
//!
//! A run is the unit of independence: each run draws its own layout
//! randomization, environment stream, and exploration stream from
//! `mix(master_seed, run)`. Episode seeds depend only on the run and the
//! global episode index, so every algorithm faces identical environment
//! randomness — differences in returns are attributable to the algorithms.

pub mod report;
pub mod stats;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    ols_train, sql_random_baseline, tlo_train, CoverageSet, OlsParams, TloParams,
};
use crate::env::{perturb, Env, EnvConfig, EnvKind, Layout, MultiObjectiveEnv};
use crate::error::{MorlError, Result};
use crate::learner::{run_episode, LearnerParams, TabularPolicy};
use crate::preference::{DistanceKind, Preference};
use crate::robustness::{RewardHistory, RobustnessKind};
use crate::reward::RewardVector;
use crate::rpb::{RpbAgent, RpbParams, SteppingstoneEntry};
use crate::seed;

const LAYOUT_SALT: u64 = 0x4C41_594F;
const ENV_SALT: u64 = 0x454E_5653;
const ALGO_SALT: u64 = 0x414C_474F;
const OFFLINE_SALT: u64 = 0x4F46_464C;
const EPISODE_SALT: u64 = 0x4550_0000_0000_0000;
const PERTURB_SALT: u64 = 0x5052_0000_0000_0000;

/// Episodes averaged for the converged-return and loss windows.
pub const METRIC_WINDOW: usize = 50;

/// The ordered preference walk and the episode budget each preference gets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreferenceSchedule {
    pub preferences: Vec<Preference>,
    pub episodes_per_preference: usize,
}

impl PreferenceSchedule {
    /// First-objective weights of the canonical nine-preference walk.
    pub const DEFAULT_FIRST_WEIGHTS: [f64; 9] =
        [0.66, 0.33, 0.28, 0.54, 0.68, 0.44, 0.88, 0.65, 0.48];

    pub fn new(preferences: Vec<Preference>, episodes_per_preference: usize) -> Result<Self> {
        let s = PreferenceSchedule {
            preferences,
            episodes_per_preference,
        };
        s.validate()?;
        Ok(s)
    }

    /// The default two-objective schedule at the given episode budget.
    pub fn default_walk(episodes_per_preference: usize) -> Result<Self> {
        let preferences = Self::DEFAULT_FIRST_WEIGHTS
            .iter()
            .map(|f| Preference::pair(*f))
            .collect::<Result<_>>()?;
        Self::new(preferences, episodes_per_preference)
    }

    pub fn validate(&self) -> Result<()> {
        if self.preferences.is_empty() {
            return Err(MorlError::Config("schedule needs preferences".into()));
        }
        if self.episodes_per_preference == 0 {
            return Err(MorlError::Config(
                "episodes_per_preference must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn total_episodes(&self) -> usize {
        self.preferences.len() * self.episodes_per_preference
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Rpb,
    Sql,
    Ols,
    Tlo,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Rpb,
        Algorithm::Sql,
        Algorithm::Ols,
        Algorithm::Tlo,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Rpb => "rpb",
            Algorithm::Sql => "sql",
            Algorithm::Ols => "ols",
            Algorithm::Tlo => "tlo",
        }
    }

    /// Whether execution needs a frozen coverage set per run.
    pub fn needs_frozen_set(&self) -> bool {
        matches!(self, Algorithm::Ols | Algorithm::Tlo)
    }
}

impl std::str::FromStr for Algorithm {
    type Err = MorlError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rpb" => Ok(Algorithm::Rpb),
            "sql" => Ok(Algorithm::Sql),
            "ols" => Ok(Algorithm::Ols),
            "tlo" => Ok(Algorithm::Tlo),
            other => Err(MorlError::Config(format!("unknown algorithm '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Stationary,
    NonStationary,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Stationary => "stationary",
            Mode::NonStationary => "nonstationary",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = MorlError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stationary" => Ok(Mode::Stationary),
            "nonstationary" | "non-stationary" => Ok(Mode::NonStationary),
            other => Err(MorlError::Config(format!("unknown mode '{other}'"))),
        }
    }
}

/// Bootstrapping knobs as they appear in config files: unset fields fall
/// back to per-environment defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RpbBlock {
    pub phi: Option<f64>,
    pub distance: Option<DistanceKind>,
    pub robustness: Option<RobustnessKind>,
    pub history_window: Option<usize>,
}

fn default_perturb_period() -> usize {
    100
}

fn default_perturb_fraction() -> f64 {
    0.25
}

fn default_tlo_training_episodes() -> usize {
    400
}

/// Everything a reproducible experiment needs. A config file is this struct
/// as JSON; command-line flags override individual fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub env: EnvKind,
    /// Inline layout override; the environment's shipped layout when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<Layout>,
    pub algorithm: Algorithm,
    pub mode: Mode,
    pub runs: usize,
    pub schedule: PreferenceSchedule,
    #[serde(default = "default_perturb_period")]
    pub perturb_period: usize,
    #[serde(default = "default_perturb_fraction")]
    pub perturb_fraction: f64,
    pub master_seed: u64,
    #[serde(default)]
    pub rpb: RpbBlock,
    #[serde(default)]
    pub learner: LearnerParams,
    #[serde(default)]
    pub ols: OlsParams,
    /// Per-objective TLO thresholds; environment defaults when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tlo_thresholds: Option<Vec<f64>>,
    #[serde(default = "default_tlo_training_episodes")]
    pub tlo_training_episodes: usize,
}

impl ExperimentConfig {
    /// A ready-to-run config for one environment/algorithm/mode triple.
    pub fn new(
        env: EnvKind,
        algorithm: Algorithm,
        mode: Mode,
        runs: usize,
        schedule: PreferenceSchedule,
        master_seed: u64,
    ) -> Result<Self> {
        let config = ExperimentConfig {
            env,
            layout: None,
            algorithm,
            mode,
            runs,
            schedule,
            perturb_period: default_perturb_period(),
            perturb_fraction: default_perturb_fraction(),
            master_seed,
            rpb: RpbBlock::default(),
            learner: LearnerParams::default(),
            ols: OlsParams::default(),
            tlo_thresholds: None,
            tlo_training_episodes: default_tlo_training_episodes(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(MorlError::Config("runs must be positive".into()));
        }
        self.schedule.validate()?;
        if !(0.0..=1.0).contains(&self.perturb_fraction) {
            return Err(MorlError::Config(format!(
                "perturb_fraction must lie in [0, 1], got {}",
                self.perturb_fraction
            )));
        }
        if self.perturb_period == 0 {
            return Err(MorlError::Config("perturb_period must be positive".into()));
        }
        if let Some(layout) = &self.layout {
            layout.validate()?;
        }
        LearnerParams {
            episodes: 1,
            ..self.learner
        }
        .validate()?;
        self.rpb_params().validate()?;
        self.ols.validate()?;
        if let Some(t) = &self.tlo_thresholds {
            TloParams::new(t.clone())?;
        }
        if self.tlo_training_episodes == 0 {
            return Err(MorlError::Config(
                "tlo_training_episodes must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Bootstrapping parameters with per-environment fallbacks applied.
    pub fn rpb_params(&self) -> RpbParams {
        RpbParams {
            phi: self.rpb.phi.unwrap_or_else(|| self.env.default_phi()),
            distance: self.rpb.distance.unwrap_or(DistanceKind::Euclidean),
            robustness: self.rpb.robustness.unwrap_or(RobustnessKind::Stability),
            history_window: self
                .rpb
                .history_window
                .unwrap_or(RewardHistory::DEFAULT_WINDOW),
        }
    }

    pub fn tlo_params(&self) -> Result<TloParams> {
        match &self.tlo_thresholds {
            Some(t) => TloParams::new(t.clone()),
            None => Ok(TloParams::for_env(self.env)),
        }
    }

    fn base_layout(&self) -> Layout {
        self.layout
            .clone()
            .unwrap_or_else(|| Layout::shipped(self.env))
    }

    /// The run's frozen starting point: the base layout re-dealt by the
    /// run's layout seed (full relocation), with the run's environment
    /// stream seed installed.
    pub fn initial_env_config(&self, run: usize) -> Result<EnvConfig> {
        let run_seed = seed::mix(self.master_seed, run as u64);
        let base = EnvConfig::new(self.base_layout(), seed::mix(run_seed, ENV_SALT))?;
        perturb(&base, 1.0, seed::mix(run_seed, LAYOUT_SALT))
    }

    /// Seed for one episode's environment randomness. Part of the replay
    /// contract: the stream depends only on `(master_seed, run, episode)`,
    /// never on the algorithm, so different agents face identical worlds.
    pub fn episode_seed(&self, run: usize, global_episode: usize) -> u64 {
        let run_seed = seed::mix(self.master_seed, run as u64);
        seed::mix(run_seed, EPISODE_SALT + global_episode as u64)
    }

    /// The action-selection RNG a run starts with. Part of the replay
    /// contract: external code can reproduce a run's exploration stream
    /// exactly.
    pub fn algorithm_rng(&self, run: usize) -> rand_chacha::ChaCha8Rng {
        let run_seed = seed::mix(self.master_seed, run as u64);
        seed::rng(run_seed, ALGO_SALT)
    }
}

/// One logged training episode.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub run: usize,
    pub preference_index: usize,
    /// Episode index within the preference segment.
    pub episode: usize,
    pub scalarized_return: f64,
    pub reward_components: RewardVector,
    /// Steppingstone-store size after the episode (0 for non-RPB runs).
    pub ccs_size: usize,
}

/// Layout-change audit trail for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunAudit {
    pub run: usize,
    pub initial_placement_hash: u64,
    /// `(global episode index, placement hash after the change)` for every
    /// perturbation applied before that episode ran.
    pub perturb_events: Vec<(usize, u64)>,
}

/// Records plus audits for a full experiment. For RPB runs,
/// `final_stores[run]` holds the steppingstone store as it stood at the end
/// of the run (empty for other algorithms).
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub records: Vec<ExperimentRecord>,
    pub audits: Vec<RunAudit>,
    pub final_stores: Vec<Vec<SteppingstoneEntry>>,
}

/// Execute the configured experiment. `frozen` supplies one offline-trained
/// coverage set per run — required by OLS/TLO execution and by RPB's regret
/// robustness metric, ignored otherwise.
pub fn run_experiment(
    config: &ExperimentConfig,
    frozen: Option<&[CoverageSet]>,
) -> Result<ExperimentOutput> {
    config.validate()?;
    if config.algorithm.needs_frozen_set() && frozen.is_none() {
        return Err(MorlError::Config(format!(
            "{} execution requires a frozen coverage set (train offline first)",
            config.algorithm.name()
        )));
    }
    let rpb_params = config.rpb_params();
    if config.algorithm == Algorithm::Rpb
        && rpb_params.robustness == RobustnessKind::Regret
        && frozen.is_none()
    {
        return Err(MorlError::Config(
            "the regret robustness metric requires a frozen coverage set as its reference".into(),
        ));
    }
    if let Some(sets) = frozen {
        if sets.len() != config.runs {
            return Err(MorlError::Config(format!(
                "frozen coverage sets cover {} runs but the config wants {}",
                sets.len(),
                config.runs
            )));
        }
    }

    let mut per_run: Vec<(Vec<ExperimentRecord>, RunAudit, Vec<SteppingstoneEntry>)> = (0
        ..config.runs)
        .into_par_iter()
        .map(|run| run_one(config, run, frozen.map(|sets| &sets[run])))
        .collect::<Result<_>>()?;

    // Already ordered by run index from the indexed collect; flatten.
    let mut records = Vec::with_capacity(config.runs * config.schedule.total_episodes());
    let mut audits = Vec::with_capacity(config.runs);
    let mut final_stores = Vec::with_capacity(config.runs);
    for (run_records, audit, store) in per_run.drain(..) {
        records.extend(run_records);
        audits.push(audit);
        final_stores.push(store);
    }
    Ok(ExperimentOutput {
        records,
        audits,
        final_stores,
    })
}

/// Per-segment driver state for the four algorithms.
enum Driver {
    Rpb(Box<RpbAgent>),
    Sql(Option<TabularPolicy>),
    Frozen(Option<TabularPolicy>),
}

fn run_one(
    config: &ExperimentConfig,
    run: usize,
    frozen: Option<&CoverageSet>,
) -> Result<(Vec<ExperimentRecord>, RunAudit, Vec<SteppingstoneEntry>)> {
    let run_seed = seed::mix(config.master_seed, run as u64);
    let mut env_config = config.initial_env_config(run)?;
    let mut env = Env::new(env_config.clone())?;
    let mut algo_rng = config.algorithm_rng(run);
    let per_episode = LearnerParams {
        episodes: 1,
        ..config.learner
    };

    let mut driver = match config.algorithm {
        Algorithm::Rpb => {
            let mut agent = RpbAgent::new(
                env.num_states(),
                env.num_actions(),
                config.schedule.preferences[0].clone(),
                config.rpb_params(),
            )?;
            if let Some(set) = frozen {
                agent.set_regret_reference(set.reference_table());
            }
            Driver::Rpb(Box::new(agent))
        }
        Algorithm::Sql => Driver::Sql(None),
        Algorithm::Ols | Algorithm::Tlo => Driver::Frozen(None),
    };

    let mut audit = RunAudit {
        run,
        initial_placement_hash: env_config.layout.placement_hash(),
        perturb_events: Vec::new(),
    };

    let episodes_per_pref = config.schedule.episodes_per_preference;
    let mut records = Vec::with_capacity(config.schedule.total_episodes());
    for global in 0..config.schedule.total_episodes() {
        // Layout perturbation precedes the episode at each period boundary.
        if config.mode == Mode::NonStationary && global > 0 && global % config.perturb_period == 0
        {
            env_config = perturb(
                &env_config,
                config.perturb_fraction,
                seed::mix(run_seed, PERTURB_SALT + global as u64),
            )?;
            env = Env::new(env_config.clone())?;
            audit
                .perturb_events
                .push((global, env_config.layout.placement_hash()));
        }

        let pref_index = global / episodes_per_pref;
        let episode = global % episodes_per_pref;
        let pref = &config.schedule.preferences[pref_index];

        // Segment boundary: each algorithm's preference-change response.
        if episode == 0 {
            match &mut driver {
                Driver::Rpb(agent) => {
                    if pref_index > 0 {
                        agent.on_preference_change(pref.clone())?;
                    }
                }
                Driver::Sql(policy) => {
                    *policy = Some(TabularPolicy::zeros(env.num_states(), env.num_actions())?);
                }
                Driver::Frozen(policy) => {
                    let set = frozen.expect("validated above");
                    let entry = set.respond(pref)?;
                    *policy = Some(entry.policy.clone());
                }
            }
        }

        let episode_seed = config.episode_seed(run, global);
        let (outcome, ccs_size) = match &mut driver {
            Driver::Rpb(agent) => {
                let out = agent.run_episode(&mut env, &per_episode, &mut algo_rng, episode_seed)?;
                let size = agent.store().len();
                (out, size)
            }
            Driver::Sql(policy) | Driver::Frozen(policy) => {
                let policy = policy.as_mut().expect("installed at segment start");
                let out = run_episode(
                    &mut env,
                    policy,
                    pref,
                    &per_episode,
                    &mut algo_rng,
                    episode_seed,
                )?;
                (out, 0)
            }
        };

        records.push(ExperimentRecord {
            run,
            preference_index: pref_index,
            episode,
            scalarized_return: outcome.scalarized,
            reward_components: outcome.components,
            ccs_size,
        });
    }

    let final_store = match &driver {
        Driver::Rpb(agent) => agent.store().entries().to_vec(),
        _ => Vec::new(),
    };
    Ok((records, audit, final_store))
}

/// Offline-train one frozen coverage set per run on that run's initial
/// layout (OLS or TLO; other algorithms have nothing to train).
pub fn train_offline(config: &ExperimentConfig, algorithm: Algorithm) -> Result<Vec<CoverageSet>> {
    config.validate()?;
    let sets: Vec<CoverageSet> = (0..config.runs)
        .into_par_iter()
        .map(|run| -> Result<CoverageSet> {
            let run_seed = seed::mix(config.master_seed, run as u64);
            let env_config = config.initial_env_config(run)?;
            let mut rng = seed::rng(run_seed, OFFLINE_SALT);
            match algorithm {
                Algorithm::Ols => ols_train(&env_config, &config.ols, &config.learner, &mut rng),
                Algorithm::Tlo => tlo_train(
                    &env_config,
                    &config.tlo_params()?,
                    &config.schedule.preferences,
                    &config.learner,
                    config.tlo_training_episodes,
                    &mut rng,
                ),
                other => Err(MorlError::Config(format!(
                    "{} has no offline training phase",
                    other.name()
                ))),
            }
        })
        .collect::<Result<_>>()?;
    Ok(sets)
}

/// Convenience wrapper for the random-reinitialization baseline outside the
/// harness protocol: one fresh policy per preference.
pub fn sql_across_schedule(
    config: &EnvConfig,
    schedule: &PreferenceSchedule,
    learner: &LearnerParams,
    rng_seed: u64,
) -> Result<Vec<TabularPolicy>> {
    let mut rng = seed::rng(rng_seed, ALGO_SALT);
    let params = LearnerParams {
        episodes: schedule.episodes_per_preference,
        ..*learner
    };
    schedule
        .preferences
        .iter()
        .map(|w| Ok(sql_random_baseline(config, w, &params, &mut rng)?.0))
        .collect()
}

/// Converged-return and loss summary for one (run, preference) segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub run: usize,
    pub preference_index: usize,
    /// Mean scalarized return over the final [`METRIC_WINDOW`] episodes of
    /// the segment (the whole segment when shorter).
    pub gamma_c: f64,
    /// Γ_c of this segment minus the mean return over the first
    /// [`METRIC_WINDOW`] episodes of the *next* segment; absent for the last
    /// preference.
    pub loss: Option<f64>,
    /// Set when any window had to fall back to a short segment.
    pub flagged: bool,
}

/// Per-(run, preference) Γ_c and transition loss from raw records.
pub fn compute_metrics(
    records: &[ExperimentRecord],
    schedule: &PreferenceSchedule,
) -> Result<Vec<MetricSummary>> {
    schedule.validate()?;
    let prefs = schedule.preferences.len();
    let per_seg = schedule.episodes_per_preference;

    // Bucket scalarized returns by (run, preference, episode); order-proof.
    let mut runs: Vec<usize> = records.iter().map(|r| r.run).collect();
    runs.sort_unstable();
    runs.dedup();
    let mut summaries = Vec::with_capacity(runs.len() * prefs);
    for &run in &runs {
        let mut segments: Vec<Vec<(usize, f64)>> = vec![Vec::new(); prefs];
        for r in records.iter().filter(|r| r.run == run) {
            if r.preference_index >= prefs || r.episode >= per_seg {
                return Err(MorlError::Contract(format!(
                    "record at run {run} outside the schedule: preference {} episode {}",
                    r.preference_index, r.episode
                )));
            }
            segments[r.preference_index].push((r.episode, r.scalarized_return));
        }
        for (k, seg) in segments.iter_mut().enumerate() {
            seg.sort_unstable_by_key(|(e, _)| *e);
            if seg.len() != per_seg {
                return Err(MorlError::Contract(format!(
                    "run {run} preference {k} has {} episodes, schedule says {per_seg}",
                    seg.len()
                )));
            }
            if seg.iter().enumerate().any(|(i, (e, _))| i != *e) {
                return Err(MorlError::Contract(format!(
                    "run {run} preference {k} has duplicate or missing episodes"
                )));
            }
        }

        for k in 0..prefs {
            let seg: Vec<f64> = segments[k].iter().map(|(_, v)| *v).collect();
            let tail = &seg[seg.len().saturating_sub(METRIC_WINDOW)..];
            let gamma_c = stats::mean(tail)?;
            let mut flagged = seg.len() < METRIC_WINDOW;
            let loss = if k + 1 < prefs {
                let next: Vec<f64> = segments[k + 1].iter().map(|(_, v)| *v).collect();
                let head = &next[..next.len().min(METRIC_WINDOW)];
                flagged |= next.len() < METRIC_WINDOW;
                Some(gamma_c - stats::mean(head)?)
            } else {
                None
            };
            summaries.push(MetricSummary {
                run,
                preference_index: k,
                gamma_c,
                loss,
                flagged,
            });
        }
    }
    Ok(summaries)
}

/// Mean Γ_c per run (averaged over preferences) — the headline sample for
/// across-algorithm significance tests.
pub fn per_run_gamma_c(metrics: &[MetricSummary], runs: usize) -> Result<Vec<f64>> {
    per_run_mean(metrics, runs, |m| Some(m.gamma_c))
}

/// Mean transition loss per run.
pub fn per_run_loss(metrics: &[MetricSummary], runs: usize) -> Result<Vec<f64>> {
    per_run_mean(metrics, runs, |m| m.loss)
}

fn per_run_mean(
    metrics: &[MetricSummary],
    runs: usize,
    value: impl Fn(&MetricSummary) -> Option<f64>,
) -> Result<Vec<f64>> {
    (0..runs)
        .map(|run| {
            let vals: Vec<f64> = metrics
                .iter()
                .filter(|m| m.run == run)
                .filter_map(&value)
                .collect();
            stats::mean(&vals)
        })
        .collect()
}

/// Loss distributions per phi value, sorted ascending by phi.
pub struct PhiSweepResult {
    /// `(phi, every per-(run, transition) loss sample)`.
    pub distributions: Vec<(f64, Vec<f64>)>,
}

/// Run the experiment once per phi value and collect loss distributions
/// (boxplot data). RPB only.
pub fn sweep_phi(base: &ExperimentConfig, phi_values: &[f64]) -> Result<PhiSweepResult> {
    if base.algorithm != Algorithm::Rpb {
        return Err(MorlError::Config(
            "the phi sweep is defined for the RPB algorithm".into(),
        ));
    }
    if phi_values.is_empty() {
        return Err(MorlError::Config("phi sweep needs phi values".into()));
    }
    let mut sorted_phi = phi_values.to_vec();
    sorted_phi.sort_by(|a, b| a.partial_cmp(b).expect("finite phi"));
    let mut distributions = Vec::with_capacity(sorted_phi.len());
    for phi in sorted_phi {
        let mut config = base.clone();
        config.rpb.phi = Some(phi);
        let output = run_experiment(&config, None)?;
        let metrics = compute_metrics(&output.records, &config.schedule)?;
        let losses: Vec<f64> = metrics.iter().filter_map(|m| m.loss).collect();
        distributions.push((phi, losses));
    }
    Ok(PhiSweepResult { distributions })
}

/// The shipped sweep grid: 0.05, 0.10, …, 0.50.
pub fn default_phi_grid() -> Vec<f64> {
    (1..=10).map(|i| i as f64 * 0.05).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantAxis {
    RobustnessMetric,
    DistanceFunction,
}

/// One variant's aggregate: mean and sample std over runs of the per-run
/// sum of per-preference median returns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSummary {
    pub name: String,
    pub mean: f64,
    pub std: f64,
    pub per_run_sums: Vec<f64>,
}

/// Compare RPB under different robustness metrics or distance functions.
/// `frozen` supplies the regret reference when the axis includes Regret.
pub fn compare_variants(
    base: &ExperimentConfig,
    axis: VariantAxis,
    frozen: Option<&[CoverageSet]>,
) -> Result<Vec<VariantSummary>> {
    if base.algorithm != Algorithm::Rpb {
        return Err(MorlError::Config(
            "variant comparison is defined for the RPB algorithm".into(),
        ));
    }
    let variants: Vec<(String, ExperimentConfig)> = match axis {
        VariantAxis::RobustnessMetric => RobustnessKind::ALL
            .iter()
            .map(|kind| {
                let mut config = base.clone();
                config.rpb.robustness = Some(*kind);
                (kind.name().to_string(), config)
            })
            .collect(),
        VariantAxis::DistanceFunction => DistanceKind::ALL
            .iter()
            .map(|kind| {
                let mut config = base.clone();
                config.rpb.distance = Some(*kind);
                (kind.name().to_string(), config)
            })
            .collect(),
    };

    let mut summaries = Vec::with_capacity(variants.len());
    for (name, config) in variants {
        let needs_reference =
            config.rpb_params().robustness == RobustnessKind::Regret && frozen.is_none();
        if needs_reference {
            return Err(MorlError::Config(
                "the regret variant requires a frozen coverage set as its reference".into(),
            ));
        }
        let output = run_experiment(&config, frozen)?;
        let per_run_sums = sum_of_segment_medians(&output.records, &config.schedule, config.runs)?;
        summaries.push(VariantSummary {
            name,
            mean: stats::mean(&per_run_sums)?,
            std: if per_run_sums.len() >= 2 {
                stats::sample_std(&per_run_sums)?
            } else {
                0.0
            },
            per_run_sums,
        });
    }
    Ok(summaries)
}

/// Per run: the median scalarized return of each preference segment, summed
/// across segments.
pub fn sum_of_segment_medians(
    records: &[ExperimentRecord],
    schedule: &PreferenceSchedule,
    runs: usize,
) -> Result<Vec<f64>> {
    let prefs = schedule.preferences.len();
    (0..runs)
        .map(|run| {
            let mut total = 0.0;
            for k in 0..prefs {
                let seg: Vec<f64> = records
                    .iter()
                    .filter(|r| r.run == run && r.preference_index == k)
                    .map(|r| r.scalarized_return)
                    .collect();
                total += stats::median(&seg)?;
            }
            Ok(total)
        })
        .collect()
}
