//! Comparison algorithms: optimistic linear support (OLS), threshold
//! lexicographic ordering (TLO), and the random-reinitialization scalarized
//! Q-learning baseline.
//!
//! OLS and TLO are offline multiple-policy methods: they train ahead of
//! time and answer preference queries from a frozen [`CoverageSet`]. The
//! random-reinit baseline answers every preference with a fresh zero table.

use std::collections::VecDeque;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::{Action, Env, EnvConfig, EnvKind, MultiObjectiveEnv};
use crate::error::{MorlError, Result};
use crate::learner::{run_episode, run_episodes, EpisodeReturn, LearnerParams, TabularPolicy};
use crate::preference::Preference;
use crate::reward::{dominates, scalarize, RewardVector};

/// Offline training stops once the largest Q change in an episode stays
/// below this for [`CONVERGENCE_PATIENCE`] consecutive episodes.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-3;
pub const CONVERGENCE_PATIENCE: usize = 20;
/// Episodes averaged into a coverage entry's value vector.
pub const VALUE_WINDOW: usize = 50;

/// Optimistic-linear-support knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OlsParams {
    /// A median-preference candidate joins the set only when it beats the
    /// best existing entry at that preference by more than this.
    pub improvement_threshold: f64,
    /// Hard cap on the coverage set size.
    pub max_policies: usize,
    /// Episode cap per trained preference (convergence may stop earlier).
    pub training_episodes_per_preference: usize,
}

impl Default for OlsParams {
    fn default() -> Self {
        OlsParams {
            improvement_threshold: 0.01,
            max_policies: 10,
            training_episodes_per_preference: 400,
        }
    }
}

impl OlsParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.improvement_threshold > 0.0) {
            return Err(MorlError::Config(format!(
                "improvement threshold must be positive, got {}",
                self.improvement_threshold
            )));
        }
        if self.max_policies == 0 {
            return Err(MorlError::Config("max_policies must be positive".into()));
        }
        if self.training_episodes_per_preference == 0 {
            return Err(MorlError::Config(
                "training_episodes_per_preference must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Per-objective reward thresholds for TLO's gated action selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TloParams {
    pub objective_thresholds: Vec<f64>,
}

impl TloParams {
    pub fn new(objective_thresholds: Vec<f64>) -> Result<Self> {
        if objective_thresholds.len() < 2 {
            return Err(MorlError::Config(
                "TLO needs at least two objective thresholds".into(),
            ));
        }
        if objective_thresholds.iter().any(|t| !t.is_finite()) {
            return Err(MorlError::Config(
                "TLO thresholds must be finite".into(),
            ));
        }
        Ok(TloParams {
            objective_thresholds,
        })
    }

    /// Shipped defaults. The gate reads the first declared objective, so the
    /// headline threshold sits in slot 0 for every environment.
    pub fn for_env(kind: EnvKind) -> TloParams {
        let objective_thresholds = match kind {
            EnvKind::Sar => vec![-10.0, 0.0],
            EnvKind::Dst => vec![-20.0, 0.0],
            EnvKind::Rg => vec![-0.5, 0.0],
        };
        TloParams {
            objective_thresholds,
        }
    }
}

/// One frozen response policy: the preference it answers for, its Q table,
/// and the mean per-objective return it achieved.
#[derive(Debug, Clone)]
pub struct CoverageEntry {
    pub preference: Preference,
    pub policy: TabularPolicy,
    pub value_vector: RewardVector,
}

/// An ordered set of response policies built offline.
#[derive(Debug, Clone, Default)]
pub struct CoverageSet {
    entries: Vec<CoverageEntry>,
}

impl CoverageSet {
    pub fn from_entries(entries: Vec<CoverageEntry>) -> Result<Self> {
        for entry in &entries {
            if entry.value_vector.components().iter().any(|v| !v.is_finite()) {
                return Err(MorlError::Contract(
                    "coverage entry value vector must be finite".into(),
                ));
            }
        }
        Ok(CoverageSet { entries })
    }

    pub fn entries(&self) -> &[CoverageEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The entry maximizing `w · value_vector`, ties to the earliest stored.
    pub fn respond(&self, pref: &Preference) -> Result<&CoverageEntry> {
        let mut best: Option<(usize, f64)> = None;
        for (i, entry) in self.entries.iter().enumerate() {
            let value = scalarize(&entry.value_vector, pref)?;
            if best.map_or(true, |(_, bv)| value > bv) {
                best = Some((i, value));
            }
        }
        best.map(|(i, _)| &self.entries[i])
            .ok_or(MorlError::EmptyCoverageSet)
    }

    /// The best scalarized value any entry offers under `pref`.
    pub fn best_scalarized_value(&self, pref: &Preference) -> Result<f64> {
        let entry = self.respond(pref)?;
        scalarize(&entry.value_vector, pref)
    }

    /// Drop every entry whose value vector is dominated by another entry's.
    pub fn prune_dominated(&mut self) -> Result<()> {
        let mut keep = vec![true; self.entries.len()];
        for i in 0..self.entries.len() {
            for j in 0..self.entries.len() {
                if i != j
                    && dominates(
                        &self.entries[j].value_vector,
                        &self.entries[i].value_vector,
                    )?
                {
                    keep[i] = false;
                    break;
                }
            }
        }
        let mut it = keep.iter();
        self.entries.retain(|_| *it.next().expect("keep mask matches entries"));
        Ok(())
    }

    /// `(preference, value vector)` rows for use as a regret oracle table.
    pub fn reference_table(&self) -> Vec<(Preference, Vec<f64>)> {
        self.entries
            .iter()
            .map(|e| (e.preference.clone(), e.value_vector.components().to_vec()))
            .collect()
    }
}

/// Train until the per-episode max Q change stays under
/// [`CONVERGENCE_TOLERANCE`] for [`CONVERGENCE_PATIENCE`] consecutive
/// episodes, or `episode_cap` episodes elapse.
fn train_until_convergence<E: MultiObjectiveEnv>(
    env: &mut E,
    policy: &mut TabularPolicy,
    pref: &Preference,
    learner: &LearnerParams,
    episode_cap: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<EpisodeReturn>> {
    let per_episode = LearnerParams {
        episodes: 1,
        ..*learner
    };
    per_episode.validate()?;
    let mut returns = Vec::new();
    let mut settled = 0usize;
    for _ in 0..episode_cap {
        let episode_seed: u64 = rng.random();
        let outcome = run_episode(env, policy, pref, &per_episode, rng, episode_seed)?;
        let delta = outcome.max_q_delta;
        returns.push(outcome);
        if delta < CONVERGENCE_TOLERANCE {
            settled += 1;
            if settled >= CONVERGENCE_PATIENCE {
                break;
            }
        } else {
            settled = 0;
        }
    }
    Ok(returns)
}

/// Mean per-objective return over the final [`VALUE_WINDOW`] episodes (or
/// the whole list when shorter).
fn mean_value_vector(returns: &[EpisodeReturn], num_objectives: usize) -> Result<RewardVector> {
    if returns.is_empty() {
        return Err(MorlError::InsufficientSamples { need: 1, have: 0 });
    }
    let tail = &returns[returns.len().saturating_sub(VALUE_WINDOW)..];
    let mut sums = vec![0.0; num_objectives];
    for r in tail {
        for (s, c) in sums.iter_mut().zip(r.components.components()) {
            *s += c;
        }
    }
    let n = tail.len() as f64;
    RewardVector::new(sums.into_iter().map(|s| s / n).collect())
}

/// Build a coverage set by optimistic linear support over the preference
/// line for two objectives.
///
/// Edge preferences [0.9, 0.1] and [0.1, 0.9] are always trained first;
/// median preferences of adjacent explored pairs are then tried
/// breadth-first, each at most once, joining only when they improve on the
/// incumbents at their own preference by more than the improvement
/// threshold. A final pass drops dominated entries.
pub fn ols_train(
    config: &EnvConfig,
    params: &OlsParams,
    learner: &LearnerParams,
    rng: &mut ChaCha8Rng,
) -> Result<CoverageSet> {
    params.validate()?;
    if params.max_policies < 2 {
        return Err(MorlError::PartialCoverageSet(format!(
            "max_policies = {} cannot hold both edge preferences",
            params.max_policies
        )));
    }
    let mut env = Env::new(config.clone())?;
    if env.num_objectives() != 2 {
        return Err(MorlError::Contract(
            "optimistic linear support is implemented for two objectives".into(),
        ));
    }

    let mut train_at = |first: f64, rng: &mut ChaCha8Rng| -> Result<CoverageEntry> {
        let preference = Preference::pair(first)?;
        let mut policy = TabularPolicy::zeros(env.num_states(), env.num_actions())?;
        let returns = train_until_convergence(
            &mut env,
            &mut policy,
            &preference,
            learner,
            params.training_episodes_per_preference,
            rng,
        )?;
        let value_vector = mean_value_vector(&returns, 2)?;
        Ok(CoverageEntry {
            preference,
            policy,
            value_vector,
        })
    };

    let mut entries: Vec<CoverageEntry> = Vec::new();
    let mut explored: Vec<f64> = Vec::new();
    for first in [0.9, 0.1] {
        entries.push(train_at(first, rng)?);
        explored.push(first);
    }

    let mut worklist: VecDeque<(f64, f64)> = VecDeque::from([(0.9, 0.1)]);
    while let Some((left, right)) = worklist.pop_front() {
        if entries.len() >= params.max_policies {
            break;
        }
        let median = (left + right) / 2.0;
        if explored.iter().any(|e| (e - median).abs() < 1e-12) {
            continue;
        }
        explored.push(median);
        let candidate = train_at(median, rng)?;
        let at_median = scalarize(&candidate.value_vector, &candidate.preference)?;
        let mut incumbent = f64::NEG_INFINITY;
        for entry in &entries {
            incumbent = incumbent.max(scalarize(&entry.value_vector, &candidate.preference)?);
        }
        if at_median > incumbent + params.improvement_threshold {
            entries.push(candidate);
            worklist.push_back((left, median));
            worklist.push_back((median, right));
        }
    }

    let mut set = CoverageSet::from_entries(entries)?;
    set.prune_dominated()?;
    Ok(set)
}

/// The coverage-set policy whose value vector scores highest under `pref`.
pub fn ols_respond<'a>(set: &'a CoverageSet, pref: &Preference) -> Result<&'a CoverageEntry> {
    set.respond(pref)
}

/// Thresholded lexicographic action selection for two objectives.
///
/// Among actions whose first-objective Q exceeds `thresholds[0]`, pick the
/// one with the highest last-objective Q; if nothing passes the gate, pick
/// the action with the highest first-objective Q. Ties go to the lowest
/// action index.
pub fn tlo_select_action(q_per_objective: &[&[f64]], thresholds: &TloParams) -> Result<usize> {
    if q_per_objective.len() != thresholds.objective_thresholds.len() {
        return Err(MorlError::DimensionMismatch {
            left: q_per_objective.len(),
            right: thresholds.objective_thresholds.len(),
        });
    }
    let num_actions = q_per_objective
        .first()
        .map(|row| row.len())
        .ok_or_else(|| MorlError::Contract("TLO selection needs at least one Q row".into()))?;
    if num_actions == 0 {
        return Err(MorlError::Contract("TLO selection needs actions".into()));
    }
    if q_per_objective.iter().any(|row| row.len() != num_actions) {
        return Err(MorlError::Contract(
            "per-objective Q rows must have equal action counts".into(),
        ));
    }

    let gate = thresholds.objective_thresholds[0];
    let first = q_per_objective[0];
    let last = q_per_objective[q_per_objective.len() - 1];
    let mut best: Option<(usize, f64)> = None;
    for (a, (&q0, &qn)) in first.iter().zip(last.iter()).enumerate() {
        if q0 > gate && best.map_or(true, |(_, bv)| qn > bv) {
            best = Some((a, qn));
        }
    }
    if let Some((a, _)) = best {
        return Ok(a);
    }
    let mut fallback = 0usize;
    for (a, &q0) in first.iter().enumerate() {
        if q0 > first[fallback] {
            fallback = a;
        }
    }
    Ok(fallback)
}

/// Train TLO's per-objective Q tables on one shared trajectory stream, then
/// package one coverage entry per requested preference.
///
/// Each entry's table is the preference-weighted combination of the
/// per-objective tables, and its value vector is the mean return of
/// [`VALUE_WINDOW`] greedy evaluation episodes of that table.
pub fn tlo_train(
    config: &EnvConfig,
    thresholds: &TloParams,
    preferences: &[Preference],
    learner: &LearnerParams,
    episode_cap: usize,
    rng: &mut ChaCha8Rng,
) -> Result<CoverageSet> {
    if preferences.is_empty() {
        return Err(MorlError::Config(
            "TLO training needs at least one preference".into(),
        ));
    }
    if episode_cap == 0 {
        return Err(MorlError::Config("TLO episode cap must be positive".into()));
    }
    let mut env = Env::new(config.clone())?;
    let m = env.num_objectives();
    if thresholds.objective_thresholds.len() != m {
        return Err(MorlError::DimensionMismatch {
            left: thresholds.objective_thresholds.len(),
            right: m,
        });
    }
    LearnerParams {
        episodes: 1,
        ..*learner
    }
    .validate()?;

    let num_states = env.num_states();
    let num_actions = env.num_actions();
    let mut tables: Vec<TabularPolicy> = (0..m)
        .map(|_| TabularPolicy::zeros(num_states, num_actions))
        .collect::<Result<_>>()?;

    let mut settled = 0usize;
    for _ in 0..episode_cap {
        let episode_seed: u64 = rng.random();
        let mut state = env.reset(episode_seed);
        let mut max_delta = 0.0f64;
        loop {
            let action = if rng.random::<f64>() < learner.epsilon {
                rng.random_range(0..num_actions)
            } else {
                let rows: Vec<&[f64]> = tables.iter().map(|t| t.row(state)).collect();
                tlo_select_action(&rows, thresholds)?
            };
            let outcome = env.step(Action::from_index(action)?)?;
            for (table, &r) in tables.iter_mut().zip(outcome.reward.components()) {
                let delta = table.update(
                    state,
                    action,
                    r,
                    outcome.state_id,
                    outcome.done,
                    learner.alpha,
                    learner.gamma,
                )?;
                max_delta = max_delta.max(delta);
            }
            state = outcome.state_id;
            if outcome.done {
                break;
            }
        }
        if max_delta < CONVERGENCE_TOLERANCE {
            settled += 1;
            if settled >= CONVERGENCE_PATIENCE {
                break;
            }
        } else {
            settled = 0;
        }
    }

    let mut entries = Vec::with_capacity(preferences.len());
    for pref in preferences {
        if pref.dim() != m {
            return Err(MorlError::DimensionMismatch {
                left: pref.dim(),
                right: m,
            });
        }
        let mut combined = vec![0.0; num_states * num_actions];
        for (w, table) in pref.weights().iter().zip(&tables) {
            for (c, q) in combined.iter_mut().zip(table.values()) {
                *c += w * q;
            }
        }
        let policy = TabularPolicy::from_values(num_states, num_actions, combined)?;

        let mut sums = vec![0.0; m];
        for _ in 0..VALUE_WINDOW {
            let episode_seed: u64 = rng.random();
            let mut state = env.reset(episode_seed);
            loop {
                let action = policy.greedy_action(state);
                let outcome = env.step(Action::from_index(action)?)?;
                for (s, &r) in sums.iter_mut().zip(outcome.reward.components()) {
                    *s += r;
                }
                state = outcome.state_id;
                if outcome.done {
                    break;
                }
            }
        }
        let value_vector =
            RewardVector::new(sums.into_iter().map(|s| s / VALUE_WINDOW as f64).collect())?;
        entries.push(CoverageEntry {
            preference: pref.clone(),
            policy,
            value_vector,
        });
    }

    CoverageSet::from_entries(entries)
}

/// The random-reinitialization baseline: answer `pref` with a fresh zero
/// table trained for the learner's episode budget. Nothing carries over
/// between calls.
pub fn sql_random_baseline(
    config: &EnvConfig,
    pref: &Preference,
    learner: &LearnerParams,
    rng: &mut ChaCha8Rng,
) -> Result<(TabularPolicy, Vec<EpisodeReturn>)> {
    let mut env = Env::new(config.clone())?;
    let mut policy = TabularPolicy::zeros(env.num_states(), env.num_actions())?;
    let returns = run_episodes(&mut env, &mut policy, pref, learner, rng)?;
    Ok((policy, returns))
}
