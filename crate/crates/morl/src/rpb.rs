//! Robust policy bootstrapping over a store of steppingstone policies.
//!
//! The agent tracks the active preference and trains one scalarized
//! Q-learning policy at a time. When the preference moves farther than a
//! significance threshold `phi`, the agent:
//!
//! 1. summarizes the outgoing policy's recent returns into a robustness
//!    score,
//! 2. offers that policy to the store — appended if no stored entry lies
//!    within `phi` of the outgoing preference, otherwise replacing the
//!    nearest such entry only when strictly more robust,
//! 3. reseeds learning from the stored entry nearest the incoming
//!    preference (a fresh zero table if the store is empty), and
//! 4. clears the return history for the new regime.
//!
//! Changes within `phi` leave the policy, store, and history untouched —
//! only the active preference label moves. With `phi` above the preference
//! space's diameter the agent therefore degenerates to plain continuous
//! Q-learning, which is exercised as an equivalence test.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::MultiObjectiveEnv;
use crate::error::{MorlError, Result};
use crate::learner::{run_episode, EpisodeReturn, LearnerParams, TabularPolicy};
use crate::preference::{preference_distance, DistanceKind, Preference};
use crate::reward::scalarize_components;
use crate::robustness::{robustness, RewardHistory, RobustnessKind};

/// Bootstrapping knobs: significance threshold, distance function,
/// robustness metric, and the return-history window feeding it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RpbParams {
    pub phi: f64,
    pub distance: DistanceKind,
    pub robustness: RobustnessKind,
    pub history_window: usize,
}

impl Default for RpbParams {
    fn default() -> Self {
        RpbParams {
            phi: 0.15,
            distance: DistanceKind::Euclidean,
            robustness: RobustnessKind::Stability,
            history_window: RewardHistory::DEFAULT_WINDOW,
        }
    }
}

impl RpbParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.phi > 0.0 && self.phi.is_finite()) {
            return Err(MorlError::Config(format!(
                "significance threshold must be positive and finite, got {}",
                self.phi
            )));
        }
        if self.history_window < 2 {
            return Err(MorlError::Config(format!(
                "history window must be at least 2, got {}",
                self.history_window
            )));
        }
        Ok(())
    }
}

/// A stored steppingstone: a policy, the preference it was trained under,
/// and how robust its recent returns were.
#[derive(Debug, Clone)]
pub struct SteppingstoneEntry {
    pub preference: Preference,
    pub policy: TabularPolicy,
    pub robustness: f64,
}

/// What became of a candidate offered to the store.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StorageOutcome {
    /// No stored preference lay within `phi`; the candidate joined the store.
    Appended { index: usize },
    /// A within-`phi` entry existed and the candidate was strictly more
    /// robust, so it took that slot over.
    Replaced { index: usize },
    /// A within-`phi` entry existed and was at least as robust; the
    /// candidate was dropped.
    KeptExisting { index: usize },
}

/// The steppingstone policy store (a convex-coverage-set approximation
/// keyed by preference).
#[derive(Debug, Clone)]
pub struct CcsStore {
    phi: f64,
    distance: DistanceKind,
    entries: Vec<SteppingstoneEntry>,
}

impl CcsStore {
    pub fn new(phi: f64, distance: DistanceKind) -> Result<Self> {
        if !(phi > 0.0 && phi.is_finite()) {
            return Err(MorlError::Config(format!(
                "significance threshold must be positive and finite, got {phi}"
            )));
        }
        Ok(CcsStore {
            phi,
            distance,
            entries: Vec::new(),
        })
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn distance(&self) -> DistanceKind {
        self.distance
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[SteppingstoneEntry] {
        &self.entries
    }

    /// Index of the entry responsible for `pref`'s region: the nearest entry
    /// within `phi`, ties going to the earliest stored. `None` when no entry
    /// is that close.
    pub fn find_steppingstone_for(&self, pref: &Preference) -> Result<Option<usize>> {
        let mut best: Option<(usize, f64)> = None;
        for (i, entry) in self.entries.iter().enumerate() {
            let d = preference_distance(pref, &entry.preference, self.distance)?;
            if d <= self.phi && best.map_or(true, |(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        Ok(best.map(|(i, _)| i))
    }

    /// Offer a candidate to the store; see [`StorageOutcome`] for the three
    /// possible fates. Only a strictly greater robustness displaces an
    /// existing entry, so a slot's robustness never decreases.
    pub fn store_or_replace(&mut self, candidate: SteppingstoneEntry) -> Result<StorageOutcome> {
        match self.find_steppingstone_for(&candidate.preference)? {
            None => {
                self.entries.push(candidate);
                Ok(StorageOutcome::Appended {
                    index: self.entries.len() - 1,
                })
            }
            Some(index) => {
                if candidate.robustness > self.entries[index].robustness {
                    self.entries[index] = candidate;
                    Ok(StorageOutcome::Replaced { index })
                } else {
                    Ok(StorageOutcome::KeptExisting { index })
                }
            }
        }
    }

    /// The entry nearest `pref` with no radius restriction, ties to the
    /// earliest stored. Empty stores yield [`MorlError::NoSteppingstone`].
    pub fn retrieve_nearest(&self, pref: &Preference) -> Result<&SteppingstoneEntry> {
        let mut best: Option<(usize, f64)> = None;
        for (i, entry) in self.entries.iter().enumerate() {
            let d = preference_distance(pref, &entry.preference, self.distance)?;
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best.map(|(i, _)| &self.entries[i])
            .ok_or(MorlError::NoSteppingstone)
    }
}

/// Where the post-change policy came from.
#[derive(Debug, Clone, PartialEq)]
pub enum BootstrapSource {
    /// Copied from the stored entry at `index` (preference recorded for
    /// diagnostics).
    Steppingstone {
        index: usize,
        preference: Preference,
        distance: f64,
    },
    /// The store was empty; learning restarts from a zero table.
    Fresh,
}

/// What a preference change did to the agent.
#[derive(Debug, Clone, PartialEq)]
pub enum PreferenceChangeOutcome {
    /// Within `phi`: the current policy simply continues under the new label.
    Insignificant { distance: f64 },
    /// Beyond `phi`: the outgoing policy was offered to the store and the
    /// next policy was seeded as described.
    Significant {
        distance: f64,
        stored: CandidateDisposition,
        bootstrap: BootstrapSource,
    },
}

/// Storage fate of the outgoing policy on a significant change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateDisposition {
    Stored(StorageOutcome),
    /// Fewer than two logged returns: no meaningful robustness, nothing
    /// stored.
    SkippedShortHistory,
}

/// A learning agent that survives preference shifts by bootstrapping.
#[derive(Debug, Clone)]
pub struct RpbAgent {
    params: RpbParams,
    store: CcsStore,
    policy: TabularPolicy,
    preference: Preference,
    history: RewardHistory,
    /// Oracle value vectors `(preference, per-objective value)` consulted by
    /// the regret metric.
    regret_reference: Option<Vec<(Preference, Vec<f64>)>>,
}

impl RpbAgent {
    pub fn new(
        num_states: usize,
        num_actions: usize,
        initial_preference: Preference,
        params: RpbParams,
    ) -> Result<Self> {
        params.validate()?;
        Ok(RpbAgent {
            store: CcsStore::new(params.phi, params.distance)?,
            policy: TabularPolicy::zeros(num_states, num_actions)?,
            preference: initial_preference,
            history: RewardHistory::new(params.history_window)?,
            regret_reference: None,
            params,
        })
    }

    /// Supply the oracle value table the regret metric scores against.
    pub fn set_regret_reference(&mut self, reference: Vec<(Preference, Vec<f64>)>) {
        self.regret_reference = Some(reference);
    }

    pub fn params(&self) -> &RpbParams {
        &self.params
    }

    pub fn store(&self) -> &CcsStore {
        &self.store
    }

    pub fn policy(&self) -> &TabularPolicy {
        &self.policy
    }

    pub fn preference(&self) -> &Preference {
        &self.preference
    }

    pub fn history(&self) -> &RewardHistory {
        &self.history
    }

    /// Best oracle value under `pref`, if an oracle table was supplied.
    fn reference_mean_for(&self, pref: &Preference) -> Result<Option<f64>> {
        match &self.regret_reference {
            None => Ok(None),
            Some(table) => {
                let mut best = f64::NEG_INFINITY;
                for (_, value) in table {
                    best = best.max(scalarize_components(value, pref)?);
                }
                if best == f64::NEG_INFINITY {
                    return Err(MorlError::Contract(
                        "regret reference table is empty".into(),
                    ));
                }
                Ok(Some(best))
            }
        }
    }

    /// Robustness of the current policy's recent returns under the active
    /// preference.
    pub fn current_robustness(&self) -> Result<f64> {
        let reference = if self.params.robustness == RobustnessKind::Regret {
            self.reference_mean_for(&self.preference)?
        } else {
            None
        };
        robustness(&self.history, self.params.robustness, reference)
    }

    /// Train one episode under the active preference, logging its return.
    pub fn run_episode<E: MultiObjectiveEnv>(
        &mut self,
        env: &mut E,
        learner: &LearnerParams,
        rng: &mut ChaCha8Rng,
        episode_seed: u64,
    ) -> Result<EpisodeReturn> {
        let outcome = run_episode(
            env,
            &mut self.policy,
            &self.preference,
            learner,
            rng,
            episode_seed,
        )?;
        self.history.push(outcome.scalarized);
        Ok(outcome)
    }

    /// React to the preference becoming `new_preference`.
    ///
    /// Distances at or below `phi` only relabel the agent; greater distances
    /// run the store-then-reseed procedure described at the module level.
    pub fn on_preference_change(
        &mut self,
        new_preference: Preference,
    ) -> Result<PreferenceChangeOutcome> {
        let distance =
            preference_distance(&new_preference, &self.preference, self.params.distance)?;
        if distance <= self.params.phi {
            self.preference = new_preference;
            return Ok(PreferenceChangeOutcome::Insignificant { distance });
        }

        let stored = if self.history.len() >= 2 {
            let beta = self.current_robustness()?;
            let candidate = SteppingstoneEntry {
                preference: self.preference.clone(),
                policy: self.policy.clone(),
                robustness: beta,
            };
            CandidateDisposition::Stored(self.store.store_or_replace(candidate)?)
        } else {
            CandidateDisposition::SkippedShortHistory
        };

        let bootstrap = match self.store.retrieve_nearest(&new_preference) {
            Ok(entry) => {
                let source = BootstrapSource::Steppingstone {
                    index: self
                        .store
                        .entries()
                        .iter()
                        .position(|e| std::ptr::eq(e, entry))
                        .expect("entry borrowed from the store"),
                    preference: entry.preference.clone(),
                    distance: preference_distance(
                        &new_preference,
                        &entry.preference,
                        self.params.distance,
                    )?,
                };
                self.policy = entry.policy.clone();
                source
            }
            Err(MorlError::NoSteppingstone) => {
                self.policy =
                    TabularPolicy::zeros(self.policy.num_states(), self.policy.num_actions())?;
                BootstrapSource::Fresh
            }
            Err(e) => return Err(e),
        };

        self.history.clear();
        self.preference = new_preference;
        Ok(PreferenceChangeOutcome::Significant {
            distance,
            stored,
            bootstrap,
        })
    }
}
