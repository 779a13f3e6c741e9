//! Disk snapshots of policy sets.
//!
//! Steppingstone stores (RPB) and frozen coverage sets (OLS/TLO) share one
//! JSON envelope so either can be inspected offline or reloaded later:
//!
//! ```json
//! {
//!   "kind": "ccs" | "coverage",
//!   "env": "dst",
//!   "num_states": 110,
//!   "num_actions": 4,
//!   "runs": [ { "entries": [ { "preference": [0.9, 0.1],
//!                               "robustness": 1.25,
//!                               "value_vector": null,
//!                               "q_table": [ ... ] } ] } ]
//! }
//! ```
//!
//! `q_table` is dense row-major (`q[state * num_actions + action]`).
//! Steppingstone entries carry `robustness`; coverage entries carry
//! `value_vector`. The `runs` array holds one set per experiment run, since
//! every run trains on its own layout.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::{CoverageEntry, CoverageSet};
use crate::error::{MorlError, Result};
use crate::learner::TabularPolicy;
use crate::preference::Preference;
use crate::reward::RewardVector;
use crate::rpb::SteppingstoneEntry;

/// `kind` value for steppingstone-store snapshots.
pub const KIND_CCS: &str = "ccs";
/// `kind` value for frozen coverage-set snapshots.
pub const KIND_COVERAGE: &str = "coverage";

/// One stored policy: its preference, optional quality annotations, and the
/// full Q-table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotEntry {
    /// Preference weights the policy was trained under.
    pub preference: Vec<f64>,
    /// Robustness score β at storage time (steppingstone entries only).
    pub robustness: Option<f64>,
    /// Mean per-objective return of the policy (coverage entries only).
    pub value_vector: Option<Vec<f64>>,
    /// Dense row-major Q-values, length `num_states * num_actions`.
    pub q_table: Vec<f64>,
}

/// The policy set one run produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotRun {
    pub entries: Vec<SnapshotEntry>,
}

/// A saved collection of policy sets, one per experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySetSnapshot {
    /// Either [`KIND_CCS`] or [`KIND_COVERAGE`].
    pub kind: String,
    /// Environment name the policies were trained on (e.g. "dst").
    pub env: String,
    pub num_states: usize,
    pub num_actions: usize,
    pub runs: Vec<SnapshotRun>,
}

impl PolicySetSnapshot {
    /// Checks internal consistency: known kind, table sizes matching the
    /// declared dimensions, valid preference weights, and the annotation
    /// each kind requires.
    pub fn validate(&self) -> Result<()> {
        if self.kind != KIND_CCS && self.kind != KIND_COVERAGE {
            return Err(MorlError::Config(format!(
                "unknown snapshot kind {:?}; expected {KIND_CCS:?} or {KIND_COVERAGE:?}",
                self.kind
            )));
        }
        if self.num_states == 0 || self.num_actions == 0 {
            return Err(MorlError::Config(
                "snapshot dimensions must be positive".into(),
            ));
        }
        let table_len = self.num_states * self.num_actions;
        for (r, run) in self.runs.iter().enumerate() {
            for (i, entry) in run.entries.iter().enumerate() {
                Preference::new(entry.preference.clone())?;
                if entry.q_table.len() != table_len {
                    return Err(MorlError::Config(format!(
                        "run {r} entry {i}: q_table has {} values, expected {table_len}",
                        entry.q_table.len()
                    )));
                }
                if !entry.q_table.iter().all(|v| v.is_finite()) {
                    return Err(MorlError::Config(format!(
                        "run {r} entry {i}: q_table contains a non-finite value"
                    )));
                }
                if self.kind == KIND_COVERAGE {
                    let vv = entry.value_vector.as_ref().ok_or_else(|| {
                        MorlError::Config(format!(
                            "run {r} entry {i}: coverage entries need a value_vector"
                        ))
                    })?;
                    if vv.len() != entry.preference.len() {
                        return Err(MorlError::DimensionMismatch {
                            left: vv.len(),
                            right: entry.preference.len(),
                        });
                    }
                    if !vv.iter().all(|v| v.is_finite()) {
                        return Err(MorlError::Config(format!(
                            "run {r} entry {i}: value_vector contains a non-finite value"
                        )));
                    }
                } else if let Some(beta) = entry.robustness {
                    if !beta.is_finite() {
                        return Err(MorlError::Config(format!(
                            "run {r} entry {i}: robustness is not finite"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Serializes to pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    /// Parses and validates a snapshot from JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        let snapshot: PolicySetSnapshot = serde_json::from_str(text)?;
        snapshot.validate()?;
        Ok(snapshot)
    }

    /// Writes the snapshot to `path` as JSON.
    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Reads and validates a snapshot from `path`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Rebuilds the frozen coverage sets a [`KIND_COVERAGE`] snapshot holds,
    /// one per run. Steppingstone snapshots lack the value vectors coverage
    /// sets are defined by, so they are rejected.
    pub fn to_coverage_sets(&self) -> Result<Vec<CoverageSet>> {
        self.validate()?;
        if self.kind != KIND_COVERAGE {
            return Err(MorlError::Config(format!(
                "snapshot kind {:?} cannot be loaded as coverage sets; \
                 only {KIND_COVERAGE:?} snapshots carry value vectors",
                self.kind
            )));
        }
        self.runs
            .iter()
            .map(|run| {
                let entries = run
                    .entries
                    .iter()
                    .map(|entry| {
                        Ok(CoverageEntry {
                            preference: Preference::new(entry.preference.clone())?,
                            policy: TabularPolicy::from_values(
                                self.num_states,
                                self.num_actions,
                                entry.q_table.clone(),
                            )?,
                            value_vector: RewardVector::new(
                                entry.value_vector.clone().expect("validated above"),
                            )?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                CoverageSet::from_entries(entries)
            })
            .collect()
    }
}

/// Packages per-run steppingstone stores (as produced by an RPB experiment)
/// into a snapshot.
pub fn ccs_snapshot(
    env: &str,
    num_states: usize,
    num_actions: usize,
    stores: &[Vec<SteppingstoneEntry>],
) -> Result<PolicySetSnapshot> {
    let runs = stores
        .iter()
        .map(|store| SnapshotRun {
            entries: store
                .iter()
                .map(|entry| SnapshotEntry {
                    preference: entry.preference.weights().to_vec(),
                    robustness: Some(entry.robustness),
                    value_vector: None,
                    q_table: entry.policy.values().to_vec(),
                })
                .collect(),
        })
        .collect();
    let snapshot = PolicySetSnapshot {
        kind: KIND_CCS.to_string(),
        env: env.to_string(),
        num_states,
        num_actions,
        runs,
    };
    snapshot.validate()?;
    Ok(snapshot)
}

/// Packages per-run frozen coverage sets into a snapshot.
pub fn coverage_snapshot(
    env: &str,
    num_states: usize,
    num_actions: usize,
    sets: &[CoverageSet],
) -> Result<PolicySetSnapshot> {
    let runs = sets
        .iter()
        .map(|set| SnapshotRun {
            entries: set
                .entries()
                .iter()
                .map(|entry| SnapshotEntry {
                    preference: entry.preference.weights().to_vec(),
                    robustness: None,
                    value_vector: Some(entry.value_vector.components().to_vec()),
                    q_table: entry.policy.values().to_vec(),
                })
                .collect(),
        })
        .collect();
    let snapshot = PolicySetSnapshot {
        kind: KIND_COVERAGE.to_string(),
        env: env.to_string(),
        num_states,
        num_actions,
        runs,
    };
    snapshot.validate()?;
    Ok(snapshot)
}
