//! Multi-objective reinforcement learning under shifting preferences.
//!
//! This crate implements a tabular toolkit for two-objective Markov decision
//! processes whose user preference — the weighting between objectives — and
//! whose dynamics both drift over time:
//!
//! * [`preference`], [`reward`], [`robustness`] — the vocabulary: weight
//!   vectors on the simplex, vector rewards, distances between preferences,
//!   and robustness statistics over recent returns.
//! * [`env`] — three grid-world benchmarks (search-and-rescue, deep sea
//!   treasure, resource gathering) behind one environment trait, with
//!   JSON-defined layouts and deterministic perturbation.
//! * [`learner`] — scalarized epsilon-greedy Q-learning.
//! * [`rpb`] — robust policy bootstrapping: a store of steppingstone
//!   policies keyed by preference, gated by a significance threshold, that
//!   seeds learning after each meaningful preference change.
//! * [`baselines`] — optimistic linear support (OLS), thresholded
//!   lexicographic ordering (TLO), and random-reinitialization scalarized
//!   Q-learning.
//! * [`harness`] — experiment orchestration: preference schedules,
//!   perturbation protocols, metrics, statistical tests, and CSV/JSON
//!   reporting.
//! * [`snapshot`] — JSON import/export of policy stores and coverage sets.
//! * [`plot`] — dependency-free SVG charts for the reported metrics.
//!
//! Every random quantity in the crate descends from explicit seeds via
//! [`seed`], so experiments replay byte-identically.

pub mod baselines;
pub mod env;
pub mod error;
pub mod harness;
pub mod learner;
pub mod plot;
pub mod preference;
pub mod reward;
pub mod robustness;
pub mod rpb;
pub mod seed;
pub mod snapshot;

pub use error::{MorlError, Result};
pub use preference::{preference_distance, region_index, DistanceKind, Preference};
pub use reward::{dominates, scalarize, RewardVector};
pub use robustness::{robustness, RewardHistory, RobustnessKind};
