//! Robustness statistics over recent episode returns.
//!
//! A policy's robustness is summarized from a sliding window of its
//! scalarized episode returns. Every metric here is oriented the same way:
//! **larger means more robust**, so metrics that naturally measure spread or
//! shortfall are negated. That single orientation is what lets the policy
//! store compare candidates with a plain `>`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{MorlError, Result};

/// Guard added to denominators so constant histories stay finite.
const EPS: f64 = 1e-9;
/// Magnitude cap for the mean/deviation ratio when deviation is ~zero.
const STABILITY_CAP: f64 = 1e12;
/// Fixed bin count for the entropy histogram.
const ENTROPY_BINS: usize = 10;

/// Sliding window of scalarized episode returns (oldest evicted first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardHistory {
    window: usize,
    values: VecDeque<f64>,
}

impl RewardHistory {
    pub const DEFAULT_WINDOW: usize = 50;

    /// A history holding at most `window` returns; `window >= 2`.
    pub fn new(window: usize) -> Result<Self> {
        if window < 2 {
            return Err(MorlError::Config(format!(
                "history window must be at least 2, got {window}"
            )));
        }
        Ok(RewardHistory {
            window,
            values: VecDeque::with_capacity(window),
        })
    }

    /// Append a return, evicting the oldest once the window is full.
    pub fn push(&mut self, value: f64) {
        if self.values.len() == self.window {
            self.values.pop_front();
        }
        self.values.push_back(value);
    }

    pub fn clear(&mut self) {
        self.values.clear();
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied()
    }
}

impl Default for RewardHistory {
    fn default() -> Self {
        RewardHistory::new(Self::DEFAULT_WINDOW).expect("default window is valid")
    }
}

/// Which robustness summary to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RobustnessKind {
    /// Mean over standard deviation: rewards consistency around a high mean.
    Stability,
    /// Negated variance-to-mean ratio.
    IndexOfDispersion,
    /// Negated standard deviation-to-mean ratio.
    CoefficientOfVariation,
    /// Negated Shannon entropy of the return distribution.
    Entropy,
    /// Negated shortfall against a reference (oracle) mean return.
    Regret,
}

impl RobustnessKind {
    pub const ALL: [RobustnessKind; 5] = [
        RobustnessKind::Stability,
        RobustnessKind::IndexOfDispersion,
        RobustnessKind::CoefficientOfVariation,
        RobustnessKind::Entropy,
        RobustnessKind::Regret,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RobustnessKind::Stability => "stability",
            RobustnessKind::IndexOfDispersion => "index-of-dispersion",
            RobustnessKind::CoefficientOfVariation => "coefficient-of-variation",
            RobustnessKind::Entropy => "entropy",
            RobustnessKind::Regret => "regret",
        }
    }

    /// Smallest history this metric is defined on.
    fn min_samples(&self) -> usize {
        match self {
            RobustnessKind::Entropy => 1,
            _ => 2,
        }
    }
}

impl std::str::FromStr for RobustnessKind {
    type Err = MorlError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stability" => Ok(RobustnessKind::Stability),
            "index-of-dispersion" | "iod" => Ok(RobustnessKind::IndexOfDispersion),
            "coefficient-of-variation" | "cv" => Ok(RobustnessKind::CoefficientOfVariation),
            "entropy" => Ok(RobustnessKind::Entropy),
            "regret" => Ok(RobustnessKind::Regret),
            other => Err(MorlError::Config(format!(
                "unknown robustness metric '{other}'"
            ))),
        }
    }
}

/// Compute a robustness score for a history of returns.
///
/// `reference_mean` is consulted only by [`RobustnessKind::Regret`] and must
/// be supplied there (the mean return of an oracle policy under the same
/// preference).
pub fn robustness(
    history: &RewardHistory,
    kind: RobustnessKind,
    reference_mean: Option<f64>,
) -> Result<f64> {
    let n = history.len();
    if n < kind.min_samples() {
        return Err(MorlError::InsufficientSamples {
            need: kind.min_samples(),
            have: n,
        });
    }
    let values: Vec<f64> = history.values().collect();
    let mean = values.iter().sum::<f64>() / n as f64;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    let std_dev = variance.sqrt();
    let mean_magnitude = mean.abs() + EPS;

    let score = match kind {
        RobustnessKind::Stability => {
            (mean / (std_dev + EPS)).clamp(-STABILITY_CAP, STABILITY_CAP)
        }
        RobustnessKind::IndexOfDispersion => -(variance / mean_magnitude),
        RobustnessKind::CoefficientOfVariation => -(std_dev / mean_magnitude),
        RobustnessKind::Entropy => -shannon_entropy(&values),
        RobustnessKind::Regret => {
            let reference = reference_mean.ok_or_else(|| {
                MorlError::Contract("regret robustness needs a reference mean".into())
            })?;
            -(reference - mean)
        }
    };
    Ok(score)
}

/// Shannon entropy (bits) of the values histogrammed into equal-width bins
/// spanning the observed range. A single-valued history has zero entropy.
fn shannon_entropy(values: &[f64]) -> f64 {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return 0.0;
    }
    let width = (max - min) / ENTROPY_BINS as f64;
    let mut counts = [0usize; ENTROPY_BINS];
    for v in values {
        let bin = (((v - min) / width) as usize).min(ENTROPY_BINS - 1);
        counts[bin] += 1;
    }
    let n = values.len() as f64;
    counts
        .iter()
        .filter(|c| **c > 0)
        .map(|c| {
            let p = *c as f64 / n;
            -p * p.log2()
        })
        .sum()
}
