//! Artifact rendering: `results.csv` rows and the `summary.json` document
//! that the plotting front end consumes.
//!
//! Both artifacts are deterministic byte-for-byte for identical inputs:
//! rows follow input order, floats use fixed formatting, structs serialize
//! with fixed field order, and line endings are LF.

use serde::{Deserialize, Serialize};

use super::stats::{self, BoxplotStats};
use super::{Algorithm, ExperimentRecord, MetricSummary, Mode, VariantSummary};
use crate::env::EnvKind;
use crate::error::{MorlError, Result};

/// Format a float with 9 significant digits in scientific notation.
fn sci(v: f64) -> String {
    format!("{v:.8e}")
}

/// Render the per-episode log for any number of algorithms into one CSV
/// document (LF endings, 9-significant-digit floats).
pub fn render_results_csv(
    env: EnvKind,
    mode: Mode,
    per_algo: &[(Algorithm, &[ExperimentRecord])],
) -> String {
    let mut out = String::from("run,algo,env,mode,pref_index,episode,scalarized_return,r0,r1,ccs_size\n");
    for (algo, records) in per_algo {
        for r in *records {
            let c = r.reward_components.components();
            let r0 = c.first().copied().unwrap_or(0.0);
            let r1 = c.get(1).copied().unwrap_or(0.0);
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.run,
                algo.name(),
                env.name(),
                mode.name(),
                r.preference_index,
                r.episode,
                sci(r.scalarized_return),
                sci(r0),
                sci(r1),
                r.ccs_size,
            ));
        }
    }
    out
}

/// Aggregates for one algorithm across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoSummary {
    pub algorithm: String,
    /// Per preference: mean and sample std of Γ_c over runs.
    pub gamma_c_mean: Vec<f64>,
    pub gamma_c_std: Vec<f64>,
    /// Per transition k→k+1: mean and sample std of loss over runs.
    pub loss_mean: Vec<f64>,
    pub loss_std: Vec<f64>,
    /// Per run: Γ_c averaged over preferences (Welch-test sample).
    pub per_run_gamma_c: Vec<f64>,
    /// Per run: loss averaged over transitions (empty for one preference).
    pub per_run_loss: Vec<f64>,
    /// Segments whose metric windows fell back to short segments.
    pub flagged_segments: usize,
}

/// One two-sided Welch test between two algorithms' per-run samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTest {
    pub a: String,
    pub b: String,
    /// Which per-run sample was compared: "gamma_c" or "loss".
    pub metric: String,
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

/// Loss distributions across the phi grid (boxplot data).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiSweepSummary {
    pub phi: Vec<f64>,
    pub loss_mean: Vec<f64>,
    pub boxplots: Vec<BoxplotStats>,
    /// Raw per-(run, transition) loss samples per phi.
    pub losses: Vec<Vec<f64>>,
}

/// Variant comparison along one axis (robustness metrics or distances).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantComparisonSummary {
    pub axis: String,
    pub variants: Vec<VariantSummary>,
}

/// The `summary.json` document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Summary {
    pub env: String,
    pub mode: String,
    pub runs: usize,
    pub master_seed: u64,
    pub episodes_per_preference: usize,
    /// First-objective weight of each schedule preference, in order.
    pub preference_firsts: Vec<f64>,
    pub algorithms: Vec<AlgoSummary>,
    pub pairwise_welch: Vec<PairwiseTest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_sweep: Option<PhiSweepSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant_comparison: Option<VariantComparisonSummary>,
}

impl Summary {
    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Summary> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Aggregate one algorithm's per-(run, preference) metrics.
pub fn summarize_algorithm(
    algorithm: Algorithm,
    metrics: &[MetricSummary],
    runs: usize,
    num_preferences: usize,
) -> Result<AlgoSummary> {
    let mut gamma_c_mean = Vec::with_capacity(num_preferences);
    let mut gamma_c_std = Vec::with_capacity(num_preferences);
    for k in 0..num_preferences {
        let vals: Vec<f64> = metrics
            .iter()
            .filter(|m| m.preference_index == k)
            .map(|m| m.gamma_c)
            .collect();
        if vals.len() != runs {
            return Err(MorlError::Contract(format!(
                "preference {k} has {} Γ_c values for {runs} runs",
                vals.len()
            )));
        }
        gamma_c_mean.push(stats::mean(&vals)?);
        gamma_c_std.push(if runs >= 2 { stats::sample_std(&vals)? } else { 0.0 });
    }

    let mut loss_mean = Vec::new();
    let mut loss_std = Vec::new();
    for k in 0..num_preferences.saturating_sub(1) {
        let vals: Vec<f64> = metrics
            .iter()
            .filter(|m| m.preference_index == k)
            .filter_map(|m| m.loss)
            .collect();
        loss_mean.push(stats::mean(&vals)?);
        loss_std.push(if runs >= 2 { stats::sample_std(&vals)? } else { 0.0 });
    }

    Ok(AlgoSummary {
        algorithm: algorithm.name().to_string(),
        gamma_c_mean,
        gamma_c_std,
        loss_mean,
        loss_std,
        per_run_gamma_c: super::per_run_gamma_c(metrics, runs)?,
        per_run_loss: if num_preferences >= 2 {
            super::per_run_loss(metrics, runs)?
        } else {
            Vec::new()
        },
        flagged_segments: metrics.iter().filter(|m| m.flagged).count(),
    })
}

/// All pairwise Welch tests over the algorithms' per-run samples. Pairs
/// whose samples are degenerate (fewer than two runs, or both constant) are
/// skipped rather than reported.
pub fn pairwise_welch(algorithms: &[AlgoSummary]) -> Vec<PairwiseTest> {
    let mut tests = Vec::new();
    for i in 0..algorithms.len() {
        for j in (i + 1)..algorithms.len() {
            let samples: [(&str, &[f64], &[f64]); 2] = [
                (
                    "gamma_c",
                    &algorithms[i].per_run_gamma_c,
                    &algorithms[j].per_run_gamma_c,
                ),
                ("loss", &algorithms[i].per_run_loss, &algorithms[j].per_run_loss),
            ];
            for (metric, sa, sb) in samples {
                if let Ok(w) = stats::welch_t_test(sa, sb) {
                    tests.push(PairwiseTest {
                        a: algorithms[i].algorithm.clone(),
                        b: algorithms[j].algorithm.clone(),
                        metric: metric.to_string(),
                        t: w.t,
                        df: w.df,
                        p: w.p,
                    });
                }
            }
        }
    }
    tests
}

/// Build the summary document for a set of algorithms sharing one config.
pub fn build_summary(
    env: EnvKind,
    mode: Mode,
    runs: usize,
    master_seed: u64,
    schedule: &super::PreferenceSchedule,
    per_algo: &[(Algorithm, Vec<MetricSummary>)],
) -> Result<Summary> {
    let mut algorithms = Vec::with_capacity(per_algo.len());
    for (algo, metrics) in per_algo {
        algorithms.push(summarize_algorithm(
            *algo,
            metrics,
            runs,
            schedule.preferences.len(),
        )?);
    }
    let pairwise = pairwise_welch(&algorithms);
    Ok(Summary {
        env: env.name().to_string(),
        mode: mode.name().to_string(),
        runs,
        master_seed,
        episodes_per_preference: schedule.episodes_per_preference,
        preference_firsts: schedule
            .preferences
            .iter()
            .map(|p| p.weights()[0])
            .collect(),
        algorithms,
        pairwise_welch: pairwise,
        phi_sweep: None,
        variant_comparison: None,
    })
}

/// Summarize a phi sweep into means and boxplot five-number summaries.
pub fn summarize_phi_sweep(distributions: &[(f64, Vec<f64>)]) -> Result<PhiSweepSummary> {
    let mut phi = Vec::with_capacity(distributions.len());
    let mut loss_mean = Vec::with_capacity(distributions.len());
    let mut boxplots = Vec::with_capacity(distributions.len());
    let mut losses = Vec::with_capacity(distributions.len());
    for (p, dist) in distributions {
        phi.push(*p);
        loss_mean.push(stats::mean(dist)?);
        boxplots.push(stats::boxplot_stats(dist)?);
        losses.push(dist.clone());
    }
    Ok(PhiSweepSummary {
        phi,
        loss_mean,
        boxplots,
        losses,
    })
}
