//! Tabular Q-learning on linearly scalarized vector rewards.
//!
//! The learner is deliberately plain: a dense `state x action` table of
//! action values, epsilon-greedy behaviour, and the one-step update
//! `Q(s,a) += alpha * (rho + gamma * max_a' Q(s',a') - Q(s,a))` where `rho`
//! is the preference-weighted reward. Episode termination suppresses the
//! bootstrap term. Everything that consumes randomness takes an explicit
//! generator, so runs replay bit-identically from their seeds.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::env::{Action, MultiObjectiveEnv};
use crate::error::{MorlError, Result};
use crate::preference::Preference;
use crate::reward::{scalarize, RewardVector};

/// Step size, discount, exploration rate, and episode budget.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerParams {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub episodes: usize,
}

impl Default for LearnerParams {
    fn default() -> Self {
        LearnerParams {
            alpha: 0.1,
            gamma: 0.9,
            epsilon: 0.1,
            episodes: 200,
        }
    }
}

impl LearnerParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(MorlError::Config(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            return Err(MorlError::Config(format!(
                "gamma must lie in [0, 1), got {}",
                self.gamma
            )));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(MorlError::Config(format!(
                "epsilon must lie in [0, 1], got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// A dense table of action values for one scalarized objective.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularPolicy {
    num_states: usize,
    num_actions: usize,
    q: Vec<f64>,
}

impl TabularPolicy {
    /// Fresh all-zero table.
    pub fn zeros(num_states: usize, num_actions: usize) -> Result<Self> {
        if num_states == 0 || num_actions == 0 {
            return Err(MorlError::Config(format!(
                "policy needs positive dimensions, got {num_states} x {num_actions}"
            )));
        }
        Ok(TabularPolicy {
            num_states,
            num_actions,
            q: vec![0.0; num_states * num_actions],
        })
    }

    /// Zero-initialized, or a deep copy of `from` when given. A dimension
    /// mismatch between `from` and the requested shape is an error.
    pub fn init(num_states: usize, num_actions: usize, from: Option<&TabularPolicy>) -> Result<Self> {
        match from {
            None => TabularPolicy::zeros(num_states, num_actions),
            Some(other) => {
                if other.num_states != num_states || other.num_actions != num_actions {
                    return Err(MorlError::DimensionMismatch {
                        left: other.num_states * other.num_actions,
                        right: num_states * num_actions,
                    });
                }
                Ok(other.clone())
            }
        }
    }

    /// Rebuild from a row-major value dump (snapshot import).
    pub fn from_values(num_states: usize, num_actions: usize, q: Vec<f64>) -> Result<Self> {
        if q.len() != num_states * num_actions {
            return Err(MorlError::DimensionMismatch {
                left: q.len(),
                right: num_states * num_actions,
            });
        }
        Ok(TabularPolicy {
            num_states,
            num_actions,
            q,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    /// Row-major view of the full table.
    pub fn values(&self) -> &[f64] {
        &self.q
    }

    pub fn q(&self, state: usize, action: usize) -> f64 {
        self.q[state * self.num_actions + action]
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.q[state * self.num_actions..(state + 1) * self.num_actions]
    }

    /// Highest-valued action, lowest index on ties.
    pub fn greedy_action(&self, state: usize) -> usize {
        let row = self.row(state);
        let mut best = 0;
        for (i, v) in row.iter().enumerate().skip(1) {
            if *v > row[best] {
                best = i;
            }
        }
        best
    }

    pub fn max_q(&self, state: usize) -> f64 {
        self.row(state).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Epsilon-greedy draw: explore uniformly with probability `epsilon`,
    /// otherwise act greedily.
    pub fn select_action(&self, state: usize, epsilon: f64, rng: &mut ChaCha8Rng) -> Result<usize> {
        if state >= self.num_states {
            return Err(MorlError::Contract(format!(
                "state {state} out of range 0..{}",
                self.num_states
            )));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(MorlError::Contract(format!(
                "epsilon must lie in [0, 1], got {epsilon}"
            )));
        }
        if rng.random::<f64>() < epsilon {
            Ok(rng.random_range(0..self.num_actions))
        } else {
            Ok(self.greedy_action(state))
        }
    }

    /// One-step backup toward `rho + gamma * max_a' Q(s',a')`; the bootstrap
    /// term is dropped on terminal transitions. Returns `|delta|`, the size
    /// of the change applied.
    pub fn update(
        &mut self,
        state: usize,
        action: usize,
        scalar_reward: f64,
        next_state: usize,
        done: bool,
        alpha: f64,
        gamma: f64,
    ) -> Result<f64> {
        if state >= self.num_states || action >= self.num_actions || next_state >= self.num_states {
            return Err(MorlError::Contract(format!(
                "update indices out of range: s={state} a={action} s'={next_state}"
            )));
        }
        let target = if done {
            scalar_reward
        } else {
            scalar_reward + gamma * self.max_q(next_state)
        };
        let cell = state * self.num_actions + action;
        let delta = alpha * (target - self.q[cell]);
        self.q[cell] += delta;
        Ok(delta.abs())
    }
}

/// What one training episode produced.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeReturn {
    /// Undiscounted sum of the per-step scalarized rewards.
    pub scalarized: f64,
    /// Undiscounted componentwise sum of the vector rewards.
    pub components: RewardVector,
    /// Largest single table change during the episode (convergence signal).
    pub max_q_delta: f64,
    pub steps: u32,
}

/// Run one episode of epsilon-greedy training, mutating `policy` in place.
///
/// Environment randomness comes from `episode_seed`; action exploration
/// comes from `rng`. Keeping the two streams separate lets different
/// algorithms face identical episode conditions.
pub fn run_episode<E: MultiObjectiveEnv>(
    env: &mut E,
    policy: &mut TabularPolicy,
    pref: &Preference,
    params: &LearnerParams,
    rng: &mut ChaCha8Rng,
    episode_seed: u64,
) -> Result<EpisodeReturn> {
    params.validate()?;
    if policy.num_states() != env.num_states() || policy.num_actions() != env.num_actions() {
        return Err(MorlError::DimensionMismatch {
            left: policy.num_states() * policy.num_actions(),
            right: env.num_states() * env.num_actions(),
        });
    }
    if pref.dim() != env.num_objectives() {
        return Err(MorlError::DimensionMismatch {
            left: pref.dim(),
            right: env.num_objectives(),
        });
    }
    let mut state = env.reset(episode_seed);
    let mut scalarized = 0.0;
    let mut components = RewardVector::zeros(env.num_objectives());
    let mut max_q_delta = 0.0f64;
    let mut steps = 0u32;
    loop {
        let action = policy.select_action(state, params.epsilon, rng)?;
        let outcome = env.step(Action::from_index(action)?)?;
        let rho = scalarize(&outcome.reward, pref)?;
        let delta = policy.update(
            state,
            action,
            rho,
            outcome.state_id,
            outcome.done,
            params.alpha,
            params.gamma,
        )?;
        scalarized += rho;
        components.add_assign(&outcome.reward)?;
        max_q_delta = max_q_delta.max(delta);
        steps += 1;
        state = outcome.state_id;
        if outcome.done {
            break;
        }
    }
    Ok(EpisodeReturn {
        scalarized,
        components,
        max_q_delta,
        steps,
    })
}

/// Train for `params.episodes` episodes, drawing each episode's seed from
/// `rng`. Returns the per-episode outcomes in order.
pub fn run_episodes<E: MultiObjectiveEnv>(
    env: &mut E,
    policy: &mut TabularPolicy,
    pref: &Preference,
    params: &LearnerParams,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<EpisodeReturn>> {
    params.validate()?;
    let mut returns = Vec::with_capacity(params.episodes);
    for _ in 0..params.episodes {
        let episode_seed: u64 = rng.random();
        returns.push(run_episode(env, policy, pref, params, rng, episode_seed)?);
    }
    Ok(returns)
}
