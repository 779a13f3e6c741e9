//! Shared fixture for the acceptance suite: a family of small seeded
//! deterministic episodic MDPs with an exact planning oracle to check the
//! learner against.

use rand::Rng;

use morl::env::{Action, MultiObjectiveEnv, StepOutcome};
use morl::error::{MorlError, Result};
use morl::reward::RewardVector;
use morl::seed;
use morl::Preference;

/// Rank sizes of the layered graph: one start state, then widening interior
/// ranks. An implicit sink after the last rank terminates every episode.
const LAYER_WIDTHS: [usize; 5] = [1, 2, 4, 4, 4];
const ACTIONS: usize = 2;

/// A tiny deterministic episodic MDP. States are arranged in ranks; each of
/// the two actions jumps to a fixed state of the next rank and pays a fixed
/// two-objective reward (quarter-integer steps in [-2, 2]). Episodes start
/// from a uniformly drawn non-terminal state — exploring starts, driven by
/// the episode seed, so every state is trained — and end past the last rank.
/// The wiring is seeded but always leaves every state reachable: the first
/// edges out of a rank cover the next rank's states one each.
#[derive(Debug, Clone)]
pub struct DagMdp {
    seed: u64,
    /// `transitions[s][a] = (next state, reward pair)` for non-terminal `s`.
    transitions: Vec<[(usize, [f64; 2]); ACTIONS]>,
    sink: usize,
    state: usize,
    active: bool,
}

fn quarter_step(rng: &mut impl Rng) -> f64 {
    rng.random_range(-8..=8i32) as f64 * 0.25
}

impl DagMdp {
    pub fn new(seed: u64) -> DagMdp {
        let mut rng = seed::rng(seed, 0x4C41_5945);
        let total: usize = LAYER_WIDTHS.iter().sum();
        let sink = total;
        let mut ranks: Vec<Vec<usize>> = Vec::new();
        let mut next_id = 0;
        for width in LAYER_WIDTHS {
            ranks.push((next_id..next_id + width).collect());
            next_id += width;
        }

        let mut transitions = vec![[(0usize, [0.0f64; 2]); ACTIONS]; total];
        for (r, rank) in ranks.iter().enumerate() {
            let targets: Vec<usize> = if r + 1 < ranks.len() {
                ranks[r + 1].clone()
            } else {
                vec![sink]
            };
            let mut edges: Vec<(usize, usize)> = rank
                .iter()
                .flat_map(|&s| (0..ACTIONS).map(move |a| (s, a)))
                .collect();
            // Shuffle so which edge covers which target varies with the seed.
            for i in (1..edges.len()).rev() {
                let j = rng.random_range(0..=i);
                edges.swap(i, j);
            }
            for (i, &(s, a)) in edges.iter().enumerate() {
                let target = if i < targets.len() {
                    targets[i]
                } else {
                    targets[rng.random_range(0..targets.len())]
                };
                transitions[s][a] = (target, [quarter_step(&mut rng), quarter_step(&mut rng)]);
            }
        }

        DagMdp {
            seed,
            transitions,
            sink,
            state: 0,
            active: false,
        }
    }

    pub fn non_terminal_states(&self) -> usize {
        self.transitions.len()
    }

    /// Exact optimal action per state and the smallest action-value gap.
    /// One backward sweep suffices: state ids ascend rank by rank, so
    /// reverse id order is a topological order of the acyclic graph.
    pub fn optimal_actions(&self, pref: &Preference, gamma: f64) -> (Vec<usize>, f64) {
        let w = pref.weights();
        let mut value = vec![0.0f64; self.sink + 1];
        let mut best = vec![0usize; self.sink + 1];
        let mut min_gap = f64::INFINITY;
        for s in (0..self.transitions.len()).rev() {
            let q: Vec<f64> = self.transitions[s]
                .iter()
                .map(|(next, r)| {
                    let scalar = w[0] * r[0] + w[1] * r[1];
                    if *next == self.sink {
                        scalar
                    } else {
                        scalar + gamma * value[*next]
                    }
                })
                .collect();
            let a = if q[0] >= q[1] { 0 } else { 1 };
            best[s] = a;
            value[s] = q[a];
            min_gap = min_gap.min((q[0] - q[1]).abs());
        }
        (best, min_gap)
    }
}

impl MultiObjectiveEnv for DagMdp {
    fn num_states(&self) -> usize {
        self.sink + 1
    }

    fn num_objectives(&self) -> usize {
        2
    }

    fn num_actions(&self) -> usize {
        ACTIONS
    }

    fn reset(&mut self, episode_seed: u64) -> usize {
        let mut rng = seed::rng(self.seed, episode_seed);
        self.state = rng.random_range(0..self.transitions.len());
        self.active = true;
        self.state
    }

    fn step(&mut self, action: Action) -> Result<StepOutcome> {
        if !self.active {
            return Err(MorlError::Contract(
                "step called on an episode that is not running".into(),
            ));
        }
        let a = action.index();
        if a >= ACTIONS {
            return Err(MorlError::Contract(format!(
                "action {a} out of range for a {ACTIONS}-action world"
            )));
        }
        let (next, r) = self.transitions[self.state][a];
        let done = next == self.sink;
        self.state = next;
        self.active = !done;
        Ok(StepOutcome {
            state_id: next,
            reward: RewardVector::new(vec![r[0], r[1]])?,
            done,
        })
    }
}
