//! Deep-sea-treasure world: dive for treasures of growing value.
//!
//! Rewards are `[time, treasure]`: -1 every step, plus the treasure value
//! when the agent lands on a treasure cell (which ends the episode).
//! Off-grid moves are no-ops that still cost the step.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{MorlError, Result};
use crate::reward::RewardVector;
use crate::seed;

use super::{EnvConfig, EnvKind, GridPosition, MultiObjectiveEnv, ObjectKind, StepOutcome};

const TIME_PENALTY: f64 = -1.0;

#[derive(Debug, Clone)]
pub struct DstEnv {
    config: EnvConfig,
    width: usize,
    height: usize,
    treasures: Vec<(GridPosition, f64)>,
    step_cap: u32,
    // Episode state.
    position: GridPosition,
    steps: u32,
    rng: ChaCha8Rng,
    active: bool,
}

impl DstEnv {
    pub fn new(config: EnvConfig) -> Result<Self> {
        if config.layout.kind != EnvKind::Dst {
            return Err(MorlError::Config("DstEnv needs a dst layout".into()));
        }
        config.layout.validate()?;
        let treasures = config
            .layout
            .objects
            .iter()
            .filter(|o| o.kind == ObjectKind::Treasure)
            .map(|o| (o.position(), o.value.expect("validated treasure value")))
            .collect();
        Ok(DstEnv {
            width: config.layout.width,
            height: config.layout.height,
            treasures,
            step_cap: config.layout.kind.step_cap(),
            rng: seed::rng(config.seed, 0),
            config,
            position: GridPosition::new(0, 0),
            steps: 0,
            active: false,
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn position(&self) -> GridPosition {
        self.position
    }

    /// Dense id: plain row-major cell index.
    pub fn id_of(&self, position: GridPosition) -> usize {
        position.cell_index(self.width)
    }

    fn treasure_at(&self, pos: GridPosition) -> Option<f64> {
        self.treasures
            .iter()
            .find(|(cell, _)| *cell == pos)
            .map(|(_, v)| *v)
    }
}

impl MultiObjectiveEnv for DstEnv {
    fn num_states(&self) -> usize {
        self.width * self.height
    }

    fn num_objectives(&self) -> usize {
        2
    }

    fn reset(&mut self, episode_seed: u64) -> usize {
        self.rng = seed::rng(self.config.seed, episode_seed);
        let free: Vec<GridPosition> = (0..self.height)
            .flat_map(|y| (0..self.width).map(move |x| GridPosition::new(x, y)))
            .filter(|p| self.treasure_at(*p).is_none())
            .collect();
        self.position = free[self.rng.random_range(0..free.len())];
        self.steps = 0;
        self.active = true;
        self.id_of(self.position)
    }

    fn step(&mut self, action: super::Action) -> Result<StepOutcome> {
        if !self.active {
            return Err(MorlError::Contract(
                "step called on an episode that is not running".into(),
            ));
        }
        self.steps += 1;
        if let Some(target) = self.position.moved(action, self.width, self.height) {
            self.position = target;
        }
        let treasure = self.treasure_at(self.position);
        let reward = RewardVector::new(vec![TIME_PENALTY, treasure.unwrap_or(0.0)])?;
        let done = treasure.is_some() || self.steps >= self.step_cap;
        self.active = !done;
        Ok(StepOutcome {
            state_id: self.id_of(self.position),
            reward,
            done,
        })
    }
}
