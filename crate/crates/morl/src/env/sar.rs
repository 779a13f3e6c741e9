//! Search-and-rescue world: reach victims before their deadlines, avoid fire.
//!
//! Rewards are `[fire damage, time]`: -5 whenever the agent occupies a fire
//! cell after its move resolves, and -1 every step. Obstacles block movement
//! (the agent stays put and still pays the time cost). Each victim draws a
//! private deadline at episode start; an episode ends once every victim has
//! been rescued or has died, or at the step cap.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{MorlError, Result};
use crate::reward::RewardVector;
use crate::seed;

use super::{EnvConfig, EnvKind, GridPosition, MultiObjectiveEnv, ObjectKind, StepOutcome};

const FIRE_PENALTY: f64 = -5.0;
const TIME_PENALTY: f64 = -1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VictimState {
    Alive,
    Rescued,
    Dead,
}

/// Observable situation: position plus what shares the agent's cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SarState {
    pub position: GridPosition,
    pub fire_here: bool,
    pub obstacle_here: bool,
    /// An un-rescued, still-living victim occupies this cell.
    pub victim_here: bool,
}

#[derive(Debug, Clone)]
pub struct SarEnv {
    config: EnvConfig,
    width: usize,
    height: usize,
    fire_mask: Vec<bool>,
    obstacle_mask: Vec<bool>,
    victim_cells: Vec<GridPosition>,
    step_cap: u32,
    // Episode state.
    position: GridPosition,
    steps: u32,
    deadlines: Vec<Option<u32>>,
    victims: Vec<VictimState>,
    rng: ChaCha8Rng,
    active: bool,
}

impl SarEnv {
    pub fn new(config: EnvConfig) -> Result<Self> {
        if config.layout.kind != EnvKind::Sar {
            return Err(MorlError::Config("SarEnv needs a sar layout".into()));
        }
        config.layout.validate()?;
        let (width, height) = (config.layout.width, config.layout.height);
        let mut fire_mask = vec![false; width * height];
        let mut obstacle_mask = vec![false; width * height];
        let mut victim_cells = Vec::new();
        for obj in &config.layout.objects {
            let cell = obj.position().cell_index(width);
            match obj.kind {
                ObjectKind::Fire => fire_mask[cell] = true,
                ObjectKind::Obstacle => obstacle_mask[cell] = true,
                ObjectKind::Victim => victim_cells.push(obj.position()),
                _ => unreachable!("layout validation restricts sar objects"),
            }
        }
        let victim_count = victim_cells.len();
        Ok(SarEnv {
            step_cap: config.layout.kind.step_cap(),
            width,
            height,
            fire_mask,
            obstacle_mask,
            victim_cells,
            rng: seed::rng(config.seed, 0),
            config,
            position: GridPosition::new(0, 0),
            steps: 0,
            deadlines: vec![None; victim_count],
            victims: vec![VictimState::Dead; victim_count],
            active: false,
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn state(&self) -> SarState {
        let cell = self.position.cell_index(self.width);
        SarState {
            position: self.position,
            fire_here: self.fire_mask[cell],
            obstacle_here: self.obstacle_mask[cell],
            victim_here: self.alive_victim_at(self.position),
        }
    }

    /// Dense id of an observable situation; injective over the full tuple.
    pub fn id_of(&self, state: &SarState) -> usize {
        let cell = state.position.cell_index(self.width);
        ((cell * 2 + state.fire_here as usize) * 2 + state.obstacle_here as usize) * 2
            + state.victim_here as usize
    }

    fn alive_victim_at(&self, pos: GridPosition) -> bool {
        self.victim_cells
            .iter()
            .zip(&self.victims)
            .any(|(cell, state)| *cell == pos && *state == VictimState::Alive)
    }

    fn free_cells(&self) -> Vec<GridPosition> {
        let occupied: std::collections::HashSet<usize> = self
            .config
            .layout
            .objects
            .iter()
            .map(|o| o.position().cell_index(self.width))
            .collect();
        (0..self.height)
            .flat_map(|y| (0..self.width).map(move |x| GridPosition::new(x, y)))
            .filter(|p| !occupied.contains(&p.cell_index(self.width)))
            .collect()
    }
}

impl MultiObjectiveEnv for SarEnv {
    fn num_states(&self) -> usize {
        self.width * self.height * 8
    }

    fn num_objectives(&self) -> usize {
        2
    }

    fn reset(&mut self, episode_seed: u64) -> usize {
        self.rng = seed::rng(self.config.seed, episode_seed);
        self.deadlines = self
            .victim_cells
            .iter()
            .map(|_| {
                self.config
                    .layout
                    .victim_death_range
                    .map(|(lo, hi)| self.rng.random_range(lo..=hi))
            })
            .collect();
        self.victims = vec![VictimState::Alive; self.victim_cells.len()];
        let free = self.free_cells();
        self.position = free[self.rng.random_range(0..free.len())];
        self.steps = 0;
        self.active = true;
        self.id_of(&self.state())
    }

    fn step(&mut self, action: super::Action) -> Result<StepOutcome> {
        if !self.active {
            return Err(MorlError::Contract(
                "step called on an episode that is not running".into(),
            ));
        }
        self.steps += 1;
        if let Some(target) = self.position.moved(action, self.width, self.height) {
            if !self.obstacle_mask[target.cell_index(self.width)] {
                self.position = target;
            }
        }
        // Deadlines expire before rescues resolve: arriving on the deadline
        // step is too late.
        for (i, state) in self.victims.iter_mut().enumerate() {
            if *state == VictimState::Alive {
                if let Some(deadline) = self.deadlines[i] {
                    if self.steps >= deadline {
                        *state = VictimState::Dead;
                    }
                }
            }
        }
        for (i, cell) in self.victim_cells.iter().enumerate() {
            if self.victims[i] == VictimState::Alive && *cell == self.position {
                self.victims[i] = VictimState::Rescued;
            }
        }
        let fire = if self.fire_mask[self.position.cell_index(self.width)] {
            FIRE_PENALTY
        } else {
            0.0
        };
        let reward = RewardVector::new(vec![fire, TIME_PENALTY])?;
        let settled = self.victims.iter().all(|v| *v != VictimState::Alive);
        let done = settled || self.steps >= self.step_cap;
        self.active = !done;
        Ok(StepOutcome {
            state_id: self.id_of(&self.state()),
            reward,
            done,
        })
    }
}
