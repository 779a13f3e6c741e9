//! Resource-gathering world: collect gold and gems, dodge enemies, get home.
//!
//! Rewards are `[resources, enemy]`: +1 for each resource picked up, -1 when
//! an enemy attack lands. Entering an enemy cell triggers an attack with the
//! layout's probability (evaluated once per entry); an attack drops the
//! carried resources, teleports the agent home, and ends the episode. The
//! episode also ends whenever the agent stands on its home cell after a
//! step, or at the step cap.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{MorlError, Result};
use crate::reward::RewardVector;
use crate::seed;

use super::{EnvConfig, EnvKind, GridPosition, MultiObjectiveEnv, ObjectKind, StepOutcome};

const DEFAULT_ATTACK_PROBABILITY: f64 = 0.1;
const ATTACK_PENALTY: f64 = -1.0;

/// Observable situation: position plus what shares the agent's cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RgState {
    pub position: GridPosition,
    /// An uncollected gold piece occupies this cell.
    pub gold_here: bool,
    /// An uncollected gem occupies this cell.
    pub gem_here: bool,
    pub enemy_here: bool,
}

#[derive(Debug, Clone)]
pub struct RgEnv {
    config: EnvConfig,
    width: usize,
    height: usize,
    home: GridPosition,
    resources: Vec<(GridPosition, ObjectKind)>,
    enemy_cells: Vec<GridPosition>,
    attack_probability: f64,
    step_cap: u32,
    // Episode state.
    position: GridPosition,
    collected: Vec<bool>,
    steps: u32,
    rng: ChaCha8Rng,
    active: bool,
}

impl RgEnv {
    pub fn new(config: EnvConfig) -> Result<Self> {
        if config.layout.kind != EnvKind::Rg {
            return Err(MorlError::Config("RgEnv needs an rg layout".into()));
        }
        config.layout.validate()?;
        let mut home = None;
        let mut resources = Vec::new();
        let mut enemy_cells = Vec::new();
        for obj in &config.layout.objects {
            match obj.kind {
                ObjectKind::Home => home = Some(obj.position()),
                ObjectKind::Gold | ObjectKind::Gem => resources.push((obj.position(), obj.kind)),
                ObjectKind::Enemy => enemy_cells.push(obj.position()),
                _ => unreachable!("layout validation restricts rg objects"),
            }
        }
        let home = home.expect("validated home cell");
        let resource_count = resources.len();
        Ok(RgEnv {
            width: config.layout.width,
            height: config.layout.height,
            home,
            resources,
            enemy_cells,
            attack_probability: config
                .layout
                .attack_probability
                .unwrap_or(DEFAULT_ATTACK_PROBABILITY),
            step_cap: config.layout.kind.step_cap(),
            rng: seed::rng(config.seed, 0),
            config,
            position: home,
            collected: vec![false; resource_count],
            steps: 0,
            active: false,
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn state(&self) -> RgState {
        RgState {
            position: self.position,
            gold_here: self.uncollected_kind_at(self.position, ObjectKind::Gold),
            gem_here: self.uncollected_kind_at(self.position, ObjectKind::Gem),
            enemy_here: self.enemy_cells.contains(&self.position),
        }
    }

    /// Dense id of an observable situation; injective over the full tuple.
    pub fn id_of(&self, state: &RgState) -> usize {
        let cell = state.position.cell_index(self.width);
        ((cell * 2 + state.gold_here as usize) * 2 + state.gem_here as usize) * 2
            + state.enemy_here as usize
    }

    fn uncollected_kind_at(&self, pos: GridPosition, kind: ObjectKind) -> bool {
        self.resources
            .iter()
            .zip(&self.collected)
            .any(|((cell, k), taken)| *cell == pos && *k == kind && !taken)
    }
}

impl MultiObjectiveEnv for RgEnv {
    fn num_states(&self) -> usize {
        self.width * self.height * 8
    }

    fn num_objectives(&self) -> usize {
        2
    }

    fn reset(&mut self, episode_seed: u64) -> usize {
        self.rng = seed::rng(self.config.seed, episode_seed);
        self.position = self.home;
        self.collected = vec![false; self.resources.len()];
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
        let previous = self.position;
        if let Some(target) = self.position.moved(action, self.width, self.height) {
            self.position = target;
        }
        let entered_enemy_cell =
            self.position != previous && self.enemy_cells.contains(&self.position);
        // One attack roll per enemy-cell entry; lingering draws nothing.
        if entered_enemy_cell && self.rng.random::<f64>() < self.attack_probability {
            for taken in &mut self.collected {
                *taken = false; // dropped resources return to the map
            }
            self.position = self.home;
            self.active = false;
            return Ok(StepOutcome {
                state_id: self.id_of(&self.state()),
                reward: RewardVector::new(vec![0.0, ATTACK_PENALTY])?,
                done: true,
            });
        }
        let mut gathered = 0.0;
        for ((cell, _), taken) in self.resources.iter().zip(&mut self.collected) {
            if *cell == self.position && !*taken {
                *taken = true;
                gathered += 1.0;
            }
        }
        let reward = RewardVector::new(vec![gathered, 0.0])?;
        let done = self.position == self.home || self.steps >= self.step_cap;
        self.active = !done;
        Ok(StepOutcome {
            state_id: self.id_of(&self.state()),
            reward,
            done,
        })
    }
}
