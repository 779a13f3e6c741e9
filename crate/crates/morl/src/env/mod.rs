//! Grid-world benchmark environments with vector rewards.
//!
//! Three two-objective worlds share one movement model (four compass moves
//! on a bounded grid, blocked moves keep the agent in place):
//!
//! * **SAR** — search and rescue: reach victims before their individual
//!   deadlines expire while avoiding fire cells; objectives are fire damage
//!   and time.
//! * **DST** — deep sea treasure: dive for treasures of growing value;
//!   objectives are time and treasure value.
//! * **RG** — resource gathering: collect gold and gems and return home past
//!   enemies that attack probabilistically; objectives are collected
//!   resources and enemy damage.
//!
//! Object placements live in JSON layout files rather than code so that
//! experiments can randomize or perturb them ([`perturb`]); the canonical
//! maps ship in `layouts/`. Episode randomness (start cells, victim
//! deadlines, attacks) is derived from `(config.seed, episode_seed)`, so a
//! rollout is replayable from those two numbers alone.

mod dst;
mod rg;
mod sar;

pub use dst::DstEnv;
pub use rg::RgEnv;
pub use sar::SarEnv;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MorlError, Result};
use crate::reward::RewardVector;
use crate::seed;

/// The four compass moves shared by every grid world.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    East,
    West,
    North,
    South,
}

impl Action {
    pub const COUNT: usize = 4;
    pub const ALL: [Action; 4] = [Action::East, Action::West, Action::North, Action::South];

    pub fn index(&self) -> usize {
        match self {
            Action::East => 0,
            Action::West => 1,
            Action::North => 2,
            Action::South => 3,
        }
    }

    pub fn from_index(index: usize) -> Result<Action> {
        Action::ALL
            .get(index)
            .copied()
            .ok_or_else(|| MorlError::Contract(format!("action index {index} out of range")))
    }
}

/// A cell on the grid; `y` grows downward, `x` to the east.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridPosition {
    pub x: usize,
    pub y: usize,
}

impl GridPosition {
    pub fn new(x: usize, y: usize) -> Self {
        GridPosition { x, y }
    }

    /// The neighbouring cell in the given direction, or `None` off-grid.
    pub fn moved(&self, action: Action, width: usize, height: usize) -> Option<GridPosition> {
        let (x, y) = (self.x, self.y);
        let target = match action {
            Action::East => (x + 1 < width).then(|| GridPosition::new(x + 1, y)),
            Action::West => (x > 0).then(|| GridPosition::new(x - 1, y)),
            Action::North => (y > 0).then(|| GridPosition::new(x, y - 1)),
            Action::South => (y + 1 < height).then(|| GridPosition::new(x, y + 1)),
        };
        target
    }

    fn cell_index(&self, width: usize) -> usize {
        self.y * width + self.x
    }
}

/// Which benchmark world a layout describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    Sar,
    Dst,
    Rg,
}

impl EnvKind {
    pub fn name(&self) -> &'static str {
        match self {
            EnvKind::Sar => "sar",
            EnvKind::Dst => "dst",
            EnvKind::Rg => "rg",
        }
    }

    /// Hard per-episode step limit; episodes are cut (as terminal) there.
    pub fn step_cap(&self) -> u32 {
        match self {
            EnvKind::Sar => 500,
            EnvKind::Dst => 200,
            EnvKind::Rg => 100,
        }
    }

    /// Default significance threshold used by bootstrapping on this world.
    pub fn default_phi(&self) -> f64 {
        match self {
            EnvKind::Sar => 0.25,
            EnvKind::Dst => 0.15,
            EnvKind::Rg => 0.15,
        }
    }
}

impl std::str::FromStr for EnvKind {
    type Err = MorlError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sar" => Ok(EnvKind::Sar),
            "dst" => Ok(EnvKind::Dst),
            "rg" => Ok(EnvKind::Rg),
            other => Err(MorlError::Config(format!("unknown environment '{other}'"))),
        }
    }
}

/// Kinds of placeable map objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectKind {
    Fire,
    Obstacle,
    Victim,
    Treasure,
    Gold,
    Gem,
    Enemy,
    Home,
}

/// One placed object in a layout file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    #[serde(rename = "type")]
    pub kind: ObjectKind,
    pub x: usize,
    pub y: usize,
    /// Treasure value; only treasures carry one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl ObjectSpec {
    pub fn position(&self) -> GridPosition {
        GridPosition::new(self.x, self.y)
    }
}

/// A complete map description, as stored in `layouts/*.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layout {
    pub kind: EnvKind,
    pub width: usize,
    pub height: usize,
    pub objects: Vec<ObjectSpec>,
    /// Inclusive step-count bounds for victim deadlines (SAR). `None` makes
    /// victims immortal, which is useful for deterministic tests.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub victim_death_range: Option<(u32, u32)>,
    /// Chance that entering an enemy cell triggers an attack (RG).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attack_probability: Option<f64>,
}

impl Layout {
    /// The canonical map shipped for a world.
    pub fn shipped(kind: EnvKind) -> Layout {
        let text = match kind {
            EnvKind::Sar => include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../layouts/sar.json")),
            EnvKind::Dst => include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../layouts/dst.json")),
            EnvKind::Rg => include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../layouts/rg.json")),
        };
        let layout: Layout = serde_json::from_str(text).expect("shipped layout parses");
        layout.validate().expect("shipped layout is valid");
        layout
    }

    /// Load and validate a layout from a JSON file.
    pub fn load(path: &std::path::Path) -> Result<Layout> {
        let text = std::fs::read_to_string(path)?;
        let layout: Layout = serde_json::from_str(&text)
            .map_err(|e| MorlError::Config(format!("layout {}: {e}", path.display())))?;
        layout.validate()?;
        Ok(layout)
    }

    /// Check structural invariants: objects in bounds on distinct cells, the
    /// object mix legal for the world kind, and kind-specific fields present
    /// only where they mean something.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(MorlError::Config(msg));
        if self.width < 2 || self.height < 2 {
            return fail(format!("grid must be at least 2x2, got {}x{}", self.width, self.height));
        }
        let mut seen = std::collections::HashSet::new();
        for obj in &self.objects {
            if obj.x >= self.width || obj.y >= self.height {
                return fail(format!("object {:?} at ({}, {}) is off-grid", obj.kind, obj.x, obj.y));
            }
            if !seen.insert((obj.x, obj.y)) {
                return fail(format!("two objects share cell ({}, {})", obj.x, obj.y));
            }
            match obj.kind {
                ObjectKind::Treasure => {
                    if !obj.value.map(|v| v > 0.0 && v.is_finite()).unwrap_or(false) {
                        return fail(format!(
                            "treasure at ({}, {}) needs a positive value",
                            obj.x, obj.y
                        ));
                    }
                }
                _ => {
                    if obj.value.is_some() {
                        return fail(format!("{:?} objects carry no value", obj.kind));
                    }
                }
            }
        }
        let count = |kind: ObjectKind| self.objects.iter().filter(|o| o.kind == kind).count();
        let allowed: &[ObjectKind] = match self.kind {
            EnvKind::Sar => &[ObjectKind::Fire, ObjectKind::Obstacle, ObjectKind::Victim],
            EnvKind::Dst => &[ObjectKind::Treasure],
            EnvKind::Rg => &[ObjectKind::Gold, ObjectKind::Gem, ObjectKind::Enemy, ObjectKind::Home],
        };
        for obj in &self.objects {
            if !allowed.contains(&obj.kind) {
                return fail(format!(
                    "{:?} objects do not belong in a {} layout",
                    obj.kind,
                    self.kind.name()
                ));
            }
        }
        match self.kind {
            EnvKind::Sar => {
                if count(ObjectKind::Victim) == 0 {
                    return fail("a sar layout needs at least one victim".into());
                }
                if let Some((lo, hi)) = self.victim_death_range {
                    if lo == 0 || lo > hi {
                        return fail(format!("bad victim death range [{lo}, {hi}]"));
                    }
                }
                if self.attack_probability.is_some() {
                    return fail("attack_probability applies to rg layouts only".into());
                }
            }
            EnvKind::Dst => {
                if count(ObjectKind::Treasure) == 0 {
                    return fail("a dst layout needs at least one treasure".into());
                }
                if self.victim_death_range.is_some() || self.attack_probability.is_some() {
                    return fail("dst layouts take neither victim nor attack fields".into());
                }
            }
            EnvKind::Rg => {
                if count(ObjectKind::Home) != 1 {
                    return fail("an rg layout needs exactly one home cell".into());
                }
                if let Some(p) = self.attack_probability {
                    if !(0.0..=1.0).contains(&p) {
                        return fail(format!("attack probability {p} outside [0, 1]"));
                    }
                }
                if self.victim_death_range.is_some() {
                    return fail("victim_death_range applies to sar layouts only".into());
                }
            }
        }
        // Both random-start worlds need somewhere to put the agent.
        if self.objects.len() >= self.width * self.height {
            return fail("layout leaves no free cell".into());
        }
        Ok(())
    }

    /// Objects eligible for relocation; the home anchor never moves.
    fn movable_indices(&self) -> Vec<usize> {
        self.objects
            .iter()
            .enumerate()
            .filter(|(_, o)| o.kind != ObjectKind::Home)
            .map(|(i, _)| i)
            .collect()
    }

    /// Order-insensitive fingerprint of the object placement, for audits.
    pub fn placement_hash(&self) -> u64 {
        let mut keys: Vec<u64> = self
            .objects
            .iter()
            .map(|o| {
                let mut h = 0xcbf2_9ce4_8422_2325u64; // FNV-1a
                for byte in [o.kind as u8]
                    .into_iter()
                    .chain((o.x as u32).to_le_bytes())
                    .chain((o.y as u32).to_le_bytes())
                    .chain(o.value.unwrap_or(0.0).to_bits().to_le_bytes())
                {
                    h ^= byte as u64;
                    h = h.wrapping_mul(0x0000_0100_0000_01B3);
                }
                h
            })
            .collect();
        keys.sort_unstable();
        keys.iter().fold(0xcbf2_9ce4_8422_2325u64, |acc, k| {
            acc.rotate_left(5) ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        })
    }
}

/// Everything needed to build an environment: a map plus the seed from which
/// all episode randomness is derived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub layout: Layout,
    pub seed: u64,
}

impl EnvConfig {
    pub fn new(layout: Layout, seed: u64) -> Result<Self> {
        layout.validate()?;
        Ok(EnvConfig { layout, seed })
    }

    /// Canonical map for a world with the given seed.
    pub fn shipped(kind: EnvKind, seed: u64) -> Self {
        EnvConfig {
            layout: Layout::shipped(kind),
            seed,
        }
    }
}

/// Result of one environment step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    /// Dense id of the post-step state (what a tabular learner indexes by).
    pub state_id: usize,
    pub reward: RewardVector,
    pub done: bool,
}

/// A multi-objective episodic environment over dense integer states.
///
/// `reset` starts a new episode whose randomness is fully determined by the
/// seed it is given; `step` advances it and reports a vector reward. Stepping
/// a finished (or never-started) episode is a contract violation.
pub trait MultiObjectiveEnv {
    fn num_states(&self) -> usize;
    fn num_objectives(&self) -> usize;
    fn num_actions(&self) -> usize {
        Action::COUNT
    }
    fn reset(&mut self, episode_seed: u64) -> usize;
    fn step(&mut self, action: Action) -> Result<StepOutcome>;
}

/// Any of the three benchmark worlds, behind one concrete type.
#[derive(Debug, Clone)]
pub enum Env {
    Sar(SarEnv),
    Dst(DstEnv),
    Rg(RgEnv),
}

impl Env {
    pub fn new(config: EnvConfig) -> Result<Env> {
        config.layout.validate()?;
        Ok(match config.layout.kind {
            EnvKind::Sar => Env::Sar(SarEnv::new(config)?),
            EnvKind::Dst => Env::Dst(DstEnv::new(config)?),
            EnvKind::Rg => Env::Rg(RgEnv::new(config)?),
        })
    }

    pub fn kind(&self) -> EnvKind {
        match self {
            Env::Sar(_) => EnvKind::Sar,
            Env::Dst(_) => EnvKind::Dst,
            Env::Rg(_) => EnvKind::Rg,
        }
    }

    pub fn config(&self) -> &EnvConfig {
        match self {
            Env::Sar(e) => e.config(),
            Env::Dst(e) => e.config(),
            Env::Rg(e) => e.config(),
        }
    }
}

impl MultiObjectiveEnv for Env {
    fn num_states(&self) -> usize {
        match self {
            Env::Sar(e) => e.num_states(),
            Env::Dst(e) => e.num_states(),
            Env::Rg(e) => e.num_states(),
        }
    }

    fn num_objectives(&self) -> usize {
        2
    }

    fn reset(&mut self, episode_seed: u64) -> usize {
        match self {
            Env::Sar(e) => e.reset(episode_seed),
            Env::Dst(e) => e.reset(episode_seed),
            Env::Rg(e) => e.reset(episode_seed),
        }
    }

    fn step(&mut self, action: Action) -> Result<StepOutcome> {
        match self {
            Env::Sar(e) => e.step(action),
            Env::Dst(e) => e.step(action),
            Env::Rg(e) => e.step(action),
        }
    }
}

/// Relocate `floor(fraction * movable objects)` uniformly chosen objects to
/// uniformly chosen free cells, returning the modified configuration.
///
/// Home anchors never move, object counts per kind are preserved, no two
/// objects end up stacked, and a selected object always actually changes
/// cell. Deterministic in `perturb_seed`.
pub fn perturb(config: &EnvConfig, fraction: f64, perturb_seed: u64) -> Result<EnvConfig> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(MorlError::Config(format!(
            "perturbation fraction {fraction} outside [0, 1]"
        )));
    }
    let mut layout = config.layout.clone();
    let movable = layout.movable_indices();
    let relocations = (fraction * movable.len() as f64).floor() as usize;
    if relocations == 0 {
        return Ok(config.clone());
    }
    let mut rng = seed::rng(perturb_seed, 0x5045_5254);

    // Partial Fisher-Yates: the first `relocations` slots are the chosen set.
    let mut pool = movable;
    for i in 0..relocations {
        let j = rng.random_range(i..pool.len());
        pool.swap(i, j);
    }

    for &obj_index in pool.iter().take(relocations) {
        let occupied: std::collections::HashSet<(usize, usize)> =
            layout.objects.iter().map(|o| (o.x, o.y)).collect();
        // Excluding every occupied cell (the object's own included) forces a
        // genuine move.
        let free: Vec<(usize, usize)> = (0..layout.height)
            .flat_map(|y| (0..layout.width).map(move |x| (x, y)))
            .filter(|cell| !occupied.contains(cell))
            .collect();
        if free.is_empty() {
            return Err(MorlError::Config(
                "no free cell available for relocation".into(),
            ));
        }
        let (x, y) = free[rng.random_range(0..free.len())];
        layout.objects[obj_index].x = x;
        layout.objects[obj_index].y = y;
    }
    layout.validate()?;
    Ok(EnvConfig {
        layout,
        seed: config.seed,
    })
}
