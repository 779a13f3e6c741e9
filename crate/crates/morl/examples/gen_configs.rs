//! Regenerates the shipped experiment configs under `configs/`.
//!
//! Paper-scale configs follow the reference experimental design: the
//! canonical nine-preference walk, 800 episodes per preference, 30 runs,
//! a quarter of the movable objects relocated every 100 episodes, and the
//! conservative learner (alpha 0.1, epsilon 0.1).
//!
//! Desk-scale configs are tuned so the same qualitative contrasts emerge
//! in seconds on one core. Three choices carry that: the walk cycles three
//! times with 250-episode segments, so preferences recur and the
//! steppingstone store is actually reused while the frozen baselines age
//! across the accumulated drift; the learner is faster (alpha 0.3, epsilon
//! 0.2), so policies converge — and transplanted tables un-learn stale
//! routes — inside a short segment; and drift is milder (one object every
//! 350 episodes, off the segment rhythm), so a bootstrapped policy meets a
//! map that still mostly matches the one it was stored under. Forty runs
//! give the between-run comparisons their statistical power.

use morl::env::EnvKind;
use morl::harness::{Algorithm, ExperimentConfig, Mode, PreferenceSchedule};
use morl::Preference;

fn cycled_walk(cycles: usize, episodes_per_preference: usize) -> PreferenceSchedule {
    let preferences = PreferenceSchedule::DEFAULT_FIRST_WEIGHTS
        .iter()
        .cycle()
        .take(PreferenceSchedule::DEFAULT_FIRST_WEIGHTS.len() * cycles)
        .map(|f| Preference::pair(*f).unwrap())
        .collect();
    PreferenceSchedule::new(preferences, episodes_per_preference).unwrap()
}

fn main() {
    std::fs::create_dir_all("configs").unwrap();
    let scales = [("desk", 40usize, 1000u64), ("paper", 30, 2000)];
    let envs = [(EnvKind::Sar, 100u64), (EnvKind::Dst, 200), (EnvKind::Rg, 300)];
    let modes = [(Mode::Stationary, 1u64), (Mode::NonStationary, 2)];
    for (scale, runs, scale_seed) in scales {
        for (env, env_seed) in envs {
            for (mode, mode_seed) in modes {
                let schedule = if scale == "desk" {
                    cycled_walk(3, 250)
                } else {
                    PreferenceSchedule::default_walk(800).unwrap()
                };
                let mut config = ExperimentConfig::new(
                    env,
                    Algorithm::Rpb,
                    mode,
                    runs,
                    schedule,
                    scale_seed + env_seed + mode_seed,
                )
                .unwrap();
                if scale == "desk" {
                    config.learner.alpha = 0.3;
                    config.learner.epsilon = 0.2;
                    config.perturb_period = 350;
                    config.perturb_fraction = 0.1;
                }
                let name = format!("configs/{scale}-{}-{}.json", env.name(), mode.name());
                let mut text = serde_json::to_string_pretty(&config).unwrap();
                text.push('\n');
                std::fs::write(&name, text).unwrap();
                println!("{name}");
            }
        }
    }
}
