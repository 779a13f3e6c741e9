//! Acceptance gate: eight numbered criteria covering the formula layer, the
//! learner, the bootstrapping algorithm, the environments, the qualitative
//! experiment orderings at desk scale, the threshold sweep, and byte-level
//! determinism. Each criterion is one test that prints a `[criterion N]
//! PASS` line; failures panic with a matching `FAIL` message. Tests
//! serialize on one lock so the wall-clock bounds asserted for the cheap
//! criteria are not distorted by the heavyweight ones.

mod common;

use std::path::{Path, PathBuf};
use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::Instant;

use common::DagMdp;
use morl::env::{
    perturb, Action, DstEnv, Env, EnvConfig, EnvKind, GridPosition, Layout, MultiObjectiveEnv,
    ObjectKind, RgEnv, SarEnv,
};
use morl::harness::report::{build_summary, render_results_csv, summarize_phi_sweep};
use morl::harness::stats::{mean, welch_t_test};
use morl::harness::{
    compute_metrics, default_phi_grid, per_run_gamma_c, per_run_loss, run_experiment, sweep_phi,
    train_offline, Algorithm, ExperimentConfig, Mode, PreferenceSchedule,
};
use morl::learner::{run_episode, run_episodes, LearnerParams, TabularPolicy};
use morl::plot::render_plots;
use morl::rpb::{
    BootstrapSource, CandidateDisposition, CcsStore, PreferenceChangeOutcome, RpbAgent, RpbParams,
    SteppingstoneEntry, StorageOutcome,
};
use morl::seed;
use morl::{
    preference_distance, robustness, DistanceKind, Preference, RewardHistory, RobustnessKind,
};

/// One criterion at a time: the cheap criteria assert hard wall-clock
/// bounds, which must not absorb another criterion's compute.
fn exclusive() -> MutexGuard<'static, ()> {
    static LOCK: OnceLock<Mutex<()>> = OnceLock::new();
    LOCK.get_or_init(|| Mutex::new(()))
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn desk_config(name: &str) -> ExperimentConfig {
    let path = configs_dir().join(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    let config: ExperimentConfig = serde_json::from_str(&text)
        .unwrap_or_else(|e| panic!("cannot parse {}: {e}", path.display()));
    config.validate().expect("shipped config is valid");
    config
}

fn with_algorithm(base: &ExperimentConfig, algorithm: Algorithm) -> ExperimentConfig {
    let mut config = base.clone();
    config.algorithm = algorithm;
    config
}

fn history_of(values: &[f64]) -> RewardHistory {
    let mut h = RewardHistory::new(values.len().max(2)).unwrap();
    for v in values {
        h.push(*v);
    }
    h
}

fn pair(first: f64) -> Preference {
    Preference::pair(first).unwrap()
}

// --------------------------------------------------------------------------
// Criterion 1: every robustness metric and every distance function
// reproduces hand-computed values on fixed inputs, at tolerance 1e-9.
// --------------------------------------------------------------------------

#[test]
fn criterion_1_formulas_reproduce_hand_computed_values() {
    let _guard = exclusive();
    let t0 = Instant::now();
    const TOL: f64 = 1e-9;
    let check = |name: &str, got: f64, want: f64| {
        assert!(
            (got - want).abs() < TOL,
            "[criterion 1] FAIL — {name}: got {got}, hand value {want}"
        );
    };

    // Distances between P1 = [0.66, 0.34] and P2 = [0.33, 0.67]: both first
    // weights move by 0.33, so Euclidean is sqrt(2)*0.33 and Manhattan is
    // 2*0.33; every component differs, so Hamming counts 2.
    let p1 = Preference::new(vec![0.66, 0.34]).unwrap();
    let p2 = Preference::new(vec![0.33, 0.67]).unwrap();
    check(
        "euclidean(P1, P2)",
        preference_distance(&p1, &p2, DistanceKind::Euclidean).unwrap(),
        0.4666904755831214,
    );
    check(
        "manhattan(P1, P2)",
        preference_distance(&p1, &p2, DistanceKind::Manhattan).unwrap(),
        0.66,
    );
    check(
        "hamming(P1, P2)",
        preference_distance(&p1, &p2, DistanceKind::Hamming).unwrap(),
        2.0,
    );
    check(
        "hamming(P1, P1)",
        preference_distance(&p1, &p1, DistanceKind::Hamming).unwrap(),
        0.0,
    );
    // Cosine: similarity of [1, 0] and [0.5, 0.5] is 0.5 / sqrt(0.5), so the
    // distance is 1 - sqrt(1/2).
    check(
        "cosine([1,0], [.5,.5])",
        preference_distance(&pair(1.0), &pair(0.5), DistanceKind::Cosine).unwrap(),
        1.0 - 0.5_f64.sqrt(),
    );

    // Robustness metrics; sigma is the population standard deviation and the
    // epsilon guard 1e-9 appears in each denominator.
    // [2, 4, 2, 4]: mean 3, sigma 1.
    check(
        "stability of [2,4,2,4]",
        robustness(&history_of(&[2.0, 4.0, 2.0, 4.0]), RobustnessKind::Stability, None).unwrap(),
        3.0 / (1.0 + 1e-9),
    );
    // [1, 5, 1, 5]: mean 3, variance 4, sigma 2 — variance and sigma differ,
    // so this input tells the two ratio metrics apart.
    check(
        "index of dispersion of [1,5,1,5]",
        robustness(
            &history_of(&[1.0, 5.0, 1.0, 5.0]),
            RobustnessKind::IndexOfDispersion,
            None,
        )
        .unwrap(),
        -(4.0 / (3.0 + 1e-9)),
    );
    check(
        "coefficient of variation of [1,5,1,5]",
        robustness(
            &history_of(&[1.0, 5.0, 1.0, 5.0]),
            RobustnessKind::CoefficientOfVariation,
            None,
        )
        .unwrap(),
        -(2.0 / (3.0 + 1e-9)),
    );
    // Entropy over ten equal-width bins spanning [2, 4]: the values split
    // into two half-full bins, one bit, negated.
    check(
        "entropy score of [2,4,2,4]",
        robustness(&history_of(&[2.0, 4.0, 2.0, 4.0]), RobustnessKind::Entropy, None).unwrap(),
        -1.0,
    );
    check(
        "entropy score of a constant history",
        robustness(&history_of(&[3.0, 3.0]), RobustnessKind::Entropy, None).unwrap(),
        0.0,
    );
    // Regret against a reference mean of 5: mean([2, 4]) = 3, shortfall 2.
    check(
        "regret of [2,4] against 5",
        robustness(&history_of(&[2.0, 4.0]), RobustnessKind::Regret, Some(5.0)).unwrap(),
        -2.0,
    );
    // Constant histories hit the epsilon guard: 5 / 1e-9...
    check(
        "stability of a constant history",
        robustness(&history_of(&[5.0, 5.0, 5.0]), RobustnessKind::Stability, None).unwrap(),
        5.0 / 1e-9,
    );
    // ...and extreme ratios are capped at +/-1e12.
    check(
        "stability cap",
        robustness(&history_of(&[1.0e6, 1.0e6]), RobustnessKind::Stability, None).unwrap(),
        1e12,
    );
    check(
        "stability cap (negative)",
        robustness(&history_of(&[-1.0e6, -1.0e6]), RobustnessKind::Stability, None).unwrap(),
        -1e12,
    );

    let elapsed = t0.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "[criterion 1] FAIL — took {elapsed:.2?}, budget 1 s"
    );
    println!(
        "[criterion 1] PASS — all distance and robustness formulas match hand values at 1e-9 ({elapsed:.2?})"
    );
}

// --------------------------------------------------------------------------
// Criterion 2: on three seeded deterministic MDPs (16 states each), greedy
// actions from the learned table match exact backward-induction planning in
// every non-terminal state after 2,000 episodes (gamma 0.9, alpha 0.1,
// epsilon 0.1 during training, greedy evaluation).
// --------------------------------------------------------------------------

// Chosen so each world's smallest action-value gap is wide (0.29, 0.36,
// 0.60): a near-tie would make the greedy-vs-planning comparison fragile.
const PINNED_WORLDS: [u64; 3] = [4, 6, 22];

#[test]
fn criterion_2_learner_matches_exact_planning_on_seeded_worlds() {
    let _guard = exclusive();
    let t0 = Instant::now();
    let pref = Preference::new(vec![0.6, 0.4]).unwrap();
    for world_seed in PINNED_WORLDS {
        let mut world = DagMdp::new(world_seed);
        let (optimal, min_gap) = world.optimal_actions(&pref, 0.9);
        // A meaningful comparison needs a clear best action everywhere; the
        // pinned seeds were chosen for that and this guards the choice.
        assert!(
            min_gap > 0.05,
            "[criterion 2] FAIL — world {world_seed} has action-value gap {min_gap}; \
             too close to a tie for a stable check"
        );
        // Optimistic initialization: per-step rewards stay within [-2, 2], so
        // no action value can reach 4. Starting every estimate at 4 makes the
        // greedy rule itself try both actions in every state until their
        // estimates decay to reality — with epsilon at 0.1 alone, an action
        // whose true value is high but whose estimate starts low can be
        // starved of updates inside the episode budget.
        let table = vec![4.0; world.num_states() * world.num_actions()];
        let mut policy =
            TabularPolicy::from_values(world.num_states(), world.num_actions(), table).unwrap();
        let params = LearnerParams {
            alpha: 0.1,
            gamma: 0.9,
            epsilon: 0.1,
            episodes: 2000,
        };
        let mut rng = seed::rng(world_seed, 0x4C52_4E31);
        run_episodes(&mut world, &mut policy, &pref, &params, &mut rng).unwrap();
        for state in 0..world.non_terminal_states() {
            assert_eq!(
                policy.greedy_action(state),
                optimal[state],
                "[criterion 2] FAIL — world {world_seed}, state {state}: greedy action \
                 disagrees with exact planning"
            );
        }
    }
    let elapsed = t0.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "[criterion 2] FAIL — took {elapsed:.2?}, budget 10 s"
    );
    println!(
        "[criterion 2] PASS — greedy policy matches exact planning on {} seeded worlds ({elapsed:.2?})",
        PINNED_WORLDS.len()
    );
}

// --------------------------------------------------------------------------
// Criterion 3: the preference-change procedure — insignificant changes leave
// the store, history, and policy untouched; stored entries stay pairwise
// separated by more than phi; only strictly more robust candidates replace;
// retrieval returns the nearest entry with ties to the earliest; and with a
// threshold wider than any possible change the whole algorithm degenerates
// to plain scalarized Q-learning, bit for bit.
// --------------------------------------------------------------------------

#[test]
fn criterion_3_preference_change_replay_suite() {
    let _guard = exclusive();
    let t0 = Instant::now();
    gating_keeps_everything();
    stored_entries_stay_separated();
    replacement_is_strict_and_retrieval_nearest_earliest();
    short_history_skips_storage_and_falls_back_fresh();
    wide_threshold_degenerates_to_plain_q_learning();
    let elapsed = t0.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "[criterion 3] FAIL — took {elapsed:.2?}, budget 5 s"
    );
    println!(
        "[criterion 3] PASS — gating, separation, strict replacement, nearest retrieval, \
         and wide-threshold degeneration all hold ({elapsed:.2?})"
    );
}

fn agent_params(phi: f64) -> RpbParams {
    RpbParams {
        phi,
        distance: DistanceKind::Euclidean,
        robustness: RobustnessKind::Stability,
        history_window: 50,
    }
}

fn per_episode() -> LearnerParams {
    LearnerParams {
        alpha: 0.1,
        gamma: 0.9,
        epsilon: 0.1,
        episodes: 1,
    }
}

fn gating_keeps_everything() {
    let mut agent = RpbAgent::new(16, 2, pair(0.8), agent_params(0.15)).unwrap();
    let mut world = DagMdp::new(3);
    let mut rng = seed::rng(90, 1);
    for episode in 0..5 {
        agent
            .run_episode(&mut world, &per_episode(), &mut rng, episode)
            .unwrap();
    }
    let policy_before = agent.policy().values().to_vec();
    let history_before = agent.history().len();
    assert!(history_before >= 2, "setup: history should have samples");

    // 0.8 -> 0.75 moves the first weight by 0.05: Euclidean distance
    // sqrt(2)*0.05 ~ 0.0707, inside phi = 0.15.
    let outcome = agent.on_preference_change(pair(0.75)).unwrap();
    match outcome {
        PreferenceChangeOutcome::Insignificant { distance } => {
            assert!(
                (distance - 2.0_f64.sqrt() * 0.05).abs() < 1e-12,
                "[criterion 3] FAIL — reported gate distance {distance} is wrong"
            );
        }
        other => panic!("[criterion 3] FAIL — sub-threshold change classified as {other:?}"),
    }
    assert!(
        agent.store().is_empty(),
        "[criterion 3] FAIL — sub-threshold change altered the policy store"
    );
    assert_eq!(
        agent.history().len(),
        history_before,
        "[criterion 3] FAIL — sub-threshold change cleared the return history"
    );
    assert_eq!(
        agent.policy().values(),
        policy_before.as_slice(),
        "[criterion 3] FAIL — sub-threshold change touched the policy table"
    );
    assert_eq!(
        agent.preference(),
        &pair(0.75),
        "[criterion 3] FAIL — the active preference should still be relabeled"
    );
}

fn stored_entries_stay_separated() {
    let phi = 0.12;
    let mut agent = RpbAgent::new(16, 2, pair(0.9), agent_params(phi)).unwrap();
    let mut world = DagMdp::new(3);
    let mut rng = seed::rng(91, 1);
    let walk = [0.9, 0.7, 0.5, 0.3];
    for (leg, &first) in walk.iter().enumerate() {
        if leg > 0 {
            let outcome = agent.on_preference_change(pair(first)).unwrap();
            let PreferenceChangeOutcome::Significant { stored, bootstrap, .. } = outcome else {
                panic!("[criterion 3] FAIL — walk leg {leg} should exceed phi");
            };
            assert!(
                matches!(
                    stored,
                    CandidateDisposition::Stored(StorageOutcome::Appended { .. })
                ),
                "[criterion 3] FAIL — each walk leg is far from every stored entry, \
                 so the outgoing policy should append; got {stored:?}"
            );
            // Retrieval happens over the just-updated store, so the first
            // significant change already finds the entry it just stored.
            match bootstrap {
                BootstrapSource::Steppingstone { preference, .. } => {
                    assert_eq!(
                        preference,
                        pair(walk[leg - 1]),
                        "[criterion 3] FAIL — nearest stored entry to leg {leg} should be \
                         the outgoing preference"
                    );
                }
                BootstrapSource::Fresh => {
                    panic!("[criterion 3] FAIL — store is never empty at retrieval here")
                }
            }
        }
        for episode in 0..3 {
            agent
                .run_episode(&mut world, &per_episode(), &mut rng, (leg * 10 + episode) as u64)
                .unwrap();
        }
    }
    let entries = agent.store().entries();
    assert_eq!(
        entries.len(),
        3,
        "[criterion 3] FAIL — three outgoing policies should be stored, got {}",
        entries.len()
    );
    for i in 0..entries.len() {
        for j in (i + 1)..entries.len() {
            let d = preference_distance(
                &entries[i].preference,
                &entries[j].preference,
                DistanceKind::Euclidean,
            )
            .unwrap();
            assert!(
                d > phi,
                "[criterion 3] FAIL — stored entries {i} and {j} sit {d} apart, \
                 inside phi = {phi}"
            );
        }
    }
}

fn tagged_entry(first: f64, beta: f64, tag: f64) -> SteppingstoneEntry {
    let mut policy = TabularPolicy::zeros(2, 2).unwrap();
    policy.update(0, 0, tag, 0, true, 1.0, 0.9).unwrap();
    SteppingstoneEntry {
        preference: pair(first),
        policy,
        robustness: beta,
    }
}

fn replacement_is_strict_and_retrieval_nearest_earliest() {
    let mut store = CcsStore::new(0.12, DistanceKind::Euclidean).unwrap();
    for (first, beta) in [(0.9, 1.0), (0.5, 2.0), (0.2, 1.5)] {
        let outcome = store
            .store_or_replace(tagged_entry(first, beta, first * 100.0))
            .unwrap();
        assert!(
            matches!(outcome, StorageOutcome::Appended { .. }),
            "[criterion 3] FAIL — mutually distant candidates should append"
        );
    }

    // Nearest retrieval: 0.55 is 0.05 from the 0.5 entry and 0.35 from both
    // others.
    let nearest = store.retrieve_nearest(&pair(0.55)).unwrap();
    assert_eq!(
        nearest.preference,
        pair(0.5),
        "[criterion 3] FAIL — retrieval should return the nearest stored entry"
    );

    // An equally robust candidate within phi of the 0.5 entry must not
    // displace it.
    let kept = store
        .store_or_replace(tagged_entry(0.52, 2.0, 999.0))
        .unwrap();
    assert_eq!(
        kept,
        StorageOutcome::KeptExisting { index: 1 },
        "[criterion 3] FAIL — a candidate that is not strictly more robust must be dropped"
    );
    assert_eq!(store.entries()[1].preference, pair(0.5));
    assert_eq!(store.entries()[1].robustness, 2.0);

    // A strictly more robust candidate takes the slot over whole: preference,
    // policy, and robustness all become the candidate's.
    let replaced = store
        .store_or_replace(tagged_entry(0.48, 2.5, 48.0))
        .unwrap();
    assert_eq!(
        replaced,
        StorageOutcome::Replaced { index: 1 },
        "[criterion 3] FAIL — a strictly more robust candidate must replace"
    );
    assert_eq!(store.entries()[1].preference, pair(0.48));
    assert_eq!(store.entries()[1].robustness, 2.5);
    assert_eq!(
        store.entries()[1].policy.q(0, 0),
        48.0,
        "[criterion 3] FAIL — replacement must install the candidate's policy table"
    );
    assert_eq!(store.len(), 3, "[criterion 3] FAIL — replacement must not grow the store");

    // Exact tie in retrieval distance goes to the earliest stored entry:
    // 0.25 and 0.75 are both exactly 0.25 away from 0.5 in the first weight.
    let mut tie_store = CcsStore::new(0.5, DistanceKind::Euclidean).unwrap();
    tie_store
        .store_or_replace(tagged_entry(0.25, 1.0, 25.0))
        .unwrap();
    tie_store
        .store_or_replace(tagged_entry(0.75, 1.0, 75.0))
        .unwrap();
    assert_eq!(tie_store.len(), 2, "setup: both tie candidates should append");
    let tied = tie_store.retrieve_nearest(&pair(0.5)).unwrap();
    assert_eq!(
        tied.preference,
        pair(0.25),
        "[criterion 3] FAIL — distance ties must resolve to the earliest stored entry"
    );
    assert_eq!(
        tie_store.find_steppingstone_for(&pair(0.5)).unwrap(),
        Some(0),
        "[criterion 3] FAIL — the in-threshold lookup must share the tie rule"
    );
}

fn short_history_skips_storage_and_falls_back_fresh() {
    let mut agent = RpbAgent::new(16, 2, pair(0.9), agent_params(0.12)).unwrap();
    let mut world = DagMdp::new(3);
    let mut rng = seed::rng(92, 1);
    // One episode only: not enough samples for a robustness score.
    agent
        .run_episode(&mut world, &per_episode(), &mut rng, 0)
        .unwrap();
    let outcome = agent.on_preference_change(pair(0.3)).unwrap();
    let PreferenceChangeOutcome::Significant { stored, bootstrap, .. } = outcome else {
        panic!("[criterion 3] FAIL — 0.9 -> 0.3 is far beyond phi");
    };
    assert_eq!(
        stored,
        CandidateDisposition::SkippedShortHistory,
        "[criterion 3] FAIL — a policy with fewer than two logged returns must not be stored"
    );
    assert_eq!(
        bootstrap,
        BootstrapSource::Fresh,
        "[criterion 3] FAIL — with an empty store the next policy starts from zero"
    );
    assert!(
        agent.policy().values().iter().all(|q| *q == 0.0),
        "[criterion 3] FAIL — the fresh policy should be a zero table"
    );
    assert!(
        agent.history().is_empty(),
        "[criterion 3] FAIL — a significant change clears the return history"
    );
}

fn wide_threshold_degenerates_to_plain_q_learning() {
    // No two preferences on the two-objective simplex are more than sqrt(2)
    // apart, so phi = 1.5 makes every change insignificant: the agent should
    // behave exactly like one continuously trained scalarized Q-learner.
    let mut config = ExperimentConfig::new(
        EnvKind::Dst,
        Algorithm::Rpb,
        Mode::Stationary,
        2,
        PreferenceSchedule::default_walk(12).unwrap(),
        4242,
    )
    .unwrap();
    config.rpb.phi = Some(1.5);
    let output = run_experiment(&config, None).unwrap();

    let episodes_per_preference = config.schedule.episodes_per_preference;
    for run in 0..config.runs {
        let mut env = Env::new(config.initial_env_config(run).unwrap()).unwrap();
        let mut rng = config.algorithm_rng(run);
        let mut policy = TabularPolicy::zeros(env.num_states(), env.num_actions()).unwrap();
        let mut expected = Vec::with_capacity(config.schedule.total_episodes());
        for global in 0..config.schedule.total_episodes() {
            let pref = &config.schedule.preferences[global / episodes_per_preference];
            let outcome = run_episode(
                &mut env,
                &mut policy,
                pref,
                &per_episode(),
                &mut rng,
                config.episode_seed(run, global),
            )
            .unwrap();
            expected.push(outcome.scalarized);
        }

        let got: Vec<f64> = output
            .records
            .iter()
            .filter(|r| r.run == run)
            .map(|r| r.scalarized_return)
            .collect();
        assert_eq!(got.len(), expected.len(), "setup: episode counts must agree");
        for (episode, (g, e)) in got.iter().zip(&expected).enumerate() {
            assert_eq!(
                g.to_bits(),
                e.to_bits(),
                "[criterion 3] FAIL — run {run} episode {episode}: a threshold wider than \
                 any possible change must reproduce plain Q-learning bit for bit \
                 ({g} vs {e})"
            );
        }
        assert!(
            output.final_stores[run].is_empty(),
            "[criterion 3] FAIL — nothing may be stored when every change gates as \
             insignificant"
        );
    }
}

// --------------------------------------------------------------------------
// Criterion 4: environment conformance — reward constants, off-grid no-ops,
// the seeded attack frequency, and the exact perturbation count.
// --------------------------------------------------------------------------

#[test]
fn criterion_4_environment_conformance() {
    let _guard = exclusive();
    let t0 = Instant::now();
    sar_rewards_and_dst_edges();
    rg_attack_frequency();
    perturb_moves_exactly_a_quarter();
    let elapsed = t0.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "[criterion 4] FAIL — took {elapsed:.2?}, budget 10 s"
    );
    println!(
        "[criterion 4] PASS — reward constants, edge no-ops, attack rate, and \
         perturbation counts all conform ({elapsed:.2?})"
    );
}

fn sar_rewards_and_dst_edges() {
    // A 3x3 rescue map with a fire cell east of the corner and an immortal
    // victim: rewards are [fire damage, time].
    let layout: Layout = serde_json::from_str(
        r#"{
            "kind": "sar", "width": 3, "height": 3,
            "objects": [
                {"type": "fire", "x": 1, "y": 0},
                {"type": "obstacle", "x": 1, "y": 1},
                {"type": "victim", "x": 2, "y": 2}
            ]
        }"#,
    )
    .unwrap();
    let mut sar = SarEnv::new(EnvConfig::new(layout, 5).unwrap()).unwrap();
    let start = GridPosition::new(0, 0);
    let mut started = false;
    for episode_seed in 0..10_000 {
        sar.reset(episode_seed);
        if sar.state().position == start {
            started = true;
            break;
        }
    }
    assert!(started, "[criterion 4] FAIL — no episode seed starts the rescue map at (0,0)");
    let onto_fire = sar.step(Action::East).unwrap();
    assert_eq!(
        onto_fire.reward.components(),
        &[-5.0, -1.0],
        "[criterion 4] FAIL — stepping onto fire must cost [-5, -1]"
    );
    for episode_seed in 0..10_000 {
        sar.reset(episode_seed);
        if sar.state().position == start {
            break;
        }
    }
    let plain_move = sar.step(Action::South).unwrap();
    assert_eq!(
        plain_move.reward.components(),
        &[0.0, -1.0],
        "[criterion 4] FAIL — a plain move must cost only the time objective"
    );

    // Diving map: off-grid moves are no-ops that still cost the step.
    let mut dst = DstEnv::new(EnvConfig::shipped(EnvKind::Dst, 5)).unwrap();
    let surface = GridPosition::new(0, 0);
    let mut at_surface = false;
    for episode_seed in 0..20_000 {
        dst.reset(episode_seed);
        if dst.position() == surface {
            at_surface = true;
            break;
        }
    }
    assert!(at_surface, "[criterion 4] FAIL — no episode seed starts the diving map at (0,0)");
    let off_grid = dst.step(Action::North).unwrap();
    assert_eq!(
        dst.position(),
        surface,
        "[criterion 4] FAIL — an off-grid move must leave the position unchanged"
    );
    assert_eq!(
        off_grid.reward.components(),
        &[-1.0, 0.0],
        "[criterion 4] FAIL — an off-grid move still costs [-1, 0]"
    );
    assert!(!off_grid.done, "[criterion 4] FAIL — an off-grid no-op must not end the episode");
}

fn rg_attack_frequency() {
    // Home in the corner with an enemy cell right next to it: every episode
    // enters the enemy cell on its first step, so the attack indicator is
    // sampled exactly once per episode.
    let layout: Layout = serde_json::from_str(
        r#"{
            "kind": "rg", "width": 5, "height": 5,
            "objects": [
                {"type": "home", "x": 0, "y": 0},
                {"type": "enemy", "x": 1, "y": 0},
                {"type": "gold", "x": 3, "y": 3},
                {"type": "gem", "x": 4, "y": 4}
            ],
            "attack_probability": 0.1
        }"#,
    )
    .unwrap();
    let mut rg = RgEnv::new(EnvConfig::new(layout, 12345).unwrap()).unwrap();
    let trials = 10_000u32;
    let mut attacks = 0u32;
    for episode_seed in 0..u64::from(trials) {
        rg.reset(episode_seed);
        let outcome = rg.step(Action::East).unwrap();
        let attacked = outcome.done && outcome.reward.components()[1] == -1.0;
        if attacked {
            attacks += 1;
        } else {
            assert_eq!(
                outcome.reward.components(),
                &[0.0, 0.0],
                "[criterion 4] FAIL — surviving an enemy cell with no pickup pays nothing"
            );
        }
    }
    let rate = f64::from(attacks) / f64::from(trials);
    assert!(
        (0.09..=0.11).contains(&rate),
        "[criterion 4] FAIL — attack rate over {trials} enemy-cell entries is {rate}, \
         outside [0.09, 0.11]"
    );
}

fn perturb_moves_exactly_a_quarter() {
    for (kind, perturb_seed) in [(EnvKind::Sar, 991u64), (EnvKind::Dst, 992), (EnvKind::Rg, 993)] {
        let base = EnvConfig::shipped(kind, 7);
        let movable = base
            .layout
            .objects
            .iter()
            .filter(|o| o.kind != ObjectKind::Home)
            .count();
        let expected = (0.25 * movable as f64).floor() as usize;
        let shaken = perturb(&base, 0.25, perturb_seed).unwrap();
        assert_eq!(
            shaken.layout.objects.len(),
            base.layout.objects.len(),
            "[criterion 4] FAIL — perturbation must preserve the object count"
        );
        let moved = base
            .layout
            .objects
            .iter()
            .zip(&shaken.layout.objects)
            .filter(|(a, b)| a.position() != b.position())
            .count();
        assert_eq!(
            moved,
            expected,
            "[criterion 4] FAIL — perturbing the {} map at 25% moved {moved} of {movable} \
             movable objects, expected exactly {expected}",
            kind.name()
        );
        assert!(
            base.layout
                .objects
                .iter()
                .zip(&shaken.layout.objects)
                .all(|(a, b)| a.kind == b.kind && a.value == b.value),
            "[criterion 4] FAIL — perturbation must only relocate, never retype, objects"
        );
    }
}

// --------------------------------------------------------------------------
// Criterion 5: stationary ordering at desk scale on the diving world — the
// bootstrapping learner converges significantly higher than restart-from-
// scratch Q-learning, and lands within 10% of the frozen-coverage-set
// baseline's converged return.
// --------------------------------------------------------------------------

#[test]
fn criterion_5_stationary_ordering_at_desk_scale() {
    let _guard = exclusive();
    let t0 = Instant::now();
    let config = desk_config("desk-dst-stationary.json");
    assert_eq!(config.algorithm, Algorithm::Rpb, "shipped config drives the bootstrapper");

    let rpb_gamma = per_run_gamma_for(&config, None);
    let sql_gamma = per_run_gamma_for(&with_algorithm(&config, Algorithm::Sql), None);
    let ols_config = with_algorithm(&config, Algorithm::Ols);
    let ols_sets = train_offline(&ols_config, Algorithm::Ols).unwrap();
    let ols_gamma = per_run_gamma_for(&ols_config, Some(&ols_sets));

    let rpb_mean = mean(&rpb_gamma).unwrap();
    let sql_mean = mean(&sql_gamma).unwrap();
    let ols_mean = mean(&ols_gamma).unwrap();
    let welch = welch_t_test(&rpb_gamma, &sql_gamma).unwrap();
    assert!(
        rpb_mean > sql_mean && welch.p < 0.05,
        "[criterion 5] FAIL — bootstrapped converged return {rpb_mean:.4} vs \
         restart-from-scratch {sql_mean:.4}, Welch p = {:.4} (need higher mean at p < 0.05)",
        welch.p
    );
    let gap = (rpb_mean - ols_mean).abs();
    assert!(
        gap <= 0.10 * ols_mean.abs(),
        "[criterion 5] FAIL — converged return {rpb_mean:.4} differs from the frozen \
         coverage-set baseline {ols_mean:.4} by {gap:.4}, more than 10%"
    );
    let elapsed = t0.elapsed();
    println!(
        "[criterion 5] PASS — converged returns rpb {rpb_mean:.3} > sql {sql_mean:.3} \
         (Welch p = {:.2e}) and within 10% of ols {ols_mean:.3} ({elapsed:.2?})",
        welch.p
    );
}

fn per_run_gamma_for(
    config: &ExperimentConfig,
    frozen: Option<&[morl::baselines::CoverageSet]>,
) -> Vec<f64> {
    let output = run_experiment(config, frozen).unwrap();
    let metrics = compute_metrics(&output.records, &config.schedule).unwrap();
    per_run_gamma_c(&metrics, config.runs).unwrap()
}

// --------------------------------------------------------------------------
// Criterion 6: non-stationary ordering at desk scale — with the map
// reshuffled every 100 episodes, the bootstrapping learner beats all three
// baselines on converged return (Welch p < 0.05 each) and loses less than
// restart-from-scratch Q-learning across preference changes.
// --------------------------------------------------------------------------

#[test]
fn criterion_6_nonstationary_ordering_at_desk_scale() {
    let _guard = exclusive();
    let t0 = Instant::now();
    let config = desk_config("desk-dst-nonstationary.json");
    assert_eq!(config.mode, Mode::NonStationary);

    let rpb_output = run_experiment(&config, None).unwrap();
    let rpb_metrics = compute_metrics(&rpb_output.records, &config.schedule).unwrap();
    let rpb_gamma = per_run_gamma_c(&rpb_metrics, config.runs).unwrap();
    let rpb_mean = mean(&rpb_gamma).unwrap();

    let sql_config = with_algorithm(&config, Algorithm::Sql);
    let sql_output = run_experiment(&sql_config, None).unwrap();
    let sql_metrics = compute_metrics(&sql_output.records, &config.schedule).unwrap();
    let sql_gamma = per_run_gamma_c(&sql_metrics, config.runs).unwrap();

    let ols_config = with_algorithm(&config, Algorithm::Ols);
    let ols_sets = train_offline(&ols_config, Algorithm::Ols).unwrap();
    let ols_gamma = per_run_gamma_for(&ols_config, Some(&ols_sets));

    let tlo_config = with_algorithm(&config, Algorithm::Tlo);
    let tlo_sets = train_offline(&tlo_config, Algorithm::Tlo).unwrap();
    let tlo_gamma = per_run_gamma_for(&tlo_config, Some(&tlo_sets));

    let mut beaten = Vec::new();
    for (name, sample) in [("sql", &sql_gamma), ("ols", &ols_gamma), ("tlo", &tlo_gamma)] {
        let other_mean = mean(sample).unwrap();
        let welch = welch_t_test(&rpb_gamma, sample).unwrap();
        assert!(
            rpb_mean > other_mean && welch.p < 0.05,
            "[criterion 6] FAIL — under drift the bootstrapped return {rpb_mean:.4} \
             must beat {name}'s {other_mean:.4} at p < 0.05 (Welch p = {:.4})",
            welch.p
        );
        beaten.push(format!("{name} {other_mean:.3} (p {:.1e})", welch.p));
    }

    let rpb_loss = mean(&per_run_loss(&rpb_metrics, config.runs).unwrap()).unwrap();
    let sql_loss = mean(&per_run_loss(&sql_metrics, config.runs).unwrap()).unwrap();
    assert!(
        rpb_loss < sql_loss,
        "[criterion 6] FAIL — mean return lost per preference change must be smaller \
         when bootstrapping: rpb {rpb_loss:.4} vs sql {sql_loss:.4}"
    );
    let elapsed = t0.elapsed();
    println!(
        "[criterion 6] PASS — under drift rpb {rpb_mean:.3} beats {}; loss per change \
         rpb {rpb_loss:.3} < sql {sql_loss:.3} ({elapsed:.2?})",
        beaten.join(", ")
    );
}

// --------------------------------------------------------------------------
// Criterion 7: the significance-threshold sweep on the rescue world — the
// sweep covers the whole grid with full loss distributions and boxplot
// summaries, and the widest threshold is measurably worse than the best one.
// --------------------------------------------------------------------------

#[test]
fn criterion_7_threshold_sweep_shape() {
    let _guard = exclusive();
    let t0 = Instant::now();
    // Stationary mode isolates the threshold's effect on preference-change
    // loss from map drift.
    let config = desk_config("desk-sar-stationary.json");
    let grid = default_phi_grid();
    let result = sweep_phi(&config, &grid).unwrap();

    assert_eq!(
        result.distributions.len(),
        grid.len(),
        "[criterion 7] FAIL — the sweep must cover all {} thresholds",
        grid.len()
    );
    let transitions = config.schedule.preferences.len() - 1;
    for (phi, losses) in &result.distributions {
        assert_eq!(
            losses.len(),
            config.runs * transitions,
            "[criterion 7] FAIL — threshold {phi} has {} loss samples, expected runs x \
             transitions = {}",
            losses.len(),
            config.runs * transitions
        );
    }
    let summary = summarize_phi_sweep(&result.distributions).unwrap();
    assert_eq!(
        summary.boxplots.len(),
        grid.len(),
        "[criterion 7] FAIL — boxplot data must cover every threshold"
    );

    let means: Vec<f64> = result
        .distributions
        .iter()
        .map(|(_, losses)| mean(losses).unwrap())
        .collect();
    let (widest_phi, widest_mean) = (
        result.distributions.last().unwrap().0,
        *means.last().unwrap(),
    );
    assert!(
        (widest_phi - 0.5).abs() < 1e-12,
        "setup: the sweep grid should end at 0.5"
    );
    let (best_index, best_mean) = means
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    let best_phi = result.distributions[best_index].0;
    assert!(
        widest_mean > best_mean,
        "[criterion 7] FAIL — loss at the widest threshold 0.5 ({widest_mean:.4}) must \
         exceed the loss at the best threshold {best_phi} ({best_mean:.4})"
    );
    let elapsed = t0.elapsed();
    println!(
        "[criterion 7] PASS — sweep covers {} thresholds with {} samples each; loss at \
         0.5 is {widest_mean:.3} vs {best_mean:.3} at the best threshold {best_phi} \
         ({elapsed:.2?})",
        grid.len(),
        config.runs * transitions
    );
}

// --------------------------------------------------------------------------
// Criterion 8: running a shipped config twice yields byte-identical CSV and
// chart artifacts.
// --------------------------------------------------------------------------

#[test]
fn criterion_8_shipped_config_is_byte_deterministic() {
    let _guard = exclusive();
    let t0 = Instant::now();
    let config = desk_config("desk-dst-nonstationary.json");

    let render = || {
        let output = run_experiment(&config, None).unwrap();
        let csv = render_results_csv(
            config.env,
            config.mode,
            &[(config.algorithm, output.records.as_slice())],
        );
        let metrics = compute_metrics(&output.records, &config.schedule).unwrap();
        let summary = build_summary(
            config.env,
            config.mode,
            config.runs,
            config.master_seed,
            &config.schedule,
            &[(config.algorithm, metrics)],
        )
        .unwrap();
        let bundle = render_plots(&summary).unwrap();
        (csv, bundle.files)
    };

    let (csv_first, files_first) = render();
    let (csv_second, files_second) = render();
    assert!(
        csv_first == csv_second,
        "[criterion 8] FAIL — two runs of the shipped config produced different CSV bytes"
    );
    assert!(
        !files_first.is_empty(),
        "[criterion 8] FAIL — the shipped config must render at least one chart"
    );
    assert!(
        files_first == files_second,
        "[criterion 8] FAIL — two runs of the shipped config produced different chart bytes"
    );
    let elapsed = t0.elapsed();
    println!(
        "[criterion 8] PASS — {} CSV bytes and {} charts byte-identical across two runs \
         ({elapsed:.2?})",
        csv_first.len(),
        files_first.len()
    );
}

