//! `morl` — command-line front end for the experiment toolkit.
//!
//! Every invocation is one subcommand; all artifacts land under `--out`.
//! Exit codes: 0 success, 1 configuration problem (bad flags, malformed
//! config, missing inputs), 2 runtime failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use morl::baselines::CoverageSet;
use morl::env::{Env, EnvKind, MultiObjectiveEnv};
use morl::error::{MorlError, Result};
use morl::harness::report::{
    build_summary, render_results_csv, summarize_phi_sweep, PairwiseTest, Summary,
    VariantComparisonSummary,
};
use morl::harness::{
    compare_variants, compute_metrics, default_phi_grid, run_experiment, sweep_phi, train_offline,
    Algorithm, ExperimentConfig, Mode, PreferenceSchedule, VariantAxis,
};
use morl::plot::write_plots;
use morl::robustness::RobustnessKind;
use morl::snapshot::{ccs_snapshot, coverage_snapshot, PolicySetSnapshot};

#[derive(Parser)]
#[command(
    name = "morl",
    version,
    about = "Multi-objective RL experiments: robust policy bootstrapping and baselines",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm over the preference schedule; write results.csv,
    /// summary.json, and plots under --out.
    Run(RunArgs),
    /// Train frozen coverage sets (ols or tlo) on each run's initial layout
    /// and write coverage-{algo}.json under --out.
    TrainOffline(RunArgs),
    /// Run RPB across the 0.05..0.50 phi grid; write per-phi loss
    /// distributions and the boxplot chart.
    SweepPhi(RunArgs),
    /// Compare the five robustness metrics on one config (trains an OLS
    /// reference set in-process unless --coverage-set is given).
    CompareMetrics(RunArgs),
    /// Compare the four preference-distance functions on one config.
    CompareDistances(RunArgs),
    /// Run all four algorithms on one config (training OLS/TLO sets
    /// in-process) and write the combined comparison.
    CompareAlgos(RunArgs),
    /// Render SVG charts from an existing summary.json.
    Plot(PlotArgs),
    /// Run RPB and export the final steppingstone stores as ccs.json.
    ExportCcs(RunArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Environment: sar | dst | rg
    #[arg(long)]
    env: Option<EnvKind>,
    /// Algorithm: rpb | sql | ols | tlo
    #[arg(long)]
    algo: Option<Algorithm>,
    /// Mode: stationary | nonstationary
    #[arg(long)]
    mode: Option<Mode>,
    /// Independent runs
    #[arg(long)]
    runs: Option<usize>,
    /// Episodes per preference segment
    #[arg(long)]
    episodes: Option<usize>,
    /// Master seed (the MORL_SEED environment variable wins when set)
    #[arg(long)]
    seed: Option<u64>,
    /// Steppingstone radius φ (RPB)
    #[arg(long)]
    phi: Option<f64>,
    /// Preference distance: euclidean | hamming | cosine | manhattan
    #[arg(long)]
    distance: Option<morl::preference::DistanceKind>,
    /// Robustness metric: stability | iod | cv | entropy | regret
    #[arg(long)]
    robustness: Option<RobustnessKind>,
    /// Frozen coverage-set snapshot (required to run ols/tlo; regret reference for rpb)
    #[arg(long, value_name = "FILE")]
    coverage_set: Option<PathBuf>,
    /// JSON config file; explicit flags override its fields
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output directory (created if needed); nothing is written elsewhere
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Parallel run workers (default: logical cores)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct PlotArgs {
    /// Path to an existing summary.json
    summary: PathBuf,
    /// Output directory; charts land in DIR/plots/
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Parallel run workers (accepted for interface symmetry; plotting is single-threaded)
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e)
            if e.kind() == clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand =>
        {
            // Bare invocation: full usage on stderr, configuration exit code.
            eprint!("{e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            // Flag mistakes are configuration errors: one line on stderr.
            let line = e
                .to_string()
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments")
                .to_string();
            eprintln!("{line}");
            return ExitCode::from(1);
        }
    };

    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run(args) => cmd_run(args),
        Command::TrainOffline(args) => cmd_train_offline(args),
        Command::SweepPhi(args) => cmd_sweep_phi(args),
        Command::CompareMetrics(args) => cmd_compare_variants(args, VariantAxis::RobustnessMetric),
        Command::CompareDistances(args) => {
            cmd_compare_variants(args, VariantAxis::DistanceFunction)
        }
        Command::CompareAlgos(args) => cmd_compare_algos(args),
        Command::Plot(args) => cmd_plot(args),
        Command::ExportCcs(args) => cmd_export_ccs(args),
    }
}

/// Builds the experiment config: file (if any) → flag overrides → MORL_SEED.
fn build_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                MorlError::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            let config: ExperimentConfig = serde_json::from_str(&text)?;
            config
        }
        None => ExperimentConfig::new(
            EnvKind::Dst,
            Algorithm::Rpb,
            Mode::Stationary,
            15,
            PreferenceSchedule::default_walk(200)?,
            42,
        )?,
    };

    if let Some(env) = args.env {
        config.env = env;
    }
    if let Some(algo) = args.algo {
        config.algorithm = algo;
    }
    if let Some(mode) = args.mode {
        config.mode = mode;
    }
    if let Some(runs) = args.runs {
        config.runs = runs;
    }
    if let Some(episodes) = args.episodes {
        config.schedule = PreferenceSchedule::new(config.schedule.preferences.clone(), episodes)?;
    }
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(phi) = args.phi {
        config.rpb.phi = Some(phi);
    }
    if let Some(distance) = args.distance {
        config.rpb.distance = Some(distance);
    }
    if let Some(robustness) = args.robustness {
        config.rpb.robustness = Some(robustness);
    }
    if let Ok(text) = std::env::var("MORL_SEED") {
        config.master_seed = text.trim().parse().map_err(|_| {
            MorlError::Config(format!("MORL_SEED must be an unsigned integer, got {text:?}"))
        })?;
    }
    config.validate()?;
    Ok(config)
}

/// Applies --jobs to the global worker pool before any parallel section runs.
fn configure_jobs(jobs: Option<usize>) -> Result<()> {
    if let Some(n) = jobs {
        if n == 0 {
            return Err(MorlError::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| MorlError::Config(format!("cannot size worker pool: {e}")))?;
    }
    Ok(())
}

fn ensure_out(out: &Path) -> Result<()> {
    fs::create_dir_all(out)?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)?;
    Ok(())
}

/// State/action space sizes for the configured environment.
fn env_dims(config: &ExperimentConfig) -> Result<(usize, usize)> {
    let env = Env::new(config.initial_env_config(0)?)?;
    Ok((env.num_states(), env.num_actions()))
}

/// Loads the frozen coverage sets behind `--coverage-set`, if given.
fn load_coverage(args: &RunArgs) -> Result<Option<Vec<CoverageSet>>> {
    match &args.coverage_set {
        Some(path) => {
            let snapshot = PolicySetSnapshot::load(path).map_err(|e| {
                MorlError::Config(format!(
                    "cannot load coverage set {}: {e}",
                    path.display()
                ))
            })?;
            Ok(Some(snapshot.to_coverage_sets()?))
        }
        None => Ok(None),
    }
}

/// True when the config's effective RPB robustness metric is Regret (which
/// needs a frozen reference set).
fn wants_regret_reference(config: &ExperimentConfig) -> Result<bool> {
    Ok(config.rpb_params().robustness == RobustnessKind::Regret)
}

/// Trains a frozen OLS reference set in-process on the same runs/seeds.
fn train_reference_sets(config: &ExperimentConfig) -> Result<Vec<CoverageSet>> {
    let mut ols_config = config.clone();
    ols_config.algorithm = Algorithm::Ols;
    train_offline(&ols_config, Algorithm::Ols)
}

fn report_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    configure_jobs(args.jobs)?;
    let config = build_config(&args)?;

    let frozen = load_coverage(&args)?;
    if config.algorithm.needs_frozen_set() && frozen.is_none() {
        return Err(MorlError::Config(format!(
            "running {} needs --coverage-set FILE (train one with `morl train-offline`)",
            config.algorithm.name()
        )));
    }
    if config.algorithm == Algorithm::Rpb && wants_regret_reference(&config)? && frozen.is_none() {
        return Err(MorlError::Config(
            "the regret robustness metric needs --coverage-set FILE as its reference".into(),
        ));
    }

    let output = run_experiment(&config, frozen.as_deref())?;
    let metrics = compute_metrics(&output.records, &config.schedule)?;
    let summary = build_summary(
        config.env,
        config.mode,
        config.runs,
        config.master_seed,
        &config.schedule,
        &[(config.algorithm, metrics)],
    )?;

    ensure_out(&args.out)?;
    write_text(
        &args.out.join("results.csv"),
        &render_results_csv(
            config.env,
            config.mode,
            &[(config.algorithm, &output.records)],
        ),
    )?;
    write_text(&args.out.join("summary.json"), &summary.to_json()?)?;
    let (paths, warnings) = write_plots(&summary, &args.out.join("plots"))?;
    report_warnings(&warnings);
    println!(
        "wrote results.csv, summary.json, and {} chart(s) to {}",
        paths.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_train_offline(args: RunArgs) -> Result<()> {
    configure_jobs(args.jobs)?;
    let config = build_config(&args)?;
    let sets = train_offline(&config, config.algorithm)?;
    let (num_states, num_actions) = env_dims(&config)?;
    let snapshot = coverage_snapshot(config.env.name(), num_states, num_actions, &sets)?;

    ensure_out(&args.out)?;
    let path = args
        .out
        .join(format!("coverage-{}.json", config.algorithm.name()));
    snapshot.save(&path)?;
    println!(
        "trained {} coverage set(s) and wrote {}",
        sets.len(),
        path.display()
    );
    Ok(())
}

fn cmd_sweep_phi(args: RunArgs) -> Result<()> {
    configure_jobs(args.jobs)?;
    let mut args = args;
    if args.algo.is_none() {
        args.algo = Some(Algorithm::Rpb);
    }
    let config = build_config(&args)?;

    let result = sweep_phi(&config, &default_phi_grid())?;
    let sweep = summarize_phi_sweep(&result.distributions)?;
    let summary = Summary {
        env: config.env.name().to_string(),
        mode: config.mode.name().to_string(),
        runs: config.runs,
        master_seed: config.master_seed,
        episodes_per_preference: config.schedule.episodes_per_preference,
        preference_firsts: Vec::new(),
        algorithms: Vec::new(),
        pairwise_welch: Vec::new(),
        phi_sweep: Some(sweep),
        variant_comparison: None,
    };

    ensure_out(&args.out)?;
    write_text(&args.out.join("summary.json"), &summary.to_json()?)?;
    let (paths, warnings) = write_plots(&summary, &args.out.join("plots"))?;
    report_warnings(&warnings);
    println!(
        "swept {} phi values; wrote summary.json and {} chart(s) to {}",
        default_phi_grid().len(),
        paths.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_compare_variants(args: RunArgs, axis: VariantAxis) -> Result<()> {
    configure_jobs(args.jobs)?;
    let mut args = args;
    if args.algo.is_none() {
        args.algo = Some(Algorithm::Rpb);
    }
    let config = build_config(&args)?;

    // The regret metric scores candidates against a frozen reference set:
    // always needed on the metric axis (regret is one of the variants),
    // needed on the distance axis only when the base metric is regret.
    let needs_reference = match axis {
        VariantAxis::RobustnessMetric => true,
        VariantAxis::DistanceFunction => wants_regret_reference(&config)?,
    };
    let frozen = match load_coverage(&args)? {
        Some(sets) => Some(sets),
        None if needs_reference => {
            eprintln!("note: training an OLS reference set in-process (pass --coverage-set to reuse one)");
            Some(train_reference_sets(&config)?)
        }
        None => None,
    };

    let variants = compare_variants(&config, axis, frozen.as_deref())?;
    let axis_name = match axis {
        VariantAxis::RobustnessMetric => "robustness metric",
        VariantAxis::DistanceFunction => "distance function",
    };
    let summary = Summary {
        env: config.env.name().to_string(),
        mode: config.mode.name().to_string(),
        runs: config.runs,
        master_seed: config.master_seed,
        episodes_per_preference: config.schedule.episodes_per_preference,
        preference_firsts: Vec::new(),
        algorithms: Vec::new(),
        pairwise_welch: Vec::new(),
        phi_sweep: None,
        variant_comparison: Some(VariantComparisonSummary {
            axis: axis_name.to_string(),
            variants,
        }),
    };

    ensure_out(&args.out)?;
    write_text(&args.out.join("summary.json"), &summary.to_json()?)?;
    let (paths, warnings) = write_plots(&summary, &args.out.join("plots"))?;
    report_warnings(&warnings);
    println!(
        "compared {axis_name}s; wrote summary.json and {} chart(s) to {}",
        paths.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_compare_algos(args: RunArgs) -> Result<()> {
    configure_jobs(args.jobs)?;
    if args.algo.is_some() {
        return Err(MorlError::Config(
            "compare-algos runs every algorithm; drop --algo".into(),
        ));
    }
    let config = build_config(&args)?;
    let (num_states, num_actions) = env_dims(&config)?;

    // Frozen sets for the response baselines, trained on the same per-run
    // layouts and seeds the execution phase will use.
    let mut ols_config = config.clone();
    ols_config.algorithm = Algorithm::Ols;
    let ols_sets = train_offline(&ols_config, Algorithm::Ols)?;
    let mut tlo_config = config.clone();
    tlo_config.algorithm = Algorithm::Tlo;
    let tlo_sets = train_offline(&tlo_config, Algorithm::Tlo)?;

    ensure_out(&args.out)?;
    coverage_snapshot(config.env.name(), num_states, num_actions, &ols_sets)?
        .save(&args.out.join("coverage-ols.json"))?;
    coverage_snapshot(config.env.name(), num_states, num_actions, &tlo_sets)?
        .save(&args.out.join("coverage-tlo.json"))?;

    let mut per_algo_records = Vec::new();
    let mut per_algo_metrics = Vec::new();
    for algo in Algorithm::ALL {
        let mut algo_config = config.clone();
        algo_config.algorithm = algo;
        let frozen = match algo {
            Algorithm::Ols => Some(ols_sets.as_slice()),
            Algorithm::Tlo => Some(tlo_sets.as_slice()),
            // RPB only reads the reference when the regret metric is active.
            Algorithm::Rpb => Some(ols_sets.as_slice()),
            Algorithm::Sql => None,
        };
        let output = run_experiment(&algo_config, frozen)?;
        let metrics = compute_metrics(&output.records, &algo_config.schedule)?;
        per_algo_records.push((algo, output.records));
        per_algo_metrics.push((algo, metrics));
    }

    let summary = build_summary(
        config.env,
        config.mode,
        config.runs,
        config.master_seed,
        &config.schedule,
        &per_algo_metrics,
    )?;

    let record_refs: Vec<(Algorithm, &[morl::harness::ExperimentRecord])> = per_algo_records
        .iter()
        .map(|(a, r)| (*a, r.as_slice()))
        .collect();
    write_text(
        &args.out.join("results.csv"),
        &render_results_csv(config.env, config.mode, &record_refs),
    )?;
    write_text(&args.out.join("summary.json"), &summary.to_json()?)?;
    let (paths, warnings) = write_plots(&summary, &args.out.join("plots"))?;
    report_warnings(&warnings);

    for test in &summary.pairwise_welch {
        let PairwiseTest { a, b, metric, p, .. } = test;
        println!("welch {a} vs {b} on {metric}: p = {p:.6}");
    }
    println!(
        "compared {} algorithms; wrote results.csv, summary.json, coverage sets, and {} chart(s) to {}",
        Algorithm::ALL.len(),
        paths.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<()> {
    let text = fs::read_to_string(&args.summary).map_err(|e| {
        MorlError::Config(format!(
            "cannot read summary {}: {e}",
            args.summary.display()
        ))
    })?;
    let summary = Summary::from_json(&text)?;
    let (paths, warnings) = write_plots(&summary, &args.out.join("plots"))?;
    report_warnings(&warnings);
    println!("wrote {} chart(s) to {}", paths.len(), args.out.display());
    Ok(())
}

fn cmd_export_ccs(args: RunArgs) -> Result<()> {
    configure_jobs(args.jobs)?;
    let mut args = args;
    if args.algo.is_none() {
        args.algo = Some(Algorithm::Rpb);
    }
    let config = build_config(&args)?;
    if config.algorithm != Algorithm::Rpb {
        return Err(MorlError::Config(
            "only the RPB algorithm builds a steppingstone store to export".into(),
        ));
    }
    let frozen = load_coverage(&args)?;
    if wants_regret_reference(&config)? && frozen.is_none() {
        return Err(MorlError::Config(
            "the regret robustness metric needs --coverage-set FILE as its reference".into(),
        ));
    }

    let output = run_experiment(&config, frozen.as_deref())?;
    let (num_states, num_actions) = env_dims(&config)?;
    let snapshot = ccs_snapshot(
        config.env.name(),
        num_states,
        num_actions,
        &output.final_stores,
    )?;

    ensure_out(&args.out)?;
    let path = args.out.join("ccs.json");
    snapshot.save(&path)?;
    let total: usize = snapshot.runs.iter().map(|r| r.entries.len()).sum();
    println!(
        "exported {total} steppingstone entr(ies) across {} run(s) to {}",
        snapshot.runs.len(),
        path.display()
    );
    Ok(())
}
