//! Pipeline commands behind the `modelswitch` binary: simulate, preprocess,
//! estimate, backtest, and the Monte-Carlo study. Each command writes its
//! outputs plus a manifest carrying the resolved configuration (the manifest
//! is the only file holding a timestamp, so result files are byte-identical
//! across reruns and worker counts).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::artifact;
use crate::bench::{self, McCell, StudyConfig};
use crate::config::RunConfig;
use crate::csvio;
use crate::error::{io_err, Error, Result};
use crate::features::BasisSpec;
use crate::ingest;
use crate::linalg::Matrix;
use crate::simgen;

/// Run `f` inside a rayon pool of the requested width (`None` = rayon's
/// default). Outputs must not depend on the width; tests assert they don't.
pub fn with_pool<T: Send>(parallel: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match parallel {
        None => f(),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .expect("pool construction cannot fail with positive threads")
            .install(f),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn write_manifest(cfg: &RunConfig, out_dir: &Path, command: &str, notes: &[String]) -> Result<()> {
    let mut text = String::from("# modelswitch manifest\n");
    let _ = writeln!(text, "command = {command}");
    let created = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let _ = writeln!(text, "created_unix = {created}");
    text.push_str("\n[resolved configuration]\n");
    for line in cfg.manifest_lines() {
        text.push_str(&line);
        text.push('\n');
    }
    if !notes.is_empty() {
        text.push_str("\n[notes]\n");
        for n in notes {
            text.push_str(n);
            text.push('\n');
        }
    }
    let path = out_dir.join("manifest.txt");
    fs::write(&path, text).map_err(|e| io_err(&path, e))
}

/// Write `states.csv` and `returns.csv` for one simulated sample.
pub fn cmd_simulate(cfg: &RunConfig, out_dir: &Path) -> Result<()> {
    ensure_dir(out_dir)?;
    let sample = simgen::gen_sample(&cfg.sim)?;
    let rows = sample.raw_states.n_rows();
    let index = csvio::integer_index(rows);
    csvio::write_matrix(
        &out_dir.join("states.csv"),
        &index,
        &csvio::numbered_names("state", sample.raw_states.n_cols()),
        &sample.raw_states,
    )?;
    csvio::write_matrix(
        &out_dir.join("returns.csv"),
        &index,
        &csvio::numbered_names("asset", sample.returns.n_cols()),
        &sample.returns,
    )?;
    write_manifest(
        cfg,
        out_dir,
        "simulate",
        &[
            format!("rows = {rows}"),
            format!(
                "bad_regime_rows = {}",
                sample.regime_flags.iter().filter(|f| **f).count()
            ),
        ],
    )
}

/// Z-score and digitize a covariate CSV into `processed_states.csv`.
pub fn cmd_preprocess(cfg: &RunConfig, input: &Path, out_dir: &Path) -> Result<()> {
    ensure_dir(out_dir)?;
    let table = ingest::load_covariates(input)?;
    let processed = ingest::preprocess(
        &table.values,
        cfg.preprocess_lambda,
        cfg.preprocess_centered,
    )?;
    csvio::write_matrix(
        &out_dir.join("processed_states.csv"),
        &table.index,
        &table.names,
        &processed,
    )?;
    let mut notes = vec![
        format!("input = {}", input.display()),
        format!("rows = {}", processed.n_rows()),
        format!("dropped_leading_rows = {}", table.dropped_leading),
    ];
    for (name, count) in table.names.iter().zip(&table.fill_counts) {
        notes.push(format!("forward_filled.{name} = {count}"));
    }
    write_manifest(cfg, out_dir, "preprocess", &notes)
}

fn load_states_returns(cfg: &RunConfig, data_dir: &Path) -> Result<(Matrix, Matrix)> {
    let states = csvio::read_matrix(&data_dir.join("states.csv"))?;
    let returns = csvio::read_matrix(&data_dir.join("returns.csv"))?;
    if states.values.n_rows() != returns.values.n_rows() {
        return Err(Error::Data(format!(
            "states.csv has {} rows but returns.csv has {}",
            states.values.n_rows(),
            returns.values.n_rows()
        )));
    }
    if !states.values.is_finite() || !returns.values.is_finite() {
        return Err(Error::Data(
            "states/returns contain missing or non-finite cells".into(),
        ));
    }
    if cfg.data_n_est + 1 >= states.values.n_rows() {
        return Err(Error::Data(format!(
            "data.n_est = {} leaves no test rows out of {}",
            cfg.data_n_est,
            states.values.n_rows()
        )));
    }
    Ok((states.values, returns.values))
}

fn sub_rows(m: &Matrix, start: usize, len: usize) -> Matrix {
    let mut out = Matrix::zeros(len, m.n_cols());
    for t in 0..len {
        out.row_mut(t).copy_from_slice(m.row(start + t));
    }
    out
}

/// Estimate the averaged policy on the estimation split of a data directory
/// and write the policy artifact plus a convergence log.
pub fn cmd_estimate(cfg: &RunConfig, data_dir: &Path, out_dir: &Path) -> Result<()> {
    ensure_dir(out_dir)?;
    let (states, returns) = load_states_returns(cfg, data_dir)?;
    let mut fqi_cfg = cfg.fqi.clone();
    // the basis dimension follows the data, not the simulation defaults
    fqi_cfg.basis = BasisSpec::new(
        fqi_cfg.basis.family,
        states.n_cols(),
        fqi_cfg.basis.action_space.clone(),
    )?
    .with_trig_order(fqi_cfg.basis.trig_order)?;
    let mut env = cfg.env.clone();
    env.n_assets = returns.n_cols();

    let n_est = cfg.data_n_est;
    let est_states = sub_rows(&states, 0, n_est + 1);
    let est_returns = sub_rows(&returns, 0, n_est + 1);
    let (policy, estimates) = bench::estimate_policy(&env, &fqi_cfg, &est_states, &est_returns)?;
    artifact::save_policy(&policy, &out_dir.join("policy.txt"))?;

    let mut log = String::from("replication,iteration,residual\n");
    for est in &estimates {
        for (j, r) in est.residual_history.iter().enumerate() {
            let _ = writeln!(
                log,
                "{},{},{}",
                est.replication_id,
                j + 1,
                csvio::format_float(*r)
            );
        }
    }
    let log_path = out_dir.join("convergence.csv");
    fs::write(&log_path, log).map_err(|e| io_err(&log_path, e))?;

    let mut notes = vec![format!("data_dir = {}", data_dir.display())];
    for est in &estimates {
        notes.push(format!(
            "replication_{}: iterations = {}, converged = {}, final_residual = {}",
            est.replication_id,
            est.iterations_run,
            est.converged,
            est.residual_history
                .last()
                .map(|r| csvio::format_float(*r))
                .unwrap_or_default(),
        ));
        if !est.converged {
            eprintln!(
                "warning: replication {} did not converge within {} iterations (residual {})",
                est.replication_id,
                est.iterations_run,
                est.residual_history.last().copied().unwrap_or(f64::NAN)
            );
        }
    }
    write_manifest(cfg, out_dir, "estimate", &notes)
}

/// Roll all strategies over the test split; the RL strategy joins only when
/// a policy artifact is supplied.
pub fn cmd_backtest(
    cfg: &RunConfig,
    data_dir: &Path,
    policy_path: Option<&Path>,
    out_dir: &Path,
) -> Result<()> {
    ensure_dir(out_dir)?;
    let (states, returns) = load_states_returns(cfg, data_dir)?;
    let mut env = cfg.env.clone();
    env.n_assets = returns.n_cols();
    let n_est = cfg.data_n_est;
    let est_states = sub_rows(&states, 0, n_est + 1);
    let est_returns = sub_rows(&returns, 0, n_est + 1);
    let test_len = states.n_rows() - n_est;
    let test_states = sub_rows(&states, n_est, test_len);
    let test_returns = sub_rows(&returns, n_est, test_len);

    let mut fqi_cfg = cfg.fqi.clone();
    fqi_cfg.basis = BasisSpec::new(
        fqi_cfg.basis.family,
        states.n_cols(),
        fqi_cfg.basis.action_space.clone(),
    )?
    .with_trig_order(fqi_cfg.basis.trig_order)?;

    let mut strategies = Vec::new();
    if let Some(path) = policy_path {
        let policy = artifact::load_policy(path)?;
        let basis = &policy.estimates[0].basis;
        if basis.raw_dim != states.n_cols() {
            return Err(Error::Data(format!(
                "policy artifact expects {} state columns, data has {}",
                basis.raw_dim,
                states.n_cols()
            )));
        }
        if basis.action_space != env.action_space {
            return Err(Error::Data(
                "policy artifact action space differs from the configured environment".into(),
            ));
        }
        strategies.push(("RL".to_string(), bench::Strategy::Rl(policy)));
    }
    let greedy = bench::fit_greedy_on(&env, &fqi_cfg, &est_states, &est_returns)?;
    strategies.push(("Greedy".to_string(), bench::Strategy::Greedy(greedy)));
    for a in 0..env.action_space.len() {
        strategies.push((
            format!("Fixed {}", env.action_space.label(a)),
            bench::Strategy::Fixed(a),
        ));
    }
    strategies.push(("AverageFixed".to_string(), bench::Strategy::AverageFixed));

    let boundary = bench::test_boundary(&est_states, &est_returns, &env)?;
    let initials = strategies
        .iter()
        .map(|(_, s)| bench::initial_holdings(s, &boundary, &env))
        .collect::<Result<Vec<_>>>()?;
    let results = bench::rollout_many(
        &strategies,
        &test_states,
        &test_returns,
        &env,
        &initials,
        &boundary.vol,
    )?;

    let mut table =
        String::from("strategy,avg_daily_reward,se_reward,ann_net_return,se_ann,switches\n");
    for ((name, _), res) in strategies.iter().zip(&results) {
        let _ = writeln!(
            table,
            "{},{},{},{},{},{}",
            name,
            csvio::format_float(res.avg_reward),
            csvio::format_float(res.se_reward),
            csvio::format_float(res.ann_net_return),
            csvio::format_float(res.se_ann),
            res.switch_count
        );
    }
    let table_path = out_dir.join("backtest.csv");
    fs::write(&table_path, table).map_err(|e| io_err(&table_path, e))?;

    let named: Vec<(String, bench::BacktestResult)> = strategies
        .iter()
        .map(|(n, _)| n.clone())
        .zip(results.iter().cloned())
        .collect();
    bench::write_cumulative(&named, &out_dir.join("cumulative.csv"))?;

    let notes = vec![
        format!("data_dir = {}", data_dir.display()),
        format!(
            "policy = {}",
            policy_path
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "none".into())
        ),
        format!("test_periods = {}", test_len - 1),
    ];
    write_manifest(cfg, out_dir, "backtest", &notes)
}

/// Grid cells of the configured study.
pub fn study_cells(cfg: &RunConfig) -> Vec<McCell> {
    let mut cells = Vec::new();
    for &l in &cfg.mc_l_values {
        for &cost in &cfg.mc_costs {
            for &n_est in &cfg.mc_n_est_values {
                cells.push(McCell {
                    raw_dim: l,
                    cost,
                    n_est,
                });
            }
        }
    }
    cells
}

/// Run the Monte-Carlo study over the configured grid.
pub fn cmd_mc(cfg: &RunConfig, out_dir: &Path) -> Result<()> {
    ensure_dir(out_dir)?;
    let study = StudyConfig {
        cells: study_cells(cfg),
        sim_template: cfg.sim.clone(),
        fqi_template: cfg.fqi.clone(),
        env_template: cfg.env.clone(),
        n_sims: cfg.mc_sims,
        master_seed: cfg.master_seed,
    };
    let report = bench::run_mc_study(&study)?;
    bench::write_report(&report, &out_dir.join("mc_report.csv"))?;
    let mut notes = vec![
        format!("cells = {}", report.cells.len()),
        format!("sims_per_cell = {}", report.n_sims),
    ];
    for (c, s, msg) in &report.failures {
        notes.push(format!("failure: cell {c} sim {s}: {msg}"));
    }
    if report.failures.is_empty() {
        notes.push("failures = 0".to_string());
    }
    write_manifest(cfg, out_dir, "mc", &notes)
}

/// Parsed command line (kept thin; `main` forwards here).
#[derive(Debug, clap::Parser)]
#[command(
    name = "modelswitch",
    about = "State-dependent model selection under switching costs",
    version
)]
pub struct Cli {
    /// Plain-text config file; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed overriding the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads for replications and simulations.
    #[arg(long, global = true)]
    pub parallel: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Subcommand)]
pub enum Command {
    /// Generate a synthetic sample (states.csv, returns.csv).
    Simulate,
    /// Z-score and digitize a covariate CSV.
    Preprocess {
        /// Covariate CSV (header row, leading index column).
        #[arg(long)]
        input: PathBuf,
    },
    /// Fit the switching policy on the estimation split of a data directory.
    Estimate {
        /// Directory holding states.csv and returns.csv.
        #[arg(long)]
        data: PathBuf,
    },
    /// Roll all strategies over the test split.
    Backtest {
        /// Directory holding states.csv and returns.csv.
        #[arg(long)]
        data: PathBuf,
        /// Policy artifact from `estimate`; omit for baseline-only runs.
        #[arg(long)]
        policy: Option<PathBuf>,
    },
    /// Monte-Carlo study over the configured (L, cost, n_est) grid.
    Mc {
        /// Simulations per cell, overriding the config.
        #[arg(long)]
        sims: Option<usize>,
    },
}

/// Entry point used by the binary; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let sims_flag = match &cli.command {
        Command::Mc { sims } => *sims,
        _ => None,
    };
    let result = (|| -> Result<()> {
        let cfg = RunConfig::resolve(cli.config.as_deref(), cli.seed, sims_flag)?;
        with_pool(cli.parallel, || match &cli.command {
            Command::Simulate => cmd_simulate(&cfg, &cli.out),
            Command::Preprocess { input } => cmd_preprocess(&cfg, input, &cli.out),
            Command::Estimate { data } => cmd_estimate(&cfg, data, &cli.out),
            Command::Backtest { data, policy } => {
                cmd_backtest(&cfg, data, policy.as_deref(), &cli.out)
            }
            Command::Mc { .. } => cmd_mc(&cfg, &cli.out),
        })
    })();
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            e.exit_code()
        }
    }
}
