//! Baseline strategies, test-sample rollout, and the seeded Monte-Carlo
//! study over the simulation grid.
//!
//! Strategies: the estimated RL policy, a one-step Greedy regression that
//! ignores costs and the previous action, one Fixed policy per model, and
//! AverageFixed (the equal-weight average of the fixed models' target
//! weights, traded as a portfolio of its own).
//!
//! Study determinism: the per-simulation data seed is derived from
//! `(master_seed, SIM, n_est, sim_index)` — the grid's `L` and `cost`
//! dimensions share return realizations by construction, which is what makes
//! Fixed-strategy cell means identical across `L`. Aggregation runs in
//! simulation order regardless of worker scheduling, so reports are
//! byte-identical at any parallelism level.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::{ActionSpace, BasisSpec};
use crate::fqi::{self, FqiConfig, Policy, StateActionPanel};
use crate::linalg::{dot, Matrix};
use crate::numcore::{self, LinearFit, RidgeConfig};
use crate::portfolio::{
    self, drifted_weights, min_variance_weights, turnover_cost, update_vol, Holdings, PortfolioEnv,
    VolState,
};
use crate::seeds::{mix, tag};
use crate::simgen::{self, SimConfig};

/// One-step expected-reward fits on raw-state features (intercept + states).
#[derive(Debug, Clone)]
pub struct GreedyPolicy {
    /// One fit per action over the design `[1, s_1 .. s_L]`.
    pub fits: Vec<LinearFit>,
}

impl GreedyPolicy {
    pub fn fitted_value(&self, raw_state: &[f64], action: usize) -> f64 {
        let c = &self.fits[action].coefficients;
        c[0] + dot(&c[1..], raw_state)
    }

    /// Argmax of fitted next-period reward; ties go to the lowest index.
    pub fn act(&self, raw_state: &[f64]) -> usize {
        let mut best = 0;
        let mut best_v = f64::NEG_INFINITY;
        for a in 0..self.fits.len() {
            let v = self.fitted_value(raw_state, a);
            if v > best_v {
                best_v = v;
                best = a;
            }
        }
        best
    }
}

/// Fit the greedy baseline: per-action ridge of next-period cost-free
/// rewards on the raw states (previous-action features excluded; the
/// discount never enters).
pub fn fit_greedy(
    panel: &StateActionPanel,
    cost_free_rewards: &[Vec<f64>],
    ridge: &RidgeConfig,
) -> Result<GreedyPolicy> {
    let n = panel.n();
    let l = panel.raw_states.n_cols();
    let mut design = Matrix::zeros(n, l + 1);
    for t in 0..n {
        let row = design.row_mut(t);
        row[0] = 1.0;
        row[1..].copy_from_slice(panel.raw_states.row(t));
    }
    let rc = RidgeConfig {
        rho: ridge.rho,
        penalize_intercept: false,
        rho_grid: Vec::new(),
    };
    let mut fits = Vec::with_capacity(cost_free_rewards.len());
    for rewards in cost_free_rewards {
        if rewards.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} rewards vs {n} regression rows",
                rewards.len()
            )));
        }
        let fit = if ridge.rho_grid.is_empty() {
            numcore::ridge_fit(&design, rewards, &rc)?
        } else {
            let search = RidgeConfig {
                rho: 0.0,
                penalize_intercept: false,
                rho_grid: ridge.rho_grid.clone(),
            };
            numcore::select_ridge_aic(&design, rewards, &search)?.1
        };
        fits.push(fit);
    }
    Ok(GreedyPolicy { fits })
}

#[derive(Debug, Clone)]
pub enum Strategy {
    Rl(Policy),
    Greedy(GreedyPolicy),
    Fixed(usize),
    AverageFixed,
}

impl Strategy {
    pub fn name(&self, space: &ActionSpace) -> String {
        match self {
            Strategy::Rl(_) => "RL".into(),
            Strategy::Greedy(_) => "Greedy".into(),
            Strategy::Fixed(a) => format!("Fixed {}", space.label(*a)),
            Strategy::AverageFixed => "AverageFixed".into(),
        }
    }
}

/// State at the estimation/test boundary: volatility carried through the
/// estimation rows and the final estimation state.
#[derive(Debug, Clone)]
pub struct TestBoundary {
    pub vol: VolState,
    pub sigmas: Vec<f64>,
    pub last_raw_state: Vec<f64>,
}

/// Replay the volatility recursion over the estimation rows `0..n_est` and
/// keep the last estimation state. `est_returns` must hold the `n_est + 1`
/// estimation rows (the trailing row belongs to the test slice and is not
/// absorbed here).
pub fn test_boundary(
    est_states: &Matrix,
    est_returns: &Matrix,
    env: &PortfolioEnv,
) -> Result<TestBoundary> {
    let n_est = est_returns.n_rows() - 1;
    if n_est == 0 {
        return Err(Error::Data("estimation slice is empty".into()));
    }
    let mut vol = VolState::warm_up(est_returns, env.vol_warmup)?;
    for i in 0..n_est {
        vol = update_vol(&vol, est_returns.row(i), env.vol_lambda);
    }
    let sigmas = vol.sigmas();
    Ok(TestBoundary {
        vol,
        sigmas,
        last_raw_state: est_states.row(n_est - 1).to_vec(),
    })
}

/// Holdings each strategy carries into the test sample: the weights it
/// would have chosen at the final estimation period. The RL query at the
/// boundary uses the first action as the previous one.
pub fn initial_holdings(
    strategy: &Strategy,
    boundary: &TestBoundary,
    env: &PortfolioEnv,
) -> Result<Holdings> {
    let targets: Vec<Vec<f64>> = env
        .correlation_levels
        .iter()
        .map(|&c| min_variance_weights(&boundary.sigmas, c))
        .collect::<Result<_>>()?;
    let (weights, last_action) = match strategy {
        Strategy::Fixed(a) => (targets[*a].clone(), *a),
        Strategy::Greedy(g) => {
            let a = g.act(&boundary.last_raw_state);
            (targets[a].clone(), a)
        }
        Strategy::Rl(p) => {
            let a = p.act(&boundary.last_raw_state, 0)?;
            (targets[a].clone(), a)
        }
        Strategy::AverageFixed => (average_weights(&targets), 0),
    };
    Ok(Holdings {
        weights,
        last_action,
    })
}

fn average_weights(targets: &[Vec<f64>]) -> Vec<f64> {
    let n = targets[0].len();
    let mut avg = vec![0.0; n];
    for t in targets {
        for (a, v) in avg.iter_mut().zip(t) {
            *a += v / targets.len() as f64;
        }
    }
    avg
}

#[derive(Debug, Clone)]
pub struct BacktestResult {
    pub per_period_rewards: Vec<f64>,
    pub per_period_net_returns: Vec<f64>,
    pub actions_taken: Vec<usize>,
    pub switch_count: usize,
    pub avg_reward: f64,
    pub se_reward: f64,
    /// 252 times the mean daily net return.
    pub ann_net_return: f64,
    pub se_ann: f64,
    /// Periods where the drift normalizer degenerated (reward forced to 0).
    pub skipped_periods: Vec<usize>,
}

fn finalize(
    rewards: Vec<f64>,
    nets: Vec<f64>,
    actions: Vec<usize>,
    switch_count: usize,
    skipped: Vec<usize>,
) -> BacktestResult {
    let (avg_reward, se_reward) = mean_se(&rewards);
    let (avg_net, se_net) = mean_se(&nets);
    BacktestResult {
        per_period_rewards: rewards,
        per_period_net_returns: nets,
        actions_taken: actions,
        switch_count,
        avg_reward,
        se_reward,
        ann_net_return: 252.0 * avg_net,
        se_ann: 252.0 * se_net,
        skipped_periods: skipped,
    }
}

/// Mean and standard error (sample std over sqrt n).
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Roll one strategy over the test slice. `test_states` and `test_returns`
/// carry `m + 1` rows for `m` decisions; `vol` is the boundary state from
/// [`test_boundary`].
pub fn rollout(
    strategy: &Strategy,
    test_states: &Matrix,
    test_returns: &Matrix,
    env: &PortfolioEnv,
    initial: &Holdings,
    vol: &VolState,
) -> Result<BacktestResult> {
    let named = [(String::new(), strategy.clone())];
    let mut out = rollout_many(
        &named,
        test_states,
        test_returns,
        env,
        std::slice::from_ref(initial),
        vol,
    )?;
    Ok(out.pop().expect("one strategy in, one result out"))
}

/// Shared-precompute rollout of several strategies over the same test slice.
/// Model target weights and gross returns are computed once per period; each
/// strategy keeps its own holdings, costs and rewards.
pub fn rollout_many(
    strategies: &[(String, Strategy)],
    test_states: &Matrix,
    test_returns: &Matrix,
    env: &PortfolioEnv,
    initials: &[Holdings],
    vol: &VolState,
) -> Result<Vec<BacktestResult>> {
    env.validate()?;
    if test_returns.n_rows() != test_states.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} state rows vs {} return rows",
            test_states.n_rows(),
            test_returns.n_rows()
        )));
    }
    if test_returns.n_rows() < 2 {
        return Err(Error::Data("test slice needs at least two rows".into()));
    }
    if initials.len() != strategies.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} strategies vs {} initial holdings",
            strategies.len(),
            initials.len()
        )));
    }
    let m = test_returns.n_rows() - 1;
    let na = env.action_space.len();
    struct StratState {
        held: Vec<f64>,
        last_action: usize,
        rewards: Vec<f64>,
        nets: Vec<f64>,
        actions: Vec<usize>,
        switches: usize,
        skipped: Vec<usize>,
    }
    let mut states: Vec<StratState> = initials
        .iter()
        .map(|h| StratState {
            held: h.weights.clone(),
            last_action: h.last_action,
            rewards: Vec::with_capacity(m),
            nets: Vec::with_capacity(m),
            actions: Vec::with_capacity(m),
            switches: 0,
            skipped: Vec::new(),
        })
        .collect();

    let mut volatility = vol.clone();
    let mut pr = vec![0.0; env.n_assets];
    for i in 0..m {
        volatility = update_vol(&volatility, test_returns.row(i), env.vol_lambda);
        let sigmas = volatility.sigmas();
        let targets: Vec<Vec<f64>> = env
            .correlation_levels
            .iter()
            .map(|&c| min_variance_weights(&sigmas, c))
            .collect::<Result<_>>()?;
        let next = test_returns.row(i + 1);
        let gross: Vec<f64> = targets.iter().map(|w| dot(w, next)).collect();
        let avg_target = average_weights(&targets);
        let gross_avg = dot(&avg_target, next);
        for (p, r) in pr.iter_mut().zip(test_returns.row(i)) {
            *p = 1.0 + r;
        }
        let raw_state = test_states.row(i);
        for ((_, strategy), st) in strategies.iter().zip(states.iter_mut()) {
            let (action, target, gross_t): (usize, &[f64], f64) = match strategy {
                Strategy::Fixed(a) => (*a, &targets[*a], gross[*a]),
                Strategy::Greedy(g) => {
                    let a = g.act(raw_state);
                    (a, &targets[a], gross[a])
                }
                Strategy::Rl(p) => {
                    let a = p.act(raw_state, st.last_action)?;
                    (a, &targets[a], gross[a])
                }
                Strategy::AverageFixed => (st.last_action, &avg_target, gross_avg),
            };
            debug_assert!(action < na);
            let held = Holdings {
                weights: std::mem::take(&mut st.held),
                last_action: st.last_action,
            };
            match drifted_weights(&held, &pr) {
                Ok(drifted) => {
                    let cost = turnover_cost(target, &drifted, env.cost_rate);
                    let net = gross_t - cost;
                    let reward = match portfolio::reward(net, &env.utility) {
                        Ok(r) => r,
                        Err(Error::RewardDomain { .. }) => (1e-12f64).ln(),
                        Err(e) => return Err(e),
                    };
                    st.rewards.push(reward);
                    st.nets.push(net);
                }
                Err(Error::DegeneratePortfolio { .. }) => {
                    st.skipped.push(i);
                    st.rewards.push(0.0);
                    st.nets.push(0.0);
                }
                Err(e) => return Err(e),
            }
            if !matches!(strategy, Strategy::AverageFixed) && action != st.last_action {
                st.switches += 1;
            }
            st.actions.push(action);
            st.held = target.to_vec();
            st.last_action = action;
        }
    }
    Ok(states
        .into_iter()
        .map(|st| finalize(st.rewards, st.nets, st.actions, st.switches, st.skipped))
        .collect())
}

/// One grid cell of the study.
#[derive(Debug, Clone, PartialEq)]
pub struct McCell {
    pub raw_dim: usize,
    pub cost: f64,
    pub n_est: usize,
}

/// Aggregates across simulations for one (cell, strategy) pair.
#[derive(Debug, Clone)]
pub struct StrategyStats {
    pub mean_ann_reward: f64,
    /// Monte-Carlo standard error: sample std across sims / sqrt(n_sims).
    pub se: f64,
    pub mean_ann_net: f64,
    pub mean_switches: f64,
    pub n_sims_effective: usize,
}

#[derive(Debug, Clone)]
pub struct McReport {
    pub cells: Vec<McCell>,
    pub strategies: Vec<String>,
    /// Indexed `[cell][strategy]`.
    pub stats: Vec<Vec<StrategyStats>>,
    pub n_sims: usize,
    pub master_seed: u64,
    /// `(cell index, sim index, message)` for failed simulations.
    pub failures: Vec<(usize, usize, String)>,
}

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub cells: Vec<McCell>,
    pub sim_template: SimConfig,
    pub fqi_template: FqiConfig,
    pub env_template: PortfolioEnv,
    pub n_sims: usize,
    pub master_seed: u64,
}

struct SimOutcome {
    ann_reward: Vec<f64>,
    ann_net: Vec<f64>,
    switches: Vec<f64>,
}

/// Strategy roster for one simulated dataset: RL, Greedy, one Fixed per
/// model, AverageFixed.
pub fn standard_strategies(
    policy: Policy,
    greedy: GreedyPolicy,
    space: &ActionSpace,
) -> Vec<(String, Strategy)> {
    let mut out = vec![
        ("RL".to_string(), Strategy::Rl(policy)),
        ("Greedy".to_string(), Strategy::Greedy(greedy)),
    ];
    for a in 0..space.len() {
        out.push((format!("Fixed {}", space.label(a)), Strategy::Fixed(a)));
    }
    out.push(("AverageFixed".to_string(), Strategy::AverageFixed));
    out
}

/// Estimate on the estimation split and roll every strategy over the test
/// split of one simulated dataset.
pub fn run_single_sim(cell: &McCell, study: &StudyConfig, sim_index: usize) -> Result<SimResults> {
    let data_seed = mix(&[
        study.master_seed,
        tag::SIM,
        cell.n_est as u64,
        sim_index as u64,
    ]);
    let mut sim_cfg = study.sim_template.clone();
    sim_cfg.raw_dim = cell.raw_dim;
    sim_cfg.n_est = cell.n_est;
    sim_cfg.seed = data_seed;
    let sample = simgen::gen_sample(&sim_cfg)?;

    let mut env = study.env_template.clone();
    env.cost_rate = cell.cost;
    env.n_assets = sim_cfg.n_assets;

    let mut fqi_cfg = study.fqi_template.clone();
    fqi_cfg.basis = BasisSpec::new(
        fqi_cfg.basis.family,
        cell.raw_dim,
        fqi_cfg.basis.action_space.clone(),
    )?
    .with_trig_order(fqi_cfg.basis.trig_order)?;
    fqi_cfg.seed = data_seed;

    let n_est = cell.n_est;
    let est_states = sub_rows(&sample.raw_states, 0, n_est + 1);
    let est_returns = sub_rows(&sample.returns, 0, n_est + 1);
    let test_start = n_est;
    let test_len = sample.returns.n_rows() - test_start;
    let test_states = sub_rows(&sample.raw_states, test_start, test_len);
    let test_returns = sub_rows(&sample.returns, test_start, test_len);

    estimate_and_roll(
        &env,
        &fqi_cfg,
        &est_states,
        &est_returns,
        &test_states,
        &test_returns,
    )
}

/// Results of one simulated dataset: named backtests in roster order.
pub struct SimResults {
    pub names: Vec<String>,
    pub results: Vec<BacktestResult>,
}

/// The simulate-free core shared by the study and the CLI: augment, price
/// the panels, fit the policy and the greedy baseline, roll out everything.
pub fn estimate_and_roll(
    env: &PortfolioEnv,
    fqi_cfg: &FqiConfig,
    est_states: &Matrix,
    est_returns: &Matrix,
    test_states: &Matrix,
    test_returns: &Matrix,
) -> Result<SimResults> {
    let policy = estimate_policy(env, fqi_cfg, est_states, est_returns)?.0;
    let greedy = fit_greedy_on(env, fqi_cfg, est_states, est_returns)?;
    let space = env.action_space.clone();
    let strategies = standard_strategies(policy, greedy, &space);
    let boundary = test_boundary(est_states, est_returns, env)?;
    let initials: Vec<Holdings> = strategies
        .iter()
        .map(|(_, s)| initial_holdings(s, &boundary, env))
        .collect::<Result<_>>()?;
    let results = rollout_many(
        &strategies,
        test_states,
        test_returns,
        env,
        &initials,
        &boundary.vol,
    )?;
    Ok(SimResults {
        names: strategies.into_iter().map(|(n, _)| n).collect(),
        results,
    })
}

/// Augment, price and fit the averaged policy on the estimation split.
/// Returns the policy plus each replication's estimate for logging.
pub fn estimate_policy(
    env: &PortfolioEnv,
    fqi_cfg: &FqiConfig,
    est_states: &Matrix,
    est_returns: &Matrix,
) -> Result<(Policy, Vec<fqi::QEstimate>)> {
    fqi_cfg.validate()?;
    let space = &fqi_cfg.basis.action_space;
    let vol0 = VolState::warm_up(est_returns, env.vol_warmup)?;
    let panels = fqi::augment(est_states, space, fqi_cfg.n_replications, fqi_cfg.seed)?;
    let paths: Vec<&[usize]> = panels.iter().map(|p| p.actions.as_slice()).collect();
    let (all_rewards, _) = portfolio::reward_panels(env, &paths, est_returns, &vol0)?;
    let estimates: Vec<fqi::QEstimate> = panels
        .par_iter()
        .zip(all_rewards.par_iter())
        .map(|(panel, rewards)| fqi::fqi_run(panel, rewards, fqi_cfg))
        .collect::<Result<_>>()?;
    let policy = fqi::average_q(estimates.clone())?;
    Ok((policy, estimates))
}

/// Greedy baseline fit on cost-free rewards (any panel works: with zero
/// cost the rewards do not depend on the simulated actions).
pub fn fit_greedy_on(
    env: &PortfolioEnv,
    fqi_cfg: &FqiConfig,
    est_states: &Matrix,
    est_returns: &Matrix,
) -> Result<GreedyPolicy> {
    let mut free = env.clone();
    free.cost_rate = 0.0;
    let vol0 = VolState::warm_up(est_returns, free.vol_warmup)?;
    let panel = &fqi::augment(est_states, &fqi_cfg.basis.action_space, 1, fqi_cfg.seed)?[0];
    let (rewards, _) = portfolio::reward_panel(&free, &panel.actions, est_returns, &vol0)?;
    fit_greedy(panel, &rewards, &fqi_cfg.ridge)
}

/// Run the full grid study. Simulations run in parallel with deterministic
/// per-task seeds; aggregation order is fixed, so the report is identical at
/// any worker count.
pub fn run_mc_study(study: &StudyConfig) -> Result<McReport> {
    if study.n_sims < 2 {
        return Err(Error::Config("need at least two simulations".into()));
    }
    if study.cells.is_empty() {
        return Err(Error::Config("empty study grid".into()));
    }
    let space = &study.env_template.action_space;
    let strategies: Vec<String> = {
        let mut v = vec!["RL".to_string(), "Greedy".to_string()];
        for a in 0..space.len() {
            v.push(format!("Fixed {}", space.label(a)));
        }
        v.push("AverageFixed".to_string());
        v
    };
    let tasks: Vec<(usize, usize)> = (0..study.cells.len())
        .flat_map(|c| (0..study.n_sims).map(move |s| (c, s)))
        .collect();
    let outcomes: Vec<(usize, usize, std::result::Result<SimOutcome, String>)> = tasks
        .par_iter()
        .map(|&(c, s)| {
            let out = run_single_sim(&study.cells[c], study, s)
                .map(|r| SimOutcome {
                    ann_reward: r.results.iter().map(|b| 252.0 * b.avg_reward).collect(),
                    ann_net: r.results.iter().map(|b| b.ann_net_return).collect(),
                    switches: r.results.iter().map(|b| b.switch_count as f64).collect(),
                })
                .map_err(|e| e.to_string());
            (c, s, out)
        })
        .collect();

    let mut failures = Vec::new();
    let mut stats = Vec::with_capacity(study.cells.len());
    for c in 0..study.cells.len() {
        let mut per_strategy: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> =
            vec![(Vec::new(), Vec::new(), Vec::new()); strategies.len()];
        for (oc, os, out) in outcomes.iter().filter(|(oc, _, _)| *oc == c) {
            match out {
                Ok(sim) => {
                    for (k, slot) in per_strategy.iter_mut().enumerate() {
                        slot.0.push(sim.ann_reward[k]);
                        slot.1.push(sim.ann_net[k]);
                        slot.2.push(sim.switches[k]);
                    }
                }
                Err(msg) => failures.push((*oc, *os, msg.clone())),
            }
        }
        stats.push(
            per_strategy
                .into_iter()
                .map(|(rw, net, sw)| {
                    let (mean, se) = mean_se(&rw);
                    StrategyStats {
                        mean_ann_reward: mean,
                        se,
                        mean_ann_net: mean_se(&net).0,
                        mean_switches: mean_se(&sw).0,
                        n_sims_effective: rw.len(),
                    }
                })
                .collect(),
        );
    }
    Ok(McReport {
        cells: study.cells.clone(),
        strategies,
        stats,
        n_sims: study.n_sims,
        master_seed: study.master_seed,
        failures,
    })
}

impl McReport {
    pub fn stat(&self, cell: &McCell, strategy: &str) -> Option<&StrategyStats> {
        let c = self.cells.iter().position(|x| x == cell)?;
        let s = self.strategies.iter().position(|x| x == strategy)?;
        Some(&self.stats[c][s])
    }
}

fn sub_rows(m: &Matrix, start: usize, len: usize) -> Matrix {
    let mut out = Matrix::zeros(len, m.n_cols());
    for t in 0..len {
        out.row_mut(t).copy_from_slice(m.row(start + t));
    }
    out
}

/// Report CSV, one row per (cell, strategy), fixed column order.
pub fn write_report(report: &McReport, path: &std::path::Path) -> Result<()> {
    use crate::csvio::format_float;
    let mut out = String::from("L,cost,n_est,strategy,mean,se\n");
    for (c, cell) in report.cells.iter().enumerate() {
        for (s, name) in report.strategies.iter().enumerate() {
            let st = &report.stats[c][s];
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                cell.raw_dim,
                format_float(cell.cost),
                cell.n_est,
                name,
                format_float(st.mean_ann_reward),
                format_float(st.se),
            ));
        }
    }
    std::fs::write(path, out).map_err(|e| crate::error::io_err(path, e))
}

/// Parse a report CSV back into rows (for round trips and tests).
pub fn read_report(path: &std::path::Path) -> Result<Vec<(McCell, String, f64, f64)>> {
    use crate::csvio::parse_float;
    let text = std::fs::read_to_string(path).map_err(|e| crate::error::io_err(path, e))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Data(format!("report row {} malformed", i + 1)));
        }
        rows.push((
            McCell {
                raw_dim: fields[0]
                    .parse()
                    .map_err(|_| Error::Data(format!("bad L field {:?}", fields[0])))?,
                cost: parse_float(fields[1])?,
                n_est: fields[2]
                    .parse()
                    .map_err(|_| Error::Data(format!("bad n_est field {:?}", fields[2])))?,
            },
            fields[3].to_string(),
            parse_float(fields[4])?,
            parse_float(fields[5])?,
        ));
    }
    Ok(rows)
}

/// Long-format cumulative reward series for plotting.
pub fn write_cumulative(
    results: &[(String, BacktestResult)],
    path: &std::path::Path,
) -> Result<()> {
    use crate::csvio::format_float;
    let mut out = String::from("strategy,t,cum_reward\n");
    for (name, res) in results {
        let mut acc = 0.0;
        for (t, r) in res.per_period_rewards.iter().enumerate() {
            acc += r;
            out.push_str(&format!("{},{},{}\n", name, t + 1, format_float(acc)));
        }
    }
    std::fs::write(path, out).map_err(|e| crate::error::io_err(path, e))
}
