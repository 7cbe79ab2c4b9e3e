//! The estimation core: state-action augmentation, capped ridge fitted
//! Q-iteration, averaging across action replications, and the induced policy.
//!
//! One iteration regresses, per action `a`, the targets
//!
//! ```text
//! R_a[t] + gamma * max_a' Qhat_prev((raw[t+1], a), a')
//! ```
//!
//! on the basis evaluated at the current augmented states `(raw[t], A[t-1])`,
//! then caps the fitted function at `B`. The value residual between
//! consecutive iterations is measured in root-mean-square over the in-sample
//! states; iteration stops when it drops to `epsilon` or `max_iters` is hit.
//!
//! When the basis family is parsimonious, the per-action function class
//! anchors its indicator at the action currently being fitted.

use rand::Rng;

use crate::error::{Error, Result};
use crate::features::{ActionSpace, BasisFamily, BasisSpec};
use crate::linalg::{dot, Matrix};
use crate::numcore::{self, LinearFit, RidgeConfig};
use crate::seeds::{rng, tag};

/// Raw states plus one simulated action stream `A_0 .. A_n`.
#[derive(Debug, Clone)]
pub struct StateActionPanel {
    /// `(n + 1) x L` raw states.
    pub raw_states: Matrix,
    /// Action indices, aligned so `actions[t]` is the action taken at time
    /// `t` (`actions[t]` is the previous action of state row `t`).
    pub actions: Vec<usize>,
    pub replication_id: usize,
}

impl StateActionPanel {
    pub fn new(raw_states: Matrix, actions: Vec<usize>, replication_id: usize) -> Result<Self> {
        if raw_states.n_rows() < 2 {
            return Err(Error::Data("panel needs at least two state rows".into()));
        }
        if actions.len() != raw_states.n_rows() {
            return Err(Error::DimensionMismatch(format!(
                "{} actions vs {} state rows",
                actions.len(),
                raw_states.n_rows()
            )));
        }
        Ok(StateActionPanel {
            raw_states,
            actions,
            replication_id,
        })
    }

    /// Number of regression rows (one less than the state rows).
    pub fn n(&self) -> usize {
        self.raw_states.n_rows() - 1
    }
}

/// Simulate `n_replications` independent uniform action streams over the
/// shared raw states. Stream `u` draws from the seed `(seed, AUGMENT, u)`.
pub fn augment(
    raw_states: &Matrix,
    action_space: &ActionSpace,
    n_replications: usize,
    seed: u64,
) -> Result<Vec<StateActionPanel>> {
    if action_space.is_empty() {
        return Err(Error::Config("empty action space".into()));
    }
    if n_replications == 0 {
        return Err(Error::Config("need at least one replication".into()));
    }
    let rows = raw_states.n_rows();
    let na = action_space.len();
    (0..n_replications)
        .map(|u| {
            let mut r = rng(&[seed, tag::AUGMENT, u as u64]);
            let actions: Vec<usize> = (0..rows).map(|_| r.random_range(0..na)).collect();
            StateActionPanel::new(raw_states.clone(), actions, u)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct FqiConfig {
    pub gamma: f64,
    /// Cap `B` applied to every fitted Q function; `INFINITY` disables it.
    pub cap_b: f64,
    /// Stopping tolerance on the RMS value residual.
    pub epsilon: f64,
    pub max_iters: usize,
    pub n_replications: usize,
    pub ridge: RidgeConfig,
    pub basis: BasisSpec,
    pub seed: u64,
}

impl FqiConfig {
    pub fn validate(&self) -> Result<()> {
        // gamma = 0 is allowed as the degenerate one-step case
        if self.gamma.is_nan() || self.gamma < 0.0 || self.gamma >= 1.0 {
            return Err(Error::Config(format!(
                "gamma {} outside [0, 1)",
                self.gamma
            )));
        }
        if self.cap_b.is_nan() || self.cap_b <= 0.0 {
            return Err(Error::Config(format!(
                "cap {} must be positive",
                self.cap_b
            )));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::Config(format!(
                "epsilon {} must be positive",
                self.epsilon
            )));
        }
        if self.max_iters == 0 || self.n_replications == 0 {
            return Err(Error::Config(
                "max_iters and n_replications must be positive".into(),
            ));
        }
        self.ridge.validate()?;
        self.basis.validate()
    }

    /// The ridge penalty never exempts a column unless the basis really has
    /// an intercept in column one.
    fn penalize_intercept(&self) -> bool {
        self.ridge.penalize_intercept || !self.basis.has_intercept()
    }
}

/// Per-action capped fits from one replication.
#[derive(Debug, Clone)]
pub struct QEstimate {
    /// One fit per action, in action-space order.
    pub fits: Vec<LinearFit>,
    pub basis: BasisSpec,
    pub gamma: f64,
    pub iterations_run: usize,
    pub converged: bool,
    /// RMS value residual per iteration; length equals `iterations_run`.
    pub residual_history: Vec<f64>,
    /// Ridge penalty used per action (selected once by AIC when a grid is
    /// configured, fixed otherwise).
    pub rhos: Vec<f64>,
    pub replication_id: usize,
}

impl QEstimate {
    /// Basis used for the fit of `action` (parsimonious anchors move with
    /// the action).
    pub fn action_basis(&self, action: usize) -> Result<BasisSpec> {
        action_basis(&self.basis, action)
    }

    /// Capped prediction of `Q(s, action)` at one augmented state.
    pub fn predict_q(&self, raw_state: &[f64], prev_idx: usize, action: usize) -> Result<f64> {
        let basis = self.action_basis(action)?;
        let mut row = vec![0.0; basis.dimension()];
        basis.evaluate_into(raw_state, prev_idx, &mut row)?;
        let fit = &self.fits[action];
        Ok(numcore::cap(dot(&row, &fit.coefficients), fit.cap))
    }
}

fn action_basis(basis: &BasisSpec, action: usize) -> Result<BasisSpec> {
    if basis.family == BasisFamily::Parsimonious {
        basis.with_anchor(basis.action_space.label(action))
    } else {
        Ok(basis.clone())
    }
}

/// Regression targets for one action: reward plus the discounted maximum of
/// the previous Q estimate at the action-shifted next state. `q_prev = None`
/// is the zero value function of the first iteration.
pub fn q_targets(
    panel: &StateActionPanel,
    rewards: &[Vec<f64>],
    q_prev: Option<&QEstimate>,
    action: usize,
    gamma: f64,
) -> Result<Vec<f64>> {
    let n = panel.n();
    let reward = rewards
        .get(action)
        .ok_or_else(|| Error::InputDomain(format!("no reward vector for action {action}")))?;
    if reward.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} rewards vs {n} regression rows",
            reward.len()
        )));
    }
    let mut targets = reward.clone();
    if gamma == 0.0 {
        return Ok(targets);
    }
    if let Some(q) = q_prev {
        let na = q.basis.action_space.len();
        for (t, target) in targets.iter_mut().enumerate() {
            let next_state = panel.raw_states.row(t + 1);
            let mut best = f64::NEG_INFINITY;
            for a_next in 0..na {
                best = best.max(q.predict_q(next_state, action, a_next)?);
            }
            *target += gamma * best;
        }
    }
    Ok(targets)
}

/// Run capped ridge fitted Q-iteration on one panel.
pub fn fqi_run(
    panel: &StateActionPanel,
    rewards: &[Vec<f64>],
    config: &FqiConfig,
) -> Result<QEstimate> {
    config.validate()?;
    let basis = &config.basis;
    let space = &basis.action_space;
    let na = space.len();
    let n = panel.n();
    if rewards.len() != na {
        return Err(Error::DimensionMismatch(format!(
            "{} reward vectors vs {na} actions",
            rewards.len()
        )));
    }
    for (a, r) in rewards.iter().enumerate() {
        if r.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "action {a}: {} rewards vs {n} regression rows",
                r.len()
            )));
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::InputDomain(format!(
                "non-finite reward for action {a}"
            )));
        }
    }
    if let Some(bad) = panel.actions.iter().find(|a| **a >= na) {
        return Err(Error::InputDomain(format!(
            "panel action index {bad} out of range"
        )));
    }

    let penalize_intercept = config.penalize_intercept();
    let bases: Vec<BasisSpec> = (0..na)
        .map(|a| action_basis(basis, a))
        .collect::<Result<_>>()?;

    // Designs at the current augmented states (rows 0..n-1, previous action
    // from the panel) and at the action-shifted next states: x_next[a][a']
    // evaluates basis a' at (raw[t+1], previous action = a).
    let prev_actions = &panel.actions[..n];
    let cur_states = sub_rows(&panel.raw_states, 0, n);
    let mut x_cur = Vec::with_capacity(na);
    for b in &bases {
        x_cur.push(b.evaluate_panel(&cur_states, prev_actions)?.values);
    }
    let next_states = sub_rows(&panel.raw_states, 1, n);

    // Prediction engine. Families whose feature row splits into a
    // raw-state prefix and an action suffix get their raw dot products
    // hoisted out of the (action, fit) double loop.
    enum Predictor {
        Generic {
            /// `[a][a']`: basis `a'` at the next states with previous = `a`.
            x_next: Vec<Vec<Matrix>>,
        },
        Separable {
            prefix_next: Matrix,
            /// `[a'][prev]`: action-suffix feature vector.
            suffix: Vec<Vec<Vec<f64>>>,
            k_raw: usize,
        },
    }
    let predictor = match basis.split_point() {
        Some(k_raw) => {
            let full = bases[0].evaluate_panel(&next_states, &vec![0; n])?.values;
            let mut prefix_next = Matrix::zeros(n, k_raw);
            for t in 0..n {
                prefix_next
                    .row_mut(t)
                    .copy_from_slice(&full.row(t)[..k_raw]);
            }
            let zero_raw = vec![0.0; basis.raw_dim];
            let k = basis.dimension();
            let mut suffix = Vec::with_capacity(na);
            for b in &bases {
                let mut per_prev = Vec::with_capacity(na);
                for prev in 0..na {
                    let mut row = vec![0.0; k];
                    b.evaluate_into(&zero_raw, prev, &mut row)?;
                    per_prev.push(row[k_raw..].to_vec());
                }
                suffix.push(per_prev);
            }
            Predictor::Separable {
                prefix_next,
                suffix,
                k_raw,
            }
        }
        None => {
            let mut x_next = Vec::with_capacity(na);
            for a in 0..na {
                let shifted = vec![a; n];
                let mut per_fit = Vec::with_capacity(na);
                for b in &bases {
                    per_fit.push(b.evaluate_panel(&next_states, &shifted)?.values);
                }
                x_next.push(per_fit);
            }
            Predictor::Generic { x_next }
        }
    };

    // Penalty per action: AIC-selected once on the first-iteration targets
    // (the raw rewards) and held fixed so the iteration map is stationary.
    let mut rhos = Vec::with_capacity(na);
    for a in 0..na {
        let rho = if config.ridge.rho_grid.is_empty() {
            config.ridge.rho
        } else {
            let search = RidgeConfig {
                rho: 0.0,
                penalize_intercept,
                rho_grid: config.ridge.rho_grid.clone(),
            };
            numcore::select_ridge_aic(&x_cur[a], &rewards[a], &search)
                .map_err(|e| solver_err(1, space.label(a), e))?
                .0
        };
        rhos.push(rho);
    }
    // one factorization per action; only X'y changes across iterations
    let mut solvers = Vec::with_capacity(na);
    for a in 0..na {
        solvers.push(
            numcore::RidgeSolver::new(&x_cur[a], rhos[a], penalize_intercept)
                .map_err(|e| solver_err(1, space.label(a), e))?,
        );
    }

    let mut coefs: Vec<Vec<f64>> = Vec::new();
    let mut last_targets: Vec<Vec<f64>> = vec![rewards[0].clone(); na];
    let mut v_prev = vec![0.0; n];
    let mut v_new = vec![0.0; n];
    let mut targets = vec![0.0; n];
    let mut residual_history = Vec::new();
    let mut converged = false;
    let mut iterations_run = 0;

    let mut raw_next = vec![vec![0.0; n]; na];
    let mut act_scalar = vec![vec![0.0; na]; na];
    for j in 1..=config.max_iters {
        let have_prev = !coefs.is_empty() && config.gamma > 0.0;
        if have_prev {
            if let Predictor::Separable {
                prefix_next,
                suffix,
                k_raw,
            } = &predictor
            {
                for (a_fit, c) in coefs.iter().enumerate() {
                    let braw = &c[..*k_raw];
                    let bact = &c[*k_raw..];
                    for (t, slot) in raw_next[a_fit].iter_mut().enumerate() {
                        *slot = dot(prefix_next.row(t), braw);
                    }
                    for prev in 0..na {
                        act_scalar[a_fit][prev] = dot(&suffix[a_fit][prev], bact);
                    }
                }
            }
        }
        let mut new_coefs = Vec::with_capacity(na);
        for a in 0..na {
            targets.copy_from_slice(&rewards[a]);
            if have_prev {
                match &predictor {
                    Predictor::Separable { .. } => {
                        for (t, target) in targets.iter_mut().enumerate() {
                            let mut best = f64::NEG_INFINITY;
                            for a_fit in 0..na {
                                let q = numcore::cap(
                                    raw_next[a_fit][t] + act_scalar[a_fit][a],
                                    config.cap_b,
                                );
                                if q > best {
                                    best = q;
                                }
                            }
                            *target += config.gamma * best;
                        }
                    }
                    Predictor::Generic { x_next } => {
                        let per_fit = &x_next[a];
                        for (t, target) in targets.iter_mut().enumerate() {
                            let mut best = f64::NEG_INFINITY;
                            for (a_next, c) in coefs.iter().enumerate() {
                                let q = numcore::cap(dot(per_fit[a_next].row(t), c), config.cap_b);
                                if q > best {
                                    best = q;
                                }
                            }
                            *target += config.gamma * best;
                        }
                    }
                }
            }
            let xty = x_cur[a].t_vec(&targets)?;
            let c = solvers[a].solve(&xty);
            if c.iter().any(|v| !v.is_finite()) {
                return Err(solver_err(
                    j,
                    space.label(a),
                    Error::Numerical("iteration diverged to non-finite coefficients".into()),
                ));
            }
            last_targets[a].copy_from_slice(&targets);
            new_coefs.push(c);
        }
        coefs = new_coefs;
        for (t, v) in v_new.iter_mut().enumerate() {
            let mut best = f64::NEG_INFINITY;
            for (a, c) in coefs.iter().enumerate() {
                let q = numcore::cap(dot(x_cur[a].row(t), c), config.cap_b);
                if q > best {
                    best = q;
                }
            }
            *v = best;
        }
        let resid = rms_diff(&v_new, &v_prev);
        residual_history.push(resid);
        v_prev.copy_from_slice(&v_new);
        iterations_run = j;
        if resid <= config.epsilon {
            converged = true;
            break;
        }
    }

    // full diagnostics only for the kept fits
    let mut fits = Vec::with_capacity(na);
    for a in 0..na {
        let fit = solvers[a]
            .fit(&x_cur[a], &last_targets[a])
            .map_err(|e| solver_err(iterations_run, space.label(a), e))?
            .with_cap(config.cap_b);
        fits.push(fit);
    }

    Ok(QEstimate {
        fits,
        basis: basis.clone(),
        gamma: config.gamma,
        iterations_run,
        converged,
        residual_history,
        rhos,
        replication_id: panel.replication_id,
    })
}

fn solver_err(iteration: usize, action: &str, e: Error) -> Error {
    Error::FqiSolve {
        iteration,
        action: action.to_string(),
        source: Box::new(e),
    }
}

fn rms_diff(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(1) as f64;
    (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / n).sqrt()
}

fn sub_rows(m: &Matrix, start: usize, len: usize) -> Matrix {
    let mut out = Matrix::zeros(len, m.n_cols());
    for t in 0..len {
        out.row_mut(t).copy_from_slice(m.row(start + t));
    }
    out
}

/// The averaged policy: capped predictions are averaged across replications
/// (averaging coefficients would not commute with the cap), then argmaxed
/// with ties broken toward the lowest action index.
#[derive(Debug, Clone)]
pub struct Policy {
    pub estimates: Vec<QEstimate>,
}

pub fn average_q(estimates: Vec<QEstimate>) -> Result<Policy> {
    let first = estimates
        .first()
        .ok_or_else(|| Error::Config("cannot average zero estimates".into()))?;
    for e in &estimates[1..] {
        if e.basis.family != first.basis.family
            || e.basis.raw_dim != first.basis.raw_dim
            || e.basis.action_space != first.basis.action_space
            || e.basis.trig_order != first.basis.trig_order
            || e.gamma != first.gamma
        {
            return Err(Error::Config("mismatched bases across replications".into()));
        }
    }
    Ok(Policy { estimates })
}

impl Policy {
    pub fn action_space(&self) -> &ActionSpace {
        &self.estimates[0].basis.action_space
    }

    pub fn n_replications(&self) -> usize {
        self.estimates.len()
    }

    /// Averaged capped Q value.
    pub fn q_bar(&self, raw_state: &[f64], prev_idx: usize, action: usize) -> Result<f64> {
        let mut acc = 0.0;
        for e in &self.estimates {
            acc += e.predict_q(raw_state, prev_idx, action)?;
        }
        Ok(acc / self.estimates.len() as f64)
    }

    /// Argmax action of the averaged Q; deterministic.
    pub fn act(&self, raw_state: &[f64], prev_idx: usize) -> Result<usize> {
        let na = self.action_space().len();
        let mut best = 0;
        let mut best_q = f64::NEG_INFINITY;
        for a in 0..na {
            let q = self.q_bar(raw_state, prev_idx, a)?;
            if q > best_q {
                best_q = q;
                best = a;
            }
        }
        Ok(best)
    }
}
