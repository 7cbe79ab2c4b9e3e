//! The portfolio reward environment: per-action minimum-variance weights from
//! one-factor correlation models, price-drift and turnover costs, and
//! utility-based rewards.
//!
//! Timing convention used throughout (period `t` runs over the reward rows):
//! volatility is updated once per period from the realized returns of that
//! period, the target weights of every candidate model are computed from the
//! updated state, the previously held portfolio (the model picked at `t-1`)
//! is drifted through the period-`t` price relatives, and the reward for a
//! candidate action is the utility of its next-period net return after the
//! turnover cost of moving from the drifted holdings to the candidate's
//! target.

use crate::error::{Error, Result};
use crate::features::ActionSpace;
use crate::linalg::{dot, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub enum Utility {
    /// `r - (risk_aversion / 2) r^2`; the default aversion of 2 gives `r - r^2`.
    MeanVariance { risk_aversion: f64 },
    /// `ln(1 + r)`.
    Log,
}

impl Utility {
    pub fn mean_variance() -> Self {
        Utility::MeanVariance { risk_aversion: 2.0 }
    }
}

/// Model set and reward parameters.
#[derive(Debug, Clone)]
pub struct PortfolioEnv {
    pub action_space: ActionSpace,
    /// Correlation level `c` of each action's one-factor model, aligned with
    /// the action space order.
    pub correlation_levels: Vec<f64>,
    pub cost_rate: f64,
    pub utility: Utility,
    /// EWMA parameter of the squared-return volatility estimator.
    pub vol_lambda: f64,
    pub n_assets: usize,
    /// Number of leading return rows averaged to seed the EWMA.
    pub vol_warmup: usize,
}

impl PortfolioEnv {
    /// The shipped model set: `c = 0, 0.1, 0.75` under log utility.
    pub fn standard(n_assets: usize, cost_rate: f64) -> Self {
        PortfolioEnv {
            action_space: ActionSpace::standard(),
            correlation_levels: vec![0.0, 0.1, 0.75],
            cost_rate,
            utility: Utility::Log,
            vol_lambda: 0.98,
            n_assets,
            vol_warmup: 20,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.correlation_levels.len() != self.action_space.len() {
            return Err(Error::Config(format!(
                "{} correlation levels vs {} actions",
                self.correlation_levels.len(),
                self.action_space.len()
            )));
        }
        for &c in &self.correlation_levels {
            if !(0.0..1.0).contains(&c) {
                return Err(Error::Config(format!(
                    "correlation level {c} outside [0, 1)"
                )));
            }
        }
        if self.cost_rate < 0.0 || !self.cost_rate.is_finite() {
            return Err(Error::Config(format!(
                "cost rate {} must be >= 0",
                self.cost_rate
            )));
        }
        if self.vol_lambda.is_nan() || self.vol_lambda <= 0.0 || self.vol_lambda >= 1.0 {
            return Err(Error::Config(format!(
                "vol lambda {} outside (0, 1)",
                self.vol_lambda
            )));
        }
        if self.n_assets == 0 {
            return Err(Error::Config("n_assets must be positive".into()));
        }
        if let Utility::MeanVariance { risk_aversion } = self.utility {
            if !risk_aversion.is_finite() {
                return Err(Error::Config("risk aversion must be finite".into()));
            }
        }
        Ok(())
    }
}

/// EWMA state of per-asset squared returns.
#[derive(Debug, Clone, PartialEq)]
pub struct VolState {
    pub second_moments: Vec<f64>,
    /// Number of return rows absorbed so far (warm-up rows excluded).
    pub t: usize,
}

impl VolState {
    /// Seed the EWMA with the mean of the first `window` squared returns per
    /// asset (clamped to the rows available).
    pub fn warm_up(returns: &Matrix, window: usize) -> Result<VolState> {
        let rows = returns.n_rows().min(window.max(1));
        if rows == 0 {
            return Err(Error::Data(
                "cannot warm up volatility on an empty return matrix".into(),
            ));
        }
        let n = returns.n_cols();
        let mut m = vec![0.0; n];
        for t in 0..rows {
            for (i, r) in returns.row(t).iter().enumerate() {
                m[i] += r * r / rows as f64;
            }
        }
        if m.iter().any(|v| v.is_nan() || *v <= 0.0) {
            return Err(Error::Data(
                "volatility warm-up produced a nonpositive second moment".into(),
            ));
        }
        Ok(VolState {
            second_moments: m,
            t: 0,
        })
    }

    pub fn sigmas(&self) -> Vec<f64> {
        self.second_moments.iter().map(|m| m.sqrt()).collect()
    }
}

/// `m_i <- lambda m_i + (1 - lambda) r_i^2`.
pub fn update_vol(state: &VolState, returns: &[f64], lambda: f64) -> VolState {
    debug_assert_eq!(returns.len(), state.second_moments.len());
    VolState {
        second_moments: state
            .second_moments
            .iter()
            .zip(returns)
            .map(|(m, r)| lambda * m + (1.0 - lambda) * r * r)
            .collect(),
        t: state.t + 1,
    }
}

/// Minimum-variance weights for the one-factor correlation model
/// `Omega = (1 - c) I + c 1 1'`, through the rank-one inverse
/// `Omega^-1 = (1/(1-c)) [I - (c / (1 - c + c N)) 1 1']`.
///
/// For `c = 0` this is inverse-variance weighting. Weights are renormalized
/// to sum to one exactly at the end.
pub fn min_variance_weights(sigmas: &[f64], c: f64) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&c) {
        return Err(Error::InputDomain(format!(
            "correlation level {c} outside [0, 1)"
        )));
    }
    if sigmas.is_empty() {
        return Err(Error::InputDomain("empty volatility vector".into()));
    }
    if sigmas.iter().any(|s| !s.is_finite() || *s <= 0.0) {
        return Err(Error::InputDomain(
            "volatilities must be strictly positive".into(),
        ));
    }
    let n = sigmas.len() as f64;
    let inv: Vec<f64> = sigmas.iter().map(|s| 1.0 / s).collect();
    let s1: f64 = inv.iter().sum();
    let shrink = c * s1 / (1.0 - c + c * n);
    // Sigma^-1 1 up to the positive factor 1/(1-c), which cancels in the
    // normalization.
    let mut w: Vec<f64> = inv.iter().map(|i| i * (i - shrink)).collect();
    let total: f64 = w.iter().sum();
    if !total.is_finite() || total.abs() <= 0.0 {
        return Err(Error::Numerical(
            "minimum-variance normalizer vanished".into(),
        ));
    }
    for v in &mut w {
        *v /= total;
    }
    Ok(w)
}

/// Portfolio weights actually held, plus the model that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Holdings {
    pub weights: Vec<f64>,
    pub last_action: usize,
}

/// Post-drift weights `w_i pr_i / sum_j w_j pr_j`.
pub fn drifted_weights(prev: &Holdings, price_relatives: &[f64]) -> Result<Vec<f64>> {
    if prev.weights.len() != price_relatives.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights vs {} price relatives",
            prev.weights.len(),
            price_relatives.len()
        )));
    }
    if price_relatives.iter().any(|p| p.is_nan() || *p <= 0.0) {
        return Err(Error::InputDomain(
            "price relatives must be positive".into(),
        ));
    }
    let scaled: Vec<f64> = prev
        .weights
        .iter()
        .zip(price_relatives)
        .map(|(w, p)| w * p)
        .collect();
    let total: f64 = scaled.iter().sum();
    if !total.is_finite() || total <= 0.0 {
        return Err(Error::DegeneratePortfolio {
            period: 0,
            normalizer: total,
        });
    }
    Ok(scaled.into_iter().map(|v| v / total).collect())
}

/// `cost_rate * sum_i |target_i - drifted_i|`.
pub fn turnover_cost(target: &[f64], drifted: &[f64], cost_rate: f64) -> f64 {
    debug_assert_eq!(target.len(), drifted.len());
    cost_rate
        * target
            .iter()
            .zip(drifted)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
}

/// Utility of a net return.
pub fn reward(net_return: f64, utility: &Utility) -> Result<f64> {
    match utility {
        Utility::MeanVariance { risk_aversion } => {
            Ok(net_return - 0.5 * risk_aversion * net_return * net_return)
        }
        Utility::Log => {
            if net_return <= -1.0 {
                Err(Error::RewardDomain { net: net_return })
            } else {
                Ok((1.0 + net_return).ln())
            }
        }
    }
}

/// Rows that could not be priced normally.
#[derive(Debug, Clone, Default)]
pub struct RewardDiagnostics {
    /// Periods skipped because the drift normalizer was nonpositive
    /// (rewards set to zero there).
    pub skipped_periods: Vec<usize>,
    /// `(period, action)` pairs where log utility hit total loss; the reward
    /// was clamped to `ln(1e-12)`.
    pub flagged_rewards: Vec<(usize, usize)>,
}

/// Per-action reward vectors along a simulated action path.
///
/// `actions` holds `A_0 .. A_n` (length `n + 1`) and `returns` the aligned
/// `n + 1` return rows; the output vectors have length `n`. One shared
/// volatility path is updated per period (volatility depends on the data
/// only, never on the candidate action).
pub fn reward_panel(
    env: &PortfolioEnv,
    actions: &[usize],
    returns: &Matrix,
    vol_init: &VolState,
) -> Result<(Vec<Vec<f64>>, RewardDiagnostics)> {
    let (mut rewards, mut diags) = reward_panels(env, &[actions], returns, vol_init)?;
    Ok((
        rewards.pop().expect("one panel"),
        diags.pop().expect("one panel"),
    ))
}

/// Per-panel, per-action reward vectors.
pub type PanelRewards = Vec<Vec<f64>>;

/// [`reward_panel`] over several action paths at once; the volatility path,
/// model target weights and gross next-period returns are shared (they do
/// not depend on the actions), so pricing `N_A` replications costs little
/// more than pricing one.
pub fn reward_panels(
    env: &PortfolioEnv,
    action_paths: &[&[usize]],
    returns: &Matrix,
    vol_init: &VolState,
) -> Result<(Vec<PanelRewards>, Vec<RewardDiagnostics>)> {
    env.validate()?;
    let n_total = returns.n_rows();
    if n_total < 2 {
        return Err(Error::Data("need at least two return rows".into()));
    }
    if returns.n_cols() != env.n_assets {
        return Err(Error::DimensionMismatch(format!(
            "{} return columns vs {} configured assets",
            returns.n_cols(),
            env.n_assets
        )));
    }
    let na = env.action_space.len();
    for actions in action_paths {
        if actions.len() != n_total {
            return Err(Error::DimensionMismatch(format!(
                "{} actions vs {} return rows",
                actions.len(),
                n_total
            )));
        }
        if let Some(bad) = actions.iter().find(|a| **a >= na) {
            return Err(Error::InputDomain(format!(
                "action index {bad} out of range"
            )));
        }
    }
    let n = n_total - 1;
    let n_panels = action_paths.len();
    let mut rewards = vec![vec![vec![0.0; n]; na]; n_panels];
    let mut diags = vec![RewardDiagnostics::default(); n_panels];
    let mut vol = vol_init.clone();
    let mut prev_targets: Vec<Vec<f64>> = Vec::new();
    let mut pr = vec![0.0; env.n_assets];
    for i in 0..n {
        vol = update_vol(&vol, returns.row(i), env.vol_lambda);
        let sig = vol.sigmas();
        let targets: Vec<Vec<f64>> = env
            .correlation_levels
            .iter()
            .map(|&c| min_variance_weights(&sig, c))
            .collect::<Result<_>>()?;
        let next = returns.row(i + 1);
        let gross: Vec<f64> = targets.iter().map(|w| dot(w, next)).collect();
        if i > 0 {
            for (p, r) in pr.iter_mut().zip(returns.row(i)) {
                *p = 1.0 + r;
            }
        }
        for (panel, actions) in action_paths.iter().enumerate() {
            let drifted = if i == 0 {
                // zero prior drift: start from the A_0 model's own weights
                Ok(targets[actions[0]].clone())
            } else {
                let held = Holdings {
                    weights: prev_targets[actions[i]].clone(),
                    last_action: actions[i],
                };
                drifted_weights(&held, &pr)
            };
            let drifted = match drifted {
                Ok(w) => w,
                Err(Error::DegeneratePortfolio { .. }) => {
                    diags[panel].skipped_periods.push(i);
                    continue;
                }
                Err(e) => return Err(e),
            };
            for (a, target) in targets.iter().enumerate() {
                let cost = turnover_cost(target, &drifted, env.cost_rate);
                let net = gross[a] - cost;
                rewards[panel][a][i] = match reward(net, &env.utility) {
                    Ok(r) => r,
                    Err(Error::RewardDomain { .. }) => {
                        diags[panel].flagged_rewards.push((i, a));
                        (1e-12f64).ln()
                    }
                    Err(e) => return Err(e),
                };
            }
        }
        prev_targets = targets;
    }
    Ok((rewards, diags))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vol_fixed_point_and_decay() {
        let s0 = VolState {
            second_moments: vec![0.04],
            t: 0,
        };
        let s1 = update_vol(&s0, &[0.2], 0.98);
        assert!(
            (s1.second_moments[0] - 0.04).abs() < 1e-15,
            "constant returns fix the EWMA"
        );
        let mut s = VolState {
            second_moments: vec![1.0],
            t: 0,
        };
        for _ in 0..3 {
            s = update_vol(&s, &[0.0], 0.9);
        }
        assert!((s.second_moments[0] - 0.9f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn vol_update_arithmetic() {
        let s = update_vol(
            &VolState {
                second_moments: vec![0.01],
                t: 0,
            },
            &[0.2],
            0.98,
        );
        assert!((s.second_moments[0] - 0.0106).abs() < 1e-12);
    }

    #[test]
    fn equal_vols_give_equal_weights() {
        for c in [0.0, 0.3, 0.9] {
            let w = min_variance_weights(&[1.0, 1.0], c).unwrap();
            assert!((w[0] - 0.5).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn c_zero_is_inverse_variance() {
        let w = min_variance_weights(&[1.0, 2.0], 0.0).unwrap();
        assert!((w[0] - 0.8).abs() < 1e-12);
        assert!((w[1] - 0.2).abs() < 1e-12);
    }

    /// Dense-inverse oracle: build Sigma = D Omega D, invert by Gauss-Jordan,
    /// normalize Sigma^-1 1.
    fn dense_min_variance(sigmas: &[f64], c: f64) -> Vec<f64> {
        let n = sigmas.len();
        let mut a = vec![vec![0.0; 2 * n]; n];
        for i in 0..n {
            for j in 0..n {
                let omega = if i == j { 1.0 } else { c };
                a[i][j] = sigmas[i] * sigmas[j] * omega;
            }
            a[i][n + i] = 1.0;
        }
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
                .unwrap();
            a.swap(col, piv);
            let d = a[col][col];
            for v in a[col].iter_mut() {
                *v /= d;
            }
            for r in 0..n {
                if r != col {
                    let f = a[r][col];
                    for k in 0..2 * n {
                        a[r][k] -= f * a[col][k];
                    }
                }
            }
        }
        let mut w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][n + j]).sum()).collect();
        let tot: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= tot);
        w
    }

    #[test]
    fn rank_one_matches_dense_solve() {
        let w = min_variance_weights(&[1.0, 1.0, 2.0], 0.5).unwrap();
        let oracle = dense_min_variance(&[1.0, 1.0, 2.0], 0.5);
        for (a, b) in w.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_one_matches_dense_on_random_cases() {
        // deterministic pseudo-random sweep, n <= 12 here; the full 200-case
        // n <= 50 sweep runs in the acceptance suite
        let mut state = 0x12345678u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for case in 0..50 {
            let n = 2 + (case % 11);
            let sigmas: Vec<f64> = (0..n).map(|_| 0.05 + next() * 2.0).collect();
            let c = next() * 0.95;
            let w = min_variance_weights(&sigmas, c).unwrap();
            let oracle = dense_min_variance(&sigmas, c);
            for (a, b) in w.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-10, "case {case}: {a} vs {b}");
            }
            let sum: f64 = w.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn high_correlation_shorts_high_variance_assets() {
        // the simulation volatility profile sigma_i = s (1 + (i-1)/N)
        let n = 500;
        let s = 0.3 / (252f64).sqrt();
        let sigmas: Vec<f64> = (0..n).map(|i| s * (1.0 + i as f64 / n as f64)).collect();
        let w0 = min_variance_weights(&sigmas, 0.0).unwrap();
        assert!(w0.iter().all(|v| *v > 0.0));
        let w75 = min_variance_weights(&sigmas, 0.75).unwrap();
        assert!(w75.iter().any(|v| *v < 0.0));
        assert!(
            w75.last().unwrap() < &0.0,
            "highest variance asset is shorted"
        );
    }

    #[test]
    fn invalid_min_variance_inputs() {
        assert!(min_variance_weights(&[1.0], 1.0).is_err());
        assert!(min_variance_weights(&[0.0, 1.0], 0.5).is_err());
        assert!(min_variance_weights(&[-1.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn drift_basics() {
        let h = Holdings {
            weights: vec![0.5, 0.5],
            last_action: 0,
        };
        let same = drifted_weights(&h, &[1.3, 1.3]).unwrap();
        assert_eq!(same, vec![0.5, 0.5]);
        let moved = drifted_weights(&h, &[1.1, 0.9]).unwrap();
        assert!((moved[0] - 0.55).abs() < 1e-12 && (moved[1] - 0.45).abs() < 1e-12);
        let solo = Holdings {
            weights: vec![1.0, 0.0],
            last_action: 0,
        };
        assert_eq!(drifted_weights(&solo, &[1.7, 0.4]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn drift_degenerates_with_short_weights() {
        let h = Holdings {
            weights: vec![2.0, -1.0],
            last_action: 0,
        };
        // long leg collapses, short leg rallies: normalizer goes nonpositive
        let err = drifted_weights(&h, &[0.1, 1.5]).unwrap_err();
        assert!(matches!(err, Error::DegeneratePortfolio { .. }));
    }

    #[test]
    fn turnover_cost_formula() {
        assert_eq!(turnover_cost(&[1.0, 0.0], &[1.0, 0.0], 5e-4), 0.0);
        assert!((turnover_cost(&[1.0, 0.0], &[0.0, 1.0], 5e-4) - 1e-3).abs() < 1e-18);
        assert_eq!(turnover_cost(&[0.3, 0.7], &[0.6, 0.4], 0.0), 0.0);
    }

    #[test]
    fn turnover_cost_is_monotone() {
        let target = [0.7, 0.3];
        let near = [0.6, 0.4];
        let far = [0.1, 0.9];
        // nondecreasing in the cost rate
        assert!(turnover_cost(&target, &near, 1e-3) >= turnover_cost(&target, &near, 5e-4));
        // nondecreasing in the l1 distance
        assert!(turnover_cost(&target, &far, 5e-4) >= turnover_cost(&target, &near, 5e-4));
    }

    #[test]
    fn reward_formulas() {
        let mv = Utility::mean_variance();
        assert_eq!(reward(0.0, &mv).unwrap(), 0.0);
        assert_eq!(reward(0.0, &Utility::Log).unwrap(), 0.0);
        assert!((reward(0.01, &mv).unwrap() - 0.0099).abs() < 1e-15);
        assert!((reward(0.01, &Utility::Log).unwrap() - 1.01f64.ln()).abs() < 1e-15);
        assert!(matches!(
            reward(-1.0, &Utility::Log),
            Err(Error::RewardDomain { .. })
        ));
        // general risk aversion reduces to r - r^2 at aversion 2
        let mv4 = Utility::MeanVariance { risk_aversion: 4.0 };
        assert!((reward(0.1, &mv4).unwrap() - (0.1 - 2.0 * 0.01)).abs() < 1e-15);
    }

    #[test]
    fn discount_half_life() {
        assert!((0.98f64.powf(34.31) - 0.5).abs() < 1e-3);
    }

    fn tiny_env(cost_rate: f64) -> PortfolioEnv {
        let mut env = PortfolioEnv::standard(2, cost_rate);
        env.vol_warmup = 1;
        env
    }

    #[test]
    fn zero_cost_rewards_ignore_previous_action() {
        let env = tiny_env(0.0);
        let returns = Matrix::from_rows(vec![
            vec![0.01, -0.02],
            vec![0.005, 0.01],
            vec![-0.01, 0.02],
            vec![0.02, -0.005],
        ])
        .unwrap();
        let vol = VolState::warm_up(&returns, 1).unwrap();
        let (ra, _) = reward_panel(&env, &[0, 1, 2, 0], &returns, &vol).unwrap();
        let (rb, _) = reward_panel(&env, &[2, 0, 1, 1], &returns, &vol).unwrap();
        for a in 0..3 {
            for t in 0..3 {
                assert!((ra[a][t] - rb[a][t]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn single_asset_rewards_identical_across_actions() {
        let mut env = PortfolioEnv::standard(1, 0.0);
        env.vol_warmup = 1;
        let returns = Matrix::from_rows(vec![vec![0.01], vec![-0.02], vec![0.015]]).unwrap();
        let vol = VolState::warm_up(&returns, 1).unwrap();
        let (r, _) = reward_panel(&env, &[0, 1, 2], &returns, &vol).unwrap();
        for t in 0..2 {
            assert_eq!(r[0][t], r[1][t]);
            assert_eq!(r[1][t], r[2][t]);
        }
    }

    #[test]
    fn single_period_hand_walkthrough() {
        // N = 2 assets, one reward period, cost 10 bp, log utility. Every
        // number below is recomputed with scalar arithmetic only.
        let mut env = PortfolioEnv::standard(2, 1e-3);
        env.vol_warmup = 1;
        env.correlation_levels = vec![0.0, 0.1, 0.75];
        let r1 = [0.02, -0.01];
        let r2 = [0.01, 0.03];
        let returns = Matrix::from_rows(vec![r1.to_vec(), r2.to_vec()]).unwrap();
        let vol = VolState::warm_up(&returns, 1).unwrap();
        // warm-up m = r1^2; after the period-1 update m stays r1^2
        let m = [r1[0] * r1[0], r1[1] * r1[1]];
        let sig = [m[0].sqrt(), m[1].sqrt()];
        // action a = c = 0: inverse variance
        let iv = [1.0 / m[0], 1.0 / m[1]];
        let w0 = [iv[0] / (iv[0] + iv[1]), iv[1] / (iv[0] + iv[1])];
        // A_0 = 1 (c = 0.1), zero prior drift
        let c = 0.1;
        let inv = [1.0 / sig[0], 1.0 / sig[1]];
        let shrink = c * (inv[0] + inv[1]) / (1.0 - c + c * 2.0);
        let raw = [inv[0] * (inv[0] - shrink), inv[1] * (inv[1] - shrink)];
        let w_prev = [raw[0] / (raw[0] + raw[1]), raw[1] / (raw[0] + raw[1])];
        let cost = 1e-3 * ((w0[0] - w_prev[0]).abs() + (w0[1] - w_prev[1]).abs());
        let net = w0[0] * r2[0] + w0[1] * r2[1] - cost;
        let want = (1.0 + net).ln();
        let (rewards, diag) = reward_panel(&env, &[1, 0], &returns, &vol).unwrap();
        assert!(diag.skipped_periods.is_empty());
        assert!(
            (rewards[0][0] - want).abs() < 1e-12,
            "{} vs {want}",
            rewards[0][0]
        );
    }

    #[test]
    fn weights_sum_to_one_property() {
        let mut state = 99u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let n = 2 + (next() * 30.0) as usize;
            let sigmas: Vec<f64> = (0..n).map(|_| 0.01 + next()).collect();
            let c = next() * 0.99;
            let w = min_variance_weights(&sigmas, c).unwrap();
            let sum: f64 = w.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-10);
        }
    }
}
