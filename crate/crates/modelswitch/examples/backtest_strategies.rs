//! Simulate, estimate, and roll every strategy over the held-out test
//! sample: the RL policy against the cost-blind Greedy rule, the three
//! fixed models, and the averaged fixed portfolio.
//!
//! Run with: `cargo run --example backtest_strategies`

use modelswitch::bench::estimate_and_roll;
use modelswitch::features::{ActionSpace, BasisFamily, BasisSpec};
use modelswitch::fqi::FqiConfig;
use modelswitch::linalg::Matrix;
use modelswitch::numcore::RidgeConfig;
use modelswitch::portfolio::PortfolioEnv;
use modelswitch::simgen::{gen_sample, SimConfig};

fn sub_rows(m: &Matrix, start: usize, len: usize) -> Matrix {
    let mut out = Matrix::zeros(len, m.n_cols());
    for t in 0..len {
        out.row_mut(t).copy_from_slice(m.row(start + t));
    }
    out
}

fn main() {
    let n_est = 500;
    let sim = SimConfig {
        n_est,
        n_test: 1000,
        raw_dim: 1,
        n_assets: 100,
        seed: 4,
        ..SimConfig::default()
    };
    let sample = gen_sample(&sim).unwrap();
    for cost in [0.0, 0.001] {
        let env = PortfolioEnv::standard(100, cost);
        let fqi_cfg = FqiConfig {
            gamma: 0.98,
            cap_b: f64::INFINITY,
            epsilon: 1e-5,
            max_iters: 500,
            n_replications: 5,
            ridge: RidgeConfig::fixed(0.0),
            basis: BasisSpec::new(BasisFamily::Additive, 1, ActionSpace::standard()).unwrap(),
            seed: 9,
        };
        let est_states = sub_rows(&sample.raw_states, 0, n_est + 1);
        let est_returns = sub_rows(&sample.returns, 0, n_est + 1);
        let rest = sample.raw_states.n_rows() - n_est;
        let test_states = sub_rows(&sample.raw_states, n_est, rest);
        let test_returns = sub_rows(&sample.returns, n_est, rest);
        let out = estimate_and_roll(
            &env,
            &fqi_cfg,
            &est_states,
            &est_returns,
            &test_states,
            &test_returns,
        )
        .unwrap();

        println!("\ncost = {cost} (per unit turnover)");
        println!(
            "{:<14} {:>14} {:>14} {:>9}",
            "strategy", "ann. reward", "ann. net ret", "switches"
        );
        for (name, res) in out.names.iter().zip(&out.results) {
            println!(
                "{:<14} {:>14.4} {:>14.4} {:>9}",
                name,
                252.0 * res.avg_reward,
                res.ann_net_return,
                res.switch_count
            );
        }
    }
}
