//! A desk-scale Monte-Carlo study over a (L, cost) grid: every cell
//! simulates fresh data per simulation index, estimates all strategies on
//! the estimation split, rolls them over the test split, and aggregates
//! means with Monte-Carlo standard errors. Per-task seeds derive from the
//! master seed, so any cell reproduces in isolation.
//!
//! The full-scale grid of the shipped defaults (2 L x 3 costs x 2 sample
//! sizes x 250 sims) runs through the CLI: `modelswitch mc`.
//!
//! Run with: `cargo run --release --example mc_study`

use modelswitch::bench::{run_mc_study, McCell, StudyConfig};
use modelswitch::features::{ActionSpace, BasisFamily, BasisSpec};
use modelswitch::fqi::FqiConfig;
use modelswitch::numcore::RidgeConfig;
use modelswitch::portfolio::PortfolioEnv;
use modelswitch::simgen::SimConfig;

fn main() {
    let study = StudyConfig {
        cells: vec![
            McCell {
                raw_dim: 1,
                cost: 0.0,
                n_est: 300,
            },
            McCell {
                raw_dim: 1,
                cost: 0.001,
                n_est: 300,
            },
            McCell {
                raw_dim: 5,
                cost: 0.001,
                n_est: 300,
            },
        ],
        sim_template: SimConfig {
            n_test: 500,
            n_assets: 100,
            ..SimConfig::default()
        },
        fqi_template: FqiConfig {
            gamma: 0.98,
            cap_b: f64::INFINITY,
            epsilon: 1e-5,
            max_iters: 500,
            n_replications: 5,
            ridge: RidgeConfig::fixed(0.0),
            basis: BasisSpec::new(BasisFamily::Additive, 1, ActionSpace::standard()).unwrap(),
            seed: 0,
        },
        env_template: PortfolioEnv::standard(100, 0.0),
        n_sims: 25,
        master_seed: 123,
    };
    let t0 = std::time::Instant::now();
    let report = run_mc_study(&study).unwrap();
    println!(
        "{} cells x {} sims in {:.1?}; failures: {}",
        report.cells.len(),
        report.n_sims,
        t0.elapsed(),
        report.failures.len()
    );
    println!(
        "\n{:<4} {:>7} {:>6} | {:<13} {:>10} {:>9} {:>9}",
        "L", "cost", "n_est", "strategy", "mean", "mc se", "switches"
    );
    for (c, cell) in report.cells.iter().enumerate() {
        for (s, name) in report.strategies.iter().enumerate() {
            let st = &report.stats[c][s];
            println!(
                "{:<4} {:>7} {:>6} | {:<13} {:>10.4} {:>9.4} {:>9.1}",
                cell.raw_dim,
                cell.cost,
                cell.n_est,
                name,
                st.mean_ann_reward,
                st.se,
                st.mean_switches
            );
        }
    }
}
