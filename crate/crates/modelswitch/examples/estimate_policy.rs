//! Fit the switching policy on one simulated estimation sample: augment the
//! states with uniform action streams, price every candidate model along
//! each stream, run capped ridge fitted Q-iteration per replication, and
//! average the capped Q functions. The fitted rule is then probed across
//! the signal range and saved as a plain-text artifact.
//!
//! Run with: `cargo run --example estimate_policy`

use modelswitch::artifact::{load_policy, save_policy};
use modelswitch::bench::estimate_policy;
use modelswitch::features::{ActionSpace, BasisFamily, BasisSpec};
use modelswitch::fqi::FqiConfig;
use modelswitch::numcore::RidgeConfig;
use modelswitch::portfolio::PortfolioEnv;
use modelswitch::simgen::{gen_sample, SimConfig};

fn main() {
    let sim = SimConfig {
        n_est: 500,
        n_test: 0,
        raw_dim: 1,
        n_assets: 100,
        seed: 11,
        ..SimConfig::default()
    };
    let sample = gen_sample(&sim).unwrap();
    let env = PortfolioEnv::standard(100, 0.0005);
    let fqi_cfg = FqiConfig {
        gamma: 0.98,
        cap_b: f64::INFINITY,
        epsilon: 1e-5,
        max_iters: 500,
        n_replications: 5,
        ridge: RidgeConfig::fixed(0.0),
        basis: BasisSpec::new(BasisFamily::Additive, 1, ActionSpace::standard()).unwrap(),
        seed: 3,
    };

    let (policy, estimates) =
        estimate_policy(&env, &fqi_cfg, &sample.raw_states, &sample.returns).unwrap();
    for est in &estimates {
        println!(
            "replication {}: {} iterations, converged = {}",
            est.replication_id, est.iterations_run, est.converged
        );
    }

    // how the fitted rule reads the signal, for each incumbent model
    let space = policy.action_space().clone();
    println!("\nchosen model by signal level and incumbent:");
    print!("{:>8}", "signal");
    for prev in 0..space.len() {
        print!("  from {:>5}", space.label(prev));
    }
    println!();
    let mut s = -1.2;
    while s <= 1.2 {
        print!("{s:>8.2}");
        for prev in 0..space.len() {
            let a = policy.act(&[s], prev).unwrap();
            print!("  {:>10}", space.label(a));
        }
        println!();
        s += 0.4;
    }

    // round trip through the artifact
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("policy.txt");
    save_policy(&policy, &path).unwrap();
    let loaded = load_policy(&path).unwrap();
    assert_eq!(
        loaded.act(&[-1.0], 0).unwrap(),
        policy.act(&[-1.0], 0).unwrap()
    );
    println!(
        "\nartifact saved and reloaded: {} replications",
        loaded.n_replications()
    );
}
