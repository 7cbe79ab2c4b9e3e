//! Dynamic model selection under switching costs.
//!
//! This crate learns a state-dependent rule for switching between competing
//! models (here: portfolio covariance models) when changing model is costly.
//! The estimation core is batch fitted Q-iteration with ridge-penalized,
//! optionally capped linear projections; the surrounding machinery covers the
//! portfolio reward environment, a synthetic two-regime data generator, a
//! covariate preprocessing pipeline, baseline strategies, and a seeded
//! Monte-Carlo study harness.
//!
//! The high-level flow is
//!
//! ```text
//! simgen / ingest  ->  fqi::augment  ->  portfolio::reward_panel
//!      -> fqi::fqi_run x N_A -> fqi::average_q -> bench::rollout -> report
//! ```
//!
//! Every stage is deterministic given the seeds in its configuration; the
//! `bench` and `cli` layers derive per-task seeds so that runs are
//! reproducible independently of worker count.
//!
//! See the `examples/` directory for one runnable example per capability,
//! or use the thin `modelswitch` binary which exposes the same pipeline as
//! subcommands (`simulate`, `preprocess`, `estimate`, `backtest`, `mc`).

pub mod artifact;
pub mod bench;
pub mod cli;
pub mod config;
pub mod csvio;
pub mod error;
pub mod features;
pub mod fqi;
pub mod ingest;
pub mod linalg;
pub mod numcore;
pub mod portfolio;
pub mod seeds;
pub mod simgen;

pub use error::{Error, Result};
pub use linalg::Matrix;
