//! Covariate preprocessing: EWMA z-scores with the uncentered scale
//! recursion, then digitization onto the eight-value grid {0, 1/7, ..., 1}.
//!
//! Run with: `cargo run --example preprocess_covariates`

use modelswitch::ingest::{digitize, load_covariates, preprocess, ZScoreState};
use modelswitch::linalg::Matrix;

fn main() {
    // the z-score recursion on a trending series
    let mut state = ZScoreState::new(1, 0.95, false).unwrap();
    println!("{:>6} {:>10} {:>10}", "x", "z", "digitized");
    let mut x = 1.0;
    for t in 0..12 {
        x += 0.4 + if t % 3 == 0 { 0.8 } else { -0.2 };
        let z = state.step(&[x]).unwrap()[0];
        println!("{x:>6.2} {z:>10.4} {:>10.4}", digitize(z));
    }

    // the digitization grid
    println!("\nbin edges map z-scores onto j/7:");
    for z in [-4.0, -2.5, -1.5, -0.5, 0.0, 0.5, 1.5, 2.5, 4.0] {
        println!("  z = {z:>5.1} -> {:.4}", digitize(z));
    }

    // a csv with gaps: forward fill and leading-row drop
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cov.csv");
    std::fs::write(
        &path,
        "date,slow_series,fast_series\n\
         2024-01-02,1.00,0.10\n\
         2024-01-03,,0.20\n\
         2024-01-04,,0.15\n\
         2024-01-05,1.10,0.30\n\
         2024-01-08,,0.25\n",
    )
    .unwrap();
    let table = load_covariates(&path).unwrap();
    println!(
        "\nloaded {} rows; forward-filled cells per column: {:?}",
        table.values.n_rows(),
        table.fill_counts
    );

    let processed: Matrix = preprocess(&table.values, 0.99, false).unwrap();
    println!("processed values live on the grid:");
    for t in 0..processed.n_rows() {
        println!(
            "  {}: {:.4} {:.4}",
            table.index[t],
            processed[(t, 0)],
            processed[(t, 1)]
        );
    }
}
